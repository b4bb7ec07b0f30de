// include/terncorr/params.hpp: the decimation family d = (3^{2k}+1)^2 / 20, n = 4k, k odd.

#pragma once

#include <terncorr/error.hpp>
#include <terncorr/numeric.hpp>

#include <cstddef>
#include <cstdint>
#include <string>

namespace terncorr {

// Largest k whose n = 4k keeps 3^n - 1 inside 64 bits.
inline constexpr unsigned kMaxK = 9;

/// Exponent data for one member of the family. e1 = 3^{2(k+1)}+1 and
/// e2 = 3^{2k}+1 act on GF(3^n) as x -> x^{3^shift} * x.
struct DecimationParams {
    unsigned k = 0;
    std::size_t n = 0;
    std::uint64_t order = 0; // 3^n - 1
    std::uint64_t d = 0;
    std::uint64_t e1 = 0;
    std::uint64_t e2 = 0;

    [[nodiscard]] std::size_t shift1() const noexcept { return (2 * (k + 1)) % n; }
    [[nodiscard]] std::size_t shift2() const noexcept { return (2 * k) % n; }
    /// 3^{n/2}
    [[nodiscard]] std::uint64_t sqrt_size() const { return num::pow3(static_cast<unsigned>(n / 2)); }
    /// 5 * 3^{n/2} + 1
    [[nodiscard]] std::uint64_t bound() const { return 5 * sqrt_size() + 1; }
    [[nodiscard]] std::uint64_t bound_squared() const { return bound() * bound(); }
};

/// Integer identities the family relies on, evaluated without any field.
struct ParameterIdentities {
    bool twenty_divides_square = false; // 20 | (3^{2k}+1)^2
    bool congruence = false;            // d * e1 = e2 (mod 3^n - 1)
    bool gcd_is_two = false;            // gcd(e1, 3^n - 1) = 2
    num::u128 gcd = 0;
};

inline ParameterIdentities parameter_identities(unsigned k) {
    if (k == 0 || k > kMaxK) {
        throw Error(ErrorCode::Overflow, "k must lie in [1, " + std::to_string(kMaxK) + "]");
    }
    using num::u128;
    ParameterIdentities out;
    const u128 e2 = num::pow3_wide(2 * k) + 1;
    const u128 e1 = num::pow3_wide(2 * (k + 1)) + 1;
    const u128 order = num::pow3_wide(4 * k) - 1;
    const u128 square = e2 * e2;
    out.twenty_divides_square = square % 20 == 0;
    if (out.twenty_divides_square) {
        const u128 d = square / 20;
        out.congruence = (d % order) * (e1 % order) % order == e2 % order;
    }
    out.gcd = num::gcd_wide(e1, order);
    out.gcd_is_two = out.gcd == 2;
    return out;
}

inline DecimationParams decimation_params(unsigned k) {
    if (k == 0) {
        throw Error(ErrorCode::InvalidArgument, "k must be positive");
    }
    if (k % 2 == 0) {
        throw Error(ErrorCode::KNotOdd, "k = " + std::to_string(k) + ": 20 does not divide (3^{2k}+1)^2");
    }
    if (k > kMaxK) {
        throw Error(ErrorCode::Overflow, "k = " + std::to_string(k) + " exceeds the 64-bit range (k <= " +
                                             std::to_string(kMaxK) + ")");
    }
    const ParameterIdentities ids = parameter_identities(k);
    if (!ids.twenty_divides_square || !ids.congruence || !ids.gcd_is_two) {
        throw Error(ErrorCode::InvalidArgument, "parameter identities fail for k = " + std::to_string(k));
    }
    DecimationParams p;
    p.k = k;
    p.n = 4 * static_cast<std::size_t>(k);
    p.order = num::pow3(4 * k) - 1;
    const std::uint64_t e2 = num::pow3(2 * k) + 1;
    p.d = static_cast<std::uint64_t>(static_cast<num::u128>(e2) * e2 / 20);
    p.e1 = num::pow3(2 * (k + 1)) + 1;
    p.e2 = e2;
    return p;
}

} // namespace terncorr
