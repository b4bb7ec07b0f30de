// include/terncorr/eisenstein.hpp: exact values x + y*omega, omega = exp(2*pi*i/3).

#pragma once

#include <terncorr/error.hpp>
#include <terncorr/gf3.hpp>

#include <cmath>
#include <complex>
#include <cstdint>
#include <ostream>
#include <string>

namespace terncorr {

/// Canonical Eisenstein integer x + y*omega; omega^2 is always folded to -1 - omega.
struct EisensteinValue {
    std::int64_t x = 0;
    std::int64_t y = 0;

    static constexpr EisensteinValue omega_pow(Trit c) noexcept {
        switch (c % 3) {
        case 0: return {1, 0};
        case 1: return {0, 1};
        default: return {-1, -1};
        }
    }

    /// n0 + n1*omega + n2*omega^2 reduced to canonical form.
    static constexpr EisensteinValue from_counts(std::int64_t n0, std::int64_t n1, std::int64_t n2) noexcept {
        return {n0 - n2, n1 - n2};
    }

    [[nodiscard]] constexpr bool is_real() const noexcept { return y == 0; }

    [[nodiscard]] constexpr EisensteinValue times_omega() const noexcept { return {-y, x - y}; }

    /// Exact halving; throws ParityViolation when either coordinate is odd.
    [[nodiscard]] EisensteinValue halved() const {
        if (x % 2 != 0 || y % 2 != 0) {
            throw Error(ErrorCode::ParityViolation,
                        "(" + std::to_string(x) + ", " + std::to_string(y) + ") is not divisible by 2");
        }
        return {x / 2, y / 2};
    }

    [[nodiscard]] std::complex<double> to_complex() const noexcept {
        const double s = std::sqrt(3.0) / 2.0;
        return {static_cast<double>(x) - 0.5 * static_cast<double>(y), s * static_cast<double>(y)};
    }

    friend constexpr EisensteinValue operator+(EisensteinValue a, EisensteinValue b) noexcept {
        return {a.x + b.x, a.y + b.y};
    }
    friend constexpr EisensteinValue operator-(EisensteinValue a, EisensteinValue b) noexcept {
        return {a.x - b.x, a.y - b.y};
    }
    friend constexpr EisensteinValue operator-(EisensteinValue a) noexcept { return {-a.x, -a.y}; }
    friend constexpr EisensteinValue operator*(EisensteinValue a, EisensteinValue b) noexcept {
        // (a + b w)(c + d w) = ac - bd + (ad + bc - bd) w
        return {a.x * b.x - a.y * b.y, a.x * b.y + a.y * b.x - a.y * b.y};
    }
    friend constexpr EisensteinValue operator*(std::int64_t s, EisensteinValue a) noexcept {
        return {s * a.x, s * a.y};
    }
    EisensteinValue &operator+=(EisensteinValue o) noexcept {
        x += o.x;
        y += o.y;
        return *this;
    }

    friend constexpr bool operator==(const EisensteinValue &, const EisensteinValue &) = default;

    friend std::ostream &operator<<(std::ostream &os, const EisensteinValue &v) {
        return os << '(' << v.x << ", " << v.y << ')';
    }
};

/// |x + y*omega|^2 = x^2 - xy + y^2.
inline std::uint64_t mag2(EisensteinValue v) {
    const __int128 x = v.x;
    const __int128 y = v.y;
    const __int128 m = x * x - x * y + y * y;
    if (m > static_cast<__int128>(UINT64_MAX)) {
        throw Error(ErrorCode::Overflow, "squared magnitude exceeds 64 bits");
    }
    return static_cast<std::uint64_t>(m);
}

} // namespace terncorr
