// include/terncorr/sequence.hpp: m-sequences, decimation and exact cross-correlation
// by direct summation over one period.

#pragma once

#include <terncorr/eisenstein.hpp>
#include <terncorr/error.hpp>
#include <terncorr/field.hpp>
#include <terncorr/parallel.hpp>
#include <terncorr/params.hpp>

#include <array>
#include <cstdint>
#include <numeric>
#include <string>
#include <vector>

namespace terncorr {

inline constexpr std::uint64_t kDefaultWorkBudget = 1'000'000'000;
// 3^16 - 1 symbols (43 MB) is the largest m-sequence materialised by default.
inline constexpr std::uint64_t kDefaultMaxSequenceLength = 43'046'720;

struct Sequence {
    std::vector<Trit> values;
    std::uint64_t least_period = 0;

    [[nodiscard]] std::uint64_t period() const noexcept { return values.size(); }
    Trit operator[](std::uint64_t t) const noexcept { return values[t]; }
};

struct SpectrumEntry {
    std::uint64_t tau = 0;
    EisensteinValue c_d;
    std::uint64_t mag2 = 0;
};

/// s_t = Tr(alpha^t), t = 0 .. 3^n - 2.
inline Sequence m_sequence(const FieldCtx &ctx, std::uint64_t max_length = kDefaultMaxSequenceLength) {
    if (ctx.order() > max_length) {
        throw Error(ErrorCode::FeasibilityRefused,
                    "m-sequence of period " + std::to_string(ctx.order()) + " exceeds length limit " +
                        std::to_string(max_length));
    }
    Sequence s;
    s.values.resize(ctx.order());
    s.least_period = ctx.order();
    FieldElement power = ctx.one();
    for (std::uint64_t t = 0; t < ctx.order(); ++t) {
        s.values[t] = ctx.trace(power);
        power = ctx.mul_alpha(power);
    }
    return s;
}

/// t -> s_{dt mod L}, materialised over the full index range L.
inline Sequence decimate(const Sequence &s, std::uint64_t d) {
    if (d == 0) {
        throw Error(ErrorCode::InvalidArgument, "decimation must be positive");
    }
    const std::uint64_t L = s.period();
    Sequence out;
    out.values.resize(L);
    std::uint64_t idx = 0;
    const std::uint64_t step = d % L;
    for (std::uint64_t t = 0; t < L; ++t) {
        out.values[t] = s.values[idx];
        idx += step;
        if (idx >= L) {
            idx -= L;
        }
    }
    out.least_period = L / std::gcd(d, L);
    return out;
}

/// Occurrences of a_{t+tau} - b_t = 0, 1, 2 over one period.
inline std::array<std::uint64_t, 3> difference_counts(const Sequence &a, const Sequence &b, std::uint64_t tau) {
    if (a.period() != b.period()) {
        throw Error(ErrorCode::LengthMismatch,
                    std::to_string(a.period()) + " vs " + std::to_string(b.period()));
    }
    const std::uint64_t L = a.period();
    if (tau >= L) {
        throw Error(ErrorCode::InvalidArgument, "shift out of range");
    }
    std::array<std::uint64_t, 3> counts{};
    const Trit *av = a.values.data();
    const Trit *bv = b.values.data();
    const std::uint64_t split = L - tau;
    for (std::uint64_t t = 0; t < split; ++t) {
        ++counts[(av[t + tau] + 3 - bv[t]) % 3];
    }
    for (std::uint64_t t = split; t < L; ++t) {
        ++counts[(av[t + tau - L] + 3 - bv[t]) % 3];
    }
    return counts;
}

/// C_{a,b}(tau) = sum_t omega^{a_{t+tau} - b_t}.
inline EisensteinValue cross_correlation(const Sequence &a, const Sequence &b, std::uint64_t tau) {
    const auto c = difference_counts(a, b, tau);
    return EisensteinValue::from_counts(static_cast<std::int64_t>(c[0]), static_cast<std::int64_t>(c[1]),
                                        static_cast<std::int64_t>(c[2]));
}

/// C_{a,b}(tau) for every tau; refuses when L^2 exceeds the work budget.
inline std::vector<SpectrumEntry> spectrum_direct(const Sequence &a, const Sequence &b,
                                                  std::uint64_t budget = kDefaultWorkBudget, unsigned workers = 0) {
    if (a.period() != b.period()) {
        throw Error(ErrorCode::LengthMismatch, "sequences differ in period");
    }
    const std::uint64_t L = a.period();
    if (static_cast<num::u128>(L) * L > budget) {
        throw Error(ErrorCode::FeasibilityRefused, "direct spectrum needs " + std::to_string(L) + "^2 operations, budget " +
                                                       std::to_string(budget));
    }
    std::vector<SpectrumEntry> out(L);
    parallel_chunks(
        L,
        [&](std::uint64_t begin, std::uint64_t end) {
            for (std::uint64_t tau = begin; tau < end; ++tau) {
                const EisensteinValue v = cross_correlation(a, b, tau);
                out[tau] = {tau, v, mag2(v)};
            }
        },
        workers);
    return out;
}

inline std::vector<SpectrumEntry> spectrum_direct(const FieldCtx &ctx, const DecimationParams &params,
                                                  std::uint64_t budget = kDefaultWorkBudget, unsigned workers = 0) {
    if (ctx.degree() != params.n) {
        throw Error(ErrorCode::ContextMismatch, "field degree differs from n = 4k");
    }
    if (static_cast<num::u128>(ctx.order()) * ctx.order() > budget) {
        throw Error(ErrorCode::FeasibilityRefused, "direct spectrum at n = " + std::to_string(params.n) +
                                                       " exceeds budget " + std::to_string(budget));
    }
    const Sequence s = m_sequence(ctx);
    return spectrum_direct(s, decimate(s, params.d), budget, workers);
}

inline std::string to_trit_string(const Sequence &s) {
    std::string out(s.values.size(), '0');
    for (std::size_t i = 0; i < s.values.size(); ++i) {
        out[i] = static_cast<char>('0' + s.values[i]);
    }
    return out;
}

} // namespace terncorr
