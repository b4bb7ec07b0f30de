// include/terncorr/verify.hpp: enumeration oracles, the bound checker and the
// seeded shift sampler used by the command layer.

#pragma once

#include <terncorr/eisenstein.hpp>
#include <terncorr/error.hpp>
#include <terncorr/field.hpp>
#include <terncorr/quadform.hpp>
#include <terncorr/sequence.hpp>

#include <algorithm>
#include <array>
#include <cstdint>
#include <optional>
#include <random>
#include <set>
#include <span>
#include <vector>

namespace terncorr {

/// #{x : q(x) = c} for c = 0, 1, 2 by enumerating GF(3^n).
/// With tables, x = alpha^j and Tr(c alpha^m) is read from the m-sequence,
/// so q(alpha^j) = s[log c1 + j e1] + s[log c2 + j e2]; otherwise each x is evaluated.
inline std::array<std::uint64_t, 3> brute_force_counts(const QuadFormSpec &qf, const Sequence *mseq = nullptr) {
    const FieldCtx &ctx = qf.field();
    std::array<std::uint64_t, 3> counts{};
    if (ctx.has_tables() && mseq != nullptr && mseq->period() == ctx.order()) {
        const std::uint64_t L = ctx.order();
        const std::uint64_t e1 = qf.e1 % L;
        const std::uint64_t e2 = qf.e2 % L;
        const std::uint64_t l1 = ctx.log(qf.c1);
        const std::uint64_t l2 = ctx.log(qf.c2);
        std::uint64_t p1 = l1;
        std::uint64_t p2 = l2;
        counts[0] = 1; // x = 0
        for (std::uint64_t j = 0; j < L; ++j) {
            ++counts[((*mseq)[p1] + (*mseq)[p2]) % 3];
            p1 += e1;
            if (p1 >= L) {
                p1 -= L;
            }
            p2 += e2;
            if (p2 >= L) {
                p2 -= L;
            }
        }
        return counts;
    }
    for (std::uint64_t idx = 0; idx < ctx.size(); ++idx) {
        ++counts[evaluate(qf, ctx.element(idx))];
    }
    return counts;
}

inline EisensteinValue character_sum_from_counts(const std::array<std::uint64_t, 3> &counts) {
    return EisensteinValue::from_counts(static_cast<std::int64_t>(counts[0]), static_cast<std::int64_t>(counts[1]),
                                        static_cast<std::int64_t>(counts[2]));
}

struct BoundResult {
    bool pass = true;
    std::uint64_t max_mag2 = 0;
    std::uint64_t argmax_tau = 0;
    std::optional<SpectrumEntry> witness; // first violation, in tau order
};

/// Exact check mag2(C(tau)) <= bound_squared over every entry.
inline BoundResult check_bound(std::span<const SpectrumEntry> entries, std::uint64_t bound_squared) {
    BoundResult res;
    for (const auto &e : entries) {
        if (e.mag2 > res.max_mag2 || (e.mag2 == res.max_mag2 && e.tau < res.argmax_tau)) {
            res.max_mag2 = e.mag2;
            res.argmax_tau = e.tau;
        }
        if (e.mag2 > bound_squared && !res.witness) {
            res.pass = false;
            res.witness = e;
        }
    }
    return res;
}

/// Uniform integer in [0, bound) from mt19937_64 by rejection of the top partial block.
inline std::uint64_t uniform_below(std::mt19937_64 &rng, std::uint64_t bound) {
    const std::uint64_t limit = UINT64_MAX - (UINT64_MAX % bound + 1) % bound;
    for (;;) {
        const std::uint64_t v = rng();
        if (v <= limit) {
            return v % bound;
        }
    }
}

/// count distinct shifts in [0, period), seeded, returned in ascending order.
inline std::vector<std::uint64_t> sample_shifts(std::uint64_t period, std::uint64_t count, std::uint64_t seed) {
    if (count >= period) {
        std::vector<std::uint64_t> all(period);
        for (std::uint64_t t = 0; t < period; ++t) {
            all[t] = t;
        }
        return all;
    }
    std::mt19937_64 rng(seed);
    std::set<std::uint64_t> picked;
    while (picked.size() < count) {
        picked.insert(uniform_below(rng, period));
    }
    return {picked.begin(), picked.end()};
}

/// count distinct elements drawn from a sorted candidate list, ascending.
inline std::vector<std::uint64_t> subsample(std::span<const std::uint64_t> candidates, std::uint64_t count,
                                            std::uint64_t seed) {
    if (count >= candidates.size()) {
        return {candidates.begin(), candidates.end()};
    }
    std::vector<std::uint64_t> out;
    for (auto i : sample_shifts(candidates.size(), count, seed)) {
        out.push_back(candidates[i]);
    }
    return out;
}

} // namespace terncorr
