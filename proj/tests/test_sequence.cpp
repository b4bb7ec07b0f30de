#include "oracle.hpp"

#include <terncorr/sequence.hpp>
#include <terncorr/verify.hpp>

#include <gtest/gtest.h>

#include <map>
#include <random>

using namespace terncorr;

namespace {

const FieldCtx &gf81() {
    static const FieldCtx ctx = make_field(4);
    return ctx;
}

const FieldCtx &gf3_12() {
    static const FieldCtx ctx = make_field(12);
    return ctx;
}

const Sequence &mseq12() {
    static const Sequence s = m_sequence(gf3_12());
    return s;
}

std::vector<Trit> prefix(const Sequence &s, std::size_t n) { return {s.values.begin(), s.values.begin() + n}; }

} // namespace

TEST(MSequence, Gf81Basics) {
    const Sequence s = m_sequence(gf81());
    EXPECT_EQ(s.period(), 80U);
    EXPECT_EQ(s.least_period, 80U);
    EXPECT_EQ(s[0], 1);
    std::array<int, 3> hist{};
    for (auto v : s.values) {
        ++hist[v];
    }
    EXPECT_EQ(hist, (std::array<int, 3>{26, 27, 27}));
}

TEST(MSequence, FrozenPrefix) {
    const Sequence s = m_sequence(gf81());
    EXPECT_EQ(prefix(s, 16), (std::vector<Trit>{1, 0, 0, 0, 1, 0, 0, 2, 1, 0, 1, 1, 1, 2, 0, 0}));
    EXPECT_EQ(to_trit_string(s).substr(0, 16), "1000100210111200");
}

TEST(MSequence, MatchesDefinitionalTrace) {
    const FieldCtx &ctx = gf81();
    const Sequence s = m_sequence(ctx);
    for (std::uint64_t t = 0; t < 80; ++t) {
        ASSERT_EQ(s[t], oracle::trace(ctx, oracle::power(ctx, ctx.alpha(), t)));
    }
    const Sequence &big = mseq12();
    std::mt19937_64 rng(4);
    for (int i = 0; i < 200; ++i) {
        const std::uint64_t t = rng() % big.period();
        ASSERT_EQ(big[t], oracle::trace(gf3_12(), oracle::power(gf3_12(), gf3_12().alpha(), t)));
    }
}

TEST(MSequence, BalanceAtN12) {
    std::array<std::uint64_t, 3> hist{};
    for (auto v : mseq12().values) {
        ++hist[v];
    }
    EXPECT_EQ(hist, (std::array<std::uint64_t, 3>{177146, 177147, 177147}));
}

TEST(MSequence, LengthLimit) {
    try {
        (void)m_sequence(gf3_12(), 1000);
        FAIL();
    } catch (const Error &e) {
        EXPECT_EQ(e.code(), ErrorCode::FeasibilityRefused);
    }
}

TEST(Decimate, Basics) {
    const Sequence s = m_sequence(gf81());
    const Sequence same = decimate(s, 1);
    EXPECT_EQ(same.values, s.values);
    EXPECT_EQ(same.least_period, 80U);

    const Sequence d5 = decimate(s, 5);
    EXPECT_EQ(d5.period(), 80U);
    EXPECT_EQ(d5.least_period, 16U);
    EXPECT_EQ(prefix(d5, 16), (std::vector<Trit>{1, 0, 1, 0, 0, 0, 1, 0, 2, 0, 2, 0, 0, 0, 2, 0}));
    for (std::uint64_t t = 0; t < 80; ++t) {
        ASSERT_EQ(d5[t], d5[t % 16]);
    }
    EXPECT_THROW((void)decimate(s, 0), Error);
}

TEST(CrossCorrelation, AutocorrelationIsTwoLevel) {
    const Sequence s = m_sequence(gf81());
    EXPECT_EQ(cross_correlation(s, s, 0), (EisensteinValue{80, 0}));
    for (std::uint64_t tau = 1; tau < 80; ++tau) {
        ASSERT_EQ(cross_correlation(s, s, tau), (EisensteinValue{-1, 0})) << tau;
    }
}

TEST(CrossCorrelation, AutocorrelationAtN12Sampled) {
    const Sequence &s = mseq12();
    for (std::uint64_t tau : sample_shifts(s.period() - 1, 30, 5)) {
        ASSERT_EQ(cross_correlation(s, s, tau + 1), (EisensteinValue{-1, 0}));
    }
}

TEST(CrossCorrelation, FrozenDecimatedValueAtZero) {
    const Sequence s = m_sequence(gf81());
    EXPECT_EQ(cross_correlation(s, decimate(s, 5), 0), (EisensteinValue{-10, 0}));
}

TEST(CrossCorrelation, CountsPartitionThePeriod) {
    const Sequence s = m_sequence(gf81());
    const Sequence d = decimate(s, 5);
    for (std::uint64_t tau = 0; tau < 80; ++tau) {
        const auto c = difference_counts(s, d, tau);
        ASSERT_EQ(c[0] + c[1] + c[2], 80U);
    }
}

TEST(CrossCorrelation, Errors) {
    const Sequence s = m_sequence(gf81());
    Sequence shorter = s;
    shorter.values.pop_back();
    try {
        (void)cross_correlation(s, shorter, 0);
        FAIL();
    } catch (const Error &e) {
        EXPECT_EQ(e.code(), ErrorCode::LengthMismatch);
    }
    EXPECT_THROW((void)cross_correlation(s, s, 80), Error);
}

// C_d(tau) + 1 equals the exponential sum over all x of omega^{Tr(alpha^tau x - x^d)}.
TEST(CrossCorrelation, MatchesFieldSumAtN4) {
    const FieldCtx &ctx = gf81();
    const Sequence s = m_sequence(ctx);
    const Sequence d = decimate(s, 5);
    for (std::uint64_t tau = 0; tau < 80; ++tau) {
        ASSERT_EQ(cross_correlation(s, d, tau) + EisensteinValue(1, 0), oracle::s_d_by_enumeration(ctx, 5, tau));
    }
}

TEST(CrossCorrelation, MatchesFieldSumAtN12Sampled) {
    const FieldCtx &ctx = gf3_12();
    const Sequence &s = mseq12();
    const Sequence d = decimate(s, 26645);
    for (std::uint64_t tau : sample_shifts(s.period(), 3, 77)) {
        ASSERT_EQ(cross_correlation(s, d, tau) + EisensteinValue(1, 0), oracle::s_d_by_enumeration(ctx, 26645, tau));
    }
}

TEST(SpectrumDirect, KOne) {
    const DecimationParams p = decimation_params(1);
    const auto spec = spectrum_direct(gf81(), p);
    ASSERT_EQ(spec.size(), 80U);
    std::map<std::int64_t, int> values;
    for (std::uint64_t tau = 0; tau < 80; ++tau) {
        ASSERT_EQ(spec[tau].tau, tau);
        ASSERT_EQ(spec[tau].mag2, mag2(spec[tau].c_d));
        ASSERT_EQ(spec[tau].c_d.y, 0);
        ++values[spec[tau].c_d.x + 1];
    }
    EXPECT_EQ(values, (std::map<std::int64_t, int>{{-9, 25}, {0, 30}, {9, 20}, {18, 5}}));
    const BoundResult b = check_bound(spec, p.bound_squared());
    EXPECT_TRUE(b.pass);
    EXPECT_EQ(b.max_mag2, 289U); // |17|^2
    EXPECT_LE(b.max_mag2, 2116U);
}

TEST(SpectrumDirect, DeterministicAcrossWorkerCounts) {
    const DecimationParams p = decimation_params(1);
    const auto one = spectrum_direct(gf81(), p, kDefaultWorkBudget, 1);
    for (unsigned w : {2U, 3U, 7U}) {
        const auto many = spectrum_direct(gf81(), p, kDefaultWorkBudget, w);
        ASSERT_EQ(many.size(), one.size());
        for (std::size_t i = 0; i < one.size(); ++i) {
            ASSERT_EQ(many[i].tau, one[i].tau);
            ASSERT_EQ(many[i].c_d, one[i].c_d);
        }
    }
}

TEST(SpectrumDirect, BudgetRefusal) {
    try {
        (void)spectrum_direct(gf3_12(), decimation_params(3));
        FAIL();
    } catch (const Error &e) {
        EXPECT_EQ(e.code(), ErrorCode::FeasibilityRefused);
    }
    try {
        (void)spectrum_direct(gf81(), decimation_params(1), 6399);
        FAIL();
    } catch (const Error &e) {
        EXPECT_EQ(e.code(), ErrorCode::FeasibilityRefused);
    }
    try {
        (void)spectrum_direct(gf81(), decimation_params(3));
        FAIL();
    } catch (const Error &e) {
        EXPECT_EQ(e.code(), ErrorCode::ContextMismatch);
    }
}

TEST(CheckBound, ReportsFirstWitness) {
    const Sequence s = m_sequence(gf81());
    const auto spec = spectrum_direct(s, s);
    const BoundResult b = check_bound(spec, decimation_params(1).bound_squared());
    EXPECT_FALSE(b.pass);
    ASSERT_TRUE(b.witness.has_value());
    EXPECT_EQ(b.witness->tau, 0U);
    EXPECT_EQ(b.witness->mag2, 6400U);
    EXPECT_EQ(b.max_mag2, 6400U);
}

TEST(Sampling, DistinctSortedAndSeeded) {
    const auto a = sample_shifts(531440, 1000, 42);
    const auto b = sample_shifts(531440, 1000, 42);
    const auto c = sample_shifts(531440, 1000, 43);
    EXPECT_EQ(a, b);
    EXPECT_NE(a, c);
    ASSERT_EQ(a.size(), 1000U);
    for (std::size_t i = 1; i < a.size(); ++i) {
        ASSERT_LT(a[i - 1], a[i]);
    }
    EXPECT_LT(a.back(), 531440U);
    EXPECT_EQ(sample_shifts(5, 10, 1), (std::vector<std::uint64_t>{0, 1, 2, 3, 4}));
}

TEST(Sampling, UniformBelowStaysInRange) {
    std::mt19937_64 rng(0);
    std::array<int, 7> hist{};
    for (int i = 0; i < 70000; ++i) {
        const auto v = uniform_below(rng, 7);
        ASSERT_LT(v, 7U);
        ++hist[v];
    }
    for (int h : hist) {
        EXPECT_GT(h, 9000);
        EXPECT_LT(h, 11000);
    }
}
