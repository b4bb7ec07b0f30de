#include "oracle.hpp"

#include <terncorr/gf3.hpp>
#include <terncorr/quadform.hpp>

#include <gtest/gtest.h>

#include <random>

using namespace terncorr;

namespace {

Gf3Matrix random_symmetric(std::mt19937_64 &rng, std::size_t n) {
    Gf3Matrix S(n, n);
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = i; j < n; ++j) {
            const auto v = static_cast<Trit>(rng() % 3);
            S(i, j) = v;
            S(j, i) = v;
        }
    }
    return S;
}

Gf3Matrix diag(std::initializer_list<Trit> entries) {
    Gf3Matrix S(entries.size(), entries.size());
    std::size_t i = 0;
    for (auto e : entries) {
        S(i, i) = e;
        ++i;
    }
    return S;
}

} // namespace

TEST(Gf3Matrix, RankOfIdentityAndZero) {
    EXPECT_EQ(Gf3Matrix::identity(5).rank(), 5U);
    EXPECT_EQ(Gf3Matrix(5, 5).rank(), 0U);
    EXPECT_EQ(radical_dim(Gf3Matrix(6, 6)), 6U);
    EXPECT_EQ(radical_dim(Gf3Matrix::identity(6)), 0U);
}

TEST(Gf3Matrix, KernelBasisIsAnnihilated) {
    std::mt19937_64 rng(11);
    for (int trial = 0; trial < 200; ++trial) {
        Gf3Matrix M(6, 6);
        for (std::size_t i = 0; i < 6; ++i) {
            for (std::size_t j = 0; j < 6; ++j) {
                M(i, j) = static_cast<Trit>(rng() % 3);
            }
        }
        // force some dependence
        for (std::size_t j = 0; j < 6; ++j) {
            M(5, j) = gf3::add(M(0, j), M(1, j));
        }
        const auto basis = M.kernel_basis();
        EXPECT_EQ(basis.size(), M.kernel_dim());
        for (const auto &v : basis) {
            for (auto t : M.apply(v)) {
                EXPECT_EQ(t, 0);
            }
        }
    }
}

TEST(Diagonalize, IdentityTwoByTwo) {
    const Diagonalization d = diagonalize(Gf3Matrix::identity(2));
    EXPECT_EQ(d.rank, 2U);
    EXPECT_EQ(d.delta, 1);
    EXPECT_EQ(d.epsilon, -1); // eta(-1) = eta(2) = -1
}

TEST(Diagonalize, DiagOneTwo) {
    const Diagonalization d = diagonalize(diag({1, 2}));
    EXPECT_EQ(d.rank, 2U);
    EXPECT_EQ(d.delta, 2);
    EXPECT_EQ(d.epsilon, 1); // eta(-2) = eta(1)
}

TEST(Diagonalize, ZeroDiagonalNeedsFixup) {
    Gf3Matrix S(2, 2);
    S(0, 1) = 1;
    S(1, 0) = 1; // the form 2 x0 x1
    const Diagonalization d = diagonalize(S);
    EXPECT_EQ(d.rank, 2U);
    // hyperbolic plane: sum = +3, so epsilon = +1
    EXPECT_EQ(character_sum_value(2, d.rank, d.epsilon), oracle::sum_of(oracle::matrix_form_counts(S)));
}

TEST(Diagonalize, RejectsAsymmetric) {
    Gf3Matrix M(2, 2);
    M(0, 1) = 1;
    EXPECT_THROW(diagonalize(M), Error);
}

// Rank matches Gaussian elimination and the closed-form sum and counts match
// enumeration of GF(3)^t, for odd and even ranks alike.
TEST(Diagonalize, RandomSymmetricAgainstEnumeration) {
    std::mt19937_64 rng(2024);
    for (std::size_t n = 1; n <= 6; ++n) {
        for (int trial = 0; trial < 150; ++trial) {
            const Gf3Matrix S = random_symmetric(rng, n);
            const Diagonalization d = diagonalize(S);
            ASSERT_EQ(d.rank, S.rank());
            const auto counts = oracle::matrix_form_counts(S);
            ASSERT_EQ(character_sum_value(n, d.rank, d.epsilon), oracle::sum_of(counts));
            for (Trit c = 0; c < 3; ++c) {
                ASSERT_EQ(count_solutions(n, d.rank, d.epsilon, c), counts[c]) << "n=" << n << " rank=" << d.rank;
            }
        }
    }
}

TEST(Diagonalize, ZeroFormSumIsFieldSize) {
    EXPECT_EQ(character_sum_value(4, 0, 1), (EisensteinValue{81, 0}));
    EXPECT_EQ(count_solutions(4, 0, 1, 0), 81U);
    EXPECT_EQ(count_solutions(4, 0, 1, 1), 0U);
}

TEST(Eisenstein, Mag2Examples) {
    EXPECT_EQ(mag2({1, 0}), 1U);
    EXPECT_EQ(mag2({1, 1}), 1U);
    EXPECT_EQ(mag2({80, 0}), 6400U);
}

TEST(Eisenstein, UnitInvariance) {
    std::mt19937_64 rng(5);
    const EisensteinValue units[] = {{1, 0}, {-1, 0}, {0, 1}, {0, -1}, {-1, -1}, {1, 1}};
    for (int trial = 0; trial < 500; ++trial) {
        const EisensteinValue v{static_cast<std::int64_t>(rng() % 2001) - 1000,
                                static_cast<std::int64_t>(rng() % 2001) - 1000};
        for (const auto &u : units) {
            EXPECT_EQ(mag2(u), 1U);
            EXPECT_EQ(mag2(u * v), mag2(v));
        }
        EXPECT_EQ(v.times_omega(), (EisensteinValue{0, 1} * v));
    }
}

TEST(Eisenstein, OmegaCubedIsOne) {
    const EisensteinValue w{0, 1};
    EXPECT_EQ(w * w, (EisensteinValue{-1, -1}));
    EXPECT_EQ(w * w * w, (EisensteinValue{1, 0}));
    EXPECT_EQ(EisensteinValue::from_counts(3, 3, 3), (EisensteinValue{0, 0}));
}

TEST(Eisenstein, HalvingIsExact) {
    EXPECT_EQ((EisensteinValue{-18, 4}).halved(), (EisensteinValue{-9, 2}));
    try {
        (void)EisensteinValue{9, 0}.halved();
        FAIL();
    } catch (const Error &e) {
        EXPECT_EQ(e.code(), ErrorCode::ParityViolation);
    }
}
