// include/terncorr/quadform.hpp: the two quadratic forms behind C_d(tau), their
// Gram matrices, radicals, linearized kernels, and closed-form character sums.
//
//   q1(x) = Tr(a x^{e1} - x^{e2}),          a = alpha^tau
//   q2(x) = Tr(a r x^{e1} - r^d x^{e2}),    r = alpha^{(3^n-1)/80}
//
// with e1 = 3^{2(k+1)} + 1 and e2 = 3^{2k} + 1, so that
//   2 (C_d(tau) + 1) = sum_x omega^{q1(x)} + sum_x omega^{q2(x)}.

#pragma once

#include <terncorr/eisenstein.hpp>
#include <terncorr/error.hpp>
#include <terncorr/field.hpp>
#include <terncorr/gf3.hpp>
#include <terncorr/numeric.hpp>
#include <terncorr/parallel.hpp>
#include <terncorr/params.hpp>

#include <array>
#include <cstdint>
#include <span>
#include <string_view>
#include <vector>

namespace terncorr {

enum class FormKind { Q1, Q2 };

inline std::string_view to_string(FormKind kind) noexcept { return kind == FormKind::Q1 ? "q1" : "q2"; }

/// One of the two forms at a fixed shift: q(x) = Tr(c1 x^{3^s1} x + c2 x^{3^s2} x).
struct QuadFormSpec {
    const FieldCtx *ctx = nullptr;
    FormKind kind = FormKind::Q1;
    std::uint64_t tau = 0;
    FieldElement a;  // alpha^tau
    FieldElement r;  // subfield nonsquare, used by q2
    FieldElement c1; // coefficient of x^{e1}
    FieldElement c2; // coefficient of x^{e2}
    std::uint64_t e1 = 0;
    std::uint64_t e2 = 0;
    std::size_t shift1 = 0;
    std::size_t shift2 = 0;

    [[nodiscard]] const FieldCtx &field() const noexcept { return *ctx; }
};

/// Symmetric n x n matrix S over GF(3) with q(x) = x^T S x.
using GramMatrix = Gf3Matrix;

struct RankReport {
    std::uint64_t tau = 0;
    FormKind kind = FormKind::Q1;
    std::size_t radical_dim = 0;
    std::size_t rank = 0;
    Trit delta = 1;
    int epsilon = 1;
    EisensteinValue char_sum;
    bool imaginary = false; // odd rank: sum is epsilon * i * 3^{t/2} scaled
};

inline void check_family(const FieldCtx &ctx, const DecimationParams &params) {
    if (ctx.degree() != params.n) {
        throw Error(ErrorCode::ContextMismatch, "field degree " + std::to_string(ctx.degree()) + " differs from n = " +
                                                    std::to_string(params.n));
    }
}

/// r^d, the constant coefficient carried by q2.
inline FieldElement q2_constant(const FieldCtx &ctx, const DecimationParams &params, const FieldElement &r) {
    return ctx.pow(r, params.d);
}

inline QuadFormSpec build_form(const FieldCtx &ctx, const DecimationParams &params, FormKind kind, std::uint64_t tau) {
    check_family(ctx, params);
    if (tau >= ctx.order()) {
        throw Error(ErrorCode::InvalidArgument, "shift " + std::to_string(tau) + " outside [0, 3^n - 1)");
    }
    QuadFormSpec qf;
    qf.ctx = &ctx;
    qf.kind = kind;
    qf.tau = tau;
    qf.a = ctx.alpha_pow(tau);
    qf.r = subfield_nonsquare(ctx);
    qf.e1 = params.e1;
    qf.e2 = params.e2;
    qf.shift1 = params.shift1();
    qf.shift2 = params.shift2();
    if (kind == FormKind::Q1) {
        qf.c1 = qf.a;
        qf.c2 = ctx.neg(ctx.one());
    } else {
        qf.c1 = ctx.mul(qf.a, qf.r);
        qf.c2 = ctx.neg(q2_constant(ctx, params, qf.r));
    }
    return qf;
}

inline Trit evaluate(const QuadFormSpec &qf, const FieldElement &x) {
    const FieldCtx &ctx = qf.field();
    const FieldElement t1 = ctx.mul(qf.c1, ctx.mul(ctx.frobenius(x, qf.shift1), x));
    const FieldElement t2 = ctx.mul(qf.c2, ctx.mul(ctx.frobenius(x, qf.shift2), x));
    return ctx.trace(ctx.add(t1, t2));
}

inline std::vector<FieldElement> power_basis(const FieldCtx &ctx) {
    std::vector<FieldElement> basis;
    FieldElement p = ctx.one();
    for (std::size_t i = 0; i < ctx.degree(); ++i) {
        basis.push_back(p);
        p = ctx.mul_alpha(p);
    }
    return basis;
}

/// a_ij = Tr(c1 b_i^{3^s1} b_j + c2 b_i^{3^s2} b_j), the unsymmetrised coefficients.
inline Gf3Matrix coefficient_matrix(const QuadFormSpec &qf, std::span<const FieldElement> basis) {
    const FieldCtx &ctx = qf.field();
    const std::size_t n = ctx.degree();
    if (basis.size() != n) {
        throw Error(ErrorCode::BasisNotIndependent, "basis must have exactly n elements");
    }
    Gf3Matrix A(n, n);
    for (std::size_t i = 0; i < n; ++i) {
        const FieldElement u1 = ctx.mul(qf.c1, ctx.frobenius(basis[i], qf.shift1));
        const FieldElement u2 = ctx.mul(qf.c2, ctx.frobenius(basis[i], qf.shift2));
        const FieldElement u = ctx.add(u1, u2);
        for (std::size_t j = 0; j < n; ++j) {
            A(i, j) = ctx.trace(ctx.mul(u, basis[j]));
        }
    }
    return A;
}

/// S = 2 (A + A^T); 2 is the inverse of 2 in GF(3), so q(x) = x^T S x.
inline GramMatrix symmetrize(const Gf3Matrix &A) {
    GramMatrix S(A.rows(), A.cols());
    for (std::size_t i = 0; i < A.rows(); ++i) {
        for (std::size_t j = 0; j < A.cols(); ++j) {
            S(i, j) = gf3::mul(2, gf3::add(A(i, j), A(j, i)));
        }
    }
    return S;
}

inline GramMatrix gram_matrix(const QuadFormSpec &qf, std::span<const FieldElement> basis) {
    const std::size_t n = qf.field().degree();
    if (basis.size() != n) {
        throw Error(ErrorCode::BasisNotIndependent, "basis must have exactly n elements");
    }
    Gf3Matrix coords(n, n);
    for (std::size_t i = 0; i < n; ++i) {
        qf.field().check(basis[i]);
        for (std::size_t j = 0; j < n; ++j) {
            coords(i, j) = basis[i][j];
        }
    }
    if (coords.rank() != n) {
        throw Error(ErrorCode::BasisNotIndependent, "basis elements are linearly dependent over GF(3)");
    }
    return symmetrize(coefficient_matrix(qf, basis));
}

inline GramMatrix gram_matrix(const QuadFormSpec &qf) {
    const auto basis = power_basis(qf.field());
    return gram_matrix(qf, basis);
}

/// dim of the radical {y : q(x + y) = q(x) for all x}; in odd characteristic this is ker S.
inline std::size_t radical_dim(const GramMatrix &S) {
    if (!S.is_symmetric()) {
        throw Error(ErrorCode::InvalidArgument, "radical_dim requires a symmetric matrix");
    }
    return S.kernel_dim();
}

/// Matrix of the GF(3)-linear map y -> c81 y^81 + c9 y^9 + c1 y in the power basis.
inline Gf3Matrix linearized_operator(const FieldCtx &ctx, const FieldElement &c81, const FieldElement &c9,
                                     const FieldElement &c1) {
    const std::size_t n = ctx.degree();
    Gf3Matrix M(n, n);
    FieldElement y = ctx.one();
    for (std::size_t j = 0; j < n; ++j) {
        const FieldElement img = ctx.add(ctx.add(ctx.mul(c81, ctx.frobenius(y, 4)), ctx.mul(c9, ctx.frobenius(y, 2))),
                                         ctx.mul(c1, y));
        for (std::size_t i = 0; i < n; ++i) {
            M(i, j) = img[i];
        }
        y = ctx.mul_alpha(y);
    }
    return M;
}

/// a^{3^{2(k+1)}} y^81 + y^9 + a y.
inline Gf3Matrix linearized_operator_q1(const FieldCtx &ctx, const DecimationParams &params, std::uint64_t tau) {
    check_family(ctx, params);
    const FieldElement a = ctx.alpha_pow(tau);
    return linearized_operator(ctx, ctx.frobenius(a, params.shift1()), ctx.one(), a);
}

/// (ar)^{3^{2(k+1)}} y^81 - (r^d + r^{9d}) y^9 + ar y.
inline Gf3Matrix linearized_operator_q2(const FieldCtx &ctx, const DecimationParams &params, std::uint64_t tau) {
    check_family(ctx, params);
    const FieldElement r = subfield_nonsquare(ctx);
    const FieldElement ar = ctx.mul(ctx.alpha_pow(tau), r);
    const FieldElement rd = q2_constant(ctx, params, r);
    const FieldElement r9d = ctx.frobenius(rd, 2);
    return linearized_operator(ctx, ctx.frobenius(ar, params.shift1()), ctx.neg(ctx.add(rd, r9d)), ar);
}

/// Same operator after r^{3^{2(k+1)}} = r and r^d + r^{9d} = 0: r a^{3^{2(k+1)}} y^81 + ar y.
inline Gf3Matrix linearized_operator_q2_reduced(const FieldCtx &ctx, const DecimationParams &params,
                                                std::uint64_t tau) {
    check_family(ctx, params);
    const FieldElement r = subfield_nonsquare(ctx);
    const FieldElement a = ctx.alpha_pow(tau);
    return linearized_operator(ctx, ctx.mul(r, ctx.frobenius(a, params.shift1())), ctx.zero(), ctx.mul(a, r));
}

inline std::size_t linearized_kernel_q1(const FieldCtx &ctx, const DecimationParams &params, std::uint64_t tau) {
    return linearized_operator_q1(ctx, params, tau).kernel_dim();
}

inline std::size_t linearized_kernel_q2(const FieldCtx &ctx, const DecimationParams &params, std::uint64_t tau) {
    return linearized_operator_q2(ctx, params, tau).kernel_dim();
}

/// sum_x omega^{q(x)} over GF(3^n) for a form of rank t with sign epsilon:
/// epsilon 3^{t/2} (even t) or epsilon i 3^{t/2} (odd t), times 3^{n-t}.
/// i sqrt(3) = 1 + 2 omega keeps the odd case exact.
inline EisensteinValue character_sum_value(std::size_t n, std::size_t rank, int epsilon) {
    const auto scale = static_cast<std::int64_t>(num::pow3(static_cast<unsigned>(n - rank)));
    if (rank % 2 == 0) {
        const auto half = static_cast<std::int64_t>(num::pow3(static_cast<unsigned>(rank / 2)));
        return {epsilon * half * scale, 0};
    }
    const auto half = static_cast<std::int64_t>(num::pow3(static_cast<unsigned>((rank - 1) / 2)));
    return (epsilon * half * scale) * EisensteinValue{1, 2};
}

inline RankReport rank_report(const GramMatrix &S, std::uint64_t tau = 0, FormKind kind = FormKind::Q1) {
    const Diagonalization diag = diagonalize(S);
    RankReport rep;
    rep.tau = tau;
    rep.kind = kind;
    rep.rank = diag.rank;
    rep.radical_dim = S.rows() - diag.rank;
    rep.delta = diag.delta;
    rep.epsilon = diag.epsilon;
    rep.imaginary = diag.rank % 2 == 1;
    rep.char_sum = character_sum_value(S.rows(), diag.rank, diag.epsilon);
    return rep;
}

inline RankReport rank_report(const QuadFormSpec &qf) { return rank_report(gram_matrix(qf), qf.tau, qf.kind); }

inline EisensteinValue char_sum(const QuadFormSpec &qf) { return rank_report(qf).char_sum; }

/// N(c) = #{x in GF(3^n) : q(x) = c} from rank t, sign epsilon and determinant class.
///   t even: N(0) = 3^{t-1} + 2 eps 3^{(t-2)/2},  N(c != 0) = 3^{t-1} - eps 3^{(t-2)/2}
///   t odd:  N(0) = 3^{t-1},                      N(c != 0) = 3^{t-1} + eps eta(c) 3^{(t-1)/2}
/// each multiplied by 3^{n-t} for the radical directions.
inline std::uint64_t count_solutions(std::size_t n, std::size_t rank, int epsilon, Trit c) {
    c %= 3;
    if (rank == 0) {
        return c == 0 ? num::pow3(static_cast<unsigned>(n)) : 0;
    }
    const auto scale = static_cast<std::int64_t>(num::pow3(static_cast<unsigned>(n - rank)));
    const auto base = static_cast<std::int64_t>(num::pow3(static_cast<unsigned>(rank - 1)));
    std::int64_t count = 0;
    if (rank % 2 == 0) {
        const auto h = static_cast<std::int64_t>(num::pow3(static_cast<unsigned>((rank - 2) / 2)));
        count = c == 0 ? base + 2 * epsilon * h : base - epsilon * h;
    } else {
        const auto h = static_cast<std::int64_t>(num::pow3(static_cast<unsigned>((rank - 1) / 2)));
        count = c == 0 ? base : base + epsilon * gf3::eta(c) * h;
    }
    return static_cast<std::uint64_t>(count * scale);
}

inline std::uint64_t count_solutions(const QuadFormSpec &qf, Trit c) {
    const RankReport rep = rank_report(qf);
    return count_solutions(qf.field().degree(), rep.rank, rep.epsilon, c);
}

/// S_d(tau) = (sum omega^{q1} + sum omega^{q2}) / 2, with exact halving.
inline EisensteinValue s_d_quadform(const FieldCtx &ctx, const DecimationParams &params, std::uint64_t tau) {
    const EisensteinValue s1 = char_sum(build_form(ctx, params, FormKind::Q1, tau));
    const EisensteinValue s2 = char_sum(build_form(ctx, params, FormKind::Q2, tau));
    return (s1 + s2).halved();
}

/// Gram matrices of q1 or q2 as an affine function of a = alpha^tau:
/// S(a) = K + sum_l a_l M_l, where M_l is the Gram matrix contributed by
/// the coefficient alpha^l and K by the shift-independent x^{e2} term.
class FormSweep {
public:
    FormSweep(const FieldCtx &ctx, const DecimationParams &params, FormKind kind)
        : kind_(kind), n_(ctx.degree()) {
        check_family(ctx, params);
        const auto basis = power_basis(ctx);
        const FieldElement r = subfield_nonsquare(ctx);
        const FieldElement gamma = kind == FormKind::Q1 ? ctx.one() : r;
        const FieldElement c2 = kind == FormKind::Q1 ? ctx.neg(ctx.one()) : ctx.neg(q2_constant(ctx, params, r));

        Gf3Matrix K(n_, n_);
        std::vector<Gf3Matrix> parts(n_, Gf3Matrix(n_, n_));
        for (std::size_t i = 0; i < n_; ++i) {
            const FieldElement f1 = ctx.mul(gamma, ctx.frobenius(basis[i], params.shift1()));
            const FieldElement f2 = ctx.mul(c2, ctx.frobenius(basis[i], params.shift2()));
            for (std::size_t j = 0; j < n_; ++j) {
                K(i, j) = ctx.trace(ctx.mul(f2, basis[j]));
                const FieldElement beta = ctx.mul(f1, basis[j]);
                for (std::size_t l = 0; l < n_; ++l) {
                    parts[l](i, j) = ctx.trace(ctx.mul(basis[l], beta));
                }
            }
        }
        constant_ = symmetrize(K);
        linear_.assign(n_ * n_ * n_, 0);
        for (std::size_t l = 0; l < n_; ++l) {
            const GramMatrix Ml = symmetrize(parts[l]);
            for (std::size_t i = 0; i < n_; ++i) {
                for (std::size_t j = 0; j < n_; ++j) {
                    linear_[(i * n_ + j) * n_ + l] = Ml(i, j);
                }
            }
        }
    }

    [[nodiscard]] FormKind kind() const noexcept { return kind_; }

    [[nodiscard]] GramMatrix gram(const FieldElement &a) const {
        GramMatrix S(n_, n_);
        for (std::size_t i = 0; i < n_; ++i) {
            for (std::size_t j = i; j < n_; ++j) {
                const Trit *row = &linear_[(i * n_ + j) * n_];
                int acc = constant_(i, j);
                for (std::size_t l = 0; l < n_; ++l) {
                    acc += row[l] * a[l];
                }
                const Trit v = gf3::reduce(acc);
                S(i, j) = v;
                S(j, i) = v;
            }
        }
        return S;
    }

    [[nodiscard]] RankReport report(std::uint64_t tau, const FieldElement &a) const {
        return rank_report(gram(a), tau, kind_);
    }

private:
    FormKind kind_;
    std::size_t n_;
    GramMatrix constant_;
    std::vector<Trit> linear_; // [(i * n + j) * n + l]
};

/// Everything the closed-form route produces for one shift.
struct ShiftAnalysis {
    std::uint64_t tau = 0;
    RankReport q1;
    RankReport q2;
    EisensteinValue s_d;
    EisensteinValue c_d;
    std::uint64_t mag2 = 0;
};

/// Work units charged per shift by the closed-form route (two n x n Gram evaluations).
inline std::uint64_t quadform_work(std::size_t n, std::uint64_t shifts) {
    const num::u128 w = static_cast<num::u128>(shifts) * 2 * n * n;
    return w > UINT64_MAX ? UINT64_MAX : static_cast<std::uint64_t>(w);
}

class QuadformSpectrum {
public:
    QuadformSpectrum(const FieldCtx &ctx, const DecimationParams &params)
        : ctx_(&ctx), q1_(ctx, params, FormKind::Q1), q2_(ctx, params, FormKind::Q2) {}

    [[nodiscard]] ShiftAnalysis analyse(std::uint64_t tau, const FieldElement &a) const {
        ShiftAnalysis out;
        out.tau = tau;
        out.q1 = q1_.report(tau, a);
        out.q2 = q2_.report(tau, a);
        out.s_d = (out.q1.char_sum + out.q2.char_sum).halved();
        out.c_d = out.s_d - EisensteinValue{1, 0};
        out.mag2 = mag2(out.c_d);
        return out;
    }

    [[nodiscard]] ShiftAnalysis analyse(std::uint64_t tau) const { return analyse(tau, ctx_->alpha_pow(tau)); }

    /// Shifts [begin, end), ordered by tau.
    [[nodiscard]] std::vector<ShiftAnalysis> range(std::uint64_t begin, std::uint64_t end, unsigned workers = 0) const {
        if (end > ctx_->order() || begin > end) {
            throw Error(ErrorCode::InvalidArgument, "shift range outside [0, 3^n - 1)");
        }
        std::vector<ShiftAnalysis> out(end - begin);
        parallel_chunks(
            end - begin,
            [&](std::uint64_t lo, std::uint64_t hi) {
                FieldElement a = ctx_->alpha_pow(begin + lo);
                for (std::uint64_t i = lo; i < hi; ++i) {
                    out[i] = analyse(begin + i, a);
                    a = ctx_->mul_alpha(a);
                }
            },
            workers);
        return out;
    }

    [[nodiscard]] std::vector<ShiftAnalysis> shifts(std::span<const std::uint64_t> taus, unsigned workers = 0) const {
        std::vector<ShiftAnalysis> out(taus.size());
        parallel_chunks(
            taus.size(),
            [&](std::uint64_t lo, std::uint64_t hi) {
                for (std::uint64_t i = lo; i < hi; ++i) {
                    if (taus[i] >= ctx_->order()) {
                        throw Error(ErrorCode::InvalidArgument, "shift outside [0, 3^n - 1)");
                    }
                    out[i] = analyse(taus[i]);
                }
            },
            workers);
        return out;
    }

private:
    const FieldCtx *ctx_;
    FormSweep q1_;
    FormSweep q2_;
};

} // namespace terncorr
