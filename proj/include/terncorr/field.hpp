// include/terncorr/field.hpp: GF(3^n) in a polynomial basis: elements, field
// context, primitive-modulus search, trace maps and the quadratic character.

#pragma once

#include <terncorr/error.hpp>
#include <terncorr/gf3.hpp>
#include <terncorr/numeric.hpp>

#include <algorithm>
#include <array>
#include <concepts>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace terncorr {

inline constexpr std::size_t kMaxDegree = num::kMaxPow3Exponent;

/// Element of GF(3^n): n trits, little-endian coordinates in the basis 1, alpha, ..., alpha^{n-1}.
class FieldElement {
public:
    FieldElement() = default;
    explicit FieldElement(std::size_t n) : n_(static_cast<std::uint8_t>(n)) {
        if (n > kMaxDegree) {
            throw Error(ErrorCode::InvalidArgument, "degree exceeds " + std::to_string(kMaxDegree));
        }
    }
    FieldElement(std::size_t n, std::span<const Trit> coeffs) : FieldElement(n) {
        if (coeffs.size() != n) {
            throw Error(ErrorCode::ContextMismatch, "coordinate count differs from field degree");
        }
        for (std::size_t i = 0; i < n; ++i) {
            if (coeffs[i] > 2) {
                throw Error(ErrorCode::InvalidArgument, "coordinate outside {0,1,2}");
            }
            c_[i] = coeffs[i];
        }
    }

    [[nodiscard]] std::size_t degree() const noexcept { return n_; }
    [[nodiscard]] std::span<const Trit> coeffs() const noexcept { return {c_.data(), n_}; }
    [[nodiscard]] std::vector<Trit> to_vector() const { return {c_.begin(), c_.begin() + n_}; }

    Trit operator[](std::size_t i) const noexcept { return c_[i]; }
    void set(std::size_t i, Trit v) noexcept { c_[i] = static_cast<Trit>(v % 3); }

    [[nodiscard]] bool is_zero() const noexcept {
        return std::all_of(c_.begin(), c_.begin() + n_, [](Trit t) { return t == 0; });
    }

    /// Base-3 integer sum c_i 3^i; a bijection onto [0, 3^n).
    [[nodiscard]] std::uint64_t index() const noexcept {
        std::uint64_t v = 0;
        for (std::size_t i = n_; i-- > 0;) {
            v = v * 3 + c_[i];
        }
        return v;
    }

    static FieldElement from_index(std::size_t n, std::uint64_t v) {
        FieldElement e(n);
        for (std::size_t i = 0; i < n; ++i) {
            e.c_[i] = static_cast<Trit>(v % 3);
            v /= 3;
        }
        return e;
    }

    friend bool operator==(const FieldElement &, const FieldElement &) = default;

private:
    std::array<Trit, kMaxDegree> c_{};
    std::uint8_t n_ = 0;
};

/// Parses "2,1,0,0,1" (little-endian, comma separated).
inline std::vector<Trit> parse_trits(std::string_view text) {
    std::vector<Trit> out;
    std::size_t pos = 0;
    while (pos <= text.size()) {
        std::size_t comma = text.find(',', pos);
        if (comma == std::string_view::npos) {
            comma = text.size();
        }
        std::string_view tok = text.substr(pos, comma - pos);
        while (!tok.empty() && tok.front() == ' ') {
            tok.remove_prefix(1);
        }
        while (!tok.empty() && tok.back() == ' ') {
            tok.remove_suffix(1);
        }
        if (tok.size() != 1 || tok[0] < '0' || tok[0] > '2') {
            throw Error(ErrorCode::Parse, "invalid trit '" + std::string(tok) + "' in \"" + std::string(text) + "\"");
        }
        out.push_back(static_cast<Trit>(tok[0] - '0'));
        pos = comma + 1;
    }
    return out;
}

inline std::string format_trits(std::span<const Trit> trits) {
    std::string s;
    for (std::size_t i = 0; i < trits.size(); ++i) {
        if (i != 0) {
            s += ',';
        }
        s += static_cast<char>('0' + trits[i]);
    }
    return s;
}

namespace detail {

using Poly = std::vector<Trit>; // little-endian, may carry leading zeros

inline void trim(Poly &p) {
    while (!p.empty() && p.back() == 0) {
        p.pop_back();
    }
}

/// (a * b) mod f for monic f of degree n, with deg a, deg b < n.
inline Poly mulmod(const Poly &a, const Poly &b, const Poly &f) {
    const std::size_t n = f.size() - 1;
    std::vector<int> prod(2 * n, 0);
    for (std::size_t i = 0; i < a.size(); ++i) {
        if (a[i] == 0) {
            continue;
        }
        for (std::size_t j = 0; j < b.size(); ++j) {
            prod[i + j] += a[i] * b[j];
        }
    }
    for (std::size_t d = prod.size(); d-- > n;) {
        const Trit c = gf3::reduce(prod[d]);
        if (c == 0) {
            continue;
        }
        for (std::size_t j = 0; j < n; ++j) {
            prod[d - n + j] -= c * f[j];
        }
    }
    Poly r(n);
    for (std::size_t i = 0; i < n; ++i) {
        r[i] = gf3::reduce(prod[i]);
    }
    return r;
}

inline Poly powmod(Poly base, std::uint64_t e, const Poly &f) {
    Poly result(f.size() - 1, 0);
    result[0] = 1;
    while (e != 0) {
        if (e & 1U) {
            result = mulmod(result, base, f);
        }
        base = mulmod(base, base, f);
        e >>= 1U;
    }
    return result;
}

/// x mod f as a length-n vector.
inline Poly x_mod(const Poly &f) {
    const std::size_t n = f.size() - 1;
    Poly x(n, 0);
    if (n == 1) {
        x[0] = gf3::neg(f[0]);
    } else {
        x[1] = 1;
    }
    return x;
}

/// Remainder of a modulo b (b nonzero after trimming).
inline Poly polymod(Poly a, Poly b) {
    trim(a);
    trim(b);
    const Trit lead_inv = gf3::inv(b.back());
    while (a.size() >= b.size()) {
        const Trit c = gf3::mul(a.back(), lead_inv);
        const std::size_t shift = a.size() - b.size();
        for (std::size_t j = 0; j < b.size(); ++j) {
            a[shift + j] = gf3::sub(a[shift + j], gf3::mul(c, b[j]));
        }
        trim(a);
    }
    return a;
}

inline Poly polygcd(Poly a, Poly b) {
    trim(a);
    trim(b);
    while (!b.empty()) {
        Poly r = polymod(a, b);
        a = std::move(b);
        b = std::move(r);
    }
    return a;
}

inline bool is_one(const Poly &p) {
    if (p.empty() || p[0] != 1) {
        return false;
    }
    return std::all_of(p.begin() + 1, p.end(), [](Trit t) { return t == 0; });
}

} // namespace detail

/// Rabin's test: f of degree n is irreducible iff x^{3^n} = x (mod f) and
/// gcd(x^{3^{n/q}} - x, f) = 1 for every prime q | n.
inline bool is_irreducible(const std::vector<Trit> &modulus) {
    detail::Poly f = modulus;
    detail::trim(f);
    if (f.size() < 2) {
        return false;
    }
    const std::size_t n = f.size() - 1;
    const detail::Poly x = detail::x_mod(f);
    std::vector<detail::Poly> frob{x}; // frob[i] = x^{3^i} mod f
    for (std::size_t i = 1; i <= n; ++i) {
        frob.push_back(detail::powmod(frob.back(), 3, f));
    }
    if (frob[n] != x) {
        return false;
    }
    for (auto q : num::prime_divisors(n)) {
        detail::Poly diff = frob[n / q];
        for (std::size_t i = 0; i < n; ++i) {
            diff[i] = gf3::sub(diff[i], x[i]);
        }
        if (detail::polygcd(diff, f).size() != 1) {
            return false;
        }
    }
    return true;
}

/// Multiplicative order of x modulo an irreducible f of degree n.
inline std::uint64_t root_order(const std::vector<Trit> &modulus) {
    const std::size_t n = modulus.size() - 1;
    const std::uint64_t group = num::pow3(static_cast<unsigned>(n)) - 1;
    const detail::Poly x = detail::x_mod(modulus);
    std::uint64_t order = group;
    for (auto q : num::prime_divisors(group)) {
        while (order % q == 0 && detail::is_one(detail::powmod(x, order / q, modulus))) {
            order /= q;
        }
    }
    return order;
}

struct FieldOptions {
    // log/antilog tables are built when 3^n <= table_budget
    std::uint64_t table_budget = 531441; // 3^12
};

class FieldCtx;
FieldCtx make_field(std::size_t n, std::optional<std::vector<Trit>> modulus = std::nullopt,
                    FieldOptions options = {});

/// Immutable description of GF(3^n) with alpha = x mod the primitive modulus.
class FieldCtx {
public:
    [[nodiscard]] std::size_t degree() const noexcept { return n_; }
    /// Full coefficient list c_0..c_n of the monic modulus (c_n = 1).
    [[nodiscard]] const std::vector<Trit> &modulus() const noexcept { return modulus_; }
    [[nodiscard]] std::string modulus_string() const { return format_trits(modulus_); }
    /// Multiplicative group order 3^n - 1.
    [[nodiscard]] std::uint64_t order() const noexcept { return order_; }
    [[nodiscard]] std::uint64_t size() const noexcept { return order_ + 1; }
    [[nodiscard]] bool has_tables() const noexcept { return !antilog_.empty(); }

    [[nodiscard]] FieldElement zero() const { return FieldElement(n_); }
    [[nodiscard]] FieldElement one() const {
        FieldElement e(n_);
        e.set(0, 1);
        return e;
    }
    [[nodiscard]] FieldElement alpha() const { return alpha_; }
    [[nodiscard]] FieldElement element(std::span<const Trit> coeffs) const { return FieldElement(n_, coeffs); }
    [[nodiscard]] FieldElement element(std::uint64_t index) const {
        if (index >= size()) {
            throw Error(ErrorCode::InvalidArgument, "element index out of range");
        }
        return FieldElement::from_index(n_, index);
    }
    /// GF(3) scalar c embedded as c * 1.
    [[nodiscard]] FieldElement scalar(Trit c) const {
        FieldElement e(n_);
        e.set(0, c);
        return e;
    }

    [[nodiscard]] FieldElement add(const FieldElement &a, const FieldElement &b) const {
        check(a);
        check(b);
        FieldElement r(n_);
        for (std::size_t i = 0; i < n_; ++i) {
            r.set(i, gf3::add(a[i], b[i]));
        }
        return r;
    }
    [[nodiscard]] FieldElement sub(const FieldElement &a, const FieldElement &b) const {
        check(a);
        check(b);
        FieldElement r(n_);
        for (std::size_t i = 0; i < n_; ++i) {
            r.set(i, gf3::sub(a[i], b[i]));
        }
        return r;
    }
    [[nodiscard]] FieldElement neg(const FieldElement &a) const {
        check(a);
        FieldElement r(n_);
        for (std::size_t i = 0; i < n_; ++i) {
            r.set(i, gf3::neg(a[i]));
        }
        return r;
    }
    [[nodiscard]] FieldElement scale(const FieldElement &a, Trit c) const {
        check(a);
        FieldElement r(n_);
        for (std::size_t i = 0; i < n_; ++i) {
            r.set(i, gf3::mul(a[i], c));
        }
        return r;
    }

    [[nodiscard]] FieldElement mul(const FieldElement &a, const FieldElement &b) const {
        return has_tables() ? mul_table(a, b) : mul_polynomial(a, b);
    }

    /// Schoolbook product followed by reduction modulo the modulus.
    [[nodiscard]] FieldElement mul_polynomial(const FieldElement &a, const FieldElement &b) const {
        check(a);
        check(b);
        std::array<int, 2 * kMaxDegree> prod{};
        for (std::size_t i = 0; i < n_; ++i) {
            if (a[i] == 0) {
                continue;
            }
            for (std::size_t j = 0; j < n_; ++j) {
                prod[i + j] += a[i] * b[j];
            }
        }
        for (std::size_t d = 2 * n_ - 1; d-- > n_;) {
            const Trit c = gf3::reduce(prod[d]);
            if (c == 0) {
                continue;
            }
            for (std::size_t j = 0; j < n_; ++j) {
                prod[d - n_ + j] -= c * modulus_[j];
            }
        }
        FieldElement r(n_);
        for (std::size_t i = 0; i < n_; ++i) {
            r.set(i, gf3::reduce(prod[i]));
        }
        return r;
    }

    /// Product through log/antilog tables; requires has_tables().
    [[nodiscard]] FieldElement mul_table(const FieldElement &a, const FieldElement &b) const {
        check(a);
        check(b);
        require_tables();
        if (a.is_zero() || b.is_zero()) {
            return zero();
        }
        const std::uint64_t e = (log_[a.index()] + static_cast<std::uint64_t>(log_[b.index()])) % order_;
        return FieldElement::from_index(n_, antilog_[e]);
    }

    /// x * alpha (one shift-and-reduce step).
    [[nodiscard]] FieldElement mul_alpha(const FieldElement &a) const {
        check(a);
        FieldElement r(n_);
        const Trit top = a[n_ - 1];
        for (std::size_t i = n_ - 1; i > 0; --i) {
            r.set(i, a[i - 1]);
        }
        if (top != 0) {
            for (std::size_t j = 0; j < n_; ++j) {
                r.set(j, gf3::sub(r[j], gf3::mul(top, modulus_[j])));
            }
        }
        return r;
    }

    [[nodiscard]] FieldElement inv(const FieldElement &a) const {
        check(a);
        if (a.is_zero()) {
            throw Error(ErrorCode::DivisionByZero, "inverse of zero");
        }
        return pow(a, order_ - 1);
    }

    /// a^e for any integer e; negative exponents require a != 0.
    template <std::integral I>
    [[nodiscard]] FieldElement pow(const FieldElement &a, I e) const {
        check(a);
        if (a.is_zero()) {
            if (e == 0) {
                return one();
            }
            if (e < 0) {
                throw Error(ErrorCode::DivisionByZero, "negative power of zero");
            }
            return zero();
        }
        return has_tables() ? pow_table(a, reduce_exponent(e)) : pow_square_multiply(a, reduce_exponent(e));
    }

    [[nodiscard]] FieldElement pow_square_multiply(FieldElement base, std::uint64_t e) const {
        check(base);
        FieldElement result = one();
        while (e != 0) {
            if (e & 1U) {
                result = mul_polynomial(result, base);
            }
            base = mul_polynomial(base, base);
            e >>= 1U;
        }
        return result;
    }

    [[nodiscard]] FieldElement pow_table(const FieldElement &a, std::uint64_t e) const {
        check(a);
        require_tables();
        if (a.is_zero()) {
            return e == 0 ? one() : zero();
        }
        return FieldElement::from_index(n_, antilog_[num::mulmod(log_[a.index()], e % order_, order_)]);
    }

    /// alpha^e.
    [[nodiscard]] FieldElement alpha_pow(std::uint64_t e) const {
        e %= order_;
        if (has_tables()) {
            return FieldElement::from_index(n_, antilog_[e]);
        }
        return pow_square_multiply(alpha_, e);
    }

    /// Discrete logarithm to base alpha; requires tables and a != 0.
    [[nodiscard]] std::uint64_t log(const FieldElement &a) const {
        check(a);
        require_tables();
        if (a.is_zero()) {
            throw Error(ErrorCode::InvalidArgument, "log of zero");
        }
        return log_[a.index()];
    }

    /// x^{3^m} (Frobenius applied m times).
    [[nodiscard]] FieldElement frobenius(const FieldElement &a, std::size_t m) const {
        check(a);
        m %= n_;
        FieldElement r = a;
        for (std::size_t i = 0; i < m; ++i) {
            r = mul(mul(r, r), r);
        }
        return r;
    }

    /// Tr_1^n(x); linear combination of the precomputed traces of the basis.
    [[nodiscard]] Trit trace(const FieldElement &a) const {
        check(a);
        int acc = 0;
        for (std::size_t i = 0; i < n_; ++i) {
            acc += a[i] * basis_trace_[i];
        }
        return gf3::reduce(acc);
    }

    /// Tr_1^n(x) computed as x + x^3 + ... + x^{3^{n-1}}.
    [[nodiscard]] Trit trace_by_frobenius(const FieldElement &a) const {
        const FieldElement t = relative_trace(a, 1, n_);
        for (std::size_t i = 1; i < n_; ++i) {
            if (t[i] != 0) {
                throw Error(ErrorCode::InvalidArgument, "trace left the prime field; modulus is broken");
            }
        }
        return t[0];
    }

    /// sum_{i<h} x^{3^{i m}}.
    [[nodiscard]] FieldElement relative_trace(const FieldElement &a, std::size_t m, std::size_t h) const {
        check(a);
        FieldElement acc = zero();
        FieldElement term = a;
        for (std::size_t i = 0; i < h; ++i) {
            acc = add(acc, term);
            term = frobenius(term, m);
        }
        return acc;
    }

    /// Tr_m^n(x), landing in the subfield GF(3^m).
    [[nodiscard]] FieldElement trace_to_subfield(const FieldElement &a, std::size_t m) const {
        if (m == 0 || n_ % m != 0) {
            throw Error(ErrorCode::InvalidSubfield, std::to_string(m) + " does not divide " + std::to_string(n_));
        }
        return relative_trace(a, m, n_ / m);
    }

    [[nodiscard]] bool in_subfield(const FieldElement &a, std::size_t m) const { return frobenius(a, m) == a; }

    /// eta(x): 0 at zero, +1 on nonzero squares, -1 on nonsquares.
    [[nodiscard]] int quadratic_character(const FieldElement &a) const {
        check(a);
        if (a.is_zero()) {
            return 0;
        }
        if (has_tables()) {
            return log_[a.index()] % 2 == 0 ? 1 : -1;
        }
        const FieldElement h = pow_square_multiply(a, order_ / 2);
        if (h == one()) {
            return 1;
        }
        if (h == neg(one())) {
            return -1;
        }
        throw Error(ErrorCode::InvalidArgument, "Euler criterion returned neither 1 nor -1");
    }

    /// Checks that x carries this context's degree.
    void check(const FieldElement &a) const {
        if (a.degree() != n_) {
            throw Error(ErrorCode::ContextMismatch,
                        "element of degree " + std::to_string(a.degree()) + " used in GF(3^" + std::to_string(n_) + ")");
        }
    }

private:
    friend FieldCtx make_field(std::size_t, std::optional<std::vector<Trit>>, FieldOptions);

    FieldCtx(std::vector<Trit> modulus, const FieldOptions &options)
        : n_(modulus.size() - 1), modulus_(std::move(modulus)), order_(num::pow3(static_cast<unsigned>(n_)) - 1) {
        alpha_ = FieldElement::from_index(n_, 0);
        if (n_ == 1) {
            alpha_.set(0, gf3::neg(modulus_[0]));
        } else {
            alpha_.set(1, 1);
        }
        if (size() <= options.table_budget) {
            build_tables();
        }
        FieldElement power = one();
        basis_trace_.resize(n_);
        for (std::size_t i = 0; i < n_; ++i) {
            basis_trace_[i] = trace_by_frobenius(power);
            power = mul(power, alpha_);
        }
    }

    void build_tables() {
        antilog_.resize(order_);
        log_.assign(size(), 0);
        FieldElement power = one();
        for (std::uint64_t e = 0; e < order_; ++e) {
            const auto idx = static_cast<std::uint32_t>(power.index());
            antilog_[e] = idx;
            log_[idx] = static_cast<std::uint32_t>(e);
            power = mul_alpha(power);
        }
    }

    void require_tables() const {
        if (!has_tables()) {
            throw Error(ErrorCode::InvalidArgument, "log/antilog tables not built for this field");
        }
    }

    template <std::integral I>
    [[nodiscard]] std::uint64_t reduce_exponent(I e) const {
        if constexpr (std::is_signed_v<I>) {
            const auto m = static_cast<__int128>(order_);
            __int128 r = static_cast<__int128>(e) % m;
            if (r < 0) {
                r += m;
            }
            return static_cast<std::uint64_t>(r);
        } else {
            return static_cast<std::uint64_t>(static_cast<num::u128>(e) % order_);
        }
    }

    std::size_t n_;
    std::vector<Trit> modulus_;
    std::uint64_t order_;
    FieldElement alpha_;
    std::vector<Trit> basis_trace_;
    std::vector<std::uint32_t> antilog_;
    std::vector<std::uint32_t> log_;
};

/// Builds GF(3^n). Without an explicit modulus, monic degree-n polynomials are
/// scanned by increasing base-3 value of (c_0, ..., c_{n-1}) and the first
/// primitive one is used.
inline FieldCtx make_field(std::size_t n, std::optional<std::vector<Trit>> modulus, FieldOptions options) {
    if (n < 1 || n > kMaxDegree) {
        throw Error(ErrorCode::InvalidArgument, "extension degree must be in [1, " + std::to_string(kMaxDegree) + "]");
    }
    if (modulus) {
        if (modulus->size() != n + 1 || modulus->back() != 1) {
            throw Error(ErrorCode::InvalidArgument, "modulus must be monic of degree " + std::to_string(n));
        }
        if (std::any_of(modulus->begin(), modulus->end(), [](Trit t) { return t > 2; })) {
            throw Error(ErrorCode::InvalidArgument, "modulus coefficient outside {0,1,2}");
        }
        if (!is_irreducible(*modulus)) {
            throw Error(ErrorCode::ModulusNotIrreducible, format_trits(*modulus));
        }
        const std::uint64_t order = root_order(*modulus);
        const std::uint64_t group = num::pow3(static_cast<unsigned>(n)) - 1;
        if (order != group) {
            throw Error(ErrorCode::ModulusNotPrimitive,
                        format_trits(*modulus) + " has root order " + std::to_string(order) + " < " +
                            std::to_string(group));
        }
        return FieldCtx(std::move(*modulus), options);
    }
    const std::uint64_t candidates = num::pow3(static_cast<unsigned>(n));
    const std::uint64_t group = candidates - 1;
    for (std::uint64_t v = 0; v < candidates; ++v) {
        std::vector<Trit> f(n + 1, 0);
        std::uint64_t digits = v;
        for (std::size_t i = 0; i < n; ++i) {
            f[i] = static_cast<Trit>(digits % 3);
            digits /= 3;
        }
        f[n] = 1;
        if (f[0] == 0 || !is_irreducible(f)) {
            continue;
        }
        if (root_order(f) == group) {
            return FieldCtx(std::move(f), options);
        }
    }
    throw Error(ErrorCode::NoPrimitiveFound, "no primitive polynomial of degree " + std::to_string(n));
}

/// r = alpha^{(3^n - 1)/80}, a generator of GF(3^4)^* inside GF(3^n).
inline FieldElement subfield_nonsquare(const FieldCtx &ctx) {
    if (ctx.degree() % 4 != 0) {
        throw Error(ErrorCode::InvalidSubfield, "GF(3^4) is not a subfield of GF(3^" + std::to_string(ctx.degree()) + ")");
    }
    return ctx.alpha_pow(ctx.order() / 80);
}

} // namespace terncorr
