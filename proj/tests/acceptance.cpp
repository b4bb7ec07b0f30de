// Acceptance suite: one PASS/FAIL line per criterion, nonzero exit if any fails.

#include "oracle.hpp"

#include <terncorr/quadform.hpp>
#include <terncorr/sequence.hpp>
#include <terncorr/verify.hpp>

#include <chrono>
#include <cstdio>
#include <exception>
#include <functional>
#include <set>
#include <string>

using namespace terncorr;

namespace {

struct Outcome {
    bool pass = false;
    std::string detail;
};

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point start) {
    return std::chrono::duration<double>(Clock::now() - start).count();
}

std::string fmt(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.2f", v);
    return buf;
}

const FieldCtx &gf81() {
    static const FieldCtx ctx = make_field(4);
    return ctx;
}

const FieldCtx &gf3_12() {
    static const FieldCtx ctx = make_field(12);
    return ctx;
}

std::uint64_t pow3(unsigned e) { return num::pow3(e); }

Outcome bound_k1() {
    const auto start = Clock::now();
    const FieldCtx ctx = make_field(4);
    const DecimationParams p = decimation_params(1);
    const auto spec = spectrum_direct(ctx, p);
    const BoundResult b = check_bound(spec, p.bound_squared());
    const double t = seconds_since(start);
    return {spec.size() == 80 && b.pass && p.bound_squared() == 2116 && t < 1.0,
            "80 shifts, max |C|^2 = " + std::to_string(b.max_mag2) + " <= 2116, " + fmt(t) + " s"};
}

Outcome decomposition_k1() {
    const FieldCtx &ctx = gf81();
    const DecimationParams p = decimation_params(1);
    const Sequence s = m_sequence(ctx);
    const Sequence dec = decimate(s, p.d);
    std::uint64_t ok = 0;
    for (std::uint64_t tau = 0; tau < 80; ++tau) {
        const EisensteinValue direct = cross_correlation(s, dec, tau);
        const EisensteinValue brute = (oracle::sum_of(oracle::form_counts(ctx, p, false, tau)) +
                                       oracle::sum_of(oracle::form_counts(ctx, p, true, tau)))
                                          .halved() -
                                      EisensteinValue{1, 0};
        const EisensteinValue closed = s_d_quadform(ctx, p, tau) - EisensteinValue{1, 0};
        ok += direct == brute && direct == closed;
    }
    return {ok == 80, std::to_string(ok) + "/80 shifts agree exactly"};
}

Outcome kernels() {
    const DecimationParams p1 = decimation_params(1);
    std::uint64_t ok1 = 0;
    for (std::uint64_t tau = 0; tau < 80; ++tau) {
        const std::size_t k1 = linearized_kernel_q1(gf81(), p1, tau);
        const std::size_t rad = radical_dim(gram_matrix(build_form(gf81(), p1, FormKind::Q1, tau)));
        ok1 += (k1 == 0 || k1 == 2 || k1 == 4) && k1 == rad && linearized_kernel_q2(gf81(), p1, tau) == 0;
    }
    const DecimationParams p3 = decimation_params(3);
    const auto taus = sample_shifts(gf3_12().order(), 1000, 20240601);
    std::uint64_t ok3 = 0;
    for (std::uint64_t tau : taus) {
        const std::size_t k1 = linearized_kernel_q1(gf3_12(), p3, tau);
        const std::size_t rad = radical_dim(gram_matrix(build_form(gf3_12(), p3, FormKind::Q1, tau)));
        ok3 += (k1 == 0 || k1 == 2 || k1 == 4) && k1 == rad && linearized_kernel_q2(gf3_12(), p3, tau) == 0;
    }
    return {ok1 == 80 && ok3 == taus.size() && taus.size() >= 1000,
            "k=1 " + std::to_string(ok1) + "/80, k=3 " + std::to_string(ok3) + "/" + std::to_string(taus.size()) +
                " seeded shifts"};
}

Outcome counts_n4() {
    const FieldCtx &ctx = gf81();
    const DecimationParams p = decimation_params(1);
    std::uint64_t ok = 0;
    std::string witness;
    for (bool second : {false, true}) {
        for (std::uint64_t tau = 0; tau < 80; ++tau) {
            const QuadFormSpec qf = build_form(ctx, p, second ? FormKind::Q2 : FormKind::Q1, tau);
            const auto brute = oracle::form_counts(ctx, p, second, tau);
            bool match = char_sum(qf) == oracle::sum_of(brute);
            for (Trit c = 0; c < 3; ++c) {
                match = match && count_solutions(qf, c) == brute[c];
            }
            ok += match;
            if (!match && witness.empty()) {
                witness = "; mismatch at " + std::string(to_string(qf.kind)) + " tau=" + std::to_string(tau) +
                          " (check the even/odd-rank solution-count formulas)";
            }
        }
    }
    return {ok == 160, std::to_string(ok) + "/160 (tau, form) pairs match 81-element counts and sums" + witness};
}

Outcome sweep_k3() {
    const auto start = Clock::now();
    const FieldCtx &ctx = gf3_12();
    const DecimationParams p = decimation_params(3);
    const QuadformSpectrum qs(ctx, p);
    const auto all = qs.range(0, ctx.order());
    std::vector<SpectrumEntry> entries;
    entries.reserve(all.size());
    for (const auto &a : all) {
        entries.push_back({a.tau, a.c_d, a.mag2});
    }
    const BoundResult b = check_bound(entries, p.bound_squared());
    const double sweep_time = seconds_since(start);

    const Sequence s = m_sequence(ctx);
    const Sequence dec = decimate(s, p.d);
    const auto taus = sample_shifts(ctx.order(), 100, 7);
    std::uint64_t confirmed = 0;
    for (std::uint64_t tau : taus) {
        confirmed += cross_correlation(s, dec, tau) == all[tau].c_d;
    }
    const double total = seconds_since(start);
    return {all.size() == 531440 && b.pass && p.bound() == 3646 && confirmed == taus.size() && taus.size() >= 100,
            std::to_string(all.size()) + " shifts in " + fmt(sweep_time) + " s, max |C|^2 = " +
                std::to_string(b.max_mag2) + " <= 3646^2, " + std::to_string(confirmed) + "/" +
                std::to_string(taus.size()) + " direct confirmations, " + fmt(total) + " s total"};
}

Outcome identities() {
    bool ok = true;
    std::string detail;
    for (unsigned k : {1U, 3U, 5U}) {
        const num::u128 e2 = num::pow3_wide(2 * k) + 1;
        const num::u128 e1 = num::pow3_wide(2 * (k + 1)) + 1;
        const num::u128 L = num::pow3_wide(4 * k) - 1;
        const bool div = e2 * e2 % 20 == 0;
        const num::u128 d = e2 * e2 / 20;
        const bool cong = d % L * (e1 % L) % L == e2 % L;
        const bool gcd = num::gcd_wide(e1, L) == 2;
        const ParameterIdentities ids = parameter_identities(k);
        const bool lib = ids.twenty_divides_square && ids.congruence && ids.gcd_is_two;
        ok = ok && div && cong && gcd && lib;
        detail += "k=" + std::to_string(k) + ":" + (div && cong && gcd && lib ? "ok " : "FAIL ");
    }
    return {ok, detail + "(20 | (3^{2k}+1)^2, congruence, gcd = 2)"};
}

Outcome msequence_properties() {
    bool ok = true;
    std::string detail;
    for (const FieldCtx *ctx : {&gf81(), &gf3_12()}) {
        const Sequence s = m_sequence(*ctx);
        const unsigned n = static_cast<unsigned>(ctx->degree());
        std::array<std::uint64_t, 3> hist{};
        for (auto v : s.values) {
            ++hist[v];
        }
        const bool balance = hist[0] == pow3(n - 1) - 1 && hist[1] == pow3(n - 1) && hist[2] == pow3(n - 1);
        std::vector<std::uint64_t> taus;
        if (n == 4) {
            for (std::uint64_t t = 1; t < s.period(); ++t) {
                taus.push_back(t);
            }
        } else {
            for (std::uint64_t t : sample_shifts(s.period() - 1, 200, 3)) {
                taus.push_back(t + 1);
            }
        }
        std::uint64_t two_level = 0;
        for (std::uint64_t t : taus) {
            two_level += cross_correlation(s, s, t) == EisensteinValue{-1, 0};
        }
        const bool peak = cross_correlation(s, s, 0) == EisensteinValue{static_cast<std::int64_t>(s.period()), 0};
        ok = ok && balance && peak && two_level == taus.size();
        detail += std::string(detail.empty() ? "" : "; ") + "n=" + std::to_string(n) + ": counts " + std::to_string(hist[0]) + "/" + std::to_string(hist[1]) +
                  "/" + std::to_string(hist[2]) + ", C=-1 on " + std::to_string(two_level) + "/" +
                  std::to_string(taus.size()) + " shifts";
    }
    return {ok, detail};
}

Outcome value_set_k1() {
    const FieldCtx &ctx = gf81();
    const DecimationParams p = decimation_params(1);
    const std::set<std::int64_t> allowed = {0, 9, -9, 18, -18, 36, -36, 45, -45};
    const std::set<std::int64_t> frozen = {-9, 0, 9, 18};
    std::set<std::int64_t> observed;
    bool ok = true;
    for (std::uint64_t tau = 0; tau < 80; ++tau) {
        const EisensteinValue v = oracle::s_d_by_enumeration(ctx, p.d, tau);
        ok = ok && v.y == 0 && allowed.contains(v.x) && v == s_d_quadform(ctx, p, tau);
        observed.insert(v.x);
    }
    std::string list;
    for (auto v : observed) {
        list += (list.empty() ? "" : ", ") + std::to_string(v);
    }
    return {ok && observed == frozen, "observed S_d values {" + list + "}"};
}

Outcome negative_control() {
    const Sequence s = m_sequence(gf81());
    const auto spec = spectrum_direct(s, decimate(s, 1));
    const BoundResult b = check_bound(spec, decimation_params(1).bound_squared());
    const bool ok = !b.pass && b.witness && b.witness->tau == 0 && b.witness->c_d == EisensteinValue{80, 0};
    return {ok, std::string("undecimated pair ") + (b.pass ? "ACCEPTED" : "rejected") + ", witness tau=" +
                    (b.witness ? std::to_string(b.witness->tau) : "none") +
                    (b.witness ? ", |C|^2 = " + std::to_string(b.witness->mag2) : "")};
}

} // namespace

int main() {
    const std::pair<const char *, std::function<Outcome()>> criteria[] = {
        {"bound at k=1", bound_k1},
        {"correlation decomposition at k=1", decomposition_k1},
        {"kernel/radical equivalence", kernels},
        {"solution counts and character sums at n=4", counts_n4},
        {"full k=3 sweep", sweep_k3},
        {"parameter identities", identities},
        {"m-sequence balance and autocorrelation", msequence_properties},
        {"value set at k=1", value_set_k1},
        {"negative control", negative_control},
    };
    int failures = 0;
    int index = 0;
    for (const auto &[name, fn] : criteria) {
        ++index;
        Outcome out;
        try {
            out = fn();
        } catch (const std::exception &e) {
            out = {false, std::string("exception: ") + e.what()};
        }
        failures += !out.pass;
        std::printf("%s [%d] %s: %s\n", out.pass ? "PASS" : "FAIL", index, name, out.detail.c_str());
        std::fflush(stdout);
    }
    std::printf("%d/%d criteria passed\n", index - failures, index);
    return failures == 0 ? 0 : 1;
}
