// include/terncorr/speclab.hpp: run configuration, the five terncorr commands,
// verification reports and CSV/JSON export.

#pragma once

#include <terncorr/eisenstein.hpp>
#include <terncorr/error.hpp>
#include <terncorr/field.hpp>
#include <terncorr/params.hpp>
#include <terncorr/quadform.hpp>
#include <terncorr/sequence.hpp>
#include <terncorr/verify.hpp>

#include <nlohmann/json.hpp>

#include <algorithm>
#include <charconv>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <map>
#include <optional>
#include <ostream>
#include <sstream>
#include <string>
#include <string_view>
#include <tuple>
#include <vector>

namespace terncorr::speclab {

enum class Command { Spectrum, VerifyBound, RankDist, VerifyLemmas, Sample };
enum class OutputFormat { Csv, Json };

enum ExitCode : int {
    kExitOk = 0,
    kExitCheckFailed = 1,
    kExitInvalidConfig = 2,
    kExitBudgetRefused = 3,
};

inline std::string_view to_string(Command c) noexcept {
    switch (c) {
    case Command::Spectrum: return "spectrum";
    case Command::VerifyBound: return "verify-bound";
    case Command::RankDist: return "rank-dist";
    case Command::VerifyLemmas: return "verify-lemmas";
    case Command::Sample: return "sample";
    }
    return "?";
}

inline std::optional<Command> parse_command(std::string_view s) {
    for (auto c : {Command::Spectrum, Command::VerifyBound, Command::RankDist, Command::VerifyLemmas, Command::Sample}) {
        if (to_string(c) == s) {
            return c;
        }
    }
    return std::nullopt;
}

inline std::uint64_t parse_u64(std::string_view s, std::string_view what) {
    std::uint64_t v = 0;
    const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc{} || ptr != s.data() + s.size() || s.empty()) {
        throw Error(ErrorCode::Parse, "invalid " + std::string(what) + " '" + std::string(s) + "'");
    }
    return v;
}

/// all | A..B (inclusive) | sample:N
struct TauSelection {
    enum class Kind { All, Range, Sample };
    Kind kind = Kind::All;
    std::uint64_t first = 0;
    std::uint64_t last = 0;
    std::uint64_t count = 0;

    static TauSelection parse(std::string_view s) {
        TauSelection sel;
        if (s == "all") {
            return sel;
        }
        if (s.starts_with("sample:")) {
            sel.kind = Kind::Sample;
            sel.count = parse_u64(s.substr(7), "sample size");
            if (sel.count == 0) {
                throw Error(ErrorCode::Parse, "sample size must be positive");
            }
            return sel;
        }
        const auto dots = s.find("..");
        if (dots == std::string_view::npos) {
            throw Error(ErrorCode::Parse, "tau must be all, A..B or sample:N, got '" + std::string(s) + "'");
        }
        sel.kind = Kind::Range;
        sel.first = parse_u64(s.substr(0, dots), "range start");
        sel.last = parse_u64(s.substr(dots + 2), "range end");
        if (sel.first > sel.last) {
            throw Error(ErrorCode::Parse, "empty shift range");
        }
        return sel;
    }

    [[nodiscard]] std::string to_string() const {
        switch (kind) {
        case Kind::All: return "all";
        case Kind::Range: return std::to_string(first) + ".." + std::to_string(last);
        case Kind::Sample: return "sample:" + std::to_string(count);
        }
        return "?";
    }
};

struct RunConfig {
    Command command = Command::Spectrum;
    unsigned k = 1;
    std::optional<std::string> modulus;
    TauSelection tau;
    std::uint64_t seed = 1;
    std::uint64_t budget = kDefaultWorkBudget;
    std::optional<std::filesystem::path> out;
    OutputFormat format = OutputFormat::Csv;
    // Replaces d by an arbitrary decimation; only the direct route applies then.
    std::optional<std::uint64_t> decimation;
    std::uint64_t direct_checks = 100;
    std::uint64_t lemma_checks = 1000;
    unsigned workers = 0;
};

struct Check {
    enum class Status { Pass, Fail, Skipped };
    std::string name;
    Status status = Status::Pass;
    std::string detail;
};

inline std::string_view to_string(Check::Status s) noexcept {
    switch (s) {
    case Check::Status::Pass: return "PASS";
    case Check::Status::Fail: return "FAIL";
    case Check::Status::Skipped: return "SKIP";
    }
    return "?";
}

struct VerificationReport {
    std::vector<Check> checks;
    std::uint64_t bound = 0;
    std::uint64_t bound_squared = 0;
    std::uint64_t observed_max_mag2 = 0;
    std::uint64_t observed_argmax_tau = 0;
    std::uint64_t shifts = 0;

    void add(std::string name, bool pass, std::string detail) {
        checks.push_back({std::move(name), pass ? Check::Status::Pass : Check::Status::Fail, std::move(detail)});
    }
    void skip(std::string name, std::string detail) {
        checks.push_back({std::move(name), Check::Status::Skipped, std::move(detail)});
    }
    [[nodiscard]] bool all_pass() const {
        return std::none_of(checks.begin(), checks.end(),
                            [](const Check &c) { return c.status == Check::Status::Fail; });
    }
    [[nodiscard]] const Check *find(std::string_view name) const {
        for (const auto &c : checks) {
            if (c.name == name) {
                return &c;
            }
        }
        return nullptr;
    }
};

struct RunResult {
    int exit_code = kExitOk;
    VerificationReport report;
    std::string error;
};

/// One output row: C_d(tau) plus the rank data when the closed-form route ran.
struct Row {
    std::uint64_t tau = 0;
    EisensteinValue c_d;
    std::uint64_t mag2 = 0;
    std::optional<std::array<int, 4>> ranks; // rank_q1, rank_q2, eps1, eps2
};

namespace detail {

inline std::string value_string(EisensteinValue v) {
    return "(" + std::to_string(v.x) + ", " + std::to_string(v.y) + ")";
}

struct Session {
    RunConfig cfg;
    DecimationParams params;
    FieldCtx ctx;
    std::uint64_t d; // decimation actually used
    std::optional<Sequence> mseq;

    Session(const RunConfig &c, DecimationParams p, FieldCtx f)
        : cfg(c), params(p), ctx(std::move(f)), d(c.decimation.value_or(p.d)) {}

    [[nodiscard]] std::uint64_t period() const { return ctx.order(); }

    [[nodiscard]] bool sequence_feasible() const {
        return period() <= kDefaultMaxSequenceLength && period() <= cfg.budget;
    }

    const Sequence &sequence() {
        if (!mseq) {
            mseq = m_sequence(ctx);
        }
        return *mseq;
    }

    [[nodiscard]] std::uint64_t selection_size() const {
        switch (cfg.tau.kind) {
        case TauSelection::Kind::All: return period();
        case TauSelection::Kind::Range: return cfg.tau.last - cfg.tau.first + 1;
        case TauSelection::Kind::Sample: return std::min(cfg.tau.count, period());
        }
        return 0;
    }

    [[nodiscard]] std::vector<std::uint64_t> shifts() const {
        if (cfg.tau.kind == TauSelection::Kind::Range && cfg.tau.last >= period()) {
            throw Error(ErrorCode::InvalidArgument, "shift range must lie in [0, " + std::to_string(period() - 1) + "]");
        }
        if (cfg.tau.kind == TauSelection::Kind::Sample) {
            return sample_shifts(period(), cfg.tau.count, cfg.seed);
        }
        const std::uint64_t first = cfg.tau.kind == TauSelection::Kind::All ? 0 : cfg.tau.first;
        std::vector<std::uint64_t> out(selection_size());
        for (std::uint64_t i = 0; i < out.size(); ++i) {
            out[i] = first + i;
        }
        return out;
    }

    /// At most cap shifts of the selection, seeded; never materialises the full selection when it is larger.
    [[nodiscard]] std::vector<std::uint64_t> sampled_shifts(std::uint64_t cap, std::uint64_t seed) const {
        if (cfg.tau.kind == TauSelection::Kind::Sample || selection_size() <= cap) {
            return subsample(shifts(), cap, seed);
        }
        if (cfg.tau.kind == TauSelection::Kind::Range && cfg.tau.last >= period()) {
            throw Error(ErrorCode::InvalidArgument, "shift range must lie in [0, " + std::to_string(period() - 1) + "]");
        }
        const std::uint64_t first = cfg.tau.kind == TauSelection::Kind::All ? 0 : cfg.tau.first;
        auto out = sample_shifts(selection_size(), cap, seed);
        for (auto &t : out) {
            t += first;
        }
        return out;
    }

    void require_direct_budget(std::uint64_t shifts) const {
        const num::u128 work = static_cast<num::u128>(shifts) * period();
        if (work > cfg.budget || period() > kDefaultMaxSequenceLength) {
            throw Error(ErrorCode::FeasibilityRefused, "direct summation over " + std::to_string(shifts) +
                                                           " shifts of period " + std::to_string(period()) +
                                                           " exceeds budget " + std::to_string(cfg.budget));
        }
    }

    void require_quadform_budget() const {
        if (cfg.decimation) {
            throw Error(ErrorCode::InvalidArgument, "--decimation applies only to direct-route commands");
        }
        const std::uint64_t work = quadform_work(params.n, selection_size());
        if (work > cfg.budget) {
            throw Error(ErrorCode::FeasibilityRefused, "closed-form route needs " + std::to_string(work) +
                                                           " work units for " + std::to_string(selection_size()) +
                                                           " shifts, budget " + std::to_string(cfg.budget));
        }
    }

    [[nodiscard]] std::vector<ShiftAnalysis> analyse(const std::vector<std::uint64_t> &taus) const {
        require_quadform_budget();
        QuadformSpectrum qs(ctx, params);
        if (cfg.tau.kind != TauSelection::Kind::Sample && !taus.empty()) {
            return qs.range(taus.front(), taus.back() + 1, cfg.workers);
        }
        return qs.shifts(taus, cfg.workers);
    }

    /// C(tau) by direct summation for the given shifts.
    std::vector<SpectrumEntry> direct(const std::vector<std::uint64_t> &taus) {
        require_direct_budget(taus.size());
        const Sequence &s = sequence();
        const Sequence dec = decimate(s, d);
        std::vector<SpectrumEntry> out(taus.size());
        parallel_chunks(
            taus.size(),
            [&](std::uint64_t lo, std::uint64_t hi) {
                for (std::uint64_t i = lo; i < hi; ++i) {
                    const EisensteinValue v = cross_correlation(s, dec, taus[i]);
                    out[i] = {taus[i], v, mag2(v)};
                }
            },
            cfg.workers);
        return out;
    }

    /// Largest direct-route subset of taus the budget allows, capped at cap.
    [[nodiscard]] std::vector<std::uint64_t> direct_subset(const std::vector<std::uint64_t> &taus,
                                                           std::uint64_t cap) const {
        if (period() > kDefaultMaxSequenceLength) {
            return {};
        }
        const std::uint64_t affordable = cfg.budget / period();
        return subsample(taus, std::min(cap, affordable), cfg.seed ^ 0x9e3779b97f4a7c15ULL);
    }
};

inline Row row_from(const ShiftAnalysis &a) {
    return {a.tau, a.c_d, a.mag2, std::array<int, 4>{static_cast<int>(a.q1.rank), static_cast<int>(a.q2.rank),
                                                     a.q1.epsilon, a.q2.epsilon}};
}

inline Row row_from(const SpectrumEntry &e) { return {e.tau, e.c_d, e.mag2, std::nullopt}; }

inline nlohmann::ordered_json meta_json(const Session &s) {
    nlohmann::ordered_json m;
    m["command"] = std::string(to_string(s.cfg.command));
    m["k"] = s.params.k;
    m["n"] = s.params.n;
    m["d"] = s.d;
    m["modulus"] = s.ctx.modulus_string();
    m["seed"] = s.cfg.seed;
    m["tau"] = s.cfg.tau.to_string();
    m["bound"] = s.params.bound();
    m["bound_squared"] = s.params.bound_squared();
    return m;
}

inline nlohmann::ordered_json checks_json(const VerificationReport &rep) {
    auto arr = nlohmann::ordered_json::array();
    for (const auto &c : rep.checks) {
        arr.push_back({{"name", c.name}, {"status", std::string(to_string(c.status))}, {"detail", c.detail}});
    }
    return arr;
}

inline void write_file(const std::filesystem::path &path, const std::string &content) {
    std::ofstream os(path, std::ios::binary | std::ios::trunc);
    if (!os) {
        throw Error(ErrorCode::Io, "cannot open " + path.string() + " for writing");
    }
    os << content;
    if (!os) {
        throw Error(ErrorCode::Io, "write to " + path.string() + " failed");
    }
}

inline std::string rows_csv(const std::vector<Row> &rows) {
    std::string out = "tau,x,y,mag2,rank_q1,rank_q2,eps1,eps2\n";
    out.reserve(rows.size() * 40);
    for (const auto &r : rows) {
        out += std::to_string(r.tau) + ',' + std::to_string(r.c_d.x) + ',' + std::to_string(r.c_d.y) + ',' +
               std::to_string(r.mag2);
        if (r.ranks) {
            for (int v : *r.ranks) {
                out += ',' + std::to_string(v);
            }
        } else {
            out += ",,,,";
        }
        out += '\n';
    }
    return out;
}

inline nlohmann::ordered_json rows_json(const std::vector<Row> &rows) {
    auto arr = nlohmann::ordered_json::array();
    for (const auto &r : rows) {
        nlohmann::ordered_json j;
        j["tau"] = r.tau;
        j["x"] = r.c_d.x;
        j["y"] = r.c_d.y;
        j["mag2"] = r.mag2;
        if (r.ranks) {
            j["rank_q1"] = (*r.ranks)[0];
            j["rank_q2"] = (*r.ranks)[1];
            j["eps1"] = (*r.ranks)[2];
            j["eps2"] = (*r.ranks)[3];
        } else {
            j["rank_q1"] = nullptr;
            j["rank_q2"] = nullptr;
            j["eps1"] = nullptr;
            j["eps2"] = nullptr;
        }
        arr.push_back(std::move(j));
    }
    return arr;
}

inline void export_rows(const Session &s, const std::vector<Row> &rows, const VerificationReport &rep) {
    if (!s.cfg.out) {
        return;
    }
    if (s.cfg.format == OutputFormat::Csv) {
        write_file(*s.cfg.out, rows_csv(rows));
        return;
    }
    nlohmann::ordered_json doc;
    doc["meta"] = meta_json(s);
    doc["rows"] = rows_json(rows);
    doc["checks"] = checks_json(rep);
    write_file(*s.cfg.out, doc.dump(1) + "\n");
}

inline void export_checks(const Session &s, const VerificationReport &rep) {
    if (!s.cfg.out) {
        return;
    }
    if (s.cfg.format == OutputFormat::Csv) {
        std::string out = "check,status,detail\n";
        for (const auto &c : rep.checks) {
            std::string detail = c.detail;
            std::replace(detail.begin(), detail.end(), '"', '\'');
            out += c.name + ',' + std::string(to_string(c.status)) + ",\"" + detail + "\"\n";
        }
        write_file(*s.cfg.out, out);
        return;
    }
    nlohmann::ordered_json doc;
    doc["meta"] = meta_json(s);
    doc["observed_max_mag2"] = rep.observed_max_mag2;
    doc["observed_argmax_tau"] = rep.observed_argmax_tau;
    doc["checks"] = checks_json(rep);
    write_file(*s.cfg.out, doc.dump(1) + "\n");
}

/// Compares the closed-form rows against direct sums on a subset of shifts.
inline void dual_path_check(Session &s, const std::vector<ShiftAnalysis> &analyses, std::vector<std::uint64_t> subset,
                            VerificationReport &rep, std::string name = "dual-path") {
    if (subset.empty()) {
        rep.skip(std::move(name), "direct summation not affordable at period " + std::to_string(s.period()) +
                                      " under budget " + std::to_string(s.cfg.budget));
        return;
    }
    const auto direct = s.direct(subset);
    std::uint64_t agree = 0;
    std::string witness;
    for (const auto &e : direct) {
        const auto it = std::lower_bound(analyses.begin(), analyses.end(), e.tau,
                                         [](const ShiftAnalysis &a, std::uint64_t t) { return a.tau < t; });
        if (it != analyses.end() && it->tau == e.tau && it->c_d == e.c_d) {
            ++agree;
        } else if (witness.empty() && it != analyses.end()) {
            witness = "; first mismatch tau=" + std::to_string(e.tau) + " direct=" + value_string(e.c_d) +
                      " closed-form=" + value_string(it->c_d);
        }
    }
    rep.add(std::move(name), agree == direct.size(),
            std::to_string(agree) + "/" + std::to_string(direct.size()) + " shifts agree" + witness);
}

inline void bound_check(const std::vector<SpectrumEntry> &entries, const DecimationParams &params,
                        VerificationReport &rep) {
    const BoundResult res = check_bound(entries, params.bound_squared());
    rep.observed_max_mag2 = res.max_mag2;
    rep.observed_argmax_tau = res.argmax_tau;
    rep.shifts = entries.size();
    std::string detail = "max |C|^2 = " + std::to_string(res.max_mag2) + " at tau=" + std::to_string(res.argmax_tau) +
                         " over " + std::to_string(entries.size()) + " shifts; bound " +
                         std::to_string(params.bound()) + "^2 = " + std::to_string(params.bound_squared());
    if (res.witness) {
        detail += "; violation at tau=" + std::to_string(res.witness->tau) + " C=" + value_string(res.witness->c_d) +
                  " |C|^2=" + std::to_string(res.witness->mag2);
    }
    rep.add("bound", res.pass, detail);
}

/// The checker must reject the undecimated pair, whose peak C(0) = 3^n - 1.
inline void negative_control(Session &s, VerificationReport &rep) {
    if (!s.sequence_feasible()) {
        rep.skip("negative-control", "m-sequence of period " + std::to_string(s.period()) + " not materialised");
        return;
    }
    const Sequence &seq = s.sequence();
    const EisensteinValue peak = cross_correlation(seq, decimate(seq, 1), 0);
    const std::vector<SpectrumEntry> one{{0, peak, mag2(peak)}};
    const BoundResult res = check_bound(one, s.params.bound_squared());
    const bool rejected = !res.pass && res.witness && res.witness->tau == 0;
    rep.add("negative-control", rejected,
            std::string(rejected ? "checker rejects" : "checker ACCEPTS") + " d=1, tau=0 with C=" +
                value_string(peak));
}

inline std::vector<SpectrumEntry> entries_of(const std::vector<ShiftAnalysis> &analyses) {
    std::vector<SpectrumEntry> out;
    out.reserve(analyses.size());
    for (const auto &a : analyses) {
        out.push_back({a.tau, a.c_d, a.mag2});
    }
    return out;
}

inline void log_report(std::ostream &log, const VerificationReport &rep) {
    for (const auto &c : rep.checks) {
        log << to_string(c.status) << ' ' << c.name << ": " << c.detail << '\n';
    }
}

inline int exit_for(const VerificationReport &rep) { return rep.all_pass() ? kExitOk : kExitCheckFailed; }

// ---------------------------------------------------------------- commands

inline RunResult direct_only(Session &s, std::ostream &log, bool verify) {
    RunResult res;
    s.require_direct_budget(s.selection_size());
    const auto taus = s.shifts();
    const auto entries = s.direct(taus);
    if (verify) {
        bound_check(entries, s.params, res.report);
        negative_control(s, res.report);
    }
    std::vector<Row> rows;
    rows.reserve(entries.size());
    for (const auto &e : entries) {
        rows.push_back(row_from(e));
    }
    log << "direct route, d=" << s.d << ", " << entries.size() << " shifts\n";
    log_report(log, res.report);
    export_rows(s, rows, res.report);
    res.exit_code = exit_for(res.report);
    return res;
}

inline RunResult cmd_spectrum(Session &s, std::ostream &log, bool verify) {
    if (s.cfg.decimation) {
        return direct_only(s, log, verify);
    }
    RunResult res;
    res.report.bound = s.params.bound();
    res.report.bound_squared = s.params.bound_squared();
    s.require_quadform_budget();
    const auto taus = s.shifts();
    const auto analyses = s.analyse(taus);

    const bool full_direct = s.cfg.tau.kind == TauSelection::Kind::All &&
                             static_cast<num::u128>(s.period()) * s.period() <= s.cfg.budget;
    dual_path_check(s, analyses, full_direct ? taus : s.direct_subset(taus, s.cfg.direct_checks), res.report);

    const auto entries = entries_of(analyses);
    if (verify) {
        bound_check(entries, s.params, res.report);
        negative_control(s, res.report);
    } else {
        const BoundResult b = check_bound(entries, s.params.bound_squared());
        res.report.observed_max_mag2 = b.max_mag2;
        res.report.observed_argmax_tau = b.argmax_tau;
        res.report.shifts = entries.size();
    }
    std::vector<Row> rows;
    rows.reserve(analyses.size());
    for (const auto &a : analyses) {
        rows.push_back(row_from(a));
    }
    log << "k=" << s.params.k << " n=" << s.params.n << " d=" << s.params.d << " modulus=" << s.ctx.modulus_string()
        << " shifts=" << analyses.size() << " max|C|^2=" << res.report.observed_max_mag2
        << " (tau=" << res.report.observed_argmax_tau << ") bound^2=" << s.params.bound_squared() << '\n';
    log_report(log, res.report);
    export_rows(s, rows, res.report);
    res.exit_code = exit_for(res.report);
    return res;
}

inline bool allowed_combination(std::size_t n, std::size_t r1, std::size_t r2) {
    return r2 == n && (r1 == n || r1 + 2 == n || r1 + 4 == n);
}

inline RunResult cmd_rank_dist(Session &s, std::ostream &log) {
    RunResult res;
    s.require_quadform_budget();
    const auto taus = s.shifts();
    const auto analyses = s.analyse(taus);
    const std::size_t n = s.params.n;
    std::map<std::tuple<int, int, int, int>, std::uint64_t> signs;
    std::map<std::pair<int, int>, std::uint64_t> combos;
    std::uint64_t disallowed = 0;
    std::uint64_t odd = 0;
    std::string witness;
    for (const auto &a : analyses) {
        ++combos[{static_cast<int>(a.q1.rank), static_cast<int>(a.q2.rank)}];
        ++signs[{static_cast<int>(a.q1.rank), static_cast<int>(a.q2.rank), a.q1.epsilon, a.q2.epsilon}];
        if (!allowed_combination(n, a.q1.rank, a.q2.rank)) {
            if (disallowed++ == 0) {
                witness = "; first at tau=" + std::to_string(a.tau) + " ranks (" + std::to_string(a.q1.rank) + ", " +
                          std::to_string(a.q2.rank) + ")";
            }
        }
        if (a.q1.rank % 2 != 0 || a.q2.rank % 2 != 0) {
            ++odd;
        }
    }
    res.report.add("rank-combinations", disallowed == 0,
                   std::to_string(analyses.size() - disallowed) + "/" + std::to_string(analyses.size()) +
                       " shifts in {(n,n), (n-2,n), (n-4,n)}" + witness);
    res.report.add("rank-parity", odd == 0, std::to_string(odd) + " shifts with odd rank");

    log << "rank_q1 rank_q2 count\n";
    for (const auto &[key, count] : combos) {
        log << key.first << ' ' << key.second << ' ' << count << '\n';
    }
    log << "rank_q1 rank_q2 eps1 eps2 count\n";
    for (const auto &[key, count] : signs) {
        log << std::get<0>(key) << ' ' << std::get<1>(key) << ' ' << std::get<2>(key) << ' ' << std::get<3>(key) << ' '
            << count << '\n';
    }
    log_report(log, res.report);
    if (s.cfg.out) {
        if (s.cfg.format == OutputFormat::Csv) {
            std::string out = "rank_q1,rank_q2,eps1,eps2,count\n";
            for (const auto &[key, count] : signs) {
                out += std::to_string(std::get<0>(key)) + ',' + std::to_string(std::get<1>(key)) + ',' +
                       std::to_string(std::get<2>(key)) + ',' + std::to_string(std::get<3>(key)) + ',' +
                       std::to_string(count) + '\n';
            }
            write_file(*s.cfg.out, out);
        } else {
            nlohmann::ordered_json doc;
            doc["meta"] = meta_json(s);
            auto arr = nlohmann::ordered_json::array();
            for (const auto &[key, count] : signs) {
                arr.push_back({{"rank_q1", std::get<0>(key)},
                               {"rank_q2", std::get<1>(key)},
                               {"eps1", std::get<2>(key)},
                               {"eps2", std::get<3>(key)},
                               {"count", count}});
            }
            doc["histogram"] = arr;
            doc["checks"] = checks_json(res.report);
            write_file(*s.cfg.out, doc.dump(1) + "\n");
        }
    }
    res.exit_code = exit_for(res.report);
    return res;
}

inline RunResult cmd_sample(Session &s, std::ostream &log) {
    if (s.cfg.tau.kind != TauSelection::Kind::Sample) {
        throw Error(ErrorCode::InvalidArgument, "sample requires --tau sample:N");
    }
    RunResult res;
    s.require_quadform_budget();
    const auto taus = s.shifts();
    const auto analyses = s.analyse(taus);
    const num::u128 direct_work = static_cast<num::u128>(taus.size()) * s.period();
    const bool direct_ok = direct_work <= s.cfg.budget && s.period() <= kDefaultMaxSequenceLength;
    dual_path_check(s, analyses, direct_ok ? taus : std::vector<std::uint64_t>{}, res.report, "path-agreement");
    const BoundResult b = check_bound(entries_of(analyses), s.params.bound_squared());
    res.report.observed_max_mag2 = b.max_mag2;
    res.report.observed_argmax_tau = b.argmax_tau;
    res.report.shifts = analyses.size();
    std::vector<Row> rows;
    for (const auto &a : analyses) {
        rows.push_back(row_from(a));
    }
    log << "k=" << s.params.k << " seed=" << s.cfg.seed << " samples=" << analyses.size()
        << " max|C|^2=" << b.max_mag2 << " bound^2=" << s.params.bound_squared() << '\n';
    log_report(log, res.report);
    export_rows(s, rows, res.report);
    res.exit_code = exit_for(res.report);
    return res;
}

// ------------------------------------------------------------ verify-lemmas

inline void integer_lemmas(unsigned k, VerificationReport &rep) {
    const std::string tag = "[k=" + std::to_string(k) + "]";
    const ParameterIdentities ids = parameter_identities(k);
    rep.add("divisibility" + tag, ids.twenty_divides_square, "20 | (3^{2k}+1)^2");
    rep.add("congruence" + tag, ids.congruence, "d (3^{2(k+1)}+1) = 3^{2k}+1 mod 3^{4k}-1");
    rep.add("gcd" + tag, ids.gcd_is_two,
            "gcd(3^{2(k+1)}+1, 3^{4k}-1) = " + std::to_string(static_cast<std::uint64_t>(ids.gcd)));
    // 160 = 2^5 * 5 never divides an odd multiple of 3^{4k}-1 because v2(3^{4k}-1) = 4 for odd k.
    const num::u128 order = num::pow3_wide(4 * k) - 1;
    const unsigned v2 = num::two_adic_valuation(order);
    bool none = v2 < 5;
    for (num::u128 m = 1; m < 200; m += 2) {
        none = none && (m * order) % 160 != 0;
    }
    rep.add("no-160-odd-multiple" + tag, none, "v2(3^{4k}-1) = " + std::to_string(v2));
}

inline void subfield_lemmas(Session &s, VerificationReport &rep) {
    const FieldCtx &ctx = s.ctx;
    const FieldElement r = subfield_nonsquare(ctx);
    const FieldElement minus_one = ctx.neg(ctx.one());
    const bool in_gf81 = ctx.pow(r, 81) == r;
    const bool r40 = ctx.pow(r, 40) == minus_one;
    const bool r8d = ctx.pow(r, num::mulmod(8, s.params.d, ctx.order())) == minus_one;
    const bool frob = ctx.frobenius(r, s.params.shift1()) == r;
    const bool nonsquare = ctx.quadratic_character(r) == -1;
    rep.add("nonsquare-r", in_gf81 && r40 && r8d && frob && nonsquare,
            std::string("r^81=r:") + (in_gf81 ? "y" : "n") + " r^40=-1:" + (r40 ? "y" : "n") +
                " r^{8d}=-1:" + (r8d ? "y" : "n") + " r^{3^{2(k+1)}}=r:" + (frob ? "y" : "n") +
                " eta(r)=-1:" + (nonsquare ? "y" : "n"));
    const FieldElement rd = ctx.pow(r, s.params.d);
    const FieldElement r9d = ctx.pow(rd, 9);
    rep.add("q2-coefficient-cancels", ctx.add(rd, r9d).is_zero(), "r^{9d} + r^d = 0");

    if (!ctx.has_tables()) {
        rep.skip("coset-squares", "enumeration needs log tables (3^n above table budget)");
        rep.skip("coset-nonsquares", "enumeration needs log tables (3^n above table budget)");
        return;
    }
    // x = alpha^j  ->  x^{e1} = alpha^{j e1},  r x^{e1} = alpha^{log r + j e1}
    const std::uint64_t L = ctx.order();
    const std::uint64_t e1 = s.params.e1 % L;
    const std::uint64_t lr = ctx.log(r);
    std::vector<std::uint8_t> hits(L, 0);
    std::vector<std::uint8_t> hits_r(L, 0);
    std::uint64_t p = 0;
    for (std::uint64_t j = 0; j < L; ++j) {
        hits[p] = static_cast<std::uint8_t>(std::min(hits[p] + 1, 255));
        const std::uint64_t q = (p + lr) % L;
        hits_r[q] = static_cast<std::uint8_t>(std::min(hits_r[q] + 1, 255));
        p += e1;
        if (p >= L) {
            p -= L;
        }
    }
    bool squares_ok = true;
    bool nonsquares_ok = true;
    for (std::uint64_t e = 0; e < L; ++e) {
        const bool square = e % 2 == 0;
        squares_ok = squares_ok && hits[e] == (square ? 2 : 0);
        nonsquares_ok = nonsquares_ok && hits_r[e] == (square ? 0 : 2);
    }
    rep.add("coset-squares", squares_ok, "x -> x^{e1} hits every nonzero square exactly twice, no nonsquare");
    rep.add("coset-nonsquares", nonsquares_ok, "x -> r x^{e1} hits every nonsquare exactly twice, no square");
}

struct LemmaShift {
    std::uint64_t tau = 0;
    std::size_t kernel_q1 = 0;
    std::size_t kernel_q2 = 0;
    std::size_t kernel_q2_reduced = 0;
    std::size_t radical_q1 = 0;
    std::size_t radical_q2 = 0;
    bool sweep_agrees = false;
    ShiftAnalysis analysis;
};

inline void shift_invariance(Session &s, const std::vector<std::uint64_t> &taus, VerificationReport &rep) {
    if (s.ctx.size() > 81) {
        rep.skip("shift-invariance", "pointwise enumeration is run at n = 4 only");
        return;
    }
    const FieldCtx &ctx = s.ctx;
    std::uint64_t ok = 0;
    std::string witness;
    for (auto tau : taus) {
        const QuadFormSpec qf = build_form(ctx, s.params, FormKind::Q1, tau);
        std::vector<Trit> qv(ctx.size());
        for (std::uint64_t x = 0; x < ctx.size(); ++x) {
            qv[x] = evaluate(qf, ctx.element(x));
        }
        const Gf3Matrix op = linearized_operator_q1(ctx, s.params, tau);
        bool good = true;
        for (std::uint64_t y = 0; y < ctx.size() && good; ++y) {
            const FieldElement ye = ctx.element(y);
            const auto img = op.apply(ye.coeffs());
            const bool in_kernel = std::all_of(img.begin(), img.end(), [](Trit t) { return t == 0; });
            bool invariant = true;
            for (std::uint64_t x = 0; x < ctx.size() && invariant; ++x) {
                invariant = qv[ctx.add(ctx.element(x), ye).index()] == qv[x];
            }
            if (invariant != in_kernel) {
                good = false;
                witness = "; tau=" + std::to_string(tau) + " y=" + format_trits(ye.coeffs());
            }
        }
        ok += good ? 1 : 0;
    }
    rep.add("shift-invariance", ok == taus.size(),
            std::to_string(ok) + "/" + std::to_string(taus.size()) +
                " shifts: q1(x+y)=q1(x) for all x exactly when y solves the linearized equation" + witness);
}

inline void counting_lemmas(Session &s, const std::vector<std::uint64_t> &taus, VerificationReport &rep) {
    const FieldCtx &ctx = s.ctx;
    if (!ctx.has_tables() && ctx.size() > 81) {
        rep.skip("solution-counts", "enumeration of GF(3^n) needs log tables");
        rep.skip("character-sums", "enumeration of GF(3^n) needs log tables");
        return;
    }
    const Sequence *seq = ctx.has_tables() && s.sequence_feasible() ? &s.sequence() : nullptr;
    std::uint64_t count_ok = 0;
    std::uint64_t sum_ok = 0;
    std::string count_witness;
    std::string sum_witness;
    for (auto tau : taus) {
        bool counts_good = true;
        bool sums_good = true;
        for (auto kind : {FormKind::Q1, FormKind::Q2}) {
            const QuadFormSpec qf = build_form(ctx, s.params, kind, tau);
            const RankReport rr = rank_report(qf);
            const auto brute = brute_force_counts(qf, seq);
            for (Trit c = 0; c < 3; ++c) {
                if (count_solutions(ctx.degree(), rr.rank, rr.epsilon, c) != brute[c]) {
                    counts_good = false;
                    if (count_witness.empty()) {
                        count_witness = "; tau=" + std::to_string(tau) + " " + std::string(to_string(kind)) +
                                        " c=" + std::to_string(c) + " formula=" +
                                        std::to_string(count_solutions(ctx.degree(), rr.rank, rr.epsilon, c)) +
                                        " brute=" + std::to_string(brute[c]);
                    }
                }
            }
            const EisensteinValue direct_sum = character_sum_from_counts(brute);
            if (!(direct_sum == rr.char_sum)) {
                sums_good = false;
                if (sum_witness.empty()) {
                    sum_witness = "; tau=" + std::to_string(tau) + " " + std::string(to_string(kind)) +
                                  " formula=" + value_string(rr.char_sum) + " brute=" + value_string(direct_sum);
                }
            }
        }
        count_ok += counts_good ? 1 : 0;
        sum_ok += sums_good ? 1 : 0;
    }
    rep.add("solution-counts", count_ok == taus.size(),
            std::to_string(count_ok) + "/" + std::to_string(taus.size()) + " shifts, both forms" + count_witness);
    rep.add("character-sums", sum_ok == taus.size(),
            std::to_string(sum_ok) + "/" + std::to_string(taus.size()) + " shifts, both forms" + sum_witness);
}

inline RunResult cmd_verify_lemmas(Session &s, std::ostream &log) {
    if (s.cfg.decimation) {
        throw Error(ErrorCode::InvalidArgument, "--decimation is not accepted by verify-lemmas");
    }
    RunResult res;
    VerificationReport &rep = res.report;
    rep.bound = s.params.bound();
    rep.bound_squared = s.params.bound_squared();

    std::vector<unsigned> ks{1, 3, 5};
    if (std::find(ks.begin(), ks.end(), s.params.k) == ks.end()) {
        ks.push_back(s.params.k);
    }
    for (auto k : ks) {
        integer_lemmas(k, rep);
    }
    subfield_lemmas(s, rep);

    const auto taus = s.sampled_shifts(s.cfg.lemma_checks, s.cfg.seed);
    const std::size_t n = s.params.n;
    QuadformSpectrum qs(s.ctx, s.params);
    const FormSweep sweep1(s.ctx, s.params, FormKind::Q1);
    const FormSweep sweep2(s.ctx, s.params, FormKind::Q2);
    std::vector<LemmaShift> per(taus.size());
    parallel_chunks(
        taus.size(),
        [&](std::uint64_t lo, std::uint64_t hi) {
            for (std::uint64_t i = lo; i < hi; ++i) {
                LemmaShift &ls = per[i];
                ls.tau = taus[i];
                const QuadFormSpec f1 = build_form(s.ctx, s.params, FormKind::Q1, ls.tau);
                const QuadFormSpec f2 = build_form(s.ctx, s.params, FormKind::Q2, ls.tau);
                const GramMatrix g1 = gram_matrix(f1);
                const GramMatrix g2 = gram_matrix(f2);
                ls.radical_q1 = radical_dim(g1);
                ls.radical_q2 = radical_dim(g2);
                ls.kernel_q1 = linearized_kernel_q1(s.ctx, s.params, ls.tau);
                ls.kernel_q2 = linearized_kernel_q2(s.ctx, s.params, ls.tau);
                ls.kernel_q2_reduced = linearized_operator_q2_reduced(s.ctx, s.params, ls.tau).kernel_dim();
                ls.sweep_agrees = sweep1.gram(f1.a) == g1 && sweep2.gram(f2.a) == g2;
                ls.analysis = qs.analyse(ls.tau);
            }
        },
        s.cfg.workers);

    std::uint64_t kq1 = 0, kq2 = 0, sweep = 0, combos = 0, parity = 0, cases = 0;
    std::string w_kq1, w_kq2, w_case;
    const auto half = static_cast<std::int64_t>(s.params.sqrt_size());
    for (const auto &ls : per) {
        const bool q1_good = ls.kernel_q1 == ls.radical_q1 && (ls.kernel_q1 == 0 || ls.kernel_q1 == 2 || ls.kernel_q1 == 4);
        if (q1_good) {
            ++kq1;
        } else if (w_kq1.empty()) {
            w_kq1 = "; tau=" + std::to_string(ls.tau) + " kernel=" + std::to_string(ls.kernel_q1) +
                    " radical=" + std::to_string(ls.radical_q1);
        }
        const bool q2_good = ls.kernel_q2 == 0 && ls.radical_q2 == 0 && ls.kernel_q2_reduced == ls.kernel_q2;
        if (q2_good) {
            ++kq2;
        } else if (w_kq2.empty()) {
            w_kq2 = "; tau=" + std::to_string(ls.tau) + " kernel=" + std::to_string(ls.kernel_q2) +
                    " reduced=" + std::to_string(ls.kernel_q2_reduced) + " radical=" + std::to_string(ls.radical_q2);
        }
        sweep += ls.sweep_agrees ? 1 : 0;
        const auto &a = ls.analysis;
        combos += allowed_combination(n, a.q1.rank, a.q2.rank) ? 1 : 0;
        parity += (a.q1.rank % 2 == 0 && a.q2.rank % 2 == 0) ? 1 : 0;
        // |S_d| <= 3^{n/2}, 2 * 3^{n/2}, 5 * 3^{n/2} for rank(q1) = n, n-2, n-4
        const std::int64_t factor = a.q1.rank == n ? 1 : (a.q1.rank + 2 == n ? 2 : 5);
        const auto limit = static_cast<std::uint64_t>(factor * half);
        if (mag2(a.s_d) <= limit * limit) {
            ++cases;
        } else if (w_case.empty()) {
            w_case = "; tau=" + std::to_string(a.tau) + " S_d=" + value_string(a.s_d) + " rank_q1=" +
                     std::to_string(a.q1.rank);
        }
    }
    const std::string of = "/" + std::to_string(per.size()) + " shifts";
    rep.add("kernel-radical-q1", kq1 == per.size(),
            std::to_string(kq1) + of + ": linearized kernel dim = radical dim, in {0,2,4}" + w_kq1);
    rep.add("kernel-q2-trivial", kq2 == per.size(),
            std::to_string(kq2) + of + ": q2 operator (full and reduced) and radical are {0}" + w_kq2);
    rep.add("gram-sweep", sweep == per.size(), std::to_string(sweep) + of + ": affine Gram sweep = direct Gram");
    rep.add("rank-combinations", combos == per.size(), std::to_string(combos) + of + " in {(n,n),(n-2,n),(n-4,n)}");
    rep.add("rank-parity", parity == per.size(), std::to_string(parity) + of + " with even ranks");
    rep.add("case-bounds", cases == per.size(), std::to_string(cases) + of + " within the per-case |S_d| bound" + w_case);

    shift_invariance(s, taus, rep);

    const std::uint64_t brute_cap =
        std::min<std::uint64_t>(256, s.cfg.budget / std::max<std::uint64_t>(1, 2 * s.ctx.size()));
    counting_lemmas(s, subsample(taus, brute_cap, s.cfg.seed + 1), rep);

    std::vector<ShiftAnalysis> analyses;
    analyses.reserve(per.size());
    for (const auto &ls : per) {
        analyses.push_back(ls.analysis);
    }
    dual_path_check(s, analyses, s.direct_subset(taus, s.cfg.direct_checks), rep, "correlation-decomposition");

    log << "k=" << s.params.k << " n=" << n << " d=" << s.params.d << " modulus=" << s.ctx.modulus_string()
        << " lemma shifts=" << taus.size() << '\n';
    log_report(log, rep);
    export_checks(s, rep);
    res.exit_code = exit_for(rep);
    return res;
}

} // namespace detail

/// Runs one command; never throws. Exit codes: 0 pass, 1 check failed,
/// 2 invalid configuration, 3 budget refusal.
inline RunResult run(const RunConfig &cfg, std::ostream &log) {
    try {
        const DecimationParams params = decimation_params(cfg.k);
        std::optional<std::vector<Trit>> modulus;
        if (cfg.modulus) {
            modulus = parse_trits(*cfg.modulus);
        }
        detail::Session session(cfg, params, make_field(params.n, modulus));
        switch (cfg.command) {
        case Command::Spectrum: return detail::cmd_spectrum(session, log, false);
        case Command::VerifyBound: return detail::cmd_spectrum(session, log, true);
        case Command::RankDist: return detail::cmd_rank_dist(session, log);
        case Command::VerifyLemmas: return detail::cmd_verify_lemmas(session, log);
        case Command::Sample: return detail::cmd_sample(session, log);
        }
        throw Error(ErrorCode::InvalidArgument, "unknown command");
    } catch (const Error &e) {
        RunResult res;
        res.exit_code = e.code() == ErrorCode::FeasibilityRefused ? kExitBudgetRefused : kExitInvalidConfig;
        res.error = e.what();
        log << "error: " << e.what() << '\n';
        return res;
    } catch (const std::exception &e) {
        RunResult res;
        res.exit_code = kExitInvalidConfig;
        res.error = e.what();
        log << "error: " << e.what() << '\n';
        return res;
    }
}

} // namespace terncorr::speclab
