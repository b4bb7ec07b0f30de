// tools/terncorr.cpp: command-line front end for the terncorr library.

#include <terncorr/speclab.hpp>

#include <CLI11.hpp>

#include <iostream>
#include <string>

int main(int argc, char **argv) {
    using namespace terncorr;
    using namespace terncorr::speclab;

    CLI::App app{"Cross-correlation of the ternary m-sequence of period 3^{4k}-1 and its "
                 "decimation by d = (3^{2k}+1)^2/20"};
    app.require_subcommand(1);

    std::string tau = "all";
    std::string format = "csv";
    std::string out;
    std::string modulus;
    std::uint64_t decimation = 0;
    RunConfig cfg;

    auto add_common = [&](CLI::App *sub) {
        sub->add_option("--k", cfg.k, "odd k; n = 4k")->capture_default_str();
        sub->add_option("--modulus", modulus, "primitive modulus as little-endian trits, e.g. 2,1,0,0,1");
        sub->add_option("--tau", tau, "all | A..B | sample:N")->capture_default_str();
        sub->add_option("--seed", cfg.seed, "seed for mt19937_64 shift sampling")->capture_default_str();
        sub->add_option("--budget", cfg.budget, "work budget in symbol operations")->capture_default_str();
        sub->add_option("--out", out, "output file");
        sub->add_option("--format", format, "csv | json")->check(CLI::IsMember({"csv", "json"}))->capture_default_str();
        sub->add_option("--direct-checks", cfg.direct_checks, "shifts confirmed by direct summation")
            ->capture_default_str();
        sub->add_option("--lemma-checks", cfg.lemma_checks, "shifts used by per-shift lemma checks")
            ->capture_default_str();
        sub->add_option("--threads", cfg.workers, "worker threads (0 = hardware concurrency)")->capture_default_str();
    };

    struct Entry {
        Command command;
        const char *help;
    };
    const Entry entries[] = {
        {Command::Spectrum, "compute C_d(tau) by both routes and export"},
        {Command::VerifyBound, "check |C_d(tau)| <= 5*3^{n/2}+1 exactly"},
        {Command::RankDist, "histogram of (rank q1, rank q2) and signs"},
        {Command::VerifyLemmas, "run the identity suite"},
        {Command::Sample, "seeded shift sample, both routes"},
    };
    for (const auto &e : entries) {
        CLI::App *sub = app.add_subcommand(std::string(to_string(e.command)), e.help);
        add_common(sub);
        if (e.command == Command::Spectrum || e.command == Command::VerifyBound || e.command == Command::Sample) {
            sub->add_option("--decimation", decimation, "override d (direct route only)");
        }
        sub->callback([&cfg, c = e.command] { cfg.command = c; });
    }

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError &e) {
        const int rc = app.exit(e);
        return rc == 0 ? kExitOk : kExitInvalidConfig;
    }

    try {
        cfg.tau = TauSelection::parse(tau);
    } catch (const Error &e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitInvalidConfig;
    }
    cfg.format = format == "json" ? OutputFormat::Json : OutputFormat::Csv;
    if (!out.empty()) {
        cfg.out = out;
    }
    if (!modulus.empty()) {
        cfg.modulus = modulus;
    }
    if (decimation != 0) {
        cfg.decimation = decimation;
    }
    const RunResult res = run(cfg, std::cout);
    if (!res.error.empty()) {
        std::cerr << "error: " << res.error << '\n';
    }
    return res.exit_code;
}
