#include <cstdio>
#include <iostream>
#include <optional>

#include <CLI11.hpp>

#include "confspace/experiment/suites.hpp"

namespace {

enum Exit { kOk = 0, kChecksFailed = 1, kUsage = 2, kResource = 3, kInternal = 4 };

int run(const std::string& config_path, const std::string& suite, const std::optional<std::string>& out_dir,
        const std::optional<std::uint64_t>& seed, bool timings) {
    using namespace confspace::experiment;
    ExperimentConfig cfg = load_config(config_path);
    if (seed) {
        cfg.seed = *seed;
        cfg.echo["seed"] = *seed;
    }
    if (out_dir) {
        cfg.output.dir = *out_dir;
    }
    const auto suites = resolve_suites(suite);
    const auto report = run_suites(cfg, suites, [&](const std::string& s, double sec) {
        if (timings) std::fprintf(stderr, "%-20s %8.3f s\n", s.c_str(), sec);
    });
    const auto files = emit(cfg, report, cfg.output.dir);
    for (const auto& c : report.checks)
        if (c.asserted && !c.pass())
            std::fprintf(stderr, "FAIL %s: %s (%g %s %g)\n", c.suite.c_str(), c.name.c_str(), c.residual,
                         c.relation.c_str(), c.tolerance);
    std::printf("%d checks, %d asserted, %d failed; report %s\n", static_cast<int>(report.checks.size()),
                report.asserted(), report.failed(), files[0].string().c_str());
    return report.failed() == 0 ? kOk : kChecksFailed;
}

int validate(const std::string& config_path) {
    using namespace confspace::experiment;
    const ExperimentConfig cfg = load_config(config_path);
    for (const auto& s : suite_names()) check_resources(cfg, s);
    std::printf("config ok, hash %s\n", config_hash(cfg).c_str());
    return kOk;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Dirac operators on a truncated configuration space: verification suites"};
    app.require_subcommand(1);

    std::string config, suite = "all";
    std::string out_dir;
    std::uint64_t seed = 0;
    bool timings = false;
    auto* run_cmd = app.add_subcommand("run", "run verification suites and write the report");
    run_cmd->add_option("--config", config, "config file (JSON)")->required();
    run_cmd->add_option("--suite", suite, "suite name or 'all'")->required();
    auto* out_opt = run_cmd->add_option("--out", out_dir, "output directory (overrides output.dir)");
    auto* seed_opt = run_cmd->add_option("--seed", seed, "RNG seed (overrides seed)");
    run_cmd->add_flag("--timings", timings, "print per-suite wall time to stderr");

    std::string vconfig;
    auto* val_cmd = app.add_subcommand("validate", "validate a config file and its resource caps");
    val_cmd->add_option("--config", vconfig, "config file (JSON)")->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? kOk : kUsage;
    }

    try {
        if (*run_cmd)
            return run(config, suite, *out_opt ? std::optional(out_dir) : std::nullopt,
                       *seed_opt ? std::optional(seed) : std::nullopt, timings);
        return validate(vconfig);
    } catch (const confspace::ConfigurationError& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return kUsage;
    } catch (const confspace::ResourceError& e) {
        std::fprintf(stderr, "refused: %s\n", e.what());
        return kResource;
    } catch (const confspace::DomainError& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return kUsage;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "internal error: %s\n", e.what());
        return kInternal;
    }
}
