#pragma once

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "confspace/errors.hpp"
#include "confspace/experiment/config.hpp"

namespace confspace::experiment {

/// One verified identity: residual compared against a tolerance.
struct Check {
    std::string suite;
    std::string name;
    std::string identity;
    double residual = 0.0;
    std::string relation = "<";  // "<", ">" or ">="
    double tolerance = 0.0;
    bool asserted = true;

    bool pass() const {
        if (!std::isfinite(residual)) return false;
        if (relation == "<") return residual < tolerance;
        if (relation == ">") return residual > tolerance;
        return residual >= tolerance;
    }
};

struct Constant {
    std::string suite;
    std::string name;
    double value = 0.0;
};

struct SpectrumRow {
    std::string suite;
    std::int64_t index = 0;
    double eigenvalue = 0.0;
    double residual = 0.0;
};

struct KernelRow {
    std::int64_t m1 = 0, m2 = 0;
    int component = 0;
    double value = 0.0;
};

struct Report {
    std::vector<Check> checks;
    std::vector<Constant> constants;
    std::vector<SpectrumRow> spectra;
    std::vector<KernelRow> kernels;
    std::vector<std::string> suites;

    int failed() const {
        int n = 0;
        for (const auto& c : checks)
            if (c.asserted && !c.pass()) ++n;
        return n;
    }
    int asserted() const {
        int n = 0;
        for (const auto& c : checks) n += c.asserted;
        return n;
    }
};

namespace detail {

/// Shortest round-trip decimal form; identical on every run of the same build.
inline std::string format_double(double v) {
    if (std::isnan(v)) return "nan";
    if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
    char buf[32];
    for (int prec = 1; prec <= 17; ++prec) {
        std::snprintf(buf, sizeof buf, "%.*g", prec, v);
        if (std::strtod(buf, nullptr) == v) break;
    }
    return buf;
}

/// JSON cannot hold non-finite numbers; those become strings.
inline json number(double v) {
    if (std::isfinite(v)) return v;
    return format_double(v);
}

inline void write_text(const std::filesystem::path& p, const std::string& text) {
    std::ofstream out(p, std::ios::binary | std::ios::trunc);
    if (!out) throw ResourceError("cannot write '" + p.string() + "'");
    out << text;
    if (!out) throw ResourceError("write failed for '" + p.string() + "'");
}

} // namespace detail

/// JSON-lines report: a header, one line per check, one per discovered constant, and a summary.
inline std::string render_report(const ExperimentConfig& cfg, const Report& r) {
    std::string out;
    json header = {{"type", "header"},
                   {"schema_version", cfg.schema_version},
                   {"config", cfg.echo},
                   {"config_hash", config_hash(cfg)},
                   {"seed", cfg.seed},
                   {"suites", r.suites}};
    out += header.dump() + "\n";
    for (const auto& c : r.checks) {
        json j = {{"type", "check"},
                  {"suite", c.suite},
                  {"name", c.name},
                  {"identity", c.identity},
                  {"residual", detail::number(c.residual)},
                  {"relation", c.relation},
                  {"tolerance", detail::number(c.tolerance)},
                  {"asserted", c.asserted},
                  {"pass", c.pass()}};
        out += j.dump() + "\n";
    }
    for (const auto& c : r.constants) {
        json j = {{"type", "constant"}, {"suite", c.suite}, {"name", c.name}, {"value", detail::number(c.value)}};
        out += j.dump() + "\n";
    }
    json summary = {{"type", "summary"},
                    {"checks", r.checks.size()},
                    {"asserted", r.asserted()},
                    {"failed", r.failed()},
                    {"pass", r.failed() == 0}};
    out += summary.dump() + "\n";
    return out;
}

inline std::string render_spectra(const Report& r, const std::string& format) {
    std::string out;
    if (format == "csv") {
        out = "suite,index,eigenvalue,residual\n";
        for (const auto& s : r.spectra)
            out += s.suite + "," + std::to_string(s.index) + "," + detail::format_double(s.eigenvalue) + "," +
                   detail::format_double(s.residual) + "\n";
    } else {
        for (const auto& s : r.spectra)
            out += json{{"suite", s.suite},
                        {"index", s.index},
                        {"eigenvalue", detail::number(s.eigenvalue)},
                        {"residual", detail::number(s.residual)}}
                       .dump() +
                   "\n";
    }
    return out;
}

inline std::string render_kernels(const Report& r, const std::string& format) {
    std::string out;
    if (format == "csv") {
        out = "m1,m2,component,value\n";
        for (const auto& k : r.kernels)
            out += std::to_string(k.m1) + "," + std::to_string(k.m2) + "," + std::to_string(k.component) + "," +
                   detail::format_double(k.value) + "\n";
    } else {
        for (const auto& k : r.kernels)
            out += json{{"m1", k.m1}, {"m2", k.m2}, {"component", k.component}, {"value", detail::number(k.value)}}
                       .dump() +
                   "\n";
    }
    return out;
}

/// Writes report.jsonl plus spectra and kernels tables into dir; returns the files written.
inline std::vector<std::filesystem::path> emit(const ExperimentConfig& cfg, const Report& r,
                                               const std::filesystem::path& dir) {
    std::error_code ec;
    std::filesystem::create_directories(dir, ec);
    if (ec) throw ResourceError("cannot create output directory '" + dir.string() + "': " + ec.message());
    const std::string ext = cfg.output.format == "csv" ? ".csv" : ".jsonl";
    std::vector<std::filesystem::path> files{dir / "report.jsonl", dir / ("spectra" + ext), dir / ("kernels" + ext)};
    detail::write_text(files[0], render_report(cfg, r));
    detail::write_text(files[1], render_spectra(r, cfg.output.format));
    detail::write_text(files[2], render_kernels(r, cfg.output.format));
    return files;
}

} // namespace confspace::experiment
