// Acceptance runner: one line per criterion, exit status nonzero if any fails.
#include <chrono>
#include <cstdio>
#include <filesystem>
#include <string>
#include <vector>

#include "confspace/experiment/config.hpp"
#include "confspace/experiment/report.hpp"
#include "confspace/experiment/suites.hpp"

using namespace confspace::experiment;

namespace {

struct Criterion {
    int id;
    std::string title;
    std::string suite;
};

const std::vector<Criterion> kCriteria = {
    {1, "CAR and Clifford relations at M=6", "car-relations"},
    {2, "real structure and sector-wise J D J", "real-structure"},
    {3, "Chern-Simons gradient, finite differences, Bianchi", "cs-gradient"},
    {4, "conjugated derivative engine at cutoff 8", "rotate-square"},
    {5, "rotation-square dictionary, signs, normalization 1/2", "rotate-square"},
    {6, "Yang-Mills sectors and free spectrum", "ym-sectors"},
    {7, "canonical commutators and kernel concentration", "field-commutators"},
    {8, "spectral invariant", "spectral-invariant"},
    {9, "ground-state degeneracy at cutoff 4", "kernel-degeneracy"},
};

bool belongs(const Criterion& c, const Check& k) {
    if (k.suite != c.suite) return false;
    const bool engine = k.name.rfind("conjugated derivative", 0) == 0 || k.name.rfind("routes agree", 0) == 0;
    if (c.id == 4) return engine;
    if (c.id == 5) return !engine;
    return true;
}

} // namespace

int main(int argc, char** argv) {
    const std::filesystem::path path = argc > 1 ? argv[1] : CONFSPACE_DEFAULT_CONFIG;
    ExperimentConfig cfg;
    try {
        cfg = load_config(path);
    } catch (const std::exception& e) {
        std::printf("[FAIL] configuration: %s\n", e.what());
        return 2;
    }
    const auto suites = resolve_suites("all");
    int failures = 0;

    const auto t0 = std::chrono::steady_clock::now();
    const Report first = run_suites(cfg, suites);
    const double seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();

    for (const auto& c : kCriteria) {
        int total = 0, bad = 0;
        std::string worst;
        for (const auto& k : first.checks) {
            if (!k.asserted || !belongs(c, k)) continue;
            ++total;
            if (!k.pass()) {
                ++bad;
                if (worst.empty())
                    worst = k.name + " residual " + detail::format_double(k.residual) + " " + k.relation + " " +
                            detail::format_double(k.tolerance) + " fails";
            }
        }
        const bool ok = total > 0 && bad == 0;
        failures += !ok;
        std::printf("[%s] AC%d %s: %d/%d checks%s%s\n", ok ? "PASS" : "FAIL", c.id, c.title.c_str(), total - bad,
                    total, worst.empty() ? "" : "; ", worst.c_str());
    }

    const Report second = run_suites(cfg, suites);
    const bool same = render_report(cfg, first) == render_report(cfg, second) &&
                      render_spectra(first, "csv") == render_spectra(second, "csv") &&
                      render_kernels(first, "csv") == render_kernels(second, "csv") &&
                      render_spectra(first, "json-lines") == render_spectra(second, "json-lines") &&
                      render_kernels(first, "json-lines") == render_kernels(second, "json-lines");
    failures += !same;
    std::printf("[%s] AC10 determinism: report and tables byte-identical across two runs (%zu checks, %zu spectrum "
                "rows, %zu kernel rows)\n",
                same ? "PASS" : "FAIL", first.checks.size(), first.spectra.size(), first.kernels.size());
    std::printf("suite time %.2f s per run\n", seconds);
    return failures == 0 ? 0 : 1;
}
