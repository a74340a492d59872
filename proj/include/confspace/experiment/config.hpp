#pragma once

#include <cmath>
#include <cstdint>
#include <cstdio>
#include <fstream>
#include <map>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "confspace/errors.hpp"

namespace confspace::experiment {

using nlohmann::json;

inline const std::vector<std::string>& suite_names() {
    static const std::vector<std::string> names{"car-relations",  "real-structure",    "cs-gradient",
                                                "rotate-square",  "ym-sectors",        "field-commutators",
                                                "spectral-invariant", "kernel-degeneracy"};
    return names;
}

struct ExperimentConfig {
    int schema_version = 1;
    struct {
        int n = 2;
        double spacing = 0.5;
    } lattice;
    struct {
        int count = 2;
        std::string inner_product = "l2";
        int sobolev_p = 1;
    } modes;
    struct {
        int modes = 4;
    } fermion;
    struct {
        int cutoff = 4;
        int padding = 96;
    } boson;
    struct {
        double k = 0.07957747154594767;
        int cutoff = 8;
        std::string polynomial = "random";
    } rotation;
    struct {
        std::string kind = "flat";
        double strength = 0.1;
    } frame;
    struct {
        std::vector<int> car_modes{6, 12};
        int cs_modes = 9;
        int cs_points = 10;
        int ym_modes = 7;
        int ym_cutoff = 2;
        int field_modes = 3;
        int field_max_modes = 6;
        int spectral_modes = 12;
        int real_cutoff = 3;
    } suites;
    struct {
        std::int64_t max_hilbert_dim = 1 << 20;
        std::int64_t max_dense_dim = 2000;
    } limits;
    std::uint64_t seed = 12648430;
    struct {
        std::string dir = "out";
        std::string format = "csv";
    } output;

    /// Canonical echo of the validated configuration (sorted keys), without output.dir.
    json echo;
};

namespace detail {

class Reader {
public:
    Reader(const json& j, std::string path) : j_(j), path_(std::move(path)) {
        if (!j_.is_object()) fail("", "must be an object");
    }

    ~Reader() = default;

    /// Throws on keys that were never read.
    void finish() const {
        for (const auto& [k, v] : j_.items())
            if (!seen_.count(k)) fail(k, "unknown key");
    }

    bool has(const std::string& key) const { return j_.contains(key); }

    Reader child(const std::string& key) {
        seen_.insert(key);
        if (!j_.contains(key)) return Reader(json::object(), join(key));
        return Reader(j_.at(key), join(key));
    }

    template <class T>
    void get(const std::string& key, T& out) {
        seen_.insert(key);
        if (!j_.contains(key)) return;
        const json& v = j_.at(key);
        try {
            if constexpr (std::is_same_v<T, double>) {
                if (!v.is_number()) fail(key, "expected a number");
            } else if constexpr (std::is_integral_v<T>) {
                if (!v.is_number_integer() && !v.is_number_unsigned()) fail(key, "expected an integer");
            } else if constexpr (std::is_same_v<T, std::string>) {
                if (!v.is_string()) fail(key, "expected a string");
            }
            out = v.get<T>();
        } catch (const json::exception& e) {
            fail(key, std::string("invalid value: ") + e.what());
        }
    }

    [[noreturn]] void fail(const std::string& key, const std::string& msg) const {
        throw ConfigurationError("config field '" + join(key) + "': " + msg);
    }

    std::string join(const std::string& key) const {
        if (key.empty()) return path_.empty() ? "<root>" : path_;
        return path_.empty() ? key : path_ + "." + key;
    }

private:
    const json j_;
    std::string path_;
    std::set<std::string> seen_;
};

inline void check(bool ok, const std::string& field, const std::string& msg) {
    if (!ok) throw ConfigurationError("config field '" + field + "': " + msg);
}

} // namespace detail

/// Parses and validates a configuration document; every bound is checked before any computation.
inline ExperimentConfig parse_config(const json& doc) {
    using detail::check;
    ExperimentConfig c;
    detail::Reader root(doc, "");
    root.get("schema_version", c.schema_version);
    check(root.has("schema_version"), "schema_version", "required");
    check(c.schema_version == 1, "schema_version", "unsupported version " + std::to_string(c.schema_version));

    auto lat = root.child("lattice");
    lat.get("n", c.lattice.n);
    lat.get("spacing", c.lattice.spacing);
    lat.finish();
    check(c.lattice.n >= 2 && c.lattice.n <= 8, "lattice.n", "must lie in [2, 8]");
    check(c.lattice.spacing > 0.0 && std::isfinite(c.lattice.spacing), "lattice.spacing", "must be positive");
    const int max_modes = 9 * c.lattice.n * c.lattice.n * c.lattice.n;

    auto modes = root.child("modes");
    modes.get("count", c.modes.count);
    modes.get("inner_product", c.modes.inner_product);
    modes.get("sobolev_p", c.modes.sobolev_p);
    modes.finish();
    check(c.modes.count >= 1 && c.modes.count <= max_modes, "modes.count",
          "must lie in [1, 9 n^3 = " + std::to_string(max_modes) + "]");
    check(c.modes.inner_product == "l2" || c.modes.inner_product == "sobolev", "modes.inner_product",
          "must be \"l2\" or \"sobolev\"");
    check(c.modes.sobolev_p >= 0 && c.modes.sobolev_p <= 4, "modes.sobolev_p", "must lie in [0, 4]");

    auto fermion = root.child("fermion");
    fermion.get("modes", c.fermion.modes);
    fermion.finish();
    check(c.fermion.modes >= c.modes.count && c.fermion.modes <= 16, "fermion.modes",
          "must lie in [modes.count, 16]");

    auto bos = root.child("boson");
    bos.get("cutoff", c.boson.cutoff);
    bos.get("padding", c.boson.padding);
    bos.finish();
    check(c.boson.cutoff >= 1 && c.boson.cutoff <= 32, "boson.cutoff", "must lie in [1, 32]");

    auto rot = root.child("rotation");
    rot.get("k", c.rotation.k);
    rot.get("cutoff", c.rotation.cutoff);
    rot.get("polynomial", c.rotation.polynomial);
    rot.finish();
    check(std::isfinite(c.rotation.k) && c.rotation.k != 0.0, "rotation.k", "must be finite and nonzero");
    check(c.rotation.cutoff >= 3 && c.rotation.cutoff <= 32, "rotation.cutoff", "must lie in [3, 32]");
    check(c.rotation.polynomial == "random" || c.rotation.polynomial == "lattice" || c.rotation.polynomial == "zero",
          "rotation.polynomial", "must be \"random\", \"lattice\" or \"zero\"");
    check(c.boson.padding > c.rotation.cutoff + 1 && c.boson.padding <= 512, "boson.padding",
          "must exceed rotation.cutoff + 1 and be at most 512");

    auto fr = root.child("frame");
    fr.get("kind", c.frame.kind);
    fr.get("strength", c.frame.strength);
    fr.finish();
    check(c.frame.kind == "flat" || c.frame.kind == "linear-x", "frame.kind", "must be \"flat\" or \"linear-x\"");
    check(std::isfinite(c.frame.strength) && std::abs(c.frame.strength) <= 1.0, "frame.strength",
          "must lie in [-1, 1]");

    auto su = root.child("suites");
    {
        auto car = su.child("car-relations");
        car.get("modes", c.suites.car_modes);
        car.finish();
        check(!c.suites.car_modes.empty(), "suites.car-relations.modes", "must be a non-empty list");
        for (int m : c.suites.car_modes)
            check(m >= 1 && m <= 20, "suites.car-relations.modes", "entries must lie in [1, 20]");
        auto rs = su.child("real-structure");
        rs.get("cutoff", c.suites.real_cutoff);
        rs.finish();
        check(c.suites.real_cutoff >= 1 && c.suites.real_cutoff <= 16, "suites.real-structure.cutoff",
              "must lie in [1, 16]");
        auto cs = su.child("cs-gradient");
        cs.get("modes", c.suites.cs_modes);
        cs.get("points", c.suites.cs_points);
        cs.finish();
        check(c.suites.cs_modes >= 1 && c.suites.cs_modes <= max_modes, "suites.cs-gradient.modes",
              "must lie in [1, 9 n^3]");
        check(c.suites.cs_points >= 1 && c.suites.cs_points <= 1000, "suites.cs-gradient.points",
              "must lie in [1, 1000]");
        auto ym = su.child("ym-sectors");
        ym.get("modes", c.suites.ym_modes);
        ym.get("cutoff", c.suites.ym_cutoff);
        ym.finish();
        check(c.suites.ym_modes >= 1 && c.suites.ym_modes <= max_modes, "suites.ym-sectors.modes",
              "must lie in [1, 9 n^3]");
        check(c.suites.ym_cutoff >= 1, "suites.ym-sectors.cutoff", "must be at least 1");
        auto fc = su.child("field-commutators");
        fc.get("modes", c.suites.field_modes);
        fc.get("max_modes", c.suites.field_max_modes);
        fc.finish();
        check(c.suites.field_modes >= 1 && c.suites.field_modes <= max_modes, "suites.field-commutators.modes",
              "must lie in [1, 9 n^3]");
        check(c.suites.field_max_modes >= c.suites.field_modes && c.suites.field_max_modes <= max_modes,
              "suites.field-commutators.max_modes", "must lie in [modes, 9 n^3]");
        auto sp = su.child("spectral-invariant");
        sp.get("modes", c.suites.spectral_modes);
        sp.finish();
        check(c.suites.spectral_modes >= 1 && c.suites.spectral_modes <= max_modes,
              "suites.spectral-invariant.modes", "must lie in [1, 9 n^3]");
        su.finish();
    }

    auto lim = root.child("limits");
    lim.get("max_hilbert_dim", c.limits.max_hilbert_dim);
    lim.get("max_dense_dim", c.limits.max_dense_dim);
    lim.finish();
    check(c.limits.max_hilbert_dim >= 1 && c.limits.max_hilbert_dim <= (std::int64_t{1} << 26),
          "limits.max_hilbert_dim", "must lie in [1, 2^26]");
    check(c.limits.max_dense_dim >= 1 && c.limits.max_dense_dim <= 8000, "limits.max_dense_dim",
          "must lie in [1, 8000]");

    root.get("seed", c.seed);

    auto out = root.child("output");
    out.get("dir", c.output.dir);
    out.get("format", c.output.format);
    out.finish();
    check(!c.output.dir.empty(), "output.dir", "must be non-empty");
    check(c.output.format == "csv" || c.output.format == "json-lines", "output.format",
          "must be \"csv\" or \"json-lines\"");
    root.finish();

    c.echo = doc;
    if (c.echo.contains("output")) c.echo["output"].erase("dir");
    return c;
}

inline ExperimentConfig load_config(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ConfigurationError("cannot open config file '" + path + "'");
    std::stringstream ss;
    ss << in.rdbuf();
    json doc;
    try {
        doc = json::parse(ss.str());
    } catch (const json::parse_error& e) {
        throw ConfigurationError("config file '" + path + "' is not valid JSON: " + e.what());
    }
    return parse_config(doc);
}

/// FNV-1a 64 of the canonical config echo, as 16 hex digits.
inline std::string config_hash(const ExperimentConfig& c) {
    const std::string s = c.echo.dump();
    std::uint64_t h = 1469598103934665603ULL;
    for (unsigned char ch : s) {
        h ^= ch;
        h *= 1099511628211ULL;
    }
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
    return buf;
}

/// Largest Hilbert-space dimensions a suite will allocate, keyed by description.
inline std::map<std::string, std::int64_t> suite_dimensions(const ExperimentConfig& c, const std::string& suite) {
    auto pw = [](std::int64_t b, int e) {
        std::int64_t r = 1;
        for (int i = 0; i < e; ++i) {
            if (r > (std::int64_t{1} << 40) / std::max<std::int64_t>(b, 1)) return std::int64_t{1} << 40;
            r *= b;
        }
        return r;
    };
    std::map<std::string, std::int64_t> d;
    const int N = c.modes.count, M = c.fermion.modes;
    if (suite == "car-relations") {
        int mm = 0;
        for (int m : c.suites.car_modes) mm = std::max(mm, m);
        d["fock"] = pw(2, mm);
    } else if (suite == "real-structure") {
        d["fock"] = pw(2, std::max(6, M));
        d["doubled composite"] = 2 * pw(c.suites.real_cutoff + 1, N) * pw(2, M);
        d["doubled composite (kernel vector)"] = 2 * pw(c.suites.real_cutoff + 2, N) * pw(2, M);
    } else if (suite == "rotate-square") {
        d["padded boson"] = pw(c.boson.padding, N);
        d["composite"] = pw(c.rotation.cutoff + 1, N) * pw(2, M);
    } else if (suite == "ym-sectors") {
        d["boson"] = pw(c.suites.ym_cutoff + 1, c.suites.ym_modes);
        d["dense free boson"] = pw(c.boson.cutoff + 1, 2);
    } else if (suite == "field-commutators") {
        d["boson"] = pw(c.boson.cutoff + 1, c.suites.field_modes);
    } else if (suite == "spectral-invariant") {
        d["boson"] = pw(2, c.suites.spectral_modes);
    } else if (suite == "kernel-degeneracy") {
        d["doubled composite"] = 2 * pw(c.boson.cutoff + 1, N) * pw(2, M);
    }
    return d;
}

/// Refuses any suite whose dimensions exceed the configured caps.
inline void check_resources(const ExperimentConfig& c, const std::string& suite) {
    for (const auto& [what, dim] : suite_dimensions(c, suite))
        if (dim > c.limits.max_hilbert_dim)
            throw ResourceError("suite " + suite + ": " + what + " dimension " + std::to_string(dim) +
                                " exceeds limits.max_hilbert_dim = " + std::to_string(c.limits.max_hilbert_dim));
    if (suite == "ym-sectors" && suite_dimensions(c, suite)["dense free boson"] > c.limits.max_dense_dim)
        throw ResourceError("suite ym-sectors: dense free spectrum exceeds limits.max_dense_dim");
}

/// Expands "all" and rejects unknown suite names.
inline std::vector<std::string> resolve_suites(const std::string& name) {
    if (name == "all") return suite_names();
    for (const auto& s : suite_names())
        if (s == name) return {name};
    std::string msg = "unknown suite '" + name + "'; expected one of: all";
    for (const auto& s : suite_names()) msg += ", " + s;
    throw ConfigurationError(msg);
}

} // namespace confspace::experiment
