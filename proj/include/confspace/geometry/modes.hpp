#pragma once

#include <Eigen/QR>

#include <algorithm>
#include <array>
#include <numbers>
#include <random>
#include <string>
#include <vector>

#include "confspace/geometry/cochain.hpp"

namespace confspace::geometry {

struct InnerProduct {
    enum class Kind { L2, Sobolev };
    Kind kind = Kind::L2;
    int sobolev_p = 0;

    static InnerProduct l2() { return {}; }
    static InnerProduct sobolev(int p) {
        require(p >= 0, "inner product: Sobolev order must be non-negative");
        return {Kind::Sobolev, p};
    }
    std::string name() const { return kind == Kind::L2 ? "l2" : "sobolev-" + std::to_string(sobolev_p); }
};

/// Plane-wave seed tau_a * trig(2 pi k.x / L) dx^mu.
struct ModeSeed {
    std::array<int, 3> k{};  // signed representative
    int a = 0;
    int mu = 0;
    bool sine = false;
};

/// Seed family in the documented order: (|k|^2, k lexicographic, a, mu, cos before sin).
/// One representative of each pair {k, -k}; self-paired wavevectors carry cosines only.
inline std::vector<ModeSeed> mode_seeds(int n) {
    auto signed_rep = [n](int c) { return c <= n / 2 ? c : c - n; };
    std::vector<std::pair<std::array<int, 3>, bool>> reps;  // (signed k, self-paired)
    for (int kz = 0; kz < n; ++kz)
        for (int ky = 0; ky < n; ++ky)
            for (int kx = 0; kx < n; ++kx) {
                std::array<int, 3> s{signed_rep(kx), signed_rep(ky), signed_rep(kz)};
                std::array<int, 3> m{signed_rep((n - kx) % n), signed_rep((n - ky) % n), signed_rep((n - kz) % n)};
                const bool self = (2 * kx) % n == 0 && (2 * ky) % n == 0 && (2 * kz) % n == 0;
                if (self || s > m) reps.emplace_back(s, self);
            }
    std::sort(reps.begin(), reps.end(), [](const auto& x, const auto& y) {
        auto norm2 = [](const std::array<int, 3>& k) { return k[0] * k[0] + k[1] * k[1] + k[2] * k[2]; };
        const int nx = norm2(x.first), ny = norm2(y.first);
        if (nx != ny) return nx < ny;
        return x.first < y.first;
    });
    std::vector<ModeSeed> seeds;
    for (const auto& [k, self] : reps)
        for (int a = 0; a < 3; ++a)
            for (int mu = 0; mu < 3; ++mu) {
                seeds.push_back({k, a, mu, false});
                if (!self) seeds.push_back({k, a, mu, true});
            }
    return seeds;
}

/// Real su(2) coefficient vector (index edge * 3 + a) of a seed.
inline Eigen::VectorXd seed_coefficients(const Lattice& lat, const ModeSeed& s) {
    Eigen::VectorXd c = Eigen::VectorXd::Zero(9 * lat.vertices());
    const double two_pi_over_n = 2.0 * std::numbers::pi / lat.n();
    for (std::int64_t v = 0; v < lat.vertices(); ++v) {
        const auto x = lat.coords(v);
        const double phase = two_pi_over_n * (s.k[0] * x[0] + s.k[1] * x[1] + s.k[2] * x[2]);
        const std::int64_t edge = v * 3 + s.mu;
        c[edge * 3 + s.a] = s.sine ? std::sin(phase) : std::cos(phase);
    }
    return c;
}

/// (1 + Laplacian^p) on coefficient vectors of 1-cochains.
inline Eigen::VectorXd sobolev_weight(const Lattice& lat, const Eigen::VectorXd& c, int p) {
    Eigen::VectorXd out = c;
    Eigen::VectorXd cur = c;
    const double inv_h2 = 1.0 / (lat.spacing() * lat.spacing());
    for (int step = 0; step < p; ++step) {
        Eigen::VectorXd nxt(cur.size());
        for (std::int64_t v = 0; v < lat.vertices(); ++v)
            for (int s = 0; s < 9; ++s) {
                double acc = 6.0 * cur[v * 9 + s];
                for (int d = 0; d < 3; ++d) acc -= cur[lat.shift(v, d, 1) * 9 + s] + cur[lat.shift(v, d, -1) * 9 + s];
                nxt[v * 9 + s] = acc * inv_h2;
            }
        cur = nxt;
    }
    if (p > 0) out += cur;
    return out;
}

class ModeBasis {
public:
    ModeBasis(Lattice lat, InnerProduct ip, std::vector<ModeSeed> labels, Eigen::MatrixXd coeffs)
        : lat_(lat), ip_(ip), labels_(std::move(labels)), coeffs_(std::move(coeffs)) {
        for (Eigen::Index i = 0; i < coeffs_.cols(); ++i) modes_.push_back(from_coefficients(lat_, 1, coeffs_.col(i)));
    }

    const Lattice& lattice() const { return lat_; }
    const InnerProduct& inner_product() const { return ip_; }
    int size() const { return static_cast<int>(modes_.size()); }
    const LieCochain& operator[](int i) const { return modes_[static_cast<std::size_t>(i)]; }
    const std::vector<LieCochain>& modes() const { return modes_; }
    /// Column i holds the coefficients of mode i (index edge * 3 + a).
    const Eigen::MatrixXd& coefficients() const { return coeffs_; }
    /// Seed that introduced each mode.
    const std::vector<ModeSeed>& labels() const { return labels_; }

    /// Gram matrix under the basis inner product.
    Eigen::MatrixXd gram() const { return gram_under(ip_); }

    Eigen::MatrixXd gram_under(const InnerProduct& ip) const {
        Eigen::MatrixXd w(coeffs_.rows(), coeffs_.cols());
        for (Eigen::Index i = 0; i < coeffs_.cols(); ++i)
            w.col(i) = ip.kind == InnerProduct::Kind::L2 ? Eigen::VectorXd(coeffs_.col(i))
                                                          : sobolev_weight(lat_, coeffs_.col(i), ip.sobolev_p);
        return w.transpose() * w * lat_.cell_volume();
    }

    /// A = sum_i x_i xi_i.
    LieCochain connection(const Eigen::VectorXd& x) const {
        require(x.size() == size(), "connection: coordinate length mismatch");
        return from_coefficients(lat_, 1, coeffs_ * x);
    }

private:
    Lattice lat_;
    InnerProduct ip_;
    std::vector<ModeSeed> labels_;
    Eigen::MatrixXd coeffs_;
    std::vector<LieCochain> modes_;
};

/// Orthonormal su(2)-valued 1-form modes from the plane-wave seeds by modified Gram-Schmidt (two passes).
inline ModeBasis build_mode_basis(const Lattice& lat, int count, const InnerProduct& ip = InnerProduct::l2()) {
    const std::int64_t full = 9 * lat.vertices();
    require(count >= 0, "mode basis: count must be non-negative");
    if (count > full)
        throw DomainError("mode basis: requested " + std::to_string(count) + " modes but only " +
                          std::to_string(full) + " exist on this lattice");
    const auto seeds = mode_seeds(lat.n());
    const double h3 = lat.cell_volume();
    auto weight = [&](const Eigen::VectorXd& c) {
        return ip.kind == InnerProduct::Kind::L2 ? c : sobolev_weight(lat, c, ip.sobolev_p);
    };
    Eigen::MatrixXd basis(full, count), weighted(full, count);
    std::vector<ModeSeed> labels;
    int accepted = 0;
    for (const auto& s : seeds) {
        if (accepted == count) break;
        Eigen::VectorXd w = seed_coefficients(lat, s);
        Eigen::VectorXd tw = weight(w);
        const double n0 = std::sqrt(tw.squaredNorm() * h3);
        for (int pass = 0; pass < 2; ++pass)
            for (int j = 0; j < accepted; ++j) {
                const double c = weighted.col(j).dot(tw) * h3;
                w -= c * basis.col(j);
                tw -= c * weighted.col(j);
            }
        const double nrm = std::sqrt(tw.squaredNorm() * h3);
        if (nrm < 1e-10 * n0) continue;
        basis.col(accepted) = w / nrm;
        weighted.col(accepted) = tw / nrm;
        labels.push_back(s);
        ++accepted;
    }
    if (accepted < count) throw InternalError("mode basis: seed family did not span the requested dimension");
    return ModeBasis(lat, ip, std::move(labels), std::move(basis));
}

/// L2-orthonormal family of random su(2)-valued 1-forms; mixes polarizations and wavevectors.
template <class Rng>
ModeBasis random_mode_family(const Lattice& lat, int count, Rng& rng) {
    const std::int64_t full = 9 * lat.vertices();
    require(count >= 0 && count <= full, "random mode family: count out of range");
    std::normal_distribution<double> g;
    Eigen::MatrixXd a(full, count);
    for (Eigen::Index j = 0; j < a.cols(); ++j)
        for (Eigen::Index i = 0; i < a.rows(); ++i) a(i, j) = g(rng);
    Eigen::HouseholderQR<Eigen::MatrixXd> qr(a);
    Eigen::MatrixXd q = qr.householderQ() * Eigen::MatrixXd::Identity(full, count);
    q /= std::sqrt(lat.cell_volume());
    return ModeBasis(lat, InnerProduct::l2(), std::vector<ModeSeed>(static_cast<std::size_t>(count)), std::move(q));
}

/// Mode-component coordinate: an edge and an su(2) component.
struct EvaluationPoint {
    std::int64_t edge = 0;
    int component = 0;
};

inline double mode_value(const ModeBasis& b, int i, const EvaluationPoint& m) {
    return b.coefficients()(m.edge * 3 + m.component, i);
}

} // namespace confspace::geometry
