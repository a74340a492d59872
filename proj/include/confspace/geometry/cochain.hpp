#pragma once

#include <Eigen/Dense>

#include <bit>
#include <complex>
#include <vector>

#include "confspace/geometry/lattice.hpp"
#include "confspace/geometry/lie.hpp"

namespace confspace::geometry {

/// 2x2-matrix-valued k-cochain. Values are component densities, so d carries a factor 1/h and
/// integration carries h^3.
class LieCochain {
public:
    LieCochain(const Lattice& lat, int degree)
        : lat_(lat), degree_(degree), values_(static_cast<std::size_t>(lat.cells(degree)), Mat2::Zero()) {}

    const Lattice& lattice() const { return lat_; }
    int degree() const { return degree_; }
    std::size_t size() const { return values_.size(); }

    Mat2& operator[](std::int64_t cell) { return values_[static_cast<std::size_t>(cell)]; }
    const Mat2& operator[](std::int64_t cell) const { return values_[static_cast<std::size_t>(cell)]; }

    const Mat2& at(std::int64_t v, unsigned mask) const { return (*this)[lat_.cell(v, mask)]; }
    Mat2& at(std::int64_t v, unsigned mask) { return (*this)[lat_.cell(v, mask)]; }

    LieCochain& operator+=(const LieCochain& o) {
        check_compatible(o);
        for (std::size_t i = 0; i < values_.size(); ++i) values_[i] += o.values_[i];
        return *this;
    }
    LieCochain& operator-=(const LieCochain& o) {
        check_compatible(o);
        for (std::size_t i = 0; i < values_.size(); ++i) values_[i] -= o.values_[i];
        return *this;
    }
    LieCochain& operator*=(std::complex<double> s) {
        for (auto& x : values_) x *= s;
        return *this;
    }
    friend LieCochain operator+(LieCochain a, const LieCochain& b) { return a += b; }
    friend LieCochain operator-(LieCochain a, const LieCochain& b) { return a -= b; }
    friend LieCochain operator*(std::complex<double> s, LieCochain a) { return a *= s; }
    friend LieCochain operator*(double s, LieCochain a) { return a *= std::complex<double>(s, 0.0); }

    double max_abs() const {
        double r = 0.0;
        for (const auto& x : values_) r = std::max(r, x.cwiseAbs().maxCoeff());
        return r;
    }

    void check_compatible(const LieCochain& o) const {
        require(lat_ == o.lat_, "cochain: lattice mismatch");
        require(degree_ == o.degree_, "cochain: degree mismatch");
    }

private:
    Lattice lat_;
    int degree_;
    std::vector<Mat2> values_;
};

namespace detail {

/// Sign of the shuffle putting I before J into increasing order.
inline int shuffle_sign(unsigned I, unsigned J) {
    int inversions = 0;
    for (int i = 0; i < 3; ++i)
        if (I & (1u << i))
            for (int j = 0; j < i; ++j)
                if (J & (1u << j)) ++inversions;
    return (inversions % 2) ? -1 : 1;
}

inline std::vector<unsigned> masks_of_degree(int degree) {
    std::vector<unsigned> out;
    for (int s = 0; s < Lattice::cells_per_vertex(degree); ++s) out.push_back(Lattice::mask_of(degree, s));
    return out;
}

template <bool Front>
LieCochain cup_impl(const LieCochain& a, const LieCochain& b) {
    require(a.lattice() == b.lattice(), "cup: lattice mismatch");
    const int p = a.degree(), q = b.degree();
    require(p + q <= 3, "cup: total degree exceeds 3");
    const Lattice& lat = a.lattice();
    LieCochain out(lat, p + q);
    const auto targets = masks_of_degree(p + q);
    for (std::int64_t v = 0; v < lat.vertices(); ++v) {
        for (unsigned S : targets) {
            Mat2 acc = Mat2::Zero();
            for (unsigned I = 0; I < 8; ++I) {
                if ((I & ~S) != 0 || std::popcount(I) != p) continue;
                const unsigned J = S & ~I;
                const int sg = shuffle_sign(I, J);
                if constexpr (Front)
                    acc += static_cast<double>(sg) * a.at(v, I) * b.at(lat.shift_mask(v, I), J);
                else
                    acc += static_cast<double>(sg) * a.at(lat.shift_mask(v, J), I) * b.at(v, J);
            }
            out.at(v, S) = acc;
        }
    }
    return out;
}

} // namespace detail

/// Coboundary: incidence numbers divided by h.
inline LieCochain coboundary(const LieCochain& w) {
    const int k = w.degree();
    require(k <= 2, "coboundary: degree must be at most 2");
    const Lattice& lat = w.lattice();
    LieCochain out(lat, k + 1);
    const double inv_h = 1.0 / lat.spacing();
    const auto targets = detail::masks_of_degree(k + 1);
    for (std::int64_t v = 0; v < lat.vertices(); ++v) {
        for (unsigned S : targets) {
            Mat2 acc = Mat2::Zero();
            int pos = 0;
            for (int j = 0; j < 3; ++j) {
                if (!(S & (1u << j))) continue;
                const unsigned face = S & ~(1u << j);
                const double sg = (pos % 2) ? -1.0 : 1.0;
                acc += sg * (w.at(lat.shift(v, j), face) - w.at(v, face));
                ++pos;
            }
            out.at(v, S) = acc * inv_h;
        }
    }
    return out;
}

/// Front-back cubical cup product: alpha on the front face, beta on the back face.
inline LieCochain cup_front(const LieCochain& a, const LieCochain& b) { return detail::cup_impl<true>(a, b); }

/// Back-front cubical cup product: alpha on the back face, beta on the front face.
inline LieCochain cup_back(const LieCochain& a, const LieCochain& b) { return detail::cup_impl<false>(a, b); }

/// Symmetric cubical cup product, used as the wedge product of matrix-valued cochains.
inline LieCochain wedge(const LieCochain& a, const LieCochain& b) {
    LieCochain out = cup_front(a, b);
    out += cup_back(a, b);
    out *= std::complex<double>(0.5, 0.0);
    return out;
}

/// Sum over 3-cells of Tr(value) h^3.
inline std::complex<double> trace_integrate(const LieCochain& c) {
    require(c.degree() == 3, "trace_integrate: expected a 3-cochain");
    std::complex<double> acc = 0.0;
    for (std::size_t i = 0; i < c.size(); ++i) acc += c[static_cast<std::int64_t>(i)].trace();
    return acc * c.lattice().cell_volume();
}

/// <x, y> = sum Tr(x* y) h^3, conjugate-linear in x.
inline std::complex<double> inner_product(const LieCochain& x, const LieCochain& y) {
    x.check_compatible(y);
    std::complex<double> acc = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        const auto c = static_cast<std::int64_t>(i);
        acc += (x[c].adjoint() * y[c]).trace();
    }
    return acc * x.lattice().cell_volume();
}

/// Integral of Tr(a wedge b) for degrees summing to 3.
inline std::complex<double> pairing(const LieCochain& a, const LieCochain& b) {
    require(a.degree() + b.degree() == 3, "pairing: degrees must sum to 3");
    return trace_integrate(wedge(a, b));
}

/// Componentwise 7-point lattice Laplacian (positive semidefinite sign convention).
inline LieCochain laplacian(const LieCochain& w) {
    const Lattice& lat = w.lattice();
    const int per = Lattice::cells_per_vertex(w.degree());
    const double inv_h2 = 1.0 / (lat.spacing() * lat.spacing());
    LieCochain out(lat, w.degree());
    for (std::int64_t v = 0; v < lat.vertices(); ++v) {
        for (int s = 0; s < per; ++s) {
            Mat2 acc = 6.0 * w[v * per + s];
            for (int d = 0; d < 3; ++d) acc -= w[lat.shift(v, d, 1) * per + s] + w[lat.shift(v, d, -1) * per + s];
            out[v * per + s] = acc * inv_h2;
        }
    }
    return out;
}

/// max over cells of the su(2) defect.
inline double su2_defect(const LieCochain& c) {
    double r = 0.0;
    for (std::size_t i = 0; i < c.size(); ++i) r = std::max(r, su2_defect(c[static_cast<std::int64_t>(i)]));
    return r;
}

/// Real su(2) coefficients, index cell * 3 + a.
inline Eigen::VectorXd to_coefficients(const LieCochain& c) {
    const auto& tb = lie_basis();
    Eigen::VectorXd out(static_cast<Eigen::Index>(3 * c.size()));
    for (std::size_t i = 0; i < c.size(); ++i) out.segment<3>(static_cast<Eigen::Index>(3 * i)) = tb.coefficients(c[static_cast<std::int64_t>(i)]);
    return out;
}

inline LieCochain from_coefficients(const Lattice& lat, int degree, const Eigen::VectorXd& coeffs) {
    LieCochain c(lat, degree);
    require(coeffs.size() == static_cast<Eigen::Index>(3 * c.size()), "from_coefficients: length mismatch");
    const auto& tb = lie_basis();
    for (std::size_t i = 0; i < c.size(); ++i)
        c[static_cast<std::int64_t>(i)] = tb.element(coeffs.segment<3>(static_cast<Eigen::Index>(3 * i)));
    return c;
}

} // namespace confspace::geometry
