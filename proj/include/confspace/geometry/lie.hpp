#pragma once

#include <Eigen/Dense>

#include <array>
#include <cmath>
#include <complex>

namespace confspace::geometry {

using Mat2 = Eigen::Matrix2cd;

/// Orthonormal basis of su(2) under <x, y> = Tr(x* y): tau_a = -i sigma_a / sqrt(2).
struct LieBasis {
    std::array<Mat2, 3> tau;

    LieBasis() {
        const std::complex<double> I(0.0, 1.0);
        const double s = 1.0 / std::sqrt(2.0);
        Mat2 s1, s2, s3;
        s1 << 0, 1, 1, 0;
        s2 << 0, -I, I, 0;
        s3 << 1, 0, 0, -1;
        tau[0] = -I * s * s1;
        tau[1] = -I * s * s2;
        tau[2] = -I * s * s3;
    }

    const Mat2& operator[](int a) const { return tau[static_cast<std::size_t>(a)]; }

    /// Real coefficients of an su(2) element.
    Eigen::Vector3d coefficients(const Mat2& x) const {
        Eigen::Vector3d c;
        for (int a = 0; a < 3; ++a) c[a] = (tau[a].adjoint() * x).trace().real();
        return c;
    }

    Mat2 element(const Eigen::Vector3d& c) const { return c[0] * tau[0] + c[1] * tau[1] + c[2] * tau[2]; }
};

inline const LieBasis& lie_basis() {
    static const LieBasis b;
    return b;
}

/// max of |X + X*| and |Tr X|.
inline double su2_defect(const Mat2& x) {
    return std::max((x + x.adjoint()).cwiseAbs().maxCoeff(), std::abs(x.trace()));
}

} // namespace confspace::geometry
