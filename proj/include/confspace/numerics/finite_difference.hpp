#pragma once

#include <functional>

#include "confspace/numerics/sparse.hpp"

namespace confspace::numerics {

/// Central-difference gradient of a scalar function.
inline RealVec finite_difference_gradient(const std::function<double(const RealVec&)>& f, const RealVec& x,
                                          double step = 1e-5) {
    require(step > 0.0, "finite_difference_gradient: step must be positive");
    RealVec g(x.size());
    RealVec y = x;
    for (Eigen::Index i = 0; i < x.size(); ++i) {
        y[i] = x[i] + step;
        const double fp = f(y);
        y[i] = x[i] - step;
        const double fm = f(y);
        y[i] = x[i];
        g[i] = (fp - fm) / (2.0 * step);
    }
    return g;
}

} // namespace confspace::numerics
