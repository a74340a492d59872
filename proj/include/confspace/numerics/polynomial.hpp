#pragma once

#include <algorithm>
#include <random>
#include <vector>

#include "confspace/numerics/sparse.hpp"

namespace confspace::numerics {

struct Monomial {
    double coeff = 0.0;
    std::vector<int> vars;  // sorted multiset of variable indices; empty for the constant term
};

/// Real polynomial in n variables as a list of monomials.
class Polynomial {
public:
    explicit Polynomial(int nvars = 0) : n_(nvars) {}

    int variables() const { return n_; }
    const std::vector<Monomial>& terms() const { return terms_; }

    Polynomial& add(double coeff, std::vector<int> vars) {
        for (int v : vars) require(v >= 0 && v < n_, "polynomial: variable index out of range");
        std::sort(vars.begin(), vars.end());
        if (coeff != 0.0) terms_.push_back({coeff, std::move(vars)});
        return *this;
    }

    int degree() const {
        int d = 0;
        for (const auto& t : terms_) d = std::max(d, static_cast<int>(t.vars.size()));
        return d;
    }

    bool is_zero() const {
        for (const auto& t : terms_)
            if (t.coeff != 0.0) return false;
        return true;
    }

    double evaluate(const RealVec& x) const {
        require(x.size() == n_, "polynomial: point dimension mismatch");
        double acc = 0.0;
        for (const auto& t : terms_) {
            double m = t.coeff;
            for (int v : t.vars) m *= x[v];
            acc += m;
        }
        return acc;
    }

    /// Partial derivative in variable i.
    Polynomial derivative(int i) const {
        require(i >= 0 && i < n_, "polynomial: variable index out of range");
        Polynomial out(n_);
        for (const auto& t : terms_) {
            const auto cnt = std::count(t.vars.begin(), t.vars.end(), i);
            if (cnt == 0) continue;
            std::vector<int> rest = t.vars;
            rest.erase(std::find(rest.begin(), rest.end(), i));
            out.add(t.coeff * static_cast<double>(cnt), rest);
        }
        return out;
    }

    Polynomial scaled(double s) const {
        Polynomial out(n_);
        for (const auto& t : terms_) out.add(s * t.coeff, t.vars);
        return out;
    }

    friend Polynomial operator+(const Polynomial& a, const Polynomial& b) {
        require(a.n_ == b.n_, "polynomial: variable count mismatch");
        Polynomial out = a;
        for (const auto& t : b.terms_) out.add(t.coeff, t.vars);
        return out;
    }

private:
    int n_;
    std::vector<Monomial> terms_;
};

/// Cubic form sum Q_ij x_i x_j + sum C_ijk x_i x_j x_k with Q and C fully symmetric.
class CubicForm {
public:
    explicit CubicForm(int n = 0) : n_(n), Q_(RealDense::Zero(n, n)), C_(static_cast<std::size_t>(n) * n * n, 0.0) {}

    int variables() const { return n_; }
    const RealDense& quadratic() const { return Q_; }
    double cubic(int i, int j, int k) const { return C_[index(i, j, k)]; }

    /// Sets Q from an arbitrary matrix (symmetrized).
    void set_quadratic(const RealDense& q) {
        require(q.rows() == n_ && q.cols() == n_, "cubic form: quadratic shape mismatch");
        Q_ = 0.5 * (q + q.transpose());
    }

    /// Sets C from an arbitrary tensor t(i, j, k) (fully symmetrized).
    template <class F>
    void set_cubic(F&& t) {
        for (int i = 0; i < n_; ++i)
            for (int j = 0; j < n_; ++j)
                for (int k = 0; k < n_; ++k)
                    C_[index(i, j, k)] =
                        (t(i, j, k) + t(i, k, j) + t(j, i, k) + t(j, k, i) + t(k, i, j) + t(k, j, i)) / 6.0;
    }

    double value(const RealVec& x) const {
        require(x.size() == n_, "cubic form: point dimension mismatch");
        double acc = x.dot(Q_ * x);
        for (int i = 0; i < n_; ++i)
            for (int j = 0; j < n_; ++j)
                for (int k = 0; k < n_; ++k) acc += C_[index(i, j, k)] * x[i] * x[j] * x[k];
        return acc;
    }

    /// 2 Q x + 3 C(x, x).
    RealVec gradient(const RealVec& x) const {
        require(x.size() == n_, "cubic form: point dimension mismatch");
        RealVec g = 2.0 * Q_ * x;
        for (int i = 0; i < n_; ++i)
            for (int j = 0; j < n_; ++j)
                for (int k = 0; k < n_; ++k) g[i] += 3.0 * C_[index(i, j, k)] * x[j] * x[k];
        return g;
    }

    bool is_zero() const {
        if (Q_.size() && Q_.cwiseAbs().maxCoeff() != 0.0) return false;
        return std::all_of(C_.begin(), C_.end(), [](double c) { return c == 0.0; });
    }

    Polynomial to_polynomial() const {
        Polynomial p(n_);
        for (int i = 0; i < n_; ++i)
            for (int j = 0; j < n_; ++j) p.add(Q_(i, j), {i, j});
        for (int i = 0; i < n_; ++i)
            for (int j = 0; j < n_; ++j)
                for (int k = 0; k < n_; ++k) p.add(C_[index(i, j, k)], {i, j, k});
        return p;
    }

    /// Partial derivative in x_i as a polynomial of degree <= 2.
    Polynomial partial(int i) const { return to_polynomial().derivative(i); }

    /// Second partial derivative in x_i.
    Polynomial second_partial(int i) const { return partial(i).derivative(i); }

private:
    std::size_t index(int i, int j, int k) const {
        return (static_cast<std::size_t>(i) * n_ + j) * n_ + k;
    }
    int n_;
    RealDense Q_;
    std::vector<double> C_;
};

/// Cubic form with coefficients uniform in [-scale, scale].
inline CubicForm random_cubic_form(int n, std::mt19937_64& rng, double scale = 0.5) {
    std::uniform_real_distribution<double> u(-scale, scale);
    CubicForm f(n);
    RealDense q(n, n);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) q(i, j) = u(rng);
    f.set_quadratic(q);
    std::vector<double> t(static_cast<std::size_t>(n) * n * n);
    for (auto& c : t) c = u(rng);
    f.set_cubic([&](int i, int j, int k) { return t[(static_cast<std::size_t>(i) * n + j) * n + k]; });
    return f;
}

} // namespace confspace::numerics
