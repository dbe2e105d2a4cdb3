#include "mirrorsim/linalg.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <utility>

namespace mirrorsim {

std::vector<double> DenseMatrix::multiply(std::span<const double> x) const {
    std::vector<double> y(n_, 0.0);
    for (std::size_t r = 0; r < n_; ++r) {
        double acc = 0.0;
        for (std::size_t c = 0; c < n_; ++c) acc += (*this)(r, c) * x[c];
        y[r] = acc;
    }
    return y;
}

LuFactorization::LuFactorization(DenseMatrix a, double pivot_tol) : lu_(std::move(a)), perm_(lu_.size()) {
    const std::size_t n = lu_.size();
    std::iota(perm_.begin(), perm_.end(), std::size_t{0});

    for (std::size_t k = 0; k < n; ++k) {
        std::size_t pivot_row = k;
        double pivot_mag = std::abs(lu_(k, k));
        for (std::size_t r = k + 1; r < n; ++r) {
            if (std::abs(lu_(r, k)) > pivot_mag) {
                pivot_mag = std::abs(lu_(r, k));
                pivot_row = r;
            }
        }
        if (!(pivot_mag >= pivot_tol)) {
            throw SingularMatrixError(k, "singular matrix: pivot " + std::to_string(pivot_mag) + " in column " +
                                             std::to_string(k));
        }
        if (pivot_row != k) {
            for (std::size_t c = 0; c < n; ++c) std::swap(lu_(k, c), lu_(pivot_row, c));
            std::swap(perm_[k], perm_[pivot_row]);
        }
        const double inv = 1.0 / lu_(k, k);
        for (std::size_t r = k + 1; r < n; ++r) {
            const double factor = lu_(r, k) * inv;
            lu_(r, k) = factor;
            if (factor == 0.0) continue;
            for (std::size_t c = k + 1; c < n; ++c) lu_(r, c) -= factor * lu_(k, c);
        }
    }
}

std::vector<double> LuFactorization::solve(std::span<const double> rhs) const {
    const std::size_t n = lu_.size();
    std::vector<double> x(n);
    for (std::size_t r = 0; r < n; ++r) x[r] = rhs[perm_[r]];
    // forward: unit lower triangle
    for (std::size_t r = 1; r < n; ++r) {
        double acc = x[r];
        for (std::size_t c = 0; c < r; ++c) acc -= lu_(r, c) * x[c];
        x[r] = acc;
    }
    for (std::size_t r = n; r-- > 0;) {
        double acc = x[r];
        for (std::size_t c = r + 1; c < n; ++c) acc -= lu_(r, c) * x[c];
        x[r] = acc / lu_(r, r);
    }
    return x;
}

std::vector<double> lu_solve(const DenseMatrix& a, std::span<const double> rhs, double pivot_tol) {
    return LuFactorization(a, pivot_tol).solve(rhs);
}

double max_abs(std::span<const double> v) {
    double m = 0.0;
    for (double x : v) m = std::max(m, std::abs(x));
    return m;
}

}  // namespace mirrorsim
