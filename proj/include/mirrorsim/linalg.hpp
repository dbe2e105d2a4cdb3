#pragma once

#include <algorithm>
#include <cstddef>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace mirrorsim {

/// Row-major dense square matrix. The MNA assembly writes through this type
/// only, so a sparse backend can replace it without touching the stamps.
class DenseMatrix {
public:
    DenseMatrix() = default;
    explicit DenseMatrix(std::size_t n) : n_(n), data_(n * n, 0.0) {}

    std::size_t size() const { return n_; }
    double& operator()(std::size_t r, std::size_t c) { return data_[r * n_ + c]; }
    double operator()(std::size_t r, std::size_t c) const { return data_[r * n_ + c]; }
    void set_zero() { std::fill(data_.begin(), data_.end(), 0.0); }

    std::vector<double> multiply(std::span<const double> x) const;

private:
    std::size_t n_ = 0;
    std::vector<double> data_;
};

class SingularMatrixError : public std::runtime_error {
public:
    SingularMatrixError(std::size_t column, const std::string& what)
        : std::runtime_error(what), column_(column) {}
    /// Unknown (column) whose pivot vanished.
    std::size_t column() const { return column_; }

private:
    std::size_t column_;
};

/// In-place LU factorization with partial pivoting.
class LuFactorization {
public:
    /// Throws SingularMatrixError when a pivot magnitude falls below `pivot_tol`.
    explicit LuFactorization(DenseMatrix a, double pivot_tol = 1e-13);

    std::vector<double> solve(std::span<const double> rhs) const;

private:
    DenseMatrix lu_;
    std::vector<std::size_t> perm_;
};

/// Solves a x = rhs. Convenience wrapper over LuFactorization.
std::vector<double> lu_solve(const DenseMatrix& a, std::span<const double> rhs, double pivot_tol = 1e-13);

double max_abs(std::span<const double> v);

}  // namespace mirrorsim
