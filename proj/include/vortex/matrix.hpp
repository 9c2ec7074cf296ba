#pragma once

#include <complex>
#include <cstddef>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "vortex/interval.hpp"

namespace vortex {

template <class T>
using Vec = std::vector<T>;

// Dense row-major matrix.
template <class T>
class Mat {
public:
    Mat() = default;
    Mat(std::size_t r, std::size_t c, const T& fill = T(0.0)) : rows_(r), cols_(c), data_(r * c, fill) {}

    static Mat identity(std::size_t n) {
        Mat m(n, n);
        for (std::size_t i = 0; i < n; ++i) m(i, i) = T(1.0);
        return m;
    }

    std::size_t rows() const { return rows_; }
    std::size_t cols() const { return cols_; }
    T& operator()(std::size_t i, std::size_t j) { return data_[i * cols_ + j]; }
    const T& operator()(std::size_t i, std::size_t j) const { return data_[i * cols_ + j]; }
    const std::vector<T>& data() const { return data_; }

private:
    std::size_t rows_ = 0, cols_ = 0;
    std::vector<T> data_;
};

using IMatrix = Mat<Interval>;
using CIMatrix = Mat<CInterval>;
using IVector = Vec<Interval>;
using CIVector = Vec<CInterval>;

namespace detail {
inline void check(bool ok, const char* what) {
    if (!ok) throw ShapeError(what);
}
}  // namespace detail

template <class T>
Mat<T> mat_mul(const Mat<T>& a, const Mat<T>& b) {
    detail::check(a.cols() == b.rows(), "mat_mul: inner dimensions differ");
    Mat<T> r(a.rows(), b.cols());
    for (std::size_t i = 0; i < a.rows(); ++i)
        for (std::size_t k = 0; k < a.cols(); ++k) {
            const T& aik = a(i, k);
            for (std::size_t j = 0; j < b.cols(); ++j) r(i, j) += aik * b(k, j);
        }
    return r;
}

template <class T>
Vec<T> mat_vec(const Mat<T>& a, const Vec<T>& v) {
    detail::check(a.cols() == v.size(), "mat_vec: dimension mismatch");
    Vec<T> r(a.rows(), T(0.0));
    for (std::size_t i = 0; i < a.rows(); ++i)
        for (std::size_t j = 0; j < a.cols(); ++j) r[i] += a(i, j) * v[j];
    return r;
}

template <class T>
Mat<T> transpose(const Mat<T>& a) {
    Mat<T> r(a.cols(), a.rows());
    for (std::size_t i = 0; i < a.rows(); ++i)
        for (std::size_t j = 0; j < a.cols(); ++j) r(j, i) = a(i, j);
    return r;
}

CIMatrix adjoint(const CIMatrix& a);
template <class T>
Mat<T> operator+(const Mat<T>& a, const Mat<T>& b) {
    detail::check(a.rows() == b.rows() && a.cols() == b.cols(), "matrix sum: shape mismatch");
    Mat<T> r(a.rows(), a.cols());
    for (std::size_t i = 0; i < a.rows(); ++i)
        for (std::size_t j = 0; j < a.cols(); ++j) r(i, j) = a(i, j) + b(i, j);
    return r;
}
template <class T>
Mat<T> operator-(const Mat<T>& a, const Mat<T>& b) {
    detail::check(a.rows() == b.rows() && a.cols() == b.cols(), "matrix difference: shape mismatch");
    Mat<T> r(a.rows(), a.cols());
    for (std::size_t i = 0; i < a.rows(); ++i)
        for (std::size_t j = 0; j < a.cols(); ++j) r(i, j) = a(i, j) - b(i, j);
    return r;
}

// conversions
IMatrix to_interval(const Mat<double>& a);
CIMatrix to_cinterval(const IMatrix& a);
CIMatrix to_cinterval(const Mat<std::complex<double>>& a);
IVector to_interval(const Vec<double>& v);
Mat<double> mid(const IMatrix& a);
Mat<std::complex<double>> mid(const CIMatrix& a);
Vec<double> mid(const IVector& v);
Eigen::MatrixXd to_eigen(const Mat<double>& a);
Eigen::MatrixXcd to_eigen(const Mat<std::complex<double>>& a);
Mat<double> from_eigen(const Eigen::MatrixXd& a);
Mat<std::complex<double>> from_eigen(const Eigen::MatrixXcd& a);

// Realification of a complex matrix: [[Re, -Im], [Im, Re]].
IMatrix realify(const CIMatrix& a);

// Norms. Returned intervals have a rigorous upper endpoint; the lower endpoint
// is a rigorous lower bound too.
Interval norm_sup(const IVector& v);
Interval norm_sup(const CIVector& v);
Interval norm_sup_matrix(const IMatrix& m);
Interval norm_sup_matrix(const CIMatrix& m);
double norm_sup(const Vec<double>& v);
double norm_sup_matrix(const Mat<double>& m);

// Product of a point matrix with an interval matrix, I - A*B, etc.
IMatrix mat_mul(const Mat<double>& a, const IMatrix& b);
IVector mat_vec(const Mat<double>& a, const IVector& v);

struct InverseEnclosure {
    IMatrix inverse;  // encloses M^{-1} for every point matrix in M
    double contraction;  // rigorous upper bound on ||I - R M||
};

// Certifies that every point matrix in m is invertible. Throws NotVerified.
InverseEnclosure verify_invertible(const IMatrix& m);
InverseEnclosure verify_invertible(const IMatrix& m, const Mat<double>& approx_inverse);
bool is_verified_invertible(const IMatrix& m);

inline constexpr std::size_t kMaxDetSize = 30;

// Enclosure of det(M) for all point matrices in M. Throws UnsupportedSize.
CInterval complex_det_enclosure(const CIMatrix& m);

}  // namespace vortex
