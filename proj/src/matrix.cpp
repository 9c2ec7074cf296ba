#include "vortex/matrix.hpp"

#include <algorithm>

namespace vortex {

using namespace rounding;

CIMatrix adjoint(const CIMatrix& a) {
    CIMatrix r(a.cols(), a.rows());
    for (std::size_t i = 0; i < a.rows(); ++i)
        for (std::size_t j = 0; j < a.cols(); ++j) r(j, i) = conj(a(i, j));
    return r;
}

IMatrix to_interval(const Mat<double>& a) {
    IMatrix r(a.rows(), a.cols());
    for (std::size_t i = 0; i < a.rows(); ++i)
        for (std::size_t j = 0; j < a.cols(); ++j) r(i, j) = Interval(a(i, j));
    return r;
}

CIMatrix to_cinterval(const IMatrix& a) {
    CIMatrix r(a.rows(), a.cols());
    for (std::size_t i = 0; i < a.rows(); ++i)
        for (std::size_t j = 0; j < a.cols(); ++j) r(i, j) = CInterval(a(i, j));
    return r;
}

CIMatrix to_cinterval(const Mat<std::complex<double>>& a) {
    CIMatrix r(a.rows(), a.cols());
    for (std::size_t i = 0; i < a.rows(); ++i)
        for (std::size_t j = 0; j < a.cols(); ++j) r(i, j) = CInterval(a(i, j));
    return r;
}

IVector to_interval(const Vec<double>& v) { return IVector(v.begin(), v.end()); }

Mat<double> mid(const IMatrix& a) {
    Mat<double> r(a.rows(), a.cols());
    for (std::size_t i = 0; i < a.rows(); ++i)
        for (std::size_t j = 0; j < a.cols(); ++j) r(i, j) = a(i, j).mid();
    return r;
}

Mat<std::complex<double>> mid(const CIMatrix& a) {
    Mat<std::complex<double>> r(a.rows(), a.cols());
    for (std::size_t i = 0; i < a.rows(); ++i)
        for (std::size_t j = 0; j < a.cols(); ++j) r(i, j) = a(i, j).mid();
    return r;
}

Vec<double> mid(const IVector& v) {
    Vec<double> r(v.size());
    for (std::size_t i = 0; i < v.size(); ++i) r[i] = v[i].mid();
    return r;
}

Eigen::MatrixXd to_eigen(const Mat<double>& a) {
    Eigen::MatrixXd r(a.rows(), a.cols());
    for (std::size_t i = 0; i < a.rows(); ++i)
        for (std::size_t j = 0; j < a.cols(); ++j) r(i, j) = a(i, j);
    return r;
}

Eigen::MatrixXcd to_eigen(const Mat<std::complex<double>>& a) {
    Eigen::MatrixXcd r(a.rows(), a.cols());
    for (std::size_t i = 0; i < a.rows(); ++i)
        for (std::size_t j = 0; j < a.cols(); ++j) r(i, j) = a(i, j);
    return r;
}

Mat<double> from_eigen(const Eigen::MatrixXd& a) {
    Mat<double> r(a.rows(), a.cols());
    for (Eigen::Index i = 0; i < a.rows(); ++i)
        for (Eigen::Index j = 0; j < a.cols(); ++j) r(i, j) = a(i, j);
    return r;
}

Mat<std::complex<double>> from_eigen(const Eigen::MatrixXcd& a) {
    Mat<std::complex<double>> r(a.rows(), a.cols());
    for (Eigen::Index i = 0; i < a.rows(); ++i)
        for (Eigen::Index j = 0; j < a.cols(); ++j) r(i, j) = a(i, j);
    return r;
}

IMatrix realify(const CIMatrix& a) {
    std::size_t r = a.rows(), c = a.cols();
    IMatrix out(2 * r, 2 * c);
    for (std::size_t i = 0; i < r; ++i)
        for (std::size_t j = 0; j < c; ++j) {
            out(i, j) = a(i, j).re;
            out(i, j + c) = -a(i, j).im;
            out(i + r, j) = a(i, j).im;
            out(i + r, j + c) = a(i, j).re;
        }
    return out;
}

Interval norm_sup(const IVector& v) {
    double l = 0.0, h = 0.0;
    for (const auto& x : v) {
        l = std::max(l, x.mig());
        h = std::max(h, x.mag());
    }
    return Interval(l, h);
}

Interval norm_sup(const CIVector& v) {
    double l = 0.0, h = 0.0;
    for (const auto& x : v) {
        l = std::max(l, x.mig());
        h = std::max(h, x.mag());
    }
    return Interval(l, h);
}

Interval norm_sup_matrix(const IMatrix& m) {
    double l = 0.0, h = 0.0;
    for (std::size_t i = 0; i < m.rows(); ++i) {
        double sl = 0.0, sh = 0.0;
        for (std::size_t j = 0; j < m.cols(); ++j) {
            sl = add_down(sl, m(i, j).mig());
            sh = add_up(sh, m(i, j).mag());
        }
        l = std::max(l, sl);
        h = std::max(h, sh);
    }
    return Interval(l, h);
}

Interval norm_sup_matrix(const CIMatrix& m) {
    double l = 0.0, h = 0.0;
    for (std::size_t i = 0; i < m.rows(); ++i) {
        double sl = 0.0, sh = 0.0;
        for (std::size_t j = 0; j < m.cols(); ++j) {
            sl = add_down(sl, m(i, j).mig());
            sh = add_up(sh, m(i, j).mag());
        }
        l = std::max(l, sl);
        h = std::max(h, sh);
    }
    return Interval(l, h);
}

double norm_sup(const Vec<double>& v) {
    double h = 0.0;
    for (double x : v) h = std::max(h, std::fabs(x));
    return h;
}

double norm_sup_matrix(const Mat<double>& m) {
    double h = 0.0;
    for (std::size_t i = 0; i < m.rows(); ++i) {
        double s = 0.0;
        for (std::size_t j = 0; j < m.cols(); ++j) s += std::fabs(m(i, j));
        h = std::max(h, s);
    }
    return h;
}

IMatrix mat_mul(const Mat<double>& a, const IMatrix& b) {
    detail::check(a.cols() == b.rows(), "mat_mul: inner dimensions differ");
    IMatrix r(a.rows(), b.cols());
    for (std::size_t i = 0; i < a.rows(); ++i)
        for (std::size_t k = 0; k < a.cols(); ++k) {
            double aik = a(i, k);
            if (aik == 0.0) continue;
            Interval ai(aik);
            for (std::size_t j = 0; j < b.cols(); ++j) r(i, j) += ai * b(k, j);
        }
    return r;
}

IVector mat_vec(const Mat<double>& a, const IVector& v) {
    detail::check(a.cols() == v.size(), "mat_vec: dimension mismatch");
    IVector r(a.rows(), Interval(0.0));
    for (std::size_t i = 0; i < a.rows(); ++i)
        for (std::size_t j = 0; j < a.cols(); ++j) r[i] += Interval(a(i, j)) * v[j];
    return r;
}

InverseEnclosure verify_invertible(const IMatrix& m, const Mat<double>& approx_inverse) {
    detail::check(m.rows() == m.cols(), "verify_invertible: matrix not square");
    detail::check(approx_inverse.rows() == m.rows() && approx_inverse.cols() == m.cols(),
                  "verify_invertible: approximate inverse has wrong shape");
    std::size_t n = m.rows();
    IMatrix e = IMatrix::identity(n) - mat_mul(approx_inverse, m);
    double beta = norm_sup_matrix(e).hi;
    if (!(beta < 1.0)) throw NotVerified("verify_invertible: ||I - R M|| >= 1");
    double nr = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        double s = 0.0;
        for (std::size_t j = 0; j < n; ++j) s = add_up(s, std::fabs(approx_inverse(i, j)));
        nr = std::max(nr, s);
    }
    double delta = div_up(mul_up(beta, nr), sub_down(1.0, beta));
    IMatrix inv(n, n);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j)
            inv(i, j) = Interval(sub_down(approx_inverse(i, j), delta), add_up(approx_inverse(i, j), delta));
    return {inv, beta};
}

InverseEnclosure verify_invertible(const IMatrix& m) {
    detail::check(m.rows() == m.cols(), "verify_invertible: matrix not square");
    Eigen::MatrixXd c = to_eigen(mid(m));
    Eigen::FullPivLU<Eigen::MatrixXd> lu(c);
    if (!lu.isInvertible()) throw NotVerified("verify_invertible: midpoint matrix is numerically singular");
    Eigen::MatrixXd r = lu.inverse();
    if (!r.allFinite()) throw NotVerified("verify_invertible: approximate inverse not finite");
    return verify_invertible(m, from_eigen(r));
}

bool is_verified_invertible(const IMatrix& m) {
    try {
        verify_invertible(m);
        return true;
    } catch (const NotVerified&) {
        return false;
    }
}

namespace {

CInterval entire_c() { return {Interval::entire(), Interval::entire()}; }

CInterval cofactor_det(const std::vector<std::vector<CInterval>>& a) {
    std::size_t n = a.size();
    if (n == 1) return a[0][0];
    if (n == 2) return a[0][0] * a[1][1] - a[0][1] * a[1][0];
    CInterval det(0.0);
    for (std::size_t c = 0; c < n; ++c) {
        std::vector<std::vector<CInterval>> minor(n - 1);
        for (std::size_t i = 1; i < n; ++i)
            for (std::size_t j = 0; j < n; ++j)
                if (j != c) minor[i - 1].push_back(a[i][j]);
        CInterval t = a[0][c] * cofactor_det(minor);
        det = (c % 2 == 0) ? det + t : det - t;
    }
    return det;
}

constexpr std::size_t kExpansionLimit = 6;

}  // namespace

CInterval complex_det_enclosure(const CIMatrix& m) {
    detail::check(m.rows() == m.cols(), "complex_det_enclosure: matrix not square");
    std::size_t n = m.rows();
    if (n > kMaxDetSize) throw UnsupportedSize("complex_det_enclosure: dimension " + std::to_string(n));
    if (n == 0) return CInterval(1.0);
    CIMatrix a = m;
    CInterval det(1.0);
    bool negate = false;
    for (std::size_t k = 0; k < n; ++k) {
        std::size_t piv = k;
        double best = a(k, k).mig();
        for (std::size_t i = k + 1; i < n; ++i) {
            double g = a(i, k).mig();
            if (g > best) {
                best = g;
                piv = i;
            }
        }
        if (!(best > 0.0)) {
            std::size_t s = n - k;
            if (s > kExpansionLimit) return entire_c();
            std::vector<std::vector<CInterval>> sub(s, std::vector<CInterval>(s));
            for (std::size_t i = 0; i < s; ++i)
                for (std::size_t j = 0; j < s; ++j) sub[i][j] = a(k + i, k + j);
            det = det * cofactor_det(sub);
            return negate ? -det : det;
        }
        if (piv != k) {
            for (std::size_t j = 0; j < n; ++j) std::swap(a(k, j), a(piv, j));
            negate = !negate;
        }
        const CInterval p = a(k, k);
        det = det * p;
        for (std::size_t i = k + 1; i < n; ++i) {
            CInterval f = a(i, k) / p;
            for (std::size_t j = k + 1; j < n; ++j) a(i, j) -= f * a(k, j);
        }
    }
    return negate ? -det : det;
}

}  // namespace vortex
