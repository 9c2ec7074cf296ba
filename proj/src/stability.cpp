#include "vortex/stability.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <functional>
#include <numeric>
#include <thread>

namespace vortex {

using namespace rounding;
using cd = std::complex<double>;

const char* to_string(BlockKind k) { return k == BlockKind::P ? "P" : "Q"; }

const char* to_string(SliceCase c) {
    switch (c) {
        case SliceCase::Symmetric: return "symmetric";
        case SliceCase::SymmetricZeroMomentum: return "symmetric-zero-momentum";
        case SliceCase::Asymmetric: return "asymmetric";
    }
    return "?";
}

const char* to_string(Verdict v) {
    switch (v) {
        case Verdict::CertifiedStable: return "CertifiedStable";
        case Verdict::NotPositive: return "NotPositive";
        case Verdict::Inconclusive: return "Inconclusive";
    }
    return "?";
}

int SliceBasis::dimension() const {
    int d = 0;
    for (const auto& b : blocks) d += int(b.columns.cols());
    return d;
}

int kernel_block_index(int m) { return m == 1 ? 0 : 1; }

namespace {

using CVec = CIVector;
using IV3 = V3<Interval>;

CVec zeros(int N) { return CVec(3 * N, CInterval(0.0)); }

void axpy(CVec& y, const CInterval& a, const CVec& x) {
    for (std::size_t i = 0; i < y.size(); ++i) y[i] += a * x[i];
}

CVec lin(std::initializer_list<std::pair<CInterval, const CVec*>> terms, int N) {
    CVec out = zeros(N);
    for (const auto& [a, x] : terms) axpy(out, a, *x);
    return out;
}

CIMatrix stack(const std::vector<CVec>& cols, int N) {
    CIMatrix M(3 * N, cols.size());
    for (std::size_t c = 0; c < cols.size(); ++c)
        for (int i = 0; i < 3 * N; ++i) M(i, c) = cols[c][i];
    return M;
}

void put(CVec& w, int slot, const IV3& x) {
    for (int k = 0; k < 3; ++k) w[3 * slot + k] += CInterval(x[k]);
}

struct SymmetricVectors {
    int m, n, p, N;
    Config<Interval> v;

    // sum_k e^{i l k zeta} (b or c)_{j,k}
    CVec B(int j, int l, bool c) const {
        CVec out = zeros(N);
        for (int k = 1; k <= m; ++k) {
            int slot = j * m + k - 1;
            const IV3& a = v[slot];
            IV3 b = J3(a);
            IV3 w = c ? cross(b, a) : b;
            Phase<Interval> ph = root_of_unity<Interval>(m, l * k);
            CInterval e(ph.re, ph.im);
            for (int q = 0; q < 3; ++q) out[3 * slot + q] += e * CInterval(w[q]);
        }
        return out;
    }
    CVec dxy(int s) const {
        CVec out = zeros(N);
        out[3 * (m * n + s)] = CInterval(1.0);
        out[3 * (m * n + s) + 1] = CInterval(Interval(0.0), Interval(1.0));
        return out;
    }
    CVec dx(int s, int comp) const {
        CVec out = zeros(N);
        out[3 * (m * n + s) + comp] = CInterval(1.0);
        return out;
    }
};

const CInterval I_unit(Interval(0.0), Interval(1.0));

SliceBasis symmetric_slice(const Rings<Interval>& a, bool zero_momentum) {
    const int m = a.m, n = a.n, p = a.p, N = a.N();
    SymmetricVectors sv{m, n, p, N, lift_rho(a)};
    SliceBasis out;
    out.tag = zero_momentum ? SliceCase::SymmetricZeroMomentum : SliceCase::Symmetric;
    out.m = m;
    out.n = n;
    out.p = p;

    // ring playing the role of the first generator
    std::vector<int> ord(n);
    std::iota(ord.begin(), ord.end(), 0);
    if (m == 2) {
        int best = 0;
        double bv = -1.0;
        for (int j = 0; j < n; ++j) {
            const auto& u = a.u[j];
            double x = mid(u[0]), y = mid(u[1]), s = std::fabs(mid(u[2])) * (x * x + y * y);
            if (s > bv + 1e-12) {
                bv = s;
                best = j;
            }
        }
        std::rotate(ord.begin(), ord.begin() + best, ord.begin() + best + 1);
    }
    auto z = [&](int j) { return a.u[ord[j]][2]; };
    auto eta = [&](int j) { return CInterval(a.u[ord[j]][0], -a.u[ord[j]][1]); };
    auto eta2 = [&](int j) { return sqr(a.u[ord[j]][0]) + sqr(a.u[ord[j]][1]); };
    auto B = [&](int j, int l, bool c = false) { return sv.B(ord[j], l, c); };

    if (n >= 2) {
        std::vector<CVec> cols;
        for (int j = 1; j < n; ++j) cols.push_back(B(j, 0));
        CVec C00 = B(0, 0, true);
        for (int j = 1; j < n; ++j) {
            CVec Cj = B(j, 0, true);
            cols.push_back(lin({{CInterval(eta2(0)), &Cj}, {CInterval(-eta2(j)), &C00}}, N));
        }
        out.blocks.push_back({0, BlockKind::P, stack(cols, N)});
    }

    if (m == 2) {
        std::vector<CVec> cols;
        CVec B01 = B(0, 1), C01 = B(0, 1, true);
        Interval z0 = z(0), e0 = eta2(0);
        for (int j = 1; j < n; ++j) {
            CInterval e = eta(0) * conj(eta(j));
            CVec Bj = B(j, 1);
            cols.push_back(lin({{CInterval(z0 * e.re), &B01}, {CInterval(-(z0 * e0)), &Bj}, {CInterval(-e.im), &C01}}, N));
        }
        for (int j = 1; j < n; ++j) {
            CInterval e = eta(0) * conj(eta(j));
            CVec Cj = B(j, 1, true);
            cols.push_back(
                lin({{CInterval(z0 * z(j) * e.im), &B01}, {CInterval(-(z0 * e0)), &Cj}, {CInterval(z(j) * e.re), &C01}}, N));
        }
        CInterval h0 = eta(0);
        for (int s = 0; s < p; ++s) {
            CVec d = sv.dx(s, 0);
            cols.push_back(lin({{CInterval(z0 * h0.im), &B01}, {CInterval(h0.re), &C01},
                                {CInterval(Interval(-2.0) * z0 * e0), &d}},
                               N));
        }
        for (int s = 0; s < p; ++s) {
            CVec d = sv.dx(s, 1);
            cols.push_back(lin({{CInterval(z0 * h0.re), &B01}, {CInterval(-h0.im), &C01},
                                {CInterval(Interval(-2.0) * z0 * e0), &d}},
                               N));
        }
        if (!cols.empty()) out.blocks.push_back({1, BlockKind::P, stack(cols, N)});
    } else if (m >= 3) {
        std::vector<CVec> cols;
        CVec B01 = B(0, 1), C01 = B(0, 1, true);
        cols.push_back(lin({{CInterval(z(0)), &B01}, {I_unit, &C01}}, N));
        for (int j = 1; j < n; ++j) {
            CVec Bj = B(j, 1);
            cols.push_back(lin({{eta(j), &B01}, {-eta(0), &Bj}}, N));
        }
        for (int j = 1; j < n; ++j) {
            CVec Cj = B(j, 1, true);
            cols.push_back(lin({{CInterval(z(j)) * eta(j), &B01}, {I_unit * eta(0), &Cj}}, N));
        }
        for (int s = 0; s < p; ++s) {
            CVec d = sv.dxy(s);
            cols.push_back(lin({{CInterval(2.0), &B01}, {I_unit * CInterval(double(m)) * eta(0), &d}}, N));
        }
        out.blocks.push_back({1, BlockKind::Q, stack(cols, N)});
        int top = m % 2 ? (m - 1) / 2 : m / 2 - 1;
        for (int l = 2; l <= top; ++l) {
            std::vector<CVec> q;
            for (int j = 0; j < n; ++j) q.push_back(B(j, l));
            for (int j = 0; j < n; ++j) q.push_back(B(j, l, true));
            out.blocks.push_back({l, BlockKind::Q, stack(q, N)});
        }
        if (m % 2 == 0) {
            std::vector<CVec> q;
            for (int j = 0; j < n; ++j) q.push_back(B(j, m / 2));
            for (int j = 0; j < n; ++j) q.push_back(B(j, m / 2, true));
            out.blocks.push_back({m / 2, BlockKind::P, stack(q, N)});
        }
    }
    return out;
}

bool is_pole(const IV3& a) { return mid(sqr(a[0]) + sqr(a[1])) < 1e-18; }

SliceBasis asymmetric_slice(const Rings<Interval>& a, std::array<int, 2> pair) {
    Config<Interval> v = lift_rho(a);
    const int N = int(v.size());
    if (N < 3) throw SliceConstructionError("asymmetric slice needs N >= 3");
    std::vector<IV3> b(N), c(N);
    for (int j = 0; j < N; ++j) {
        b[j] = is_pole(v[j]) ? IV3{Interval(1.0), Interval(0.0), Interval(0.0)} : J3(v[j]);
        c[j] = cross(v[j], b[j]);
    }
    const int i1 = pair[0], i2 = pair[1];
    if (i1 == i2 || i1 < 0 || i2 < 0 || i1 >= N || i2 >= N || is_pole(v[i1]) || is_pole(v[i2]))
        throw SliceConstructionError("asymmetric slice: invalid anchor pair");
    const IV3& a1 = v[i1];
    const IV3& b2 = b[i2];
    Interval a1b2 = dot(a1, b2);
    if (a1b2.contains_zero() || a1b2.mig() < 1e-8) throw SliceConstructionError("asymmetric slice: a1 . b2 vanishes");
    std::vector<int> rest;
    for (int j = 0; j < N; ++j)
        if (j != i1 && j != i2) rest.push_back(j);

    std::vector<CVec> cols;
    {
        CVec g = zeros(N);
        IV3 t = cross(a1, cross(b2, c[i2]));
        put(g, i1, t);
        put(g, i2, -t);
        cols.push_back(g);
    }
    auto column = [&](int r, const IV3& w) {
        CVec g = zeros(N);
        put(g, i1, cross(a1, cross(b2, w)));
        put(g, i2, -(dot(a1, w) * b2));
        put(g, r, a1b2 * w);
        return g;
    };
    for (std::size_t j = 1; j < rest.size(); ++j) cols.push_back(column(rest[j], b[rest[j]]));
    for (std::size_t j = 0; j < rest.size(); ++j) cols.push_back(column(rest[j], c[rest[j]]));

    SliceBasis out;
    out.tag = SliceCase::Asymmetric;
    out.m = a.m;
    out.n = a.n;
    out.p = a.p;
    out.anchor_pair = pair;
    out.blocks.push_back({0, BlockKind::P, stack(cols, N)});
    return out;
}

}  // namespace

std::array<int, 2> choose_anchor_pair(const Config<double>& v) {
    std::array<int, 2> best{0, 1};
    double bv = -1.0;
    for (std::size_t i = 0; i < v.size(); ++i)
        for (std::size_t k = 0; k < v.size(); ++k) {
            if (i == k) continue;
            if (v[i][0] * v[i][0] + v[i][1] * v[i][1] < 1e-18 || v[k][0] * v[k][0] + v[k][1] * v[k][1] < 1e-18) continue;
            double s = std::fabs(dot(v[i], J3(v[k])));
            if (s > bv) {
                bv = s;
                best = {int(i), int(k)};
            }
        }
    if (!(bv > 1e-8)) throw SliceConstructionError("no admissible anchor pair for the asymmetric slice");
    return best;
}

SliceBasis build_slice(const Rings<Interval>& a, bool zero_momentum, std::optional<std::array<int, 2>> pair) {
    if (a.m >= 2) return symmetric_slice(a, zero_momentum);
    std::array<int, 2> pr = pair ? *pair : choose_anchor_pair(lift_rho(mid(a)));
    SliceBasis s = asymmetric_slice(a, pr);
    return s;
}

SliceBasis build_slice(const RingSystem& a, bool zero_momentum) { return build_slice(to_interval(a), zero_momentum); }

CIMatrix hermitize(const CIMatrix& m) {
    CIMatrix out(m.rows(), m.cols());
    for (std::size_t i = 0; i < m.rows(); ++i)
        for (std::size_t j = 0; j < m.cols(); ++j) {
            CInterval s = m(i, j) + conj(m(j, i));
            out(i, j) = {s.re / Interval(2.0), s.im / Interval(2.0)};
        }
    for (std::size_t i = 0; i < m.rows(); ++i) out(i, i).im = Interval(0.0);
    return out;
}

std::vector<BlockMatrix> assemble_blocks(const SliceBasis& slice, const Rings<Interval>& a, const Interval& omega) {
    Config<Interval> v = lift_rho(a);
    IMatrix H = full_hstar_hessian<Interval>(v, omega).hessian;
    CIMatrix Hc = to_cinterval(H);
    std::vector<BlockMatrix> out;
    for (const auto& b : slice.blocks) {
        CIMatrix M = mat_mul(adjoint(b.columns), mat_mul(Hc, b.columns));
        M = hermitize(M);
        if (b.kind == BlockKind::P)
            for (std::size_t i = 0; i < M.rows(); ++i)
                for (std::size_t j = 0; j < M.cols(); ++j) M(i, j).im = Interval(0.0);
        out.push_back({b.l, b.kind, std::move(M)});
    }
    return out;
}

// ---------------------------------------------------------------- eigenpairs

namespace {

Eigen::MatrixXcd hermitian_mid(const CIMatrix& M) {
    Eigen::MatrixXcd A = to_eigen(mid(M));
    return (A + A.adjoint()) / 2.0;
}

IVector realvec(const CIVector& z) {
    IVector out(2 * z.size());
    for (std::size_t i = 0; i < z.size(); ++i) {
        out[i] = z[i].re;
        out[i + z.size()] = z[i].im;
    }
    return out;
}

}  // namespace

EigenpairEnclosure validate_simple_eigenpair(const CIMatrix& M, double lambda_bar, const std::vector<cd>& v_bar,
                                             double cluster_tol) {
    const std::size_t d = M.rows();
    if (M.cols() != d || v_bar.size() != d || d == 0) throw ShapeError("validate_simple_eigenpair: shape mismatch");
    Eigen::MatrixXcd Am = hermitian_mid(M);
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(Am, Eigen::EigenvaluesOnly);
    const auto& ev = es.eigenvalues();
    double scale = std::max(1.0, ev.cwiseAbs().maxCoeff());
    if (cluster_tol <= 0.0) cluster_tol = 1e-9 * scale;
    // distance to the second closest float eigenvalue; the closest is lambda_bar itself
    std::vector<double> dists;
    for (Eigen::Index i = 0; i < ev.size(); ++i) dists.push_back(std::fabs(ev[i] - lambda_bar));
    std::sort(dists.begin(), dists.end());
    double gap = dists.size() > 1 ? dists[1] : std::numeric_limits<double>::infinity();
    if (gap < cluster_tol) throw NotIsolated("validate_simple_eigenpair: eigenvalue is clustered");

    // normalise so the largest component is 1
    std::size_t jk = 0;
    double best = -1.0;
    for (std::size_t i = 0; i < d; ++i)
        if (std::abs(v_bar[i]) > best) {
            best = std::abs(v_bar[i]);
            jk = i;
        }
    if (!(best > 0.0)) throw ShapeError("validate_simple_eigenpair: zero eigenvector guess");
    Eigen::VectorXcd v(d);
    for (std::size_t i = 0; i < d; ++i) v[i] = v_bar[i] / v_bar[jk];
    cd lam = lambda_bar;

    // float refinement of G(lambda, v) = ((M - lambda) v, v_jk - 1)
    Eigen::MatrixXcd Mm = to_eigen(mid(M));
    auto float_jac = [&](const Eigen::VectorXcd& vv, cd ll) {
        Eigen::MatrixXcd J = Eigen::MatrixXcd::Zero(d + 1, d + 1);
        J.topLeftCorner(d, d) = Mm - ll * Eigen::MatrixXcd::Identity(d, d);
        J.block(0, d, d, 1) = -vv;
        J(d, jk) = 1.0;
        return J;
    };
    for (int it = 0; it < 4; ++it) {
        Eigen::VectorXcd g(d + 1);
        g.head(d) = Mm * v - lam * v;
        g[d] = v[jk] - 1.0;
        Eigen::VectorXcd dx = float_jac(v, lam).fullPivLu().solve(g);
        if (!dx.allFinite()) break;
        v -= dx.head(d);
        lam -= dx[d];
    }

    // realified NK on x = (v, lambda)
    const std::size_t D = d + 1;
    Eigen::MatrixXcd Jc = float_jac(v, lam);
    Eigen::MatrixXd Jr(2 * D, 2 * D);
    Jr << Jc.real(), -Jc.imag(), Jc.imag(), Jc.real();
    Eigen::MatrixXd Ae = Jr.fullPivLu().inverse();
    if (!Ae.allFinite()) throw NotIsolated("validate_simple_eigenpair: singular Jacobian");
    Mat<double> A = from_eigen(Ae);

    auto G = [&](const CIVector& x) {
        CIVector g(D);
        for (std::size_t i = 0; i < d; ++i) {
            CInterval s(0.0);
            for (std::size_t k = 0; k < d; ++k) s += M(i, k) * x[k];
            g[i] = s - x[d] * x[i];
        }
        g[d] = x[jk] - CInterval(1.0);
        return g;
    };
    auto DG = [&](const CIVector& x) {
        CIMatrix J(D, D);
        for (std::size_t i = 0; i < d; ++i) {
            for (std::size_t k = 0; k < d; ++k) J(i, k) = M(i, k);
            J(i, i) -= x[d];
            J(i, d) = -x[i];
        }
        J(d, jk) = CInterval(1.0);
        return J;
    };
    CIVector xbar(D);
    for (std::size_t i = 0; i < d; ++i) xbar[i] = CInterval(v[i]);
    xbar[d] = CInterval(lam);
    double Y = norm_sup(mat_vec(A, realvec(G(xbar)))).hi;

    double rstar = std::max(10.0 * Y, 1e-15 * scale);
    const double rmax = gap / 4.0;
    while (rstar <= rmax) {
        CIVector X(D);
        for (std::size_t i = 0; i < D; ++i)
            X[i] = CInterval(Interval(sub_down(xbar[i].re.lo, rstar), add_up(xbar[i].re.hi, rstar)),
                             Interval(sub_down(xbar[i].im.lo, rstar), add_up(xbar[i].im.hi, rstar)));
        double Z = norm_sup_matrix(IMatrix::identity(2 * D) - mat_mul(A, realify(DG(X)))).hi;
        if (Z < 1.0) {
            double r0 = div_up(mul_up(1.01, Y), sub_down(1.0, Z));
            if (r0 == 0.0) r0 = std::numeric_limits<double>::denorm_min();
            if (r0 <= rstar && sub_up(Y, mul_down(sub_down(1.0, Z), r0)) < 0.0) {
                double c = lam.real();
                return {Interval(sub_down(c, r0), add_up(c, r0)), r0};
            }
        }
        rstar *= 10.0;
    }
    throw NotIsolated("validate_simple_eigenpair: contraction not established");
}

// ---------------------------------------------------------------- winding

namespace {

Interval arg_range(const CInterval& q) {
    double xs[2] = {q.re.lo, q.re.hi}, ys[2] = {q.im.lo, q.im.hi};
    double lo = std::numeric_limits<double>::infinity(), hi = -lo;
    for (double x : xs)
        for (double y : ys) {
            double t = std::atan2(y, x);
            lo = std::min(lo, t);
            hi = std::max(hi, t);
        }
    for (int i = 0; i < kTranscendentalSlack; ++i) {
        lo = down(lo);
        hi = up(hi);
    }
    return Interval(lo - 1e-300, hi + 1e-300);
}

struct Winder {
    const CIMatrix& Mp;
    int max_depth;
    std::size_t d;

    CInterval det_at(const CInterval& z) const {
        CIMatrix A = Mp;
        for (std::size_t i = 0; i < d; ++i) A(i, i) -= z;
        return complex_det_enclosure(A);
    }

    static CInterval box(const cd& a, const cd& b) {
        return {Interval(std::min(a.real(), b.real()), std::max(a.real(), b.real())),
                Interval(std::min(a.imag(), b.imag()), std::max(a.imag(), b.imag()))};
    }

    // a and b lie on a common horizontal or vertical line
    static cd midpoint(const cd& a, const cd& b) {
        if (a.real() == b.real()) return {a.real(), 0.5 * (a.imag() + b.imag())};
        return {0.5 * (a.real() + b.real()), a.imag()};
    }

    Interval cell(const cd& a, const cd& b, const CInterval& Da, const CInterval& Db, int depth) const {
        bool ok = !det_at(box(a, b)).contains_zero();
        CInterval q = Db * conj(Da);
        if (ok && (q.contains_zero() || (q.re.lo <= 0.0 && q.im.contains_zero()))) ok = false;
        if (ok) return arg_range(q);
        if (depth >= max_depth) throw BoundaryHit("determinant enclosure meets zero on the contour", 0.0);
        cd c = midpoint(a, b);
        CInterval Dc = det_at(CInterval(c));
        return cell(a, c, Da, Dc, depth + 1) + cell(c, b, Dc, Db, depth + 1);
    }
};

}  // namespace

int count_eigenvalues_winding(const CIMatrix& M, double center, double halfwidth, const WindingOptions& opt) {
    const std::size_t d = M.rows();
    if (M.cols() != d) throw ShapeError("count_eigenvalues_winding: matrix not square");
    if (!(halfwidth > 0.0) || !(opt.imag_halfwidth > 0.0)) throw DomainError("count_eigenvalues_winding: empty rectangle");
    if (d == 0) return 0;
    if (d > kMaxDetSize) throw UnsupportedSize("count_eigenvalues_winding: dimension too large");

    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(hermitian_mid(M));
    Mat<cd> X = from_eigen(Eigen::MatrixXcd(es.eigenvectors()));
    CIMatrix Xc = to_cinterval(X);
    IMatrix inv = verify_invertible(realify(Xc)).inverse;
    CIMatrix Xi(d, d);
    for (std::size_t i = 0; i < d; ++i)
        for (std::size_t j = 0; j < d; ++j) Xi(i, j) = CInterval(inv(i, j), inv(i + d, j));
    CIMatrix Mp = mat_mul(Xi, mat_mul(M, Xc));

    int depth = 0;
    while ((opt.cells << depth) < opt.max_cells) ++depth;
    Winder w{Mp, depth, d};

    const double x0 = sub_down(center, halfwidth), x1 = add_up(center, halfwidth);
    const double h = opt.imag_halfwidth;
    const cd corners[4] = {{x0, -h}, {x1, -h}, {x1, h}, {x0, h}};
    Interval total(0.0);
    try {
        for (int side = 0; side < 4; ++side) {
            cd a = corners[side], b = corners[(side + 1) % 4];
            std::vector<cd> pts;
            for (int k = 0; k <= opt.cells; ++k) {
                double t = double(k) / opt.cells;
                if (k == opt.cells)
                    pts.push_back(b);
                else if (a.real() == b.real())
                    pts.push_back({a.real(), a.imag() + t * (b.imag() - a.imag())});
                else
                    pts.push_back({a.real() + t * (b.real() - a.real()), a.imag()});
            }
            std::vector<CInterval> D;
            for (const auto& z : pts) D.push_back(w.det_at(CInterval(z)));
            for (int k = 0; k < opt.cells; ++k) total += w.cell(pts[k], pts[k + 1], D[k], D[k + 1], 0);
        }
    } catch (const BoundaryHit&) {
        throw BoundaryHit("determinant enclosure meets zero on the contour", 10.0 * halfwidth);
    }
    Interval turns = total / (Interval(2.0) * pi_interval());
    double k = std::round(turns.mid());
    if (!(turns.lo > k - 0.5 && turns.hi < k + 0.5))
        throw BoundaryHit("winding number not resolved", 10.0 * halfwidth);
    return int(k);
}

// ---------------------------------------------------------------- blocks and verdicts

namespace {

WindingOptions square(WindingOptions w, double halfwidth) {
    w.imag_halfwidth = std::min(w.imag_halfwidth, halfwidth);
    return w;
}

struct Region {
    Interval iv;
    int count;
    bool kernel;
};

}  // namespace

namespace {

BlockSpectrum analyze_block_direct(const BlockMatrix& b, bool kernel_expected, int kernel_size,
                                   const StabilityOptions& opt) {
    BlockSpectrum out;
    out.l = b.l;
    out.kind = b.kind;
    const int d = int(b.matrix.rows());
    out.size = d;
    if (d == 0) {
        out.complete = true;
        out.positive = !kernel_expected;
        return out;
    }
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(hermitian_mid(b.matrix));
    Eigen::VectorXd ev = es.eigenvalues();
    Eigen::MatrixXcd V = es.eigenvectors();
    double scale = std::max(1.0, ev.cwiseAbs().maxCoeff());
    double tol = opt.cluster_rel * scale;

    std::vector<Region> regions;
    std::vector<bool> used(d, false);
    if (kernel_expected) {
        for (int i = 0; i < d; ++i)
            if (std::fabs(ev[i]) < opt.delta0) used[i] = true;
        try {
            int k = count_eigenvalues_winding(b.matrix, 0.0, opt.delta0, square(opt.winding, opt.delta0));
            out.kernel = k;
            regions.push_back({Interval(-opt.delta0, opt.delta0), k, true});
            out.clusters.push_back({0.0, opt.delta0, k});
        } catch (const std::exception& e) {
            out.note += std::string("kernel window: ") + e.what() + "; ";
        }
    }

    std::vector<std::vector<int>> groups;
    for (int i = 0; i < d; ++i) {
        if (used[i]) continue;
        if (!groups.empty() && ev[i] - ev[groups.back().back()] < tol)
            groups.back().push_back(i);
        else
            groups.push_back({i});
    }

    for (const auto& g : groups) {
        if (g.size() == 1) {
            std::vector<cd> v(d);
            for (int k = 0; k < d; ++k) v[k] = V(k, g[0]);
            try {
                EigenpairEnclosure e = validate_simple_eigenpair(b.matrix, ev[g[0]], v, tol);
                regions.push_back({e.value, 1, false});
                out.eigs.push_back(e.value);
                continue;
            } catch (const NotIsolated&) {
            }
        }
        double lo = ev[g.front()], hi = ev[g.back()];
        double center = 0.5 * (lo + hi);
        double eps = std::max(opt.eps_start, hi - lo);
        bool done = false;
        while (eps <= opt.eps_cap * (1.0 + 1e-12)) {
            try {
                int k = count_eigenvalues_winding(b.matrix, center, eps, square(opt.winding, eps));
                regions.push_back({Interval(sub_down(center, eps), add_up(center, eps)), k, false});
                out.clusters.push_back({center, eps, k});
                done = true;
                break;
            } catch (const BoundaryHit&) {
                eps *= 10.0;
            }
        }
        if (!done) out.note += "cluster near " + std::to_string(center) + " not resolved; ";
    }

    std::sort(regions.begin(), regions.end(), [](const Region& x, const Region& y) { return x.iv.lo < y.iv.lo; });
    int total = 0;
    bool disjoint = true;
    for (std::size_t i = 0; i < regions.size(); ++i) {
        total += regions[i].count;
        if (i > 0 && !(regions[i - 1].iv.hi < regions[i].iv.lo)) disjoint = false;
    }
    out.complete = disjoint && total == d;
    if (!disjoint) out.note += "enclosures overlap; ";
    if (total != d) out.note += "counted " + std::to_string(total) + " of " + std::to_string(d) + " eigenvalues; ";

    bool pos = out.complete;
    for (const auto& r : regions) {
        if (r.kernel) continue;
        if (r.count > 0 && r.iv.hi < 0.0 && !out.negative_witness) out.negative_witness = r.iv;
        if (!(r.iv.lo > 0.0)) pos = false;
    }
    if (kernel_expected && out.kernel != kernel_size) {
        pos = false;
        out.note += "kernel count " + std::to_string(out.kernel) + " differs from " + std::to_string(kernel_size) + "; ";
    }
    out.positive = pos;
    return out;
}

// exactly Hermitian point centre C of M and an upper bound on ||H - C||_2 over Hermitian H in M
double hermitian_centre(const CIMatrix& M, CIMatrix& C) {
    const std::size_t d = M.rows();
    C = CIMatrix(d, d);
    for (std::size_t i = 0; i < d; ++i) {
        C(i, i) = CInterval(Interval(M(i, i).re.mid()), Interval(0.0));
        for (std::size_t k = i + 1; k < d; ++k) {
            C(i, k) = CInterval(Interval(M(i, k).re.mid()), Interval(M(i, k).im.mid()));
            C(k, i) = conj(C(i, k));
        }
    }
    auto dev = [](const Interval& x, double c) { return std::max(sub_up(x.hi, c), sub_up(c, x.lo)); };
    double s = 0.0;
    for (std::size_t i = 0; i < d; ++i)
        for (std::size_t k = 0; k < d; ++k) {
            double e = add_up(dev(M(i, k).re, C(i, k).re.lo), dev(M(i, k).im, C(i, k).im.lo));
            s = add_up(s, mul_up(e, e));
        }
    return sqrt_up(s);
}

}  // namespace

BlockSpectrum analyze_block(const BlockMatrix& b, bool kernel_expected, int kernel_size, const StabilityOptions& opt) {
    BlockSpectrum out = analyze_block_direct(b, kernel_expected, kernel_size, opt);
    if (out.complete || b.matrix.rows() == 0) return out;
    // eigenvalues of every Hermitian member lie within eps of those of the centre, index by index
    CIMatrix C;
    const double eps = hermitian_centre(b.matrix, C);
    if (!(eps > 0.0) || !std::isfinite(eps)) return out;
    BlockSpectrum t = analyze_block_direct(BlockMatrix{b.l, b.kind, C}, kernel_expected, kernel_size, opt);
    if (!t.complete) return out;
    auto widen = [&](const Interval& x) { return Interval(sub_down(x.lo, eps), add_up(x.hi, eps)); };
    for (auto& e : t.eigs) e = widen(e);
    for (auto& c : t.clusters) c.halfwidth = add_up(c.halfwidth, eps);
    t.positive = t.positive && std::all_of(t.eigs.begin(), t.eigs.end(), [](const Interval& e) { return e.lo > 0.0; });
    for (const auto& c : t.clusters)
        if (!(kernel_expected && c.center == 0.0) && !(sub_down(c.center, c.halfwidth) > 0.0)) t.positive = false;
    if (t.negative_witness) {
        Interval w = widen(*t.negative_witness);
        t.negative_witness = w.hi < 0.0 ? std::optional<Interval>(w) : std::nullopt;
    }
    t.note += "perturbation bound " + std::to_string(eps) + " from the point centre; ";
    return t;
}

namespace {

void run_parallel(std::size_t count, unsigned workers, const std::function<void(std::size_t)>& f) {
    if (workers <= 1 || count <= 1) {
        for (std::size_t i = 0; i < count; ++i) f(i);
        return;
    }
    std::atomic<std::size_t> next{0};
    auto work = [&] {
        for (std::size_t i = next++; i < count; i = next++) f(i);
    };
    std::vector<std::thread> pool;
    for (unsigned t = 1; t < std::min<std::size_t>(workers, count); ++t) pool.emplace_back(work);
    work();
    for (auto& t : pool) t.join();
}

}  // namespace

StabilityVerdict stability_test(const Rings<Interval>& a, const Interval& omega, const StabilityOptions& opt) {
    StabilityVerdict out;
    out.omega = omega;
    Config<Interval> v = lift_rho(a);
    out.mu = momentum_Phi(v)[2];
    out.zero_momentum = out.mu.contains_zero();
    SliceBasis slice = build_slice(a, out.zero_momentum);
    std::vector<BlockMatrix> blocks = assemble_blocks(slice, a, omega);
    int kl = out.zero_momentum ? kernel_block_index(a.m) : -1;
    out.blocks.resize(blocks.size());
    std::vector<std::string> errors(blocks.size());
    run_parallel(blocks.size(), opt.workers, [&](std::size_t i) {
        const auto& b = blocks[i];
        bool kern = b.l == kl;
        int ksize = b.kind == BlockKind::P ? 2 : 1;
        try {
            out.blocks[i] = analyze_block(b, kern, ksize, opt);
        } catch (const std::exception& e) {
            out.blocks[i].l = b.l;
            out.blocks[i].kind = b.kind;
            out.blocks[i].size = int(b.matrix.rows());
            out.blocks[i].note = e.what();
        }
    });
    bool kernel_seen = kl < 0;
    for (const auto& b : out.blocks)
        if (b.l == kl) {
            kernel_seen = true;
            out.kernel_block = b.l;
            out.kernel_count = b.kernel;
        }
    for (const auto& b : out.blocks)
        if (b.negative_witness) {
            out.verdict = Verdict::NotPositive;
            out.witness_block = b.l;
            out.reason = std::string("block ") + to_string(b.kind) + std::to_string(b.l) +
                         " has a certified negative eigenvalue";
            return out;
        }
    bool all = kernel_seen;
    for (const auto& b : out.blocks) {
        if (!b.positive) {
            all = false;
            out.reason += std::string("block ") + to_string(b.kind) + std::to_string(b.l) + " not certified positive: " +
                          b.note;
        }
    }
    if (!kernel_seen) out.reason += "kernel block missing; ";
    out.verdict = all ? Verdict::CertifiedStable : Verdict::Inconclusive;
    return out;
}

StabilityVerdict stability_test(const RingSystem& a, double omega, const StabilityOptions& opt) {
    return stability_test(to_interval(a), Interval(omega), opt);
}

namespace {

bool blocks_invertible(const SliceBasis& slice, const Rings<Interval>& a, const Interval& omega) {
    for (const auto& b : assemble_blocks(slice, a, omega)) {
        IMatrix M;
        if (b.kind == BlockKind::P) {
            M = IMatrix(b.matrix.rows(), b.matrix.cols());
            for (std::size_t i = 0; i < M.rows(); ++i)
                for (std::size_t j = 0; j < M.cols(); ++j) M(i, j) = b.matrix(i, j).re;
        } else {
            M = realify(b.matrix);
        }
        if (M.rows() && !is_verified_invertible(M)) return false;
    }
    return true;
}

}  // namespace

StabilityVerdict stability_over_segment(const BranchCertificate& cert, const StabilityOptions& opt) {
    StabilityVerdict out;
    if (cert.status != "validated") {
        out.reason = "segment not validated";
        out.omega = Interval::hull(cert.x0.omega, cert.x1.omega);
        return out;
    }
    const RingShape s = cert.shape();
    Rings<Interval> a0 = rings_of(s, certificate_tube(cert, 0.0, 0.0));
    out = stability_test(a0, Interval(cert.x0.omega), opt);
    const bool degenerate = pack(cert.x0) == pack(cert.x1) && cert.x0.omega == cert.x1.omega;
    if (degenerate) {
        out.whole_segment = out.verdict == Verdict::CertifiedStable;
        return out;
    }
    if (out.verdict != Verdict::CertifiedStable) return out;
    if (out.zero_momentum) {
        out.reason = "zero momentum: positivity not propagated along the segment";
        return out;
    }
    std::optional<std::array<int, 2>> pair;
    if (s.m == 1) pair = choose_anchor_pair(lift_rho(mid(a0)));

    std::function<bool(double, double, int)> check = [&](double lo, double hi, int depth) -> bool {
        bool ok = false;
        try {
            Rings<Interval> r = rings_of(s, certificate_tube(cert, lo, hi));
            Interval mu = momentum_Phi(lift_rho(r))[2];
            if (!mu.contains_zero()) ok = blocks_invertible(build_slice(r, false, pair), r, certificate_omega(cert, lo, hi));
        } catch (const std::exception&) {
            ok = false;
        }
        if (ok) return true;
        if (depth >= opt.segment_depth) return false;
        double c = 0.5 * (lo + hi);
        return check(lo, c, depth + 1) && check(c, hi, depth + 1);
    };
    const int K = std::max(1, opt.segment_pieces);
    bool all = true;
    for (int k = 0; k < K && all; ++k) all = check(double(k) / K, double(k + 1) / K, 0);
    if (all) {
        out.whole_segment = true;
        out.omega = certificate_omega(cert);
        out.mu = certificate_mu(cert);
    } else {
        out.reason = "block invertibility not verified along the segment; verdict holds at omega0 only";
    }
    return out;
}

}  // namespace vortex
