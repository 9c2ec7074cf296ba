#include "vortex/continuation.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <limits>
#include <thread>

namespace vortex {

using namespace rounding;

int augmented_dim(const RingShape& s) { return 4 * s.n + 1; }

Vec<double> pack(const AugmentedPoint& x) {
    Vec<double> v = x.u;
    v.insert(v.end(), x.lambda.begin(), x.lambda.end());
    v.push_back(x.alpha);
    return v;
}

AugmentedPoint unpack(const RingShape& s, const Vec<double>& x, double omega) {
    if (int(x.size()) != augmented_dim(s)) throw ShapeError("unpack: wrong length");
    AugmentedPoint p;
    p.u.assign(x.begin(), x.begin() + 3 * s.n);
    p.lambda.assign(x.begin() + 3 * s.n, x.begin() + 4 * s.n);
    p.alpha = x[4 * s.n];
    p.omega = omega;
    return p;
}

RingSystem rings_of(const RingShape& s, const AugmentedPoint& x) {
    RingSystem r{s.m, s.n, s.p, {}};
    for (int j = 0; j < s.n; ++j) r.u.push_back({x.u[3 * j], x.u[3 * j + 1], x.u[3 * j + 2]});
    return r;
}

Rings<Interval> rings_of(const RingShape& s, const IVector& x) {
    Rings<Interval> r{s.m, s.n, s.p, {}};
    for (int j = 0; j < s.n; ++j) r.u.push_back({x[3 * j], x[3 * j + 1], x[3 * j + 2]});
    return r;
}

AugmentedPoint make_point(const RingSystem& r, double omega) {
    AugmentedPoint p;
    p.u = flatten(r.u);
    p.lambda = solve_multipliers(r, omega);
    p.alpha = 0.0;
    p.omega = omega;
    return p;
}

namespace {

template <class T>
Rings<T> unpack_rings(const RingShape& s, const Vec<T>& x) {
    if (int(x.size()) != augmented_dim(s)) throw ShapeError("augmented map: wrong argument length");
    if (int(x.size()) < 0 || s.n < 1) throw ShapeError("augmented map: bad shape");
    Rings<T> r{s.m, s.n, s.p, {}};
    for (int j = 0; j < s.n; ++j) r.u.push_back({x[3 * j], x[3 * j + 1], x[3 * j + 2]});
    return r;
}

void check_anchor(const RingShape& s, const Vec<double>& anchor) {
    if (int(anchor.size()) != 3 * s.n) throw ShapeError("anchor length differs from 3n");
}

}  // namespace

template <class T>
Vec<T> augmented_map_F(const RingShape& s, const Vec<T>& x, const T& omega, const Vec<double>& anchor) {
    check_anchor(s, anchor);
    Rings<T> r = unpack_rings(s, x);
    const int n = s.n;
    T m(double(s.m));
    const T& alpha = x[4 * n];
    Vec<T> g = grad_h(r);
    Vec<T> f(augmented_dim(s), T(0.0));
    T sec(0.0);
    for (int j = 0; j < n; ++j) {
        const V3<T>& u = r.u[j];
        const T& lam = x[3 * n + j];
        V3<T> ju = J3(u);
        for (int k = 0; k < 3; ++k) f[3 * j + k] = g[3 * j + k] + m * lam * u[k] + alpha * ju[k];
        f[3 * j + 2] -= omega * m;
        f[3 * n + j] = (norm2(u) - T(1.0)) / T(2.0);
        V3<T> b{T(anchor[3 * j]), T(anchor[3 * j + 1]), T(anchor[3 * j + 2])};
        sec += dot(J3(b), u - b);
    }
    f[4 * n] = sec;
    return f;
}

template <class T>
Mat<T> jacobian_F(const RingShape& s, const Vec<T>& x, const Vec<double>& anchor) {
    check_anchor(s, anchor);
    Rings<T> r = unpack_rings(s, x);
    const int n = s.n;
    const int d = augmented_dim(s);
    T m(double(s.m));
    const T& alpha = x[4 * n];
    Mat<T> hh = hess_h(r);
    Mat<T> J(d, d);
    for (int i = 0; i < 3 * n; ++i)
        for (int k = 0; k < 3 * n; ++k) J(i, k) = hh(i, k);
    for (int j = 0; j < n; ++j) {
        const V3<T>& u = r.u[j];
        T ml = m * x[3 * n + j];
        for (int k = 0; k < 3; ++k) J(3 * j + k, 3 * j + k) += ml;
        J(3 * j, 3 * j + 1) -= alpha;
        J(3 * j + 1, 3 * j) += alpha;
        V3<T> ju = J3(u);
        for (int k = 0; k < 3; ++k) {
            J(3 * j + k, 3 * n + j) = m * u[k];
            J(3 * j + k, 4 * n) = ju[k];
            J(3 * n + j, 3 * j + k) = u[k];
        }
        V3<double> jb = J3(V3<double>{anchor[3 * j], anchor[3 * j + 1], anchor[3 * j + 2]});
        for (int k = 0; k < 3; ++k) J(4 * n, 3 * j + k) = T(jb[k]);
    }
    return J;
}

template <class T>
Vec<T> dF_domega(const RingShape& s) {
    Vec<T> v(augmented_dim(s), T(0.0));
    for (int j = 0; j < s.n; ++j) v[3 * j + 2] = T(-double(s.m));
    return v;
}

template Vec<double> augmented_map_F<double>(const RingShape&, const Vec<double>&, const double&, const Vec<double>&);
template Vec<Interval> augmented_map_F<Interval>(const RingShape&, const Vec<Interval>&, const Interval&,
                                                 const Vec<double>&);
template Mat<double> jacobian_F<double>(const RingShape&, const Vec<double>&, const Vec<double>&);
template Mat<Interval> jacobian_F<Interval>(const RingShape&, const Vec<Interval>&, const Vec<double>&);
template Vec<double> dF_domega<double>(const RingShape&);
template Vec<Interval> dF_domega<Interval>(const RingShape&);

Vec<double> augmented_map_F(const RingShape& s, const AugmentedPoint& x, const Vec<double>& anchor) {
    return augmented_map_F<double>(s, pack(x), x.omega, anchor);
}

AugmentedPoint newton_polish(const RingShape& s, const AugmentedPoint& x0, const Vec<double>& anchor,
                             const NewtonOptions& opt) {
    Vec<double> x = pack(x0);
    const double w = x0.omega;
    double res = std::numeric_limits<double>::infinity();
    for (int it = 0; it <= opt.max_iter; ++it) {
        Vec<double> f;
        try {
            f = augmented_map_F<double>(s, x, w, anchor);
        } catch (const DomainError& e) {
            throw NoConvergence(std::string("newton_polish: ") + e.what());
        }
        res = norm_sup(f);
        if (!std::isfinite(res) || res > 1e8) throw NoConvergence("newton_polish: diverged");
        if (res <= opt.tol || it == opt.max_iter) break;
        Eigen::MatrixXd J = to_eigen(jacobian_F<double>(s, x, anchor));
        Eigen::VectorXd fe = Eigen::Map<Eigen::VectorXd>(f.data(), f.size());
        Eigen::VectorXd dx = J.partialPivLu().solve(fe);
        if (!dx.allFinite()) throw NoConvergence("newton_polish: singular Jacobian");
        double step = dx.lpNorm<Eigen::Infinity>();
        for (std::size_t i = 0; i < x.size(); ++i) x[i] -= dx[i];
        if (step <= 1e-15 * (1.0 + norm_sup(x))) {
            res = norm_sup(augmented_map_F<double>(s, x, w, anchor));
            break;
        }
    }
    if (!(res <= 1e-8)) throw NoConvergence("newton_polish: residual " + std::to_string(res));
    return unpack(s, x, w);
}

namespace {

IVector add_radius(const IVector& x, double r) {
    IVector out(x.size());
    for (std::size_t i = 0; i < x.size(); ++i) out[i] = Interval(sub_down(x[i].lo, r), add_up(x[i].hi, r));
    return out;
}

IVector axpy(const IVector& x, const Interval& a, const IVector& y) {
    IVector out(x.size());
    for (std::size_t i = 0; i < x.size(); ++i) out[i] = x[i] + a * y[i];
    return out;
}

IVector sub(const IVector& a, const IVector& b) {
    IVector out(a.size());
    for (std::size_t i = 0; i < a.size(); ++i) out[i] = a[i] - b[i];
    return out;
}

double contraction_bound(const Mat<double>& A, const IMatrix& D) {
    return norm_sup_matrix(IMatrix::identity(D.rows()) - mat_mul(A, D)).hi;
}

struct SegmentData {
    const RingShape& s;
    const Vec<double>& anchor;
    IVector x0, dx;
    Interval w0, dw;
    int pieces;
};

NKBounds validate_once(const SegmentData& sd, const Mat<double>& A, double Y, double Yhat, const NKOptions& opt) {
    NKBounds b;
    b.Y = Y;
    b.Yhat = Yhat;
    double rstar = opt.rstar;
    int grow = 0;
    const int K = std::max(sd.pieces, 1);
    while (rstar >= opt.rstar_min) {
        double Z = 0.0;
        for (int k = 0; k < K; ++k) {
            Interval S = sd.pieces ? Interval(double(k) / K, double(k + 1) / K) : Interval(0.0);
            IVector X = add_radius(axpy(sd.x0, S, sd.dx), rstar);
            IMatrix D;
            try {
                D = jacobian_F<Interval>(sd.s, X, sd.anchor);
            } catch (const DomainError&) {
                Z = std::numeric_limits<double>::infinity();
                break;
            }
            Z = std::max(Z, contraction_bound(A, D));
            if (!(Z < 1.0)) break;
        }
        b.Z = Z;
        b.rstar = rstar;
        if (Z < 1.0) {
            double num = add_up(Y, Yhat);
            double r0 = div_up(mul_up(1.01, num), sub_down(1.0, Z));
            r0 = std::max(r0, 1e-300);
            if (r0 <= rstar) {
                double p = sub_up(num, mul_down(sub_down(1.0, Z), r0));
                if (p < 0.0) {
                    b.r0 = r0;
                    return b;
                }
            }
            if (grow < 3 && r0 < 1e-2) {
                rstar = 4.0 * r0;
                ++grow;
                continue;
            }
            throw NotValidated("radii polynomial has no negative value below r*", b);
        }
        rstar /= 2.0;
    }
    throw NotValidated("no r* with Z < 1", b);
}

// further passes on balls just larger than the current r0, where Z is much smaller
NKBounds validate(const SegmentData& sd, const Mat<double>& A, double Y, double Yhat, const NKOptions& opt) {
    NKBounds b = validate_once(sd, A, Y, Yhat, opt);
    for (int pass = 0; pass < 4 && *b.r0 < b.rstar / 20.0; ++pass) {
        NKOptions tight = opt;
        tight.rstar = std::max(10.0 * *b.r0, opt.rstar_min);
        try {
            NKBounds t = validate_once(sd, A, Y, Yhat, tight);
            if (!(*t.r0 < 0.95 * *b.r0)) break;
            b = t;
        } catch (const NotValidated&) {
            break;
        }
    }
    return b;
}

}  // namespace

PointEnclosure nk_validate_point(const RingShape& s, const AugmentedPoint& x, const Vec<double>& anchor,
                                 const NKOptions& opt) {
    Vec<double> xv = pack(x);
    Eigen::MatrixXd J = to_eigen(jacobian_F<double>(s, xv, anchor));
    Eigen::MatrixXd Ae = J.fullPivLu().inverse();
    NKBounds fail;
    if (!Ae.allFinite()) throw NotValidated("approximate Jacobian is singular", fail);
    Mat<double> A = from_eigen(Ae);
    IVector xi = to_interval(xv);
    IVector f = augmented_map_F<Interval>(s, xi, Interval(x.omega), anchor);
    double Y = norm_sup(mat_vec(A, f)).hi;
    SegmentData sd{s, anchor, xi, IVector(xi.size(), Interval(0.0)), Interval(x.omega), Interval(0.0), 0};
    NKBounds b = validate(sd, A, Y, 0.0, opt);
    return {b, add_radius(xi, *b.r0)};
}

BranchCertificate nk_validate_segment(const RingShape& s, const AugmentedPoint& x0, const AugmentedPoint& x1,
                                      const Vec<double>& anchor, const NKOptions& opt) {
    Vec<double> a = pack(x0), c = pack(x1);
    if (a.size() != c.size()) throw ShapeError("nk_validate_segment: endpoint sizes differ");
    const bool degenerate = a == c && x0.omega == x1.omega;
    Vec<double> xm(a.size());
    for (std::size_t i = 0; i < a.size(); ++i) xm[i] = 0.5 * (a[i] + c[i]);
    Eigen::MatrixXd J = to_eigen(jacobian_F<double>(s, xm, anchor));
    Eigen::MatrixXd Ae = J.fullPivLu().inverse();
    if (!Ae.allFinite()) throw NotValidated("approximate Jacobian is singular", NKBounds{});
    Mat<double> A = from_eigen(Ae);

    IVector X0 = to_interval(a);
    IVector dX = sub(to_interval(c), X0);
    Interval w0(x0.omega), dw = Interval(x1.omega) - Interval(x0.omega);
    IVector F0 = augmented_map_F<Interval>(s, X0, w0, anchor);
    IVector AF0 = mat_vec(A, F0);
    double Y = norm_sup(AF0).hi;

    const int K = degenerate ? 0 : opt.pieces;
    double Yhat = 0.0;
    IVector Fw = dF_domega<Interval>(s);
    for (int k = 0; k < K; ++k) {
        double sa = double(k) / K, sb = double(k + 1) / K;
        Interval S(sa, sb);
        Interval sc = (Interval(sa) + Interval(sb)) / Interval(2.0);
        Interval half = (Interval(sb) - Interval(sa)) / Interval(2.0);
        IVector Xp = axpy(X0, S, dX);
        IVector Xc = axpy(X0, sc, dX);
        IVector Fc = augmented_map_F<Interval>(s, Xc, w0 + sc * dw, anchor);
        IVector G = mat_vec(jacobian_F<Interval>(s, Xp, anchor), dX);
        for (std::size_t i = 0; i < G.size(); ++i) G[i] += Fw[i] * dw;
        IVector E = mat_vec(A, sub(Fc, F0));
        IVector AG = mat_vec(A, G);
        Interval hs(-half.hi, half.hi);
        for (std::size_t i = 0; i < E.size(); ++i) E[i] += AG[i] * hs;
        Yhat = std::max(Yhat, norm_sup(E).hi);
    }

    SegmentData sd{s, anchor, X0, dX, w0, dw, K};
    NKBounds b = validate(sd, A, Y, Yhat, opt);
    BranchCertificate cert;
    cert.m = s.m;
    cert.n = s.n;
    cert.p = s.p;
    cert.anchor = anchor;
    cert.x0 = x0;
    cert.x1 = x1;
    cert.bounds = b;
    cert.r0 = *b.r0;
    cert.status = "validated";
    return cert;
}

IVector certificate_tube(const BranchCertificate& c, double s_lo, double s_hi) {
    IVector X0 = to_interval(pack(c.x0));
    IVector dX = sub(to_interval(pack(c.x1)), X0);
    return add_radius(axpy(X0, Interval(s_lo, s_hi), dX), c.r0);
}

Interval certificate_omega(const BranchCertificate& c, double s_lo, double s_hi) {
    Interval w0(c.x0.omega);
    return w0 + Interval(s_lo, s_hi) * (Interval(c.x1.omega) - w0);
}

namespace {

Rings<Interval> tube_rings(const BranchCertificate& c, double s_lo, double s_hi) {
    IVector t = certificate_tube(c, s_lo, s_hi);
    return rings_of(c.shape(), t);
}

}  // namespace

Interval certificate_mu(const BranchCertificate& c) {
    Interval out;
    const int K = 8;
    for (int k = 0; k < K; ++k) {
        auto r = tube_rings(c, double(k) / K, double(k + 1) / K);
        Interval mu = momentum_Phi(lift_rho(r))[2];
        out = k == 0 ? mu : hull(out, mu);
    }
    return out;
}

Interval certificate_H(const BranchCertificate& c) {
    Interval out;
    const int K = 8;
    for (int k = 0; k < K; ++k) {
        auto r = tube_rings(c, double(k) / K, double(k + 1) / K);
        Interval h = hamiltonian_H(lift_rho(r));
        out = k == 0 ? h : hull(out, h);
    }
    return out;
}

namespace {

AugmentedPoint interpolate(const AugmentedPoint& a, const AugmentedPoint& b, double w) {
    double t = (w - a.omega) / (b.omega - a.omega);
    Vec<double> xa = pack(a), xb = pack(b), x(xa.size());
    for (std::size_t i = 0; i < x.size(); ++i) x[i] = xa[i] + t * (xb[i] - xa[i]);
    AugmentedPoint out;
    out.u.assign(x.begin(), x.begin() + a.u.size());
    out.lambda.assign(x.begin() + a.u.size(), x.begin() + a.u.size() + a.lambda.size());
    out.alpha = x.back();
    out.omega = w;
    return out;
}

struct SegmentStall {
    double omega;
};

void validate_recursive(const RingShape& s, const AugmentedPoint& x0, const AugmentedPoint& x1, const Vec<double>& anchor,
                        const ContinuationOptions& opt, std::vector<BranchCertificate>& out) {
    try {
        out.push_back(nk_validate_segment(s, x0, x1, anchor, opt.nk));
        return;
    } catch (const NotValidated&) {
    } catch (const DomainError&) {
    }
    double wm = 0.5 * (x0.omega + x1.omega);
    if (x1.omega - x0.omega <= opt.min_step || wm <= x0.omega || wm >= x1.omega) throw SegmentStall{wm};
    AugmentedPoint xm;
    try {
        xm = newton_polish(s, interpolate(x0, x1, wm), anchor, opt.newton);
    } catch (const NoConvergence&) {
        throw SegmentStall{wm};
    }
    validate_recursive(s, x0, xm, anchor, opt, out);
    validate_recursive(s, xm, x1, anchor, opt, out);
}

}  // namespace

std::vector<BranchCertificate> continue_branch(const RingSystem& seed, double omega_from, double omega_to,
                                               const ContinuationOptions& opt) {
    if (!(omega_to > omega_from)) return {};
    if (!(opt.step > 0.0) || !(opt.min_step > 0.0)) throw DomainError("continue_branch: step must be positive");
    validate_rings(seed, 1e-6);
    const RingShape s = seed.shape();

    std::vector<AugmentedPoint> pts;
    pts.push_back(newton_polish(s, make_point(seed, omega_from), flatten(seed.u), opt.newton));
    double h = opt.step;
    double stall = std::numeric_limits<double>::quiet_NaN();
    while (pts.back().omega < omega_to) {
        const AugmentedPoint& x = pts.back();
        double wn = std::min(x.omega + h, omega_to);
        AugmentedPoint pred = x;
        pred.omega = wn;
        if (pts.size() >= 2) {
            const AugmentedPoint& xp = pts[pts.size() - 2];
            double t = (wn - x.omega) / (x.omega - xp.omega);
            Vec<double> a = pack(xp), b = pack(x), c(a.size());
            for (std::size_t i = 0; i < c.size(); ++i) c[i] = b[i] + t * (b[i] - a[i]);
            pred = unpack(s, c, wn);
        }
        try {
            AugmentedPoint xn = newton_polish(s, pred, x.u, opt.newton);
            double jump = 0.0;
            for (std::size_t i = 0; i < xn.u.size(); ++i) jump = std::max(jump, std::fabs(xn.u[i] - x.u[i]));
            if (jump > 0.25) throw NoConvergence("branch jump");
            pts.push_back(xn);
            h = std::min(opt.step, 2.0 * h);
        } catch (const NoConvergence&) {
            h /= 2.0;
            if (h < opt.min_step) {
                stall = x.omega;
                break;
            }
        }
    }

    const std::size_t nseg = pts.size() - 1;
    std::vector<std::vector<BranchCertificate>> results(nseg);
    std::vector<double> stalls(nseg, std::numeric_limits<double>::quiet_NaN());
    if (!opt.rigor) {
        for (std::size_t i = 0; i < nseg; ++i) {
            BranchCertificate c;
            c.m = s.m;
            c.n = s.n;
            c.p = s.p;
            c.anchor = pts[i].u;
            c.x0 = pts[i];
            c.x1 = newton_polish(s, pts[i + 1], pts[i].u, opt.newton);
            c.status = "numeric";
            results[i].push_back(c);
        }
    } else {
        unsigned workers = opt.workers ? opt.workers : std::max(1u, std::thread::hardware_concurrency());
        workers = std::min<unsigned>(workers, std::max<std::size_t>(nseg, 1));
        std::atomic<std::size_t> next{0};
        auto work = [&] {
            for (std::size_t i = next++; i < nseg; i = next++) {
                try {
                    AugmentedPoint x1 = newton_polish(s, pts[i + 1], pts[i].u, opt.newton);
                    validate_recursive(s, pts[i], x1, pts[i].u, opt, results[i]);
                } catch (const SegmentStall& e) {
                    stalls[i] = e.omega;
                } catch (const NoConvergence&) {
                    stalls[i] = pts[i].omega;
                }
            }
        };
        std::vector<std::thread> pool;
        for (unsigned t = 1; t < workers; ++t) pool.emplace_back(work);
        work();
        for (auto& t : pool) t.join();
    }

    std::vector<BranchCertificate> chain;
    for (std::size_t i = 0; i < nseg; ++i) {
        chain.insert(chain.end(), results[i].begin(), results[i].end());
        if (!std::isnan(stalls[i])) {
            double w = stalls[i];
            throw BranchStalled("branch stalled near omega = " + std::to_string(w), w, std::move(chain));
        }
    }
    if (!std::isnan(stall))
        throw BranchStalled("branch stalled near omega = " + std::to_string(stall), stall, std::move(chain));
    return chain;
}

}  // namespace vortex
