#include "vortex/model.hpp"

#include <cmath>
#include <numbers>

namespace vortex {

namespace {

using std::log;

template <class T>
using M3 = std::array<T, 9>;

template <class T>
M3<T> outer(const V3<T>& a, const V3<T>& b) {
    M3<T> r;
    for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j) r[3 * i + j] = a[i] * b[j];
    return r;
}

template <class T>
M3<T> rot_matrix(const Rot<T>& g) {
    return {g.c, -g.s, T(0.0), g.s, g.c, T(0.0), T(0.0), T(0.0), T(1.0)};
}

template <class T>
M3<T> matmul3(const M3<T>& a, const M3<T>& b) {
    M3<T> r;
    for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j) r[3 * i + j] = a[3 * i] * b[j] + a[3 * i + 1] * b[3 + j] + a[3 * i + 2] * b[6 + j];
    return r;
}

template <class T>
void add_block(Mat<T>& h, int bi, int bj, const M3<T>& blk, const T& s) {
    for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j) h(3 * bi + i, 3 * bj + j) += s * blk[3 * i + j];
}

template <class T>
void add_identity(Mat<T>& h, int b, const T& s) {
    for (int i = 0; i < 3; ++i) h(3 * b + i, 3 * b + i) += s;
}

template <class T>
T checked_dist2(const V3<T>& a, const V3<T>& b) {
    T d2 = norm2(a - b);
    if (!(inf(d2) >= kCollisionTol * kCollisionTol)) throw DomainError("vortex collision or generator at a forbidden point");
    return d2;
}

// K(d) = I/|d|^2 - 2 d d^T/|d|^4
template <class T>
M3<T> kernel_block(const V3<T>& d, const T& d2) {
    T inv = T(1.0) / d2;
    T inv2 = T(2.0) * inv * inv;
    M3<T> r = outer(d, d);
    for (auto& x : r) x = T(0.0) - inv2 * x;
    for (int i = 0; i < 3; ++i) r[4 * i] += inv;
    return r;
}

template <class T>
T scale_factor(HScale s) {
    return s == HScale::Half ? T(0.5) : T(1.0);
}

}  // namespace

namespace {

// cos of an integer multiple of 30 or 45 degrees, from square roots
Interval cos_degrees(int d) {
    d = ((d % 360) + 360) % 360;
    if (d > 180) d = 360 - d;
    if (d > 90) return Interval(0.0) - cos_degrees(180 - d);
    switch (d) {
        case 0: return Interval(1.0);
        case 30: return sqrt(Interval(3.0)) / Interval(2.0);
        case 45: return sqrt(Interval(2.0)) / Interval(2.0);
        case 60: return Interval(0.5);
        case 90: return Interval(0.0);
    }
    throw DomainError("cos_degrees: unsupported angle");
}

}  // namespace

template <class T>
Rot<T> rot_power(int m, int i) {
    if (m <= 0) throw DomainError("rotation order must be positive");
    int k = ((i % m) + m) % m;
    if (k == 0) return {T(1.0), T(0.0)};
    if (2 * k == m) return {T(-1.0), T(0.0)};
    if (4 * k == m) return {T(0.0), T(1.0)};
    if (4 * k == 3 * m) return {T(0.0), T(-1.0)};
    if constexpr (std::is_same_v<T, double>) {
        double t = 2.0 * std::numbers::pi * k / m;
        return {std::cos(t), std::sin(t)};
    } else {
        if ((360 * k) % m == 0) {
            int d = 360 * k / m;
            if (d % 30 == 0 || d % 45 == 0) return {cos_degrees(d), cos_degrees(90 - d)};
        }
        Interval t = Interval(2.0 * k) * pi_interval() / Interval(double(m));
        return {cos(t), sin(t)};
    }
}

template <class T>
Phase<T> root_of_unity(int m, int k) {
    Rot<T> g = rot_power<T>(m, k);
    return {g.c, g.s};
}

template <class T>
std::vector<V3<T>> pole_set(int p) {
    std::vector<V3<T>> f;
    if (p >= 1) f.push_back({T(0.0), T(0.0), T(1.0)});
    if (p >= 2) f.push_back({T(0.0), T(0.0), T(-1.0)});
    return f;
}

double pole_constant(int p) { return p == 2 ? -0.5 * std::log(4.0) : 0.0; }

void validate_rings(const RingSystem& r, double tol) {
    if (r.m < 1 || r.n < 1 || r.p < 0 || r.p > 2) throw DomainError("ring system: need m >= 1, n >= 1, p in {0,1,2}");
    if (int(r.u.size()) != r.n) throw DomainError("ring system: generator count differs from n");
    for (const auto& u : r.u) {
        if (std::fabs(norm2(u) - 1.0) > tol) throw DomainError("ring system: generator not on the unit sphere");
        if (r.m >= 2 && u[0] * u[0] + u[1] * u[1] < kCollisionTol * kCollisionTol)
            throw DomainError("ring system: generator at a pole");
    }
    for (int i = 0; i < r.n; ++i)
        for (int j = i + 1; j < r.n; ++j)
            if (norm2(r.u[i] - r.u[j]) < kCollisionTol * kCollisionTol) throw DomainError("ring system: repeated generator");
}

// ---------------------------------------------------------------- full space

template <class T>
T hamiltonian_H(const Config<T>& v, HScale scale) {
    T s(0.0);
    for (std::size_t i = 0; i < v.size(); ++i)
        for (std::size_t j = i + 1; j < v.size(); ++j) s += log(checked_dist2(v[i], v[j]));
    return T(0.0) - scale_factor<T>(scale) * s;
}

template <class T>
V3<T> momentum_Phi(const Config<T>& v) {
    V3<T> s{T(0.0), T(0.0), T(0.0)};
    for (const auto& x : v) s = s + x;
    return s;
}

template <class T>
Config<T> vortex_rhs(const Config<T>& v) {
    Config<T> out(v.size(), V3<T>{T(0.0), T(0.0), T(0.0)});
    for (std::size_t j = 0; j < v.size(); ++j)
        for (std::size_t i = 0; i < v.size(); ++i) {
            if (i == j) continue;
            T d2 = checked_dist2(v[i], v[j]);
            out[j] = out[j] + (T(1.0) / d2) * cross(v[i], v[j]);
        }
    return out;
}

Config<double> vortex_rhs(const Config<double>& v, const VortexParameters& params) {
    if (params.strengths.empty()) return vortex_rhs(v);
    if (params.strengths.size() != v.size()) throw ShapeError("vortex_rhs: strengths size differs from N");
    for (double g : params.strengths)
        if (g == 0.0) throw DomainError("vortex_rhs: zero vortex strength");
    Config<double> out(v.size(), V3<double>{0.0, 0.0, 0.0});
    for (std::size_t j = 0; j < v.size(); ++j)
        for (std::size_t i = 0; i < v.size(); ++i) {
            if (i == j) continue;
            double d2 = checked_dist2(v[i], v[j]);
            out[j] = out[j] + (params.strengths[i] / d2) * cross(v[i], v[j]);
        }
    return out;
}

template <class T>
T augmented_H(const Config<T>& v, const T& omega, HScale scale) {
    return hamiltonian_H(v, scale) - omega * momentum_Phi(v)[2];
}

template <class T>
Vec<T> grad_H(const Config<T>& v, HScale scale) {
    T f = T(2.0) * scale_factor<T>(scale);
    Vec<T> g(3 * v.size(), T(0.0));
    for (std::size_t j = 0; j < v.size(); ++j)
        for (std::size_t i = 0; i < v.size(); ++i) {
            if (i == j) continue;
            V3<T> d = v[j] - v[i];
            T c = f / checked_dist2(v[j], v[i]);
            for (int k = 0; k < 3; ++k) g[3 * j + k] -= c * d[k];
        }
    return g;
}

template <class T>
Mat<T> hess_H(const Config<T>& v, HScale scale) {
    T f = T(2.0) * scale_factor<T>(scale);
    std::size_t N = v.size();
    Mat<T> h(3 * N, 3 * N);
    for (std::size_t j = 0; j < N; ++j)
        for (std::size_t i = j + 1; i < N; ++i) {
            V3<T> d = v[j] - v[i];
            M3<T> k = kernel_block(d, checked_dist2(v[j], v[i]));
            add_block(h, int(j), int(j), k, T(0.0) - f);
            add_block(h, int(i), int(i), k, T(0.0) - f);
            add_block(h, int(j), int(i), k, f);
            add_block(h, int(i), int(j), k, f);
        }
    return h;
}

template <class T>
FullHessian<T> full_hstar_hessian(const Config<T>& v, const T& omega, double critical_tol) {
    FullHessian<T> out;
    std::size_t N = v.size();
    Vec<T> g = grad_H(v);
    out.multipliers.assign(N, T(0.0));
    double res = 0.0;
    for (std::size_t j = 0; j < N; ++j) {
        V3<T> gj{g[3 * j], g[3 * j + 1], g[3 * j + 2] - omega};
        T c = dot(v[j], gj);
        out.multipliers[j] = c;
        V3<T> t = gj - c * v[j];
        for (int k = 0; k < 3; ++k) res = std::max(res, std::fabs(mid(t[k])));
    }
    out.hessian = hess_H(v);
    for (std::size_t j = 0; j < N; ++j) add_identity(out.hessian, int(j), T(0.0) - out.multipliers[j]);
    out.residual = res;
    out.critical = res <= critical_tol * (1.0 + std::fabs(mid(omega)));
    return out;
}

// ---------------------------------------------------------------- reduction

template <class T>
Config<T> lift_rho(const Rings<T>& r) {
    Config<T> v;
    v.reserve(r.N());
    for (int j = 0; j < r.n; ++j)
        for (int k = 1; k <= r.m; ++k) v.push_back(rot_power<T>(r.m, k)(r.u[j]));
    for (const auto& f : pole_set<T>(r.p)) v.push_back(f);
    return v;
}

template <class T>
T reduced_h(const Rings<T>& r) {
    T m(double(r.m));
    T self(0.0), cross_ring(0.0), poles(0.0);
    auto F = pole_set<T>(r.p);
    for (int j = 0; j < r.n; ++j) {
        for (int i = 1; i < r.m; ++i) self += log(checked_dist2(rot_power<T>(r.m, i)(r.u[j]), r.u[j]));
        for (int jj = j + 1; jj < r.n; ++jj)
            for (int i = 1; i <= r.m; ++i) cross_ring += log(checked_dist2(rot_power<T>(r.m, i)(r.u[j]), r.u[jj]));
        for (const auto& f : F) poles += log(checked_dist2(r.u[j], f));
    }
    return T(0.0) - m / T(4.0) * self - m / T(2.0) * cross_ring - m / T(2.0) * poles;
}

template <class T>
T reduced_phi(const Rings<T>& r) {
    T s(0.0);
    for (const auto& u : r.u) s += u[2];
    return T(double(r.m)) * s;
}

template <class T>
Vec<T> grad_h(const Rings<T>& r) {
    T m(double(r.m));
    auto F = pole_set<T>(r.p);
    Vec<T> g(3 * r.n, T(0.0));
    for (int j = 0; j < r.n; ++j) {
        V3<T> acc{T(0.0), T(0.0), T(0.0)};
        for (int i = 1; i < r.m; ++i) {
            V3<T> d = r.u[j] - rot_power<T>(r.m, i)(r.u[j]);
            acc = acc + (T(1.0) / checked_dist2(r.u[j], rot_power<T>(r.m, i)(r.u[j]))) * d;
        }
        for (int jj = 0; jj < r.n; ++jj) {
            if (jj == j) continue;
            for (int i = 1; i <= r.m; ++i) {
                V3<T> gu = rot_power<T>(r.m, i)(r.u[jj]);
                acc = acc + (T(1.0) / checked_dist2(r.u[j], gu)) * (r.u[j] - gu);
            }
        }
        for (const auto& f : F) acc = acc + (T(1.0) / checked_dist2(r.u[j], f)) * (r.u[j] - f);
        for (int k = 0; k < 3; ++k) g[3 * j + k] = T(0.0) - m * acc[k];
    }
    return g;
}

template <class T>
Vec<T> grad_phi(const Rings<T>& r) {
    Vec<T> g(3 * r.n, T(0.0));
    for (int j = 0; j < r.n; ++j) g[3 * j + 2] = T(double(r.m));
    return g;
}

template <class T>
Mat<T> hess_h(const Rings<T>& r) {
    T m(double(r.m));
    T neg_m = T(0.0) - m;
    auto F = pole_set<T>(r.p);
    Mat<T> h(3 * r.n, 3 * r.n);
    for (int j = 0; j < r.n; ++j) {
        // self ring: d = (I - g^i) u_j
        for (int i = 1; i < r.m; ++i) {
            Rot<T> g = rot_power<T>(r.m, i);
            M3<T> Mi = rot_matrix(g);
            for (auto& x : Mi) x = T(0.0) - x;
            for (int k = 0; k < 3; ++k) Mi[4 * k] += T(1.0);
            V3<T> d = r.u[j] - g(r.u[j]);
            T d2 = checked_dist2(r.u[j], g(r.u[j]));
            M3<T> blk = matmul3(kernel_block(d, d2), Mi);
            add_block(h, j, j, blk, neg_m);
        }
        // other rings
        for (int jj = 0; jj < r.n; ++jj) {
            if (jj == j) continue;
            for (int i = 1; i <= r.m; ++i) {
                Rot<T> g = rot_power<T>(r.m, i);
                V3<T> gu = g(r.u[jj]);
                V3<T> d = r.u[j] - gu;
                M3<T> k = kernel_block(d, checked_dist2(r.u[j], gu));
                add_block(h, j, j, k, neg_m);
                add_block(h, j, jj, matmul3(k, rot_matrix(g)), m);
            }
        }
        for (const auto& f : F) {
            V3<T> d = r.u[j] - f;
            add_block(h, j, j, kernel_block(d, checked_dist2(r.u[j], f)), neg_m);
        }
    }
    return h;
}

template <class T>
std::vector<V3<T>> reduced_rhs(const Rings<T>& r) {
    Vec<T> g = grad_h(r);
    T inv_m = T(1.0) / T(double(r.m));
    std::vector<V3<T>> out(r.n);
    for (int j = 0; j < r.n; ++j) {
        V3<T> gj{g[3 * j], g[3 * j + 1], g[3 * j + 2]};
        out[j] = (T(0.0) - inv_m) * cross(r.u[j], gj);
    }
    return out;
}

template <class T>
T lagrangian_hstar(const Rings<T>& r, const Vec<T>& lambda, const T& omega) {
    if (int(lambda.size()) != r.n) throw ShapeError("lagrangian_hstar: lambda size differs from n");
    T s(0.0);
    for (int j = 0; j < r.n; ++j) s += lambda[j] * (norm2(r.u[j]) - T(1.0)) / T(2.0);
    return reduced_h(r) - omega * reduced_phi(r) + T(double(r.m)) * s;
}

template <class T>
Vec<T> grad_hstar(const Rings<T>& r, const Vec<T>& lambda, const T& omega) {
    if (int(lambda.size()) != r.n) throw ShapeError("grad_hstar: lambda size differs from n");
    Vec<T> g = grad_h(r);
    T m(double(r.m));
    for (int j = 0; j < r.n; ++j) {
        for (int k = 0; k < 3; ++k) g[3 * j + k] += m * lambda[j] * r.u[j][k];
        g[3 * j + 2] -= omega * m;
    }
    return g;
}

template <class T>
Mat<T> hess_hstar(const Rings<T>& r, const Vec<T>& lambda, const T& omega) {
    (void)omega;
    if (int(lambda.size()) != r.n) throw ShapeError("hess_hstar: lambda size differs from n");
    Mat<T> h = hess_h(r);
    T m(double(r.m));
    for (int j = 0; j < r.n; ++j) add_identity(h, j, m * lambda[j]);
    return h;
}

Vec<double> solve_multipliers(const RingSystem& r, double omega) {
    Vec<double> g = grad_h(r);
    Vec<double> lam(r.n);
    for (int j = 0; j < r.n; ++j) {
        V3<double> gj{g[3 * j], g[3 * j + 1], g[3 * j + 2] - omega * r.m};
        lam[j] = -dot(gj, r.u[j]) / (r.m * norm2(r.u[j]));
    }
    return lam;
}

// ---------------------------------------------------------------- integrators

namespace {

Config<double> axpy(const Config<double>& x, double a, const Config<double>& y) {
    Config<double> r(x.size());
    for (std::size_t i = 0; i < x.size(); ++i) r[i] = x[i] + a * y[i];
    return r;
}

template <class F>
Config<double> rk4(Config<double> v, double t, double dt, F&& f) {
    if (!(dt > 0)) throw DomainError("time step must be positive");
    long steps = std::lround(std::ceil(t / dt - 1e-9));
    double h = steps > 0 ? t / steps : 0.0;
    for (long s = 0; s < steps; ++s) {
        auto k1 = f(v);
        auto k2 = f(axpy(v, h / 2, k1));
        auto k3 = f(axpy(v, h / 2, k2));
        auto k4 = f(axpy(v, h, k3));
        for (std::size_t i = 0; i < v.size(); ++i) v[i] = v[i] + (h / 6) * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);
    }
    return v;
}

}  // namespace

Config<double> integrate_full(const Config<double>& v0, double t, double dt) {
    return rk4(v0, t, dt, [](const Config<double>& v) { return vortex_rhs(v); });
}

RingSystem integrate_reduced(const RingSystem& r0, double t, double dt) {
    RingSystem r = r0;
    r.u = rk4(r0.u, t, dt, [&](const Config<double>& u) {
        RingSystem s = r0;
        s.u = u;
        return reduced_rhs(s);
    });
    return r;
}

Vec<double> flatten(const Config<double>& v) {
    Vec<double> out;
    out.reserve(3 * v.size());
    for (const auto& x : v)
        for (double c : x) out.push_back(c);
    return out;
}

template <class T>
Rings<Interval> to_interval(const Rings<T>& r) {
    Rings<Interval> out{r.m, r.n, r.p, {}};
    for (const auto& u : r.u) out.u.push_back({Interval(u[0]), Interval(u[1]), Interval(u[2])});
    return out;
}

template <>
Rings<Interval> to_interval(const Rings<Interval>& r) {
    return r;
}

RingSystem mid(const Rings<Interval>& r) {
    RingSystem out{r.m, r.n, r.p, {}};
    for (const auto& u : r.u) out.u.push_back({u[0].mid(), u[1].mid(), u[2].mid()});
    return out;
}

#define VORTEX_INSTANTIATE(T)                                                          \
    template Rot<T> rot_power<T>(int, int);                                            \
    template Phase<T> root_of_unity<T>(int, int);                                      \
    template std::vector<V3<T>> pole_set<T>(int);                                      \
    template T hamiltonian_H<T>(const Config<T>&, HScale);                             \
    template V3<T> momentum_Phi<T>(const Config<T>&);                                  \
    template Config<T> vortex_rhs<T>(const Config<T>&);                                \
    template T augmented_H<T>(const Config<T>&, const T&, HScale);                     \
    template Vec<T> grad_H<T>(const Config<T>&, HScale);                               \
    template Mat<T> hess_H<T>(const Config<T>&, HScale);                               \
    template FullHessian<T> full_hstar_hessian<T>(const Config<T>&, const T&, double); \
    template Config<T> lift_rho<T>(const Rings<T>&);                                   \
    template T reduced_h<T>(const Rings<T>&);                                          \
    template T reduced_phi<T>(const Rings<T>&);                                        \
    template Vec<T> grad_h<T>(const Rings<T>&);                                        \
    template Vec<T> grad_phi<T>(const Rings<T>&);                                      \
    template Mat<T> hess_h<T>(const Rings<T>&);                                        \
    template std::vector<V3<T>> reduced_rhs<T>(const Rings<T>&);                       \
    template T lagrangian_hstar<T>(const Rings<T>&, const Vec<T>&, const T&);          \
    template Vec<T> grad_hstar<T>(const Rings<T>&, const Vec<T>&, const T&);           \
    template Mat<T> hess_hstar<T>(const Rings<T>&, const Vec<T>&, const T&);

VORTEX_INSTANTIATE(double)
VORTEX_INSTANTIATE(Interval)
#undef VORTEX_INSTANTIATE

template Rings<Interval> to_interval<double>(const Rings<double>&);

}  // namespace vortex
