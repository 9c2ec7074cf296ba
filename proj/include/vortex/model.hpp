#pragma once

#include <array>
#include <vector>

#include "vortex/interval.hpp"
#include "vortex/matrix.hpp"

namespace vortex {

template <class T>
using V3 = std::array<T, 3>;

template <class T>
using Config = std::vector<V3<T>>;

using FullConfiguration = Config<double>;

template <class T>
inline V3<T> operator+(const V3<T>& a, const V3<T>& b) { return {a[0] + b[0], a[1] + b[1], a[2] + b[2]}; }
template <class T>
inline V3<T> operator-(const V3<T>& a, const V3<T>& b) { return {a[0] - b[0], a[1] - b[1], a[2] - b[2]}; }
template <class T>
inline V3<T> operator-(const V3<T>& a) { return {-a[0], -a[1], -a[2]}; }
template <class T>
inline V3<T> operator*(const T& s, const V3<T>& a) { return {s * a[0], s * a[1], s * a[2]}; }
template <class T>
inline T dot(const V3<T>& a, const V3<T>& b) { return a[0] * b[0] + a[1] * b[1] + a[2] * b[2]; }
template <class T>
inline V3<T> cross(const V3<T>& a, const V3<T>& b) {
    return {a[1] * b[2] - a[2] * b[1], a[2] * b[0] - a[0] * b[2], a[0] * b[1] - a[1] * b[0]};
}
template <class T>
inline T norm2(const V3<T>& a) { return dot(a, a); }
template <class T>
inline V3<T> J3(const V3<T>& a) { return {-a[1], a[0], T(0.0)}; }  // e3 x a

template <class T>
V3<T> to_v3(const V3<double>& a) { return {T(a[0]), T(a[1]), T(a[2])}; }

enum class HScale { Half, One };

inline constexpr double kCollisionTol = 1e-9;

// Rotation about e3 by angle 2*pi*i/m, with exact values at multiples of quarter turns.
template <class T>
struct Rot {
    T c, s;
    V3<T> operator()(const V3<T>& v) const { return {c * v[0] - s * v[1], s * v[0] + c * v[1], v[2]}; }
    V3<T> inverse(const V3<T>& v) const { return {c * v[0] + s * v[1], -s * v[0] + c * v[1], v[2]}; }
};

template <class T>
Rot<T> rot_power(int m, int i);

// e^{2 pi i k / m}
template <class T>
struct Phase {
    T re, im;
};
template <class T>
Phase<T> root_of_unity(int m, int k);

struct RingShape {
    int m = 1, n = 1, p = 0;
    int N() const { return m * n + p; }
};

template <class T>
struct Rings {
    int m = 1, n = 1, p = 0;
    std::vector<V3<T>> u;
    int N() const { return m * n + p; }
    RingShape shape() const { return {m, n, p}; }
};

using RingSystem = Rings<double>;

struct VortexParameters {
    std::vector<double> strengths;  // empty means all equal to 1
    HScale scale = HScale::Half;
};

// Checks N = mn + p, unit generators, no generator at a pole when m >= 2, distinct generators.
void validate_rings(const RingSystem& r, double tol = 1e-10);

template <class T>
std::vector<V3<T>> pole_set(int p);

double pole_constant(int p);  // H(rho(u)) - h(u) for s_H = HALF

// full space
template <class T>
T hamiltonian_H(const Config<T>& v, HScale scale = HScale::Half);
template <class T>
V3<T> momentum_Phi(const Config<T>& v);
template <class T>
Config<T> vortex_rhs(const Config<T>& v);
Config<double> vortex_rhs(const Config<double>& v, const VortexParameters& params);
template <class T>
T augmented_H(const Config<T>& v, const T& omega, HScale scale = HScale::Half);
template <class T>
Vec<T> grad_H(const Config<T>& v, HScale scale = HScale::Half);
template <class T>
Mat<T> hess_H(const Config<T>& v, HScale scale = HScale::Half);

template <class T>
struct FullHessian {
    Mat<T> hessian;         // Hessian of H*_omega at (v, c)
    Vec<T> multipliers;     // c_j = v_j . grad_{v_j} H_omega
    double residual = 0.0;  // sup of the tangential part of grad H_omega (midpoints)
    bool critical = false;
};

template <class T>
FullHessian<T> full_hstar_hessian(const Config<T>& v, const T& omega, double critical_tol = 1e-8);

// reduction
template <class T>
Config<T> lift_rho(const Rings<T>& r);
template <class T>
T reduced_h(const Rings<T>& r);
template <class T>
T reduced_phi(const Rings<T>& r);
template <class T>
Vec<T> grad_h(const Rings<T>& r);
template <class T>
Vec<T> grad_phi(const Rings<T>& r);
template <class T>
Mat<T> hess_h(const Rings<T>& r);
template <class T>
std::vector<V3<T>> reduced_rhs(const Rings<T>& r);

template <class T>
T lagrangian_hstar(const Rings<T>& r, const Vec<T>& lambda, const T& omega);
template <class T>
Vec<T> grad_hstar(const Rings<T>& r, const Vec<T>& lambda, const T& omega);
template <class T>
Mat<T> hess_hstar(const Rings<T>& r, const Vec<T>& lambda, const T& omega);

// multipliers making grad_u h*_omega normal-free at a critical point
Vec<double> solve_multipliers(const RingSystem& r, double omega);

// fixed-step RK4
Config<double> integrate_full(const Config<double>& v0, double t, double dt);
RingSystem integrate_reduced(const RingSystem& r0, double t, double dt);

Vec<double> flatten(const Config<double>& v);
template <class T>
Rings<Interval> to_interval(const Rings<T>& r);
RingSystem mid(const Rings<Interval>& r);

}  // namespace vortex
