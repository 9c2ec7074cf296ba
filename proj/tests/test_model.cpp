#include <cmath>

#include "doctest.h"
#include "helpers.hpp"
#include "vortex/catalog.hpp"
#include "vortex/errors.hpp"
#include "vortex/model.hpp"

using namespace vortex;
using testing::uniform;

namespace {

V3<double> rotate(const Eigen::Matrix3d& R, const V3<double>& v) {
    Eigen::Vector3d x = R * Eigen::Vector3d(v[0], v[1], v[2]);
    return {x[0], x[1], x[2]};
}

Eigen::Matrix3d random_rotation() {
    Eigen::Quaterniond q(uniform(-1, 1), uniform(-1, 1), uniform(-1, 1), uniform(-1, 1));
    return q.normalized().toRotationMatrix();
}

double sup_dist(const Config<double>& a, const Config<double>& b) {
    double d = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i)
        for (int k = 0; k < 3; ++k) d = std::max(d, std::fabs(a[i][k] - b[i][k]));
    return d;
}

RingSystem pentagon(double z) { return one_ring_family(OneRingKind::P2, 5, z).system; }

}  // namespace

TEST_CASE("Hamiltonian") {
    Config<double> pair{{0.0, 0.0, 1.0}, {0.0, 0.0, -1.0}};
    CHECK(hamiltonian_H(pair) == doctest::Approx(-std::log(2.0)).epsilon(1e-15));
    CHECK(hamiltonian_H(pair, HScale::One) == doctest::Approx(-std::log(4.0)).epsilon(1e-15));

    Config<double> v = testing::random_config(6);
    Eigen::Matrix3d R = random_rotation();
    Config<double> w;
    for (const auto& x : v) w.push_back(rotate(R, x));
    CHECK(std::fabs(hamiltonian_H(v) - hamiltonian_H(w)) <= 1e-12);
    Config<double> perm(v.rbegin(), v.rend());
    CHECK(std::fabs(hamiltonian_H(v) - hamiltonian_H(perm)) <= 1e-13);

    CHECK_THROWS_AS(hamiltonian_H(Config<double>{{1, 0, 0}, {1, 0, 0}}), DomainError);
    Interval Hi = hamiltonian_H(Config<Interval>{to_v3<Interval>(pair[0]), to_v3<Interval>(pair[1])});
    CHECK(Hi.contains(-std::log(2.0)));
}

TEST_CASE("momentum") {
    Config<double> pair{{0.6, 0.0, 0.8}, {-0.6, 0.0, -0.8}};
    V3<double> phi = momentum_Phi(pair);
    for (double c : phi) CHECK(c == 0.0);
    Config<double> ico = lift_rho(fixture("icosahedron").system());
    V3<double> pi = momentum_Phi(ico);
    CHECK(std::sqrt(norm2(pi)) <= 1e-12);
    double z = 0.3;
    V3<double> p5 = momentum_Phi(lift_rho(pentagon(z)));
    CHECK(std::fabs(p5[0]) <= 1e-14);
    CHECK(std::fabs(p5[1]) <= 1e-14);
    CHECK(p5[2] == doctest::Approx(5 * z).epsilon(1e-14));
}

TEST_CASE("equations of motion") {
    double x = 0.6, z = 0.8;
    Config<double> v{{x, 0.0, z}, {-x, 0.0, z}};
    Config<double> d = vortex_rhs(v);
    CHECK(std::fabs(d[0][0]) <= 1e-15);
    CHECK(d[0][1] == doctest::Approx(z / (2 * x)).epsilon(1e-14));
    CHECK(std::fabs(d[0][2]) <= 1e-15);

    Config<double> r = testing::random_config(5);
    Config<double> dr = vortex_rhs(r);
    for (std::size_t j = 0; j < r.size(); ++j) CHECK(std::fabs(dot(dr[j], r[j])) <= 1e-13);

    // equals -v_j x grad_j H
    Vec<double> g = grad_H(r);
    for (std::size_t j = 0; j < r.size(); ++j) {
        V3<double> gj{g[3 * j], g[3 * j + 1], g[3 * j + 2]};
        V3<double> e = -cross(r[j], gj);
        for (int k = 0; k < 3; ++k) CHECK(std::fabs(e[k] - dr[j][k]) <= 1e-12);
    }

    // general strengths: doubling every strength doubles the velocity
    VortexParameters two{std::vector<double>(5, 2.0)};
    Config<double> d2 = vortex_rhs(r, two);
    for (std::size_t j = 0; j < r.size(); ++j)
        for (int k = 0; k < 3; ++k) CHECK(std::fabs(d2[j][k] - 2 * dr[j][k]) <= 1e-12);

    for (const char* name : {"tetrahedron", "bipyramid5", "octahedron", "bipyramid7", "antiprism8", "prism9",
                             "bipyramid10", "icosahedron"}) {
        FixtureEntry e = fixture(name);
        for (const auto& rep : e.reps) {
            Config<double> vv = lift_rho(rep.system());
            double s = 0.0;
            for (const auto& w : vortex_rhs(vv)) s = std::max(s, std::sqrt(norm2(w)));
            CHECK_MESSAGE(s <= 1e-10, name << " m=" << rep.m);
        }
    }

    RingSystem sym = testing::random_rings(3, 2, 1);
    Config<double> vs = lift_rho(sym), ds = vortex_rhs(vs);
    Rot<double> g3 = rot_power<double>(3, 1);
    for (int j = 0; j < 2; ++j)
        for (int k = 0; k < 2; ++k) {
            V3<double> a = g3(ds[j * 3 + k]), b = ds[j * 3 + k + 1];
            for (int c = 0; c < 3; ++c) CHECK(std::fabs(a[c] - b[c]) <= 1e-12);
        }
}

TEST_CASE("augmented Hamiltonian") {
    Config<double> v = testing::random_config(4);
    CHECK(augmented_H(v, 0.0) == hamiltonian_H(v));
    double th = uniform(0, 6.28);
    Rot<double> R{std::cos(th), std::sin(th)};
    Config<double> w;
    for (const auto& x : v) w.push_back(R(x));
    CHECK(std::fabs(augmented_H(v, 0.7) - augmented_H(w, 0.7)) <= 1e-12);

    double z = 0.1, om = 3 * z / (1 - z * z), h = 1e-5;
    auto Hz = [&](double zz) { return augmented_H(lift_rho(pentagon(zz)), om); };
    CHECK(std::fabs((Hz(z + h) - Hz(z - h)) / (2 * h)) <= 1e-9);
}

TEST_CASE("lift and reduction") {
    Config<double> v = lift_rho(RingSystem{2, 1, 0, {{1.0, 0.0, 0.0}}});
    REQUIRE(v.size() == 2);
    CHECK(v[0][0] == -1.0);
    CHECK(v[0][1] == 0.0);
    CHECK(v[1][0] == 1.0);

    RingSystem one = testing::random_rings(1, 4, 0);
    CHECK(sup_dist(lift_rho(one), one.u) == 0.0);

    RingSystem r = testing::random_rings(4, 2, 2);
    Config<double> a = lift_rho(r);
    REQUIRE(a.size() == 10);
    Rot<double> g = rot_power<double>(4, 1);
    for (int j = 0; j < 2; ++j)
        for (int k = 0; k < 4; ++k) {
            V3<double> moved = g(a[j * 4 + k]), target = a[j * 4 + (k + 1) % 4];
            for (int c = 0; c < 3; ++c) CHECK(std::fabs(moved[c] - target[c]) <= 1e-15);
        }
    CHECK(a[8][2] == 1.0);
    CHECK(a[9][2] == -1.0);

    CHECK_THROWS_AS(validate_rings(RingSystem{2, 1, 0, {{0.0, 0.0, 1.0}}}), DomainError);
    CHECK_THROWS_AS(validate_rings(RingSystem{2, 2, 0, {{1.0, 0.0, 0.0}}}), DomainError);
}

TEST_CASE("reduced Hamiltonian and momentum") {
    double z = 0.4, x = std::sqrt(1 - z * z);
    RingSystem r{2, 1, 0, {{x, 0.0, z}}};
    CHECK(reduced_h(r) == doctest::Approx(-0.5 * std::log(4 * (1 - z * z))).epsilon(1e-14));
    CHECK(reduced_h(RingSystem{2, 1, 0, {{1.0, 0.0, 0.0}}}) == doctest::Approx(-std::log(2.0)).epsilon(1e-15));
    CHECK(reduced_phi(r) == doctest::Approx(2 * z).epsilon(1e-15));
    CHECK(reduced_phi(pentagon(0.2)) == doctest::Approx(1.0).epsilon(1e-14));

    for (int p = 0; p <= 2; ++p) {
        RingSystem s = testing::random_rings(3, 2, p);
        CHECK(std::fabs(hamiltonian_H(lift_rho(s)) - (reduced_h(s) + pole_constant(p))) <= 1e-12);
        double sigma = momentum_Phi(lift_rho(s))[2] - reduced_phi(s);
        CHECK(std::fabs(sigma - (p == 1 ? 1.0 : 0.0)) <= 1e-12);
        V3<double> phi = momentum_Phi(lift_rho(s));
        CHECK(std::hypot(phi[0], phi[1]) <= 1e-12);

        double th = uniform(0, 6.28);
        Rot<double> R{std::cos(th), std::sin(th)};
        RingSystem t = s;
        for (auto& u : t.u) u = R(u);
        CHECK(std::fabs(reduced_h(s) - reduced_h(t)) <= 1e-12);
    }
}

TEST_CASE("gradient and Hessian of h") {
    double z = 0.3, x = std::sqrt(1 - z * z);
    Vec<double> g = grad_h(RingSystem{2, 1, 0, {{x, 0.0, z}}});
    CHECK(g[0] == doctest::Approx(-1.0 / x).epsilon(1e-14));
    CHECK(std::fabs(g[1]) <= 1e-15);
    CHECK(std::fabs(g[2]) <= 1e-15);

    const double h = 1e-6;
    for (int trial = 0; trial < 50; ++trial) {
        int m = 1 + trial % 5, n = 1 + trial % 3, p = trial % 3;
        RingSystem r = testing::random_rings(m, n, p);
        Vec<double> gr = grad_h(r);
        Mat<double> He = hess_h(r);
        for (int j = 0; j < n; ++j)
            for (int k = 0; k < 3; ++k) {
                RingSystem a = r, b = r;
                a.u[j][k] += h;
                b.u[j][k] -= h;
                double fd = (reduced_h(a) - reduced_h(b)) / (2 * h);
                CHECK(std::fabs(fd - gr[3 * j + k]) <= 1e-6);
                Vec<double> ga = grad_h(a), gb = grad_h(b);
                for (int i = 0; i < 3 * n; ++i) CHECK(std::fabs((ga[i] - gb[i]) / (2 * h) - He(i, 3 * j + k)) <= 1e-5);
            }
        for (int i = 0; i < 3 * n; ++i)
            for (int k = 0; k < 3 * n; ++k) CHECK(std::fabs(He(i, k) - He(k, i)) <= 1e-12);
    }
}

TEST_CASE("Lagrangian h*") {
    RingSystem r = testing::random_rings(3, 2, 1);
    Vec<double> zero(2, 0.0);
    double om = 0.4;
    CHECK(std::fabs(lagrangian_hstar(r, zero, om) - (reduced_h(r) - om * reduced_phi(r))) <= 1e-13);
    Vec<double> lam{0.3, -0.7};
    CHECK_THROWS_AS(grad_hstar(r, Vec<double>{1.0}, om), ShapeError);

    RingSystem off = r;
    off.u[0] = {off.u[0][0] * 1.01, off.u[0][1] * 1.01, off.u[0][2] * 0.99};
    Vec<double> go = grad_hstar(off, lam, om);
    Mat<double> Ho = hess_hstar(off, lam, om);
    REQUIRE(go.size() == 6);
    const double h = 1e-6;
    for (int i = 0; i < 6; ++i) {
        RingSystem a = off, b = off;
        a.u[i / 3][i % 3] += h;
        b.u[i / 3][i % 3] -= h;
        double fd = (lagrangian_hstar(a, lam, om) - lagrangian_hstar(b, lam, om)) / (2 * h);
        CHECK(std::fabs(fd - go[i]) <= 1e-6);
        Vec<double> ga = grad_hstar(a, lam, om), gb = grad_hstar(b, lam, om);
        for (int k = 0; k < 6; ++k) CHECK(std::fabs((ga[k] - gb[k]) / (2 * h) - Ho(k, i)) <= 1e-5);
    }
}

TEST_CASE("Hessian of H* at a relative equilibrium") {
    double z = 0.2;
    OneRing fam = one_ring_family(OneRingKind::P2, 5, z);
    Config<double> a = lift_rho(fam.system);
    FullHessian<double> fh = full_hstar_hessian(a, fam.omega);
    CHECK(fh.critical);
    CHECK(fh.residual <= 1e-10);
    const int N = int(a.size());
    for (int i = 0; i < 3 * N; ++i)
        for (int k = 0; k < 3 * N; ++k) CHECK(std::fabs(fh.hessian(i, k) - fh.hessian(k, i)) <= 1e-12);

    // second variation along a geodesic through a
    for (int trial = 0; trial < 5; ++trial) {
        Config<double> w(N);
        for (int j = 0; j < N; ++j) {
            V3<double> t = testing::random_unit();
            w[j] = t - dot(t, a[j]) * a[j];
        }
        auto along = [&](double s) {
            Config<double> b(N);
            for (int j = 0; j < N; ++j) {
                double len = std::sqrt(norm2(w[j]));
                b[j] = std::cos(s * len) * a[j] + (len > 0 ? std::sin(s * len) / len : s) * w[j];
            }
            return augmented_H(b, fam.omega);
        };
        const double h = 1e-4;
        double second = (along(h) - 2 * along(0.0) + along(-h)) / (h * h);
        double quad = 0.0;
        for (int i = 0; i < 3 * N; ++i)
            for (int k = 0; k < 3 * N; ++k) quad += w[i / 3][i % 3] * fh.hessian(i, k) * w[k / 3][k % 3];
        CHECK(std::fabs(second - quad) <= 1e-5 * std::max(1.0, std::fabs(quad)));
    }

    Config<double> off = testing::random_config(4);
    CHECK_FALSE(full_hstar_hessian(off, 0.0).critical);
}

TEST_CASE("relative equilibria of the one-ring families") {
    for (auto kind : {OneRingKind::P0, OneRingKind::P1, OneRingKind::P2}) {
        for (int k : {3, 4, 6}) {
            OneRing f = one_ring_family(kind, k, 0.35);
            Config<double> v = lift_rho(f.system);
            Config<double> d = vortex_rhs(v);
            for (std::size_t j = 0; j < v.size(); ++j) {
                V3<double> target = f.omega * J3(v[j]);
                for (int c = 0; c < 3; ++c) CHECK(std::fabs(d[j][c] - target[c]) <= 1e-10);
            }
        }
    }
}

TEST_CASE("integrators") {
    Config<double> v0 = testing::random_config(5);
    Config<double> v1 = integrate_full(v0, 1.0, 1e-3);
    CHECK(std::fabs(hamiltonian_H(v1) - hamiltonian_H(v0)) <= 1e-8);
    V3<double> p0 = momentum_Phi(v0), p1 = momentum_Phi(v1);
    for (int c = 0; c < 3; ++c) CHECK(std::fabs(p0[c] - p1[c]) <= 1e-8);

    RingSystem r = testing::random_rings(3, 2, 1);
    RingSystem rt = integrate_reduced(r, 1.0, 1e-3);
    Config<double> full = integrate_full(lift_rho(r), 1.0, 1e-3);
    CHECK(sup_dist(lift_rho(rt), full) <= 1e-6);
}
