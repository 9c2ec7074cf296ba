#pragma once

#include <cstdlib>
#include <random>

#include "vortex/model.hpp"

namespace testing {

using vortex::operator-;

inline unsigned seed() {
    if (const char* s = std::getenv("VORTEX_CERT_SEED")) return unsigned(std::strtoul(s, nullptr, 10));
    return 20240611u;
}

inline std::mt19937_64& rng() {
    static std::mt19937_64 g(seed());
    return g;
}

inline double uniform(double a, double b) { return std::uniform_real_distribution<double>(a, b)(rng()); }

inline vortex::V3<double> random_unit() {
    std::normal_distribution<double> n;
    vortex::V3<double> v{n(rng()), n(rng()), n(rng())};
    double r = std::sqrt(vortex::norm2(v));
    return {v[0] / r, v[1] / r, v[2] / r};
}

// generators kept away from the poles and from each other's orbits
inline vortex::RingSystem random_rings(int m, int n, int p) {
    for (;;) {
        vortex::RingSystem r{m, n, p, {}};
        for (int j = 0; j < n; ++j) {
            double z = uniform(-0.85, 0.85), phi = uniform(0.0, 6.283185307179586);
            double s = std::sqrt(1.0 - z * z);
            r.u.push_back({s * std::cos(phi), s * std::sin(phi), z});
        }
        auto v = vortex::lift_rho(r);
        double dmin = 10.0;
        for (std::size_t i = 0; i < v.size(); ++i)
            for (std::size_t k = i + 1; k < v.size(); ++k) dmin = std::min(dmin, vortex::norm2(v[i] - v[k]));
        if (dmin > 0.05) return r;
    }
}

inline vortex::Config<double> random_config(int N) {
    vortex::RingSystem r = random_rings(1, N, 0);
    return r.u;
}

}  // namespace testing
