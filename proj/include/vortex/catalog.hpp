#pragma once

#include <optional>
#include <string>
#include <vector>

#include "vortex/continuation.hpp"
#include "vortex/interval.hpp"
#include "vortex/model.hpp"

namespace vortex {

// One Z_m-symmetric description of a configuration.
struct SymmetryRep {
    int m = 1, n = 1, p = 0;
    std::vector<V3<double>> generators;

    RingSystem system() const { return {m, n, p, generators}; }
};

struct FixtureEntry {
    std::string name;
    int N = 0;
    double omega = 0.0;
    bool equilibrium = true;
    double tolerance = 1e-9;  // coordinate accuracy of the stored data
    std::string provenance;
    std::vector<SymmetryRep> reps;  // reps[0] is the primary description

    const SymmetryRep& rep(std::optional<int> m = std::nullopt) const;  // NotFound if m is absent
    RingSystem system(std::optional<int> m = std::nullopt) const { return rep(m).system(); }
};

std::vector<std::string> fixture_names();
FixtureEntry fixture(const std::string& name);

// Re-certifies the stored coordinates with a point NK validation. Returns the enclosure of
// the true zero; throws NotValidated when the proof fails or the stored data lie farther than
// the fixture tolerance from the certified zero.
PointEnclosure certify_fixture(const FixtureEntry& e, std::optional<int> m = std::nullopt);

// Smallest positive root of 64x^4 + 105x^3 - 87x^2 - 45x + 27, by interval bisection.
Interval prism9_height_squared();

// Rotation axes of order m leaving v invariant, then the ring description about such an axis.
std::optional<SymmetryRep> symmetry_rep(const Config<double>& v, int m, double tol = 1e-9);

enum class OneRingKind { P0, P1, P2 };
const char* to_string(OneRingKind k);

struct OneRing {
    RingSystem system;
    double omega = 0.0;
};

// A ring of k vortices at height z, plus p = 0, 1 or 2 poles (north pole first).
OneRing one_ring_family(OneRingKind kind, int k, double z);
Interval one_ring_omega(OneRingKind kind, int k, const Interval& z);

enum class StableSide { AbsAbove, Above, AbsBelow };  // |z| > z*, z > z*, |z| < z*

struct Threshold {
    Interval z;
    StableSide side = StableSide::Above;
};

// N counts every vortex, poles included.
Threshold threshold(OneRingKind kind, int N);

}  // namespace vortex
