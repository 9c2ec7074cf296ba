#include <chrono>
#include <cmath>
#include <complex>
#include <cstdlib>
#include <functional>
#include <iostream>
#include <sstream>
#include <string>

#include <Eigen/Eigenvalues>

#include "vortex/catalog.hpp"
#include "vortex/continuation.hpp"
#include "vortex/errors.hpp"
#include "vortex/stability.hpp"

using namespace vortex;

namespace {

struct Outcome {
    bool pass = false;
    std::string detail;
};

int failures = 0;

void report(int id, const std::string& title, const std::function<Outcome()>& body) {
    auto t0 = std::chrono::steady_clock::now();
    Outcome o;
    try {
        o = body();
    } catch (const std::exception& e) {
        o = {false, std::string("exception: ") + e.what()};
    }
    double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    if (!o.pass) ++failures;
    std::ostringstream line;
    line.precision(3);
    line << (o.pass ? "PASS" : "FAIL") << " criterion " << id << ": " << title << " [" << std::fixed << secs << " s] "
         << o.detail;
    std::cout << line.str() << std::endl;
}

std::string g(double x, int digits = 10) {
    std::ostringstream s;
    s.precision(digits);
    s << x;
    return s.str();
}

Rings<Interval> pentagon_poles(const Interval& z) {
    Interval x = sqrt(Interval(1.0) - sqr(z));
    return Rings<Interval>{5, 1, 2, {{x, Interval(0.0), z}}};
}

std::vector<BlockMatrix> pentagon_blocks(const Interval& z) {
    Rings<Interval> a = pentagon_poles(z);
    Interval omega = one_ring_omega(OneRingKind::P2, 5, z);
    return assemble_blocks(build_slice(a, false), a, omega);
}

const BlockMatrix& block_l(const std::vector<BlockMatrix>& bs, int l) {
    for (const auto& b : bs)
        if (b.l == l) return b;
    throw NotFound("no block with l = " + std::to_string(l));
}

// criterion 1
Outcome equilibria() {
    std::ostringstream d;
    bool ok = true;
    for (const char* name : {"antiprism8", "prism9", "bipyramid10", "ground11"}) {
        FixtureEntry e = fixture(name);
        const SymmetryRep& rep = e.rep();
        PointEnclosure pe = certify_fixture(e);
        Rings<Interval> a = rings_of(RingShape{rep.m, rep.n, rep.p}, pe.enclosure);
        StabilityOptions opt;
        opt.workers = 4;
        StabilityVerdict v = stability_test(a, Interval(e.omega), opt);
        int kernel_dim = 0;
        for (const auto& b : v.blocks)
            if (b.kernel) kernel_dim += (b.kind == BlockKind::Q ? 2 : 1) * b.kernel;
        bool good = v.verdict == Verdict::CertifiedStable && kernel_dim == 2 && v.kernel_block == 1;
        ok = ok && good;
        d << name << "(N=" << e.N << ", m=" << rep.m << "): " << to_string(v.verdict) << ", kernel " << kernel_dim
          << "; ";
    }
    return {ok, d.str()};
}

// criterion 2
Outcome analytic_n7() {
    double kappa = 0.0, kmax = 0.0, kmin = 1e300, dev_det = 0.0;
    std::ostringstream d;
    for (double z : {0.05, 0.1, 0.15}) {
        auto bs = pentagon_blocks(Interval(z));
        const CIMatrix& Q2 = block_l(bs, 2).matrix;
        const CIMatrix& Q1 = block_l(bs, 1).matrix;
        double k0 = Q2(0, 0).re.mid() / 15.0, k1 = Q2(1, 1).re.mid() / (15.0 * z * z);
        double off = std::max({Q2(0, 1).mag(), Q2(1, 0).mag()});
        if (std::fabs(k0 - k1) > 1e-8 * std::fabs(k0) || off > 1e-8 * std::fabs(Q2(0, 0).re.mid())) return {false, "Q2 not diagonal of the expected form"};
        if (kappa == 0.0) kappa = k0;
        kmax = std::max(kmax, k0);
        kmin = std::min(kmin, k0);
        CInterval det = complex_det_enclosure(Q1);
        double poly = 9375.0 / 2.0 * z * z * (35 * std::pow(z, 4) - 86 * z * z + 3);
        double rel = std::fabs(det.re.mid() / (kappa * kappa * kappa * poly) - 1.0);
        dev_det = std::max(dev_det, rel);
        d << "z=" << z << ": kappa " << g(k0, 16) << ", det Q1 " << g(det.re.mid(), 12) << "; ";
    }
    double dev_k = (kmax - kmin) / std::fabs(kappa);
    bool ok = dev_k <= 1e-8 && dev_det <= 1e-6;
    d << "kappa spread " << g(dev_k, 3) << ", det deviation " << g(dev_det, 3);
    return {ok, d.str()};
}

// sign of the smallest Q1 eigenvalue at z: +1 certified positive, -1 certified negative, 0 unknown
int q1_sign(double z) {
    auto bs = pentagon_blocks(Interval(z));
    BlockSpectrum s = analyze_block(block_l(bs, 1), false, 0);
    if (s.positive) return 1;
    if (s.negative_witness) return -1;
    return 0;
}

// criterion 3
Outcome n7_boundary() {
    double zstar = std::sqrt((43 - 4 * std::sqrt(109.0)) / 35);
    double lo = 0.15, hi = 0.25;
    int slo = q1_sign(lo), shi = q1_sign(hi);
    if (slo != 1 || shi != -1) return {false, "endpoint signs " + std::to_string(slo) + ", " + std::to_string(shi)};
    while (hi - lo > 5e-7) {
        double mid = 0.5 * (lo + hi);
        int s = q1_sign(mid);
        if (s == 0) return {false, "undecided at z = " + g(mid, 12)};
        (s > 0 ? lo : hi) = mid;
    }
    // stable side: sample |z| < z* and the reflected configuration
    bool inside = true;
    for (double z : {0.02, 0.1, 0.18, -0.1, -0.18}) {
        OneRing f = one_ring_family(OneRingKind::P2, 5, z);
        StabilityVerdict v = stability_test(f.system, f.omega);
        inside = inside && v.verdict == Verdict::CertifiedStable;
    }
    for (double z : {0.19, 0.3, -0.3}) {
        OneRing f = one_ring_family(OneRingKind::P2, 5, z);
        inside = inside && stability_test(f.system, f.omega).verdict == Verdict::NotPositive;
    }
    bool ok = hi - lo <= 1e-6 && lo <= zstar && zstar <= hi && inside;
    return {ok, "bracket [" + g(lo, 12) + ", " + g(hi, 12) + "], width " + g(hi - lo, 3) + ", z* = " + g(zstar, 12) +
                    (inside ? ", verdicts match |z| < z*" : ", verdicts disagree with |z| < z*")};
}

// criterion 4
Outcome n5_branch() {
    FixtureEntry e = fixture("n5_branch");
    ContinuationOptions opt;
    opt.step = 0.0025;
    opt.workers = 4;
    std::vector<BranchCertificate> chain = continue_branch(e.system(), 0.2, 0.3, opt);
    if (chain.empty()) return {false, "empty chain"};
    Interval mu = certificate_mu(chain.front());
    bool ok = true;
    int stable = 0;
    StabilityOptions so;
    so.workers = 4;
    for (const auto& c : chain) {
        ok = ok && c.status == "validated";
        mu = hull(mu, certificate_mu(c));
        StabilityVerdict v = stability_over_segment(c, so);
        if (v.verdict == Verdict::CertifiedStable && v.whole_segment) ++stable;
    }
    double w0 = chain.front().x0.omega, w1 = chain.back().x1.omega;
    ok = ok && stable == int(chain.size()) && w0 <= 0.2 && w1 >= 0.3 && mu.lo >= 0.18 && mu.hi <= 0.98;
    return {ok, std::to_string(chain.size()) + " segments over [" + g(w0) + ", " + g(w1) + "], " +
                    std::to_string(stable) + " certified stable, mu in [" + g(mu.lo, 8) + ", " + g(mu.hi, 8) + "]"};
}

bool stable_expected(StableSide side, double z, double zs) {
    switch (side) {
        case StableSide::Above: return z > zs;
        case StableSide::AbsAbove: return std::fabs(z) > zs;
        case StableSide::AbsBelow: return std::fabs(z) < zs;
    }
    return false;
}

int verdict_sign(OneRingKind kind, int k, double z) {
    OneRing f = one_ring_family(kind, k, z);
    StabilityVerdict v = stability_test(f.system, f.omega);
    if (v.verdict == Verdict::CertifiedStable) return 1;
    if (v.verdict == Verdict::NotPositive) return -1;
    return 0;
}

// criterion 5
Outcome one_ring_thresholds() {
    struct Case {
        OneRingKind kind;
        int N;
    };
    std::vector<Case> cases;
    for (int N = 4; N <= 9; ++N) cases.push_back({OneRingKind::P1, N});
    for (int N = 4; N <= 6; ++N) cases.push_back({OneRingKind::P0, N});
    bool ok = true;
    std::ostringstream d;
    for (const auto& c : cases) {
        Threshold t = threshold(c.kind, c.N);
        int k = c.N - (c.kind == OneRingKind::P0 ? 0 : 1);
        double zs = t.z.mid();
        // asymmetric so that no midpoint lands on z* itself
        double lo = zs - 0.05, hi = zs + 0.0437;
        int slo = verdict_sign(c.kind, k, lo), shi = verdict_sign(c.kind, k, hi);
        bool good = slo != 0 && shi != 0 && slo != shi && (slo > 0) == stable_expected(t.side, lo, zs) &&
                    (shi > 0) == stable_expected(t.side, hi, zs);
        while (good && hi - lo > 1e-4) {
            double mid = 0.5 * (lo + hi);
            int s = verdict_sign(c.kind, k, mid);
            if (s == 0) {
                mid = lo + 0.37 * (hi - lo);
                s = verdict_sign(c.kind, k, mid);
            }
            if (s == 0) {
                good = false;
                break;
            }
            (s == slo ? lo : hi) = mid;
        }
        good = good && hi - lo <= 1e-4 && lo <= zs && zs <= hi;
        ok = ok && good;
        d << to_string(c.kind) << " N=" << c.N << (good ? " ok" : " FAILED") << " [" << g(lo, 7) << ", " << g(hi, 7)
          << "]; ";
    }
    return {ok, d.str()};
}

// criterion 6
Outcome bifurcation_n8() {
    FixtureEntry e = fixture("antiprism8");
    RingSystem seed = e.system(2);
    ContinuationOptions opt;
    opt.step = 0.02;
    opt.workers = 4;
    try {
        auto chain = continue_branch(seed, 1.4, 1.9, opt);
        return {false, "no stall: " + std::to_string(chain.size()) + " segments up to " + g(chain.back().x1.omega)};
    } catch (const BranchStalled& s) {
        bool ok = s.omega >= 1.55 && s.omega <= 1.70;
        double reached = s.partial.empty() ? 1.4 : s.partial.back().x1.omega;
        return {ok, "stalled at omega = " + g(s.omega, 8) + " (validated up to " + g(reached, 8) + ")"};
    }
}

// criterion 7
Outcome properties() {
    std::string cmd = std::string("\"") + VORTEX_PROPERTIES_BIN + "\" --minimal > /dev/null 2>&1";
    int rc = std::system(cmd.c_str());
    return {rc == 0, rc == 0 ? "test_properties: zero failures" : "test_properties exit status " + std::to_string(rc)};
}

// criterion 8
Outcome collisions() {
    std::ostringstream d;
    bool ok = true;
    for (const char* name : {"collision10", "collision11", "collision12"}) {
        FixtureEntry e = fixture(name);
        const SymmetryRep& rep = e.rep();
        PointEnclosure pe;
        try {
            pe = certify_fixture(e);
        } catch (const NotValidated& x) {
            d << name << ": not validated (" << x.what() << "); ";
            if (std::string(name) != "collision11") ok = false;
            continue;
        }
        d << name << ": r0 " << g(pe.bounds.r0.value_or(-1), 3) << " (tol " << g(e.tolerance, 2) << ")";
        if (std::string(name) != "collision10") {
            StabilityOptions opt;
            opt.workers = 4;
            Rings<Interval> a = rings_of(RingShape{rep.m, rep.n, rep.p}, pe.enclosure);
            StabilityVerdict v = stability_test(a, Interval(e.omega), opt);
            d << ", " << to_string(v.verdict);
            if (std::string(name) == "collision12") ok = ok && v.verdict == Verdict::CertifiedStable;
        }
        d << "; ";
    }
    return {ok, d.str()};
}

}  // namespace

int main() {
    report(1, "N = 8..11 equilibria certified stable", equilibria);
    report(2, "N = 7 analytic Q1, Q2", analytic_n7);
    report(3, "N = 7 stability boundary", n7_boundary);
    report(4, "N = 5 (2,2,1) branch over [0.2, 0.3]", n5_branch);
    report(5, "one-ring thresholds", one_ring_thresholds);
    report(6, "N = 8 bifurcation stall", bifurcation_n8);
    report(7, "property suites", properties);
    report(8, "near-collision equilibria at omega = 50", collisions);
    std::cout << (failures ? "FAILED " : "ALL PASSED ") << (8 - failures) << "/8" << std::endl;
    return failures ? 1 : 0;
}
