#include "vortex/catalog.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <functional>
#include <map>

#include "vortex/errors.hpp"

namespace vortex {

namespace {

std::string fmt_g(double x) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.3g", x);
    return buf;
}

using P3 = V3<double>;

double deg(double d) { return d * M_PI / 180.0; }

P3 at_height(double z, double phi = 0.0) {
    double r = std::sqrt((1.0 - z) * (1.0 + z));
    return {r * std::cos(phi), r * std::sin(phi), z};
}

// closed forms, evaluated in intervals
Interval antiprism8_z() {
    Interval s58 = sqrt(Interval(58.0));
    return sqrt((Interval(2.0) * s58 - Interval(13.0)) / Interval(7.0));
}

Interval bipyramid10_z() {
    Interval h = Interval(2.0) / Interval(3.0) * sqrt(Interval(2.0) * sqrt(Interval(106.0)) - Interval(19.0));
    return h / Interval(2.0);
}

Interval quartic(const Interval& x) {
    return (((Interval(64.0) * x + Interval(105.0)) * x - Interval(87.0)) * x - Interval(45.0)) * x + Interval(27.0);
}

Config<double> lift(const SymmetryRep& r) { return lift_rho(r.system()); }

SymmetryRep rep_of(int m, std::vector<P3> gens, int p) { return {m, int(gens.size()), p, std::move(gens)}; }

FixtureEntry make_entry(std::string name, std::string provenance, SymmetryRep primary, std::vector<int> more_m,
                        double omega = 0.0, double tol = 1e-9) {
    FixtureEntry e;
    e.name = std::move(name);
    e.provenance = std::move(provenance);
    e.N = primary.m * primary.n + primary.p;
    e.omega = omega;
    e.equilibrium = omega == 0.0;
    e.tolerance = tol;
    e.reps.push_back(primary);
    Config<double> v = lift(primary);
    for (int m : more_m) {
        auto r = symmetry_rep(v, m);
        if (!r) throw DomainError("catalog: no Z" + std::to_string(m) + " axis for " + e.name);
        e.reps.push_back(*r);
    }
    return e;
}

using Builder = std::function<FixtureEntry()>;

const std::map<std::string, Builder>& registry() {
    static const std::map<std::string, Builder> reg = {
        {"antipodal2",
         [] { return make_entry("antipodal2", "closed form", rep_of(2, {{1.0, 0.0, 0.0}}, 0), {}); }},
        {"triangle3",
         [] { return make_entry("triangle3", "closed form", rep_of(3, {{1.0, 0.0, 0.0}}, 0), {}); }},
        {"tetrahedron",
         [] {
             return make_entry("tetrahedron", "closed form", rep_of(3, {at_height(-1.0 / 3.0)}, 1), {2});
         }},
        {"bipyramid5",
         [] { return make_entry("bipyramid5", "closed form", rep_of(3, {{1.0, 0.0, 0.0}}, 2), {2}); }},
        {"octahedron",
         [] { return make_entry("octahedron", "closed form", rep_of(4, {{1.0, 0.0, 0.0}}, 2), {2, 3}); }},
        {"bipyramid7",
         [] { return make_entry("bipyramid7", "closed form", rep_of(5, {{1.0, 0.0, 0.0}}, 2), {2}); }},
        {"antiprism8",
         [] {
             double z = mid(antiprism8_z());
             return make_entry("antiprism8", "closed form, square antiprism",
                               rep_of(4, {at_height(z), at_height(-z, deg(45.0))}, 0), {2});
         }},
        {"prism9",
         [] {
             double z2 = mid(prism9_height_squared());
             double z = std::sqrt(z2), r = std::sqrt(1.0 - z2);
             return make_entry("prism9", "closed form, triaugmented triangular prism",
                               rep_of(3, {{r, 0.0, z}, {std::cos(deg(60.0)), std::sin(deg(60.0)), 0.0}, {r, 0.0, -z}}, 0),
                               {2});
         }},
        {"bipyramid10",
         [] {
             double z = mid(bipyramid10_z());
             return make_entry("bipyramid10", "closed form, gyroelongated square bipyramid",
                               rep_of(4, {at_height(z), at_height(-z, deg(45.0))}, 2), {2});
         }},
        {"ground11",
         [] {
             return make_entry("ground11", "15-digit generators",
                               rep_of(2,
                                      {{0.414622789752781, 0.748445554893721, 0.517607180763029},
                                       {-0.984889687565531, -0.009599383086507, 0.172916613347094},
                                       {0.514196162925374, -0.840060801883643, 0.172916613347109},
                                       {0.402032242619801, 0.725718055903693, -0.558304020431036},
                                       {0.518800630696144, -0.287404425636917, -0.805136387026196}},
                                      1),
                               {}, 0.0, 1e-13);
         }},
        {"icosahedron",
         [] {
             double z = 1.0 / std::sqrt(5.0);
             return make_entry("icosahedron", "closed form",
                               rep_of(5, {at_height(z), at_height(-z, deg(36.0))}, 2), {2, 3});
         }},
        {"collision10",
         [] {
             return make_entry("collision10", "15-digit coordinates, near collision",
                               rep_of(1,
                                      {{-0.321250364476975, 0.125503906002515, 0.938641024514443},
                                       {-0.281614324121647, -0.177060196674640, 0.943049871005264},
                                       {-0.110832315744048, 0.301948550025117, 0.946859689143297},
                                       {0.329289157466230, 0.047176175895631, 0.943049871005264},
                                       {-0.056029765308738, -0.338564275556233, 0.939273600564037},
                                       {0.163769131776852, 0.303533686063892, 0.938641024514443},
                                       {0.055171327848398, -0.150307266747506, 0.987098703345485},
                                       {0.093915265535320, 0.096705006907256, 0.990872375504786},
                                       {-0.134176736522985, 0.012982250865822, 0.990872375504786},
                                       {0.261758623547594, -0.221917836781855, 0.939273600564037}},
                                      0),
                               {}, 50.0, 4e-13);
         }},
        {"collision11",
         [] {
             return make_entry("collision11", "15-digit coordinates, near collision",
                               rep_of(1,
                                      {{0.139326894549961, 0.025868279023347, 0.989908505163702},
                                       {-0.023823734155396, -0.359048230308640, 0.933014896988857},
                                       {-0.233002228449082, 0.278282639870440, 0.931809387098295},
                                       {0.216459904805164, -0.258525569202590, 0.941440194425656},
                                       {0.034791923532369, 0.340414859454908, 0.939631441321124},
                                       {-0.275029387518199, -0.219648813034752, 0.936009206650121},
                                       {-0.341231039929540, 0.025576001826382, 0.939631441321107},
                                       {0.357646782971700, -0.039648210890842, 0.933014896988869},
                                       {-0.089752690493977, 0.107194750077486, 0.990178640501257},
                                       {-0.049951742661942, -0.132612121654087, 0.989908505163703},
                                       {0.264565317348943, 0.232146414838348, 0.936009206650103}},
                                      0),
                               {}, 50.0, 6e-11);
         }},
        {"collision12",
         [] {
             return make_entry("collision12", "15-digit coordinates, near collision",
                               rep_of(3,
                                      {{0.034887632581048, 0.136341626351998, 0.990047379682701},
                                       {-0.249324115175042, 0.243756694911171, 0.937240715759919},
                                       {0.214399606524508, 0.302490526779084, 0.928726165202127},
                                       {-0.042756936922558, 0.368292756396255, 0.928726165202127}},
                                      0),
                               {}, 50.0, 3e-13);
         }},
        {"n5_branch",
         [] {
             RingShape s{2, 2, 1};
             RingSystem seed{2, 2, 1, {{-0.884462, -0.242618, -0.398578}, {-0.263648, 0.961126, 0.082019}}};
             for (auto& u : seed.u) {
                 double n = std::sqrt(norm2(u));
                 u = {u[0] / n, u[1] / n, u[2] / n};
             }
             Vec<double> anchor;
             for (const auto& u : seed.u) anchor.insert(anchor.end(), u.begin(), u.end());
             AugmentedPoint x = newton_polish(s, make_point(seed, 0.2), anchor);
             FixtureEntry e = make_entry("n5_branch", "6-digit seed, Newton-polished",
                                         rep_of(2, rings_of(s, x).u, 1), {}, 0.2, 1e-6);
             return e;
         }},
    };
    return reg;
}

}  // namespace

const SymmetryRep& FixtureEntry::rep(std::optional<int> m) const {
    if (!m) return reps.front();
    for (const auto& r : reps)
        if (r.m == *m) return r;
    throw NotFound("fixture " + name + " has no Z" + std::to_string(*m) + " description");
}

std::vector<std::string> fixture_names() {
    std::vector<std::string> out;
    for (const auto& [k, v] : registry()) out.push_back(k);
    return out;
}

FixtureEntry fixture(const std::string& name) {
    auto it = registry().find(name);
    if (it == registry().end()) throw NotFound("unknown fixture: " + name);
    return it->second();
}

PointEnclosure certify_fixture(const FixtureEntry& e, std::optional<int> m) {
    const SymmetryRep& r = e.rep(m);
    RingSystem sys = r.system();
    RingShape s{r.m, r.n, r.p};
    Vec<double> anchor;
    for (const auto& u : sys.u) anchor.insert(anchor.end(), u.begin(), u.end());
    // a few unconditional steps: stored data often already meet the default residual tolerance
    AugmentedPoint x = newton_polish(s, make_point(sys, e.omega), anchor, NewtonOptions{0.0, 4});
    PointEnclosure pe = nk_validate_point(s, x, anchor);
    double dist = 0.0;
    for (int j = 0; j < r.n; ++j)
        for (int k = 0; k < 3; ++k) {
            const Interval& c = pe.enclosure[3 * j + k];
            double g = sys.u[j][k];
            dist = std::max({dist, rounding::sub_up(c.hi, g), rounding::sub_up(g, c.lo)});
        }
    if (dist > e.tolerance)
        throw NotValidated("fixture " + e.name + ": certified zero lies " + fmt_g(dist) +
                               " from the stored coordinates",
                           pe.bounds);
    return pe;
}

Interval prism9_height_squared() {
    double a = 0.0, step = 1.0 / 64.0;
    while (quartic(Interval(a + step)).lo > 0.0) {
        a += step;
        if (a > 1.0) throw NoConvergence("quartic has no root in (0, 1]");
    }
    Interval lo(a), hi(a + step);
    if (!(quartic(lo).lo > 0.0 && quartic(hi).hi < 0.0)) throw NoConvergence("quartic root not bracketed");
    double l = a, h = a + step;
    while (true) {
        double c = 0.5 * (l + h);
        if (c <= l || c >= h) break;
        Interval q = quartic(Interval(c));
        if (q.lo > 0.0)
            l = c;
        else if (q.hi < 0.0)
            h = c;
        else
            break;
    }
    return Interval(l, h);
}

std::optional<SymmetryRep> symmetry_rep(const Config<double>& v, int m, double tol) {
    const std::size_t N = v.size();
    if (m < 2 || N == 0) return std::nullopt;
    auto unit = [](P3 a) -> std::optional<P3> {
        double n = std::sqrt(norm2(a));
        if (n < 1e-6) return std::nullopt;
        return P3{a[0] / n, a[1] / n, a[2] / n};
    };
    std::vector<P3> axes{{0.0, 0.0, 1.0}};
    for (std::size_t i = 0; i < N; ++i) {
        if (auto a = unit(v[i])) axes.push_back(*a);
        for (std::size_t j = i + 1; j < N; ++j) {
            if (auto a = unit(v[i] + v[j])) axes.push_back(*a);
            for (std::size_t k = j + 1; k < N; ++k)
                if (auto a = unit(v[i] + v[j] + v[k])) axes.push_back(*a);
        }
    }

    std::optional<SymmetryRep> best;
    for (P3 axis : axes) {
        // frame with axis as the third row
        P3 t = std::fabs(axis[2]) < 0.9 ? P3{0.0, 0.0, 1.0} : P3{1.0, 0.0, 0.0};
        P3 e1 = *unit(cross(t, axis));
        P3 e2 = cross(axis, e1);
        bool identity = axis[2] == 1.0;
        std::vector<P3> w(N);
        for (std::size_t i = 0; i < N; ++i)
            w[i] = identity ? v[i] : P3{dot(e1, v[i]), dot(e2, v[i]), dot(axis, v[i])};
        int north = 0, south = 0;
        std::vector<bool> used(N, false);
        for (std::size_t i = 0; i < N; ++i) {
            double r2 = w[i][0] * w[i][0] + w[i][1] * w[i][1];
            if (r2 < tol) {
                used[i] = true;
                (w[i][2] > 0 ? north : south)++;
            }
        }
        if (north > 1 || south > 1) continue;
        bool flip = south == 1 && north == 0;
        std::vector<P3> gens;
        bool ok = true;
        Rot<double> g = rot_power<double>(m, 1);
        for (std::size_t i = 0; i < N && ok; ++i) {
            if (used[i]) continue;
            used[i] = true;
            gens.push_back(w[i]);
            P3 x = w[i];
            for (int k = 1; k < m && ok; ++k) {
                x = g(x);
                ok = false;
                for (std::size_t j = 0; j < N; ++j)
                    if (!used[j] && norm2(w[j] - x) < tol) {
                        used[j] = true;
                        ok = true;
                        break;
                    }
            }
        }
        if (!ok) continue;
        if (flip)
            for (auto& x : gens) x = {x[0], -x[1], -x[2]};
        std::sort(gens.begin(), gens.end(), [](const P3& a, const P3& b) { return a[2] > b[2]; });
        SymmetryRep r{m, int(gens.size()), north + south, gens};
        if (!best || r.p < best->p) best = r;
        if (best->p == 0) break;
    }
    return best;
}

const char* to_string(OneRingKind k) {
    switch (k) {
        case OneRingKind::P0: return "p0";
        case OneRingKind::P1: return "p1";
        case OneRingKind::P2: return "p2";
    }
    return "?";
}

Interval one_ring_omega(OneRingKind kind, int k, const Interval& z) {
    Interval d = Interval(2.0) * (Interval(1.0) - sqr(z));
    switch (kind) {
        case OneRingKind::P0: return Interval(double(k - 1)) * z / d;
        case OneRingKind::P1: return (Interval(1.0) + Interval(double(k)) * z) / d;
        case OneRingKind::P2: return Interval(double(k + 1)) * z / d;
    }
    throw DomainError("one_ring_omega: unknown kind");
}

OneRing one_ring_family(OneRingKind kind, int k, double z) {
    if (!(std::fabs(z) < 1.0)) throw DomainError("one_ring_family: need |z| < 1");
    if (k < 1) throw DomainError("one_ring_family: need k >= 1");
    int p = kind == OneRingKind::P0 ? 0 : kind == OneRingKind::P1 ? 1 : 2;
    OneRing out;
    out.system = RingSystem{k, 1, p, {at_height(z)}};
    out.omega = mid(one_ring_omega(kind, k, Interval(z)));
    return out;
}

Threshold threshold(OneRingKind kind, int N) {
    auto S = [](double x) { return sqrt(Interval(x)); };
    auto I = [](double x) { return Interval(x); };
    switch (kind) {
        case OneRingKind::P1:
            switch (N) {
                case 4: return {I(-1.0) / I(3.0), StableSide::Above};
                case 5: return {I(0.0), StableSide::Above};
                case 6: return {(S(6.0) - I(1.0)) / I(5.0), StableSide::Above};
                case 7: return {(S(19.0) - I(1.0)) / I(6.0), StableSide::Above};
                case 8: return {I(5.0) / I(7.0), StableSide::Above};
                case 9: return {(S(65.0) - I(1.0)) / I(8.0), StableSide::Above};
            }
            break;
        case OneRingKind::P0:
            switch (N) {
                case 4: return {I(1.0) / S(3.0), StableSide::AbsAbove};
                case 5: return {I(1.0) / S(2.0), StableSide::AbsAbove};
                case 6: return {I(2.0) / S(5.0), StableSide::AbsAbove};
            }
            break;
        case OneRingKind::P2:
            if (N == 7) return {sqrt((I(43.0) - I(4.0) * S(109.0)) / I(35.0)), StableSide::AbsBelow};
            break;
    }
    throw NotFound(std::string("no tabulated threshold for ") + to_string(kind) + ", N=" + std::to_string(N));
}

}  // namespace vortex
