#include "vortex/interval.hpp"

#include <algorithm>
#include <cstdio>
#include <cstdlib>

namespace vortex {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
// below this magnitude fma residuals may underflow, so we fall back to a plain ulp step
constexpr double kTiny = 1e-280;
constexpr double kHuge = 1e280;

double down_n(double x, int n) {
    for (int i = 0; i < n; ++i) x = rounding::down(x);
    return x;
}

double up_n(double x, int n) {
    for (int i = 0; i < n; ++i) x = rounding::up(x);
    return x;
}

// sign of the rounding error of s = fl(a+b): +1 if a+b > s, -1 if a+b < s, 0 if exact
int two_sum_sign(double a, double b, double s) {
    double bb = s - a;
    double err = (a - (s - bb)) + (b - bb);
    return (err > 0) - (err < 0);
}

int prod_sign(double a, double b, double p) {
    double ap = std::fabs(p);
    if (ap < kTiny || ap > kHuge) return 2;  // unknown
    double err = std::fma(a, b, -p);
    return (err > 0) - (err < 0);
}

}  // namespace

namespace rounding {

double add_down(double a, double b) {
    double s = a + b;
    if (std::isnan(s)) return -kInf;
    if (!std::isfinite(s)) return down(s);
    return two_sum_sign(a, b, s) < 0 ? down(s) : s;
}

double add_up(double a, double b) {
    double s = a + b;
    if (std::isnan(s)) return kInf;
    if (!std::isfinite(s)) return up(s);
    return two_sum_sign(a, b, s) > 0 ? up(s) : s;
}

double sub_down(double a, double b) { return add_down(a, -b); }
double sub_up(double a, double b) { return add_up(a, -b); }

double mul_down(double a, double b) {
    if (a == 0.0 || b == 0.0) return 0.0;
    double p = a * b;
    if (!std::isfinite(p)) return down(p);
    int s = prod_sign(a, b, p);
    if (s == 2) return down(p);
    return s < 0 ? down(p) : p;
}

double mul_up(double a, double b) {
    if (a == 0.0 || b == 0.0) return 0.0;
    double p = a * b;
    if (!std::isfinite(p)) return up(p);
    int s = prod_sign(a, b, p);
    if (s == 2) return up(p);
    return s > 0 ? up(p) : p;
}

static int quot_sign(double a, double b, double q) {
    if (a == 0.0) return 0;
    double aq = std::fabs(q), aa = std::fabs(a);
    if (!std::isfinite(q) || aq < kTiny || aq > kHuge || aa < kTiny || aa > kHuge) return 2;
    double r = std::fma(-q, b, a);  // a - q*b exactly
    if (r == 0.0) return 0;
    return ((r > 0) == (b > 0)) ? 1 : -1;
}

double div_down(double a, double b) {
    double q = a / b;
    int s = quot_sign(a, b, q);
    if (s == 2) return down(q);
    return s < 0 ? down(q) : q;
}

double div_up(double a, double b) {
    double q = a / b;
    int s = quot_sign(a, b, q);
    if (s == 2) return up(q);
    return s > 0 ? up(q) : q;
}

static int sqrt_sign(double a, double r) {
    if (a == 0.0 || !std::isfinite(a)) return 0;
    if (a < kTiny) return 2;
    double res = std::fma(-r, r, a);
    return (res > 0) - (res < 0);
}

double sqrt_down(double a) {
    double r = std::sqrt(a);
    int s = sqrt_sign(a, r);
    if (s == 2) return down(r);
    return s < 0 ? down(r) : r;
}

double sqrt_up(double a) {
    double r = std::sqrt(a);
    int s = sqrt_sign(a, r);
    if (s == 2) return up(r);
    return s > 0 ? up(r) : r;
}

}  // namespace rounding

using namespace rounding;

Interval::Interval(double a, double b) : lo(a), hi(b) {
    if (std::isnan(a) || std::isnan(b) || a > b) throw DomainError("invalid interval endpoints");
}

Interval Interval::hull(double a, double b) { return Interval(std::min(a, b), std::max(a, b)); }

Interval Interval::entire() { return Interval(-kInf, kInf); }

double Interval::mid() const {
    if (lo == hi) return lo;
    if (lo == -kInf && hi == kInf) return 0.0;
    if (lo == -kInf) return -std::numeric_limits<double>::max();
    if (hi == kInf) return std::numeric_limits<double>::max();
    double m = 0.5 * lo + 0.5 * hi;
    return std::clamp(m, lo, hi);
}

double Interval::rad() const {
    double m = mid();
    return std::max(sub_up(m, lo), sub_up(hi, m));
}

double Interval::width() const { return sub_up(hi, lo); }

double Interval::mag() const { return std::max(std::fabs(lo), std::fabs(hi)); }

double Interval::mig() const {
    if (contains_zero()) return 0.0;
    return std::min(std::fabs(lo), std::fabs(hi));
}

Interval operator+(const Interval& a, const Interval& b) {
    Interval r;
    r.lo = add_down(a.lo, b.lo);
    r.hi = add_up(a.hi, b.hi);
    return r;
}

Interval operator-(const Interval& a, const Interval& b) {
    Interval r;
    r.lo = sub_down(a.lo, b.hi);
    r.hi = sub_up(a.hi, b.lo);
    return r;
}

Interval operator-(const Interval& a) {
    Interval r;
    r.lo = -a.hi;
    r.hi = -a.lo;
    return r;
}

Interval operator*(const Interval& a, const Interval& b) {
    if (a.is_point() && b.is_point()) {
        Interval r;
        r.lo = mul_down(a.lo, b.lo);
        r.hi = mul_up(a.lo, b.lo);
        return r;
    }
    double l = std::min({mul_down(a.lo, b.lo), mul_down(a.lo, b.hi), mul_down(a.hi, b.lo), mul_down(a.hi, b.hi)});
    double h = std::max({mul_up(a.lo, b.lo), mul_up(a.lo, b.hi), mul_up(a.hi, b.lo), mul_up(a.hi, b.hi)});
    Interval r;
    r.lo = l;
    r.hi = h;
    return r;
}

Interval operator/(const Interval& a, const Interval& b) {
    if (b.contains_zero()) throw DomainError("division by an interval containing zero");
    double l = std::min({div_down(a.lo, b.lo), div_down(a.lo, b.hi), div_down(a.hi, b.lo), div_down(a.hi, b.hi)});
    double h = std::max({div_up(a.lo, b.lo), div_up(a.lo, b.hi), div_up(a.hi, b.lo), div_up(a.hi, b.hi)});
    Interval r;
    r.lo = l;
    r.hi = h;
    return r;
}

Interval add(const Interval& a, const Interval& b) { return a + b; }
Interval sub(const Interval& a, const Interval& b) { return a - b; }
Interval mul(const Interval& a, const Interval& b) { return a * b; }
Interval div(const Interval& a, const Interval& b) { return a / b; }

Interval sqr(const Interval& a) {
    Interval r;
    if (a.lo >= 0) {
        r.lo = mul_down(a.lo, a.lo);
        r.hi = mul_up(a.hi, a.hi);
    } else if (a.hi <= 0) {
        r.lo = mul_down(a.hi, a.hi);
        r.hi = mul_up(a.lo, a.lo);
    } else {
        r.lo = 0.0;
        r.hi = std::max(mul_up(a.lo, a.lo), mul_up(a.hi, a.hi));
    }
    return r;
}

Interval sqrt(const Interval& a) {
    if (a.lo < 0) throw DomainError("sqrt of an interval with negative part");
    Interval r;
    r.lo = sqrt_down(a.lo);
    r.hi = sqrt_up(a.hi);
    return r;
}

Interval log(const Interval& a) {
    if (!(a.lo > 0)) throw DomainError("log of an interval not strictly positive");
    Interval r;
    r.lo = a.lo == 1.0 ? 0.0 : down_n(std::log(a.lo), kTranscendentalSlack);
    r.hi = a.hi == 1.0 ? 0.0 : up_n(std::log(a.hi), kTranscendentalSlack);
    return r;
}

Interval ln(const Interval& a) { return log(a); }

Interval exp(const Interval& a) {
    Interval r;
    r.lo = a.lo == 0.0 ? 1.0 : std::max(0.0, down_n(std::exp(a.lo), kTranscendentalSlack));
    r.hi = a.hi == 0.0 ? 1.0 : up_n(std::exp(a.hi), kTranscendentalSlack);
    return r;
}

Interval pi_interval() {
    Interval r;
    r.lo = 0x1.921fb54442d18p+1;
    r.hi = 0x1.921fb54442d19p+1;
    return r;
}

namespace {

// cos-type envelope: extrema where t = x/pi - shift is an integer;
// even integers give the maximum +1, odd integers give the minimum -1
Interval trig_envelope(const Interval& a, double (*f)(double), double shift) {
    if (!std::isfinite(a.lo) || !std::isfinite(a.hi) || a.width() >= 7.0) return Interval(-1.0, 1.0);
    Interval t = a / pi_interval() - Interval(shift);
    double f1 = f(a.lo), f2 = f(a.hi);
    double l = std::min(down_n(f1, kTranscendentalSlack), down_n(f2, kTranscendentalSlack));
    double h = std::max(up_n(f1, kTranscendentalSlack), up_n(f2, kTranscendentalSlack));
    double k0 = std::ceil(t.lo), k1 = std::floor(t.hi);
    for (double k = k0; k <= k1; k += 1.0) {
        if (std::fmod(std::fabs(k), 2.0) == 0.0)
            h = 1.0;
        else
            l = -1.0;
    }
    return Interval(std::max(l, -1.0), std::min(h, 1.0));
}

double cos_fn(double x) { return std::cos(x); }
double sin_fn(double x) { return std::sin(x); }

}  // namespace

Interval cos(const Interval& a) {
    if (a.lo == 0.0 && a.hi == 0.0) return Interval(1.0);
    return trig_envelope(a, cos_fn, 0.0);
}

Interval sin(const Interval& a) {
    if (a.lo == 0.0 && a.hi == 0.0) return Interval(0.0);
    return trig_envelope(a, sin_fn, 0.5);
}

Interval abs(const Interval& a) {
    if (a.lo >= 0) return a;
    if (a.hi <= 0) return -a;
    return Interval(0.0, std::max(-a.lo, a.hi));
}

Interval hull(const Interval& a, const Interval& b) { return Interval(std::min(a.lo, b.lo), std::max(a.hi, b.hi)); }

Interval intersect(const Interval& a, const Interval& b) {
    double l = std::max(a.lo, b.lo), h = std::min(a.hi, b.hi);
    if (l > h) throw DomainError("empty intersection");
    return Interval(l, h);
}

std::string to_hex(double x) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%a", x);
    return buf;
}

double from_hex(const std::string& s) {
    char* end = nullptr;
    double v = std::strtod(s.c_str(), &end);
    if (end == s.c_str() || *end != '\0') throw DomainError("bad hex-float literal: " + s);
    return v;
}

double CInterval::mag() const {
    double r = re.mag(), i = im.mag();
    return sqrt_up(add_up(mul_up(r, r), mul_up(i, i)));
}

double CInterval::mig() const {
    double r = re.mig(), i = im.mig();
    return sqrt_down(add_down(mul_down(r, r), mul_down(i, i)));
}

CInterval operator+(const CInterval& a, const CInterval& b) { return {a.re + b.re, a.im + b.im}; }
CInterval operator-(const CInterval& a, const CInterval& b) { return {a.re - b.re, a.im - b.im}; }
CInterval operator-(const CInterval& a) { return {-a.re, -a.im}; }

CInterval operator*(const CInterval& a, const CInterval& b) {
    if (b.im.is_point() && b.im.lo == 0.0) return {a.re * b.re, a.im * b.re};
    if (a.im.is_point() && a.im.lo == 0.0) return {a.re * b.re, a.re * b.im};
    return {a.re * b.re - a.im * b.im, a.re * b.im + a.im * b.re};
}

CInterval operator/(const CInterval& a, const CInterval& b) {
    Interval d = sqr(b.re) + sqr(b.im);
    if (d.contains_zero()) throw DomainError("complex division by an enclosure of zero");
    CInterval num = a * conj(b);
    return {num.re / d, num.im / d};
}

CInterval conj(const CInterval& a) { return {a.re, -a.im}; }

CInterval hull(const CInterval& a, const CInterval& b) { return {hull(a.re, b.re), hull(a.im, b.im)}; }

CInterval expi(const Interval& theta) { return {cos(theta), sin(theta)}; }

}  // namespace vortex
