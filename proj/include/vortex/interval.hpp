#pragma once

#include <cmath>
#include <complex>
#include <limits>
#include <string>

#include "vortex/errors.hpp"

namespace vortex {

// Closed interval [lo, hi] of doubles. Every operation below returns an
// enclosure of the exact real result, widened by next-representable steps
// rather than by switching the FPU rounding mode.
struct Interval {
    double lo = 0.0;
    double hi = 0.0;

    constexpr Interval() = default;
    constexpr Interval(double x) : lo(x), hi(x) {}
    Interval(double a, double b);

    static Interval hull(double a, double b);
    static Interval entire();

    double mid() const;
    double rad() const;    // upper bound on half-width, so [mid-rad, mid+rad] covers *this
    double width() const;  // upper bound
    double mag() const;    // max |x|
    double mig() const;    // min |x|

    bool contains(double x) const { return lo <= x && x <= hi; }
    bool contains(const Interval& o) const { return lo <= o.lo && o.hi <= hi; }
    bool contains_zero() const { return lo <= 0.0 && 0.0 <= hi; }
    bool is_point() const { return lo == hi; }
};

inline bool operator==(const Interval& a, const Interval& b) { return a.lo == b.lo && a.hi == b.hi; }

namespace rounding {
inline double up(double x) { return std::nextafter(x, std::numeric_limits<double>::infinity()); }
inline double down(double x) { return std::nextafter(x, -std::numeric_limits<double>::infinity()); }
double add_down(double a, double b);
double add_up(double a, double b);
double sub_down(double a, double b);
double sub_up(double a, double b);
double mul_down(double a, double b);
double mul_up(double a, double b);
double div_down(double a, double b);
double div_up(double a, double b);
double sqrt_down(double a);
double sqrt_up(double a);
}  // namespace rounding

// documented slack for libm transcendentals, in ulps
inline constexpr int kTranscendentalSlack = 4;

Interval operator+(const Interval& a, const Interval& b);
Interval operator-(const Interval& a, const Interval& b);
Interval operator*(const Interval& a, const Interval& b);
Interval operator/(const Interval& a, const Interval& b);
Interval operator-(const Interval& a);
inline Interval& operator+=(Interval& a, const Interval& b) { return a = a + b; }
inline Interval& operator-=(Interval& a, const Interval& b) { return a = a - b; }
inline Interval& operator*=(Interval& a, const Interval& b) { return a = a * b; }
inline Interval& operator/=(Interval& a, const Interval& b) { return a = a / b; }

Interval add(const Interval& a, const Interval& b);
Interval sub(const Interval& a, const Interval& b);
Interval mul(const Interval& a, const Interval& b);
Interval div(const Interval& a, const Interval& b);

Interval sqr(const Interval& a);
Interval sqrt(const Interval& a);
Interval log(const Interval& a);
Interval ln(const Interval& a);
Interval exp(const Interval& a);
Interval cos(const Interval& a);
Interval sin(const Interval& a);
Interval abs(const Interval& a);
Interval hull(const Interval& a, const Interval& b);
Interval intersect(const Interval& a, const Interval& b);  // DomainError when disjoint
Interval pi_interval();

// real-valued views used by templated code shared with double
inline double inf(const Interval& a) { return a.lo; }
inline double sup(const Interval& a) { return a.hi; }
inline double mid(const Interval& a) { return a.mid(); }
inline double inf(double a) { return a; }
inline double sup(double a) { return a; }
inline double mid(double a) { return a; }

std::string to_hex(double x);
double from_hex(const std::string& s);

// Rectangular complex enclosure.
struct CInterval {
    Interval re;
    Interval im;

    constexpr CInterval() = default;
    constexpr CInterval(double r) : re(r), im(0.0) {}
    CInterval(const Interval& r) : re(r), im(0.0) {}
    CInterval(const Interval& r, const Interval& i) : re(r), im(i) {}
    CInterval(const std::complex<double>& z) : re(z.real()), im(z.imag()) {}

    std::complex<double> mid() const { return {re.mid(), im.mid()}; }
    double mag() const;  // upper bound on |z|
    double mig() const;  // lower bound on |z|
    bool contains_zero() const { return re.contains_zero() && im.contains_zero(); }
    bool contains(const std::complex<double>& z) const { return re.contains(z.real()) && im.contains(z.imag()); }
};

CInterval operator+(const CInterval& a, const CInterval& b);
CInterval operator-(const CInterval& a, const CInterval& b);
CInterval operator*(const CInterval& a, const CInterval& b);
CInterval operator/(const CInterval& a, const CInterval& b);
CInterval operator-(const CInterval& a);
inline CInterval& operator+=(CInterval& a, const CInterval& b) { return a = a + b; }
inline CInterval& operator-=(CInterval& a, const CInterval& b) { return a = a - b; }
inline CInterval& operator*=(CInterval& a, const CInterval& b) { return a = a * b; }
CInterval conj(const CInterval& a);
CInterval hull(const CInterval& a, const CInterval& b);
CInterval expi(const Interval& theta);  // e^{i theta}

}  // namespace vortex
