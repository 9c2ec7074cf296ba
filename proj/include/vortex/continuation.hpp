#pragma once

#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "vortex/interval.hpp"
#include "vortex/matrix.hpp"
#include "vortex/model.hpp"

namespace vortex {

// Unknowns (u, lambda, alpha) of the augmented map at angular velocity omega.
struct AugmentedPoint {
    Vec<double> u;
    Vec<double> lambda;
    double alpha = 0.0;
    double omega = 0.0;
};

struct NKBounds {
    double Y = 0.0;
    double Yhat = 0.0;
    double Z = 0.0;
    double rstar = 0.0;
    std::optional<double> r0;
    std::string norm_id = "sup";
};

struct BranchCertificate {
    int m = 1, n = 1, p = 0;
    Vec<double> anchor;
    AugmentedPoint x0, x1;
    NKBounds bounds;
    double r0 = 0.0;
    std::string status = "validated";  // or "numeric"
    std::string build_id;
    std::string timestamp;

    RingShape shape() const { return {m, n, p}; }
};

struct NotValidated : std::runtime_error {
    NKBounds bounds;
    NotValidated(const std::string& what, const NKBounds& b) : std::runtime_error(what), bounds(b) {}
};

struct BranchStalled : std::runtime_error {
    double omega;
    std::vector<BranchCertificate> partial;
    BranchStalled(const std::string& what, double w, std::vector<BranchCertificate> done)
        : std::runtime_error(what), omega(w), partial(std::move(done)) {}
};

int augmented_dim(const RingShape& s);
Vec<double> pack(const AugmentedPoint& x);
AugmentedPoint unpack(const RingShape& s, const Vec<double>& x, double omega);
RingSystem rings_of(const RingShape& s, const AugmentedPoint& x);
Rings<Interval> rings_of(const RingShape& s, const IVector& x);

// Point with multipliers solved and alpha = 0.
AugmentedPoint make_point(const RingSystem& r, double omega);

template <class T>
Vec<T> augmented_map_F(const RingShape& s, const Vec<T>& x, const T& omega, const Vec<double>& anchor);
template <class T>
Mat<T> jacobian_F(const RingShape& s, const Vec<T>& x, const Vec<double>& anchor);
template <class T>
Vec<T> dF_domega(const RingShape& s);

Vec<double> augmented_map_F(const RingShape& s, const AugmentedPoint& x, const Vec<double>& anchor);

struct NewtonOptions {
    double tol = 1e-13;
    int max_iter = 40;
};

AugmentedPoint newton_polish(const RingShape& s, const AugmentedPoint& x0, const Vec<double>& anchor,
                             const NewtonOptions& opt = {});

struct NKOptions {
    double rstar = 1e-4;
    double rstar_min = 1e-13;
    int pieces = 16;
};

struct PointEnclosure {
    NKBounds bounds;
    IVector enclosure;  // x-bar +- r0 in every component
};

PointEnclosure nk_validate_point(const RingShape& s, const AugmentedPoint& x, const Vec<double>& anchor,
                                 const NKOptions& opt = {});
BranchCertificate nk_validate_segment(const RingShape& s, const AugmentedPoint& x0, const AugmentedPoint& x1,
                                      const Vec<double>& anchor, const NKOptions& opt = {});

// Enclosure of the certified zero over the sub-range [s_lo, s_hi] of the segment parameter.
IVector certificate_tube(const BranchCertificate& c, double s_lo = 0.0, double s_hi = 1.0);
Interval certificate_omega(const BranchCertificate& c, double s_lo = 0.0, double s_hi = 1.0);

struct ContinuationOptions {
    double step = 1e-2;
    double min_step = 1e-6;
    bool rigor = true;
    unsigned workers = 0;  // 0 means hardware concurrency
    NKOptions nk;
    NewtonOptions newton;
};

// Walks the branch through seed over [omega_from, omega_to]. Throws BranchStalled with the
// certificates obtained before the failure.
std::vector<BranchCertificate> continue_branch(const RingSystem& seed, double omega_from, double omega_to,
                                               const ContinuationOptions& opt = {});

// interval values along a certificate
Interval certificate_mu(const BranchCertificate& c);
Interval certificate_H(const BranchCertificate& c);

}  // namespace vortex
