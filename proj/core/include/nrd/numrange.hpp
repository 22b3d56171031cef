#pragma once

#include "nrd/cmatrix.hpp"

#include <vector>

namespace nrd {

// The numerical range W(A) = {x*Ax : |x| = 1} is convex and compact, so it
// is determined by its support function h(theta) = max Re(e^{-i theta} z)
// over z in W(A), which equals the top eigenvalue of
// cos(theta) H + sin(theta) G for the Cartesian pair A = H + iG.

/// h(theta) for W(A).
double support(const CMatrix& a, double theta);

/// Uniform sample of the support function on [-pi, pi).
struct SupportProfile {
    std::vector<double> thetas;
    std::vector<double> values;
    double lipschitz = 0.0; // an upper bound on the numerical radius
};

SupportProfile support_profile(const CMatrix& a, std::size_t npoints);

/// Boundary point of W(A) in direction theta: x*Ax for the top eigenvector
/// x of cos(theta) H + sin(theta) G.
struct BoundarySample {
    double theta = 0.0;
    cplx point;
    double support = 0.0;
};

/// Counterclockwise sweep, thetas uniform and increasing in [-pi, pi).
/// Requires npoints >= 8.
std::vector<BoundarySample> boundary(const CMatrix& a, std::size_t npoints);

/// w(A) = max_theta h(theta), computed by branch-and-bound over theta
/// intervals; the returned value is within 1e-10*(1+|A|_F) of the true
/// maximum (interval bounds use the Lipschitz constant sigma_max(A)).
double numerical_radius(const CMatrix& a);

/// Certified enclosure lb <= w(A) <= ub with ub - lb <= tol, from the same
/// branch-and-bound. Cost scales like 1/sqrt(tol) when the boundary has a
/// flat arc at the radius (every disk compression does), so callers that
/// only need a Lipschitz constant or a one-sided gate should pass the
/// tolerance they actually require instead of the 1e-10 default above.
struct RadiusBounds {
    double lb = 0.0;
    double ub = 0.0;
};

RadiusBounds radius_bounds(const CMatrix& a, double tol);

/// Result of the support-function inclusion test W(B) subseteq W(A).
struct InclusionReport {
    bool included = false;
    double margin = 0.0;    // min over the sweep of h_A - h_B
    bool certified = false; // margin cleared the Lipschitz sampling bound
    double grid_step = 0.0;
    double theta_min = 0.0; // angle attaining the margin
};

/// Samples h_A - h_B on `npoints` angles plus one refinement pass around the
/// minimum. Inclusion means margin >= -eps_incl with
/// eps_incl = 1e-9*(1+|A|_F+|B|_F). When `certify` is set, the report's
/// certified flag records whether |margin| beats the Lipschitz slack
/// (w(A)+w(B))*grid_step/2, evaluated with certified upper bounds on the two
/// radii; clearing it makes the sampled verdict rigorous. Tangent cases
/// (margin near 0, e.g. B a boundary-touching compression) report
/// certified=false.
InclusionReport includes(const CMatrix& a, const CMatrix& b, std::size_t npoints = 720,
                         bool certify = true);

/// Support function of conv({0} u disk(center r, radius 1)), the numerical
/// range of the cone-shaped canonical case: max(0, r cos(theta) + 1).
/// Requires r > 1 (apex strictly outside the disk).
double cone_disk_support(double r, double theta);

} // namespace nrd
