#pragma once

#include "nrd/cmatrix.hpp"
#include "nrd/normform.hpp"

#include <cstddef>
#include <map>
#include <string>
#include <vector>

namespace nrd {

// Certificates of complete positivity for the unital map sending the
// canonical matrix to B. Values are stored per operator-system basis label
// ("E11", "E22", "E33", "E12+E21", plus extension slots "E12", "E13", "E23");
// the Choi matrix collects them as blocks, block (s,t) = value on E_st, and
// is PSD exactly when the map extends completely positively.

struct CpCertificate {
    CaseTag tag;
    std::map<std::string, CMatrix> basis_values;
    CMatrix choi; // mn x mn for a map from m x m to n x n
    double psd_gap = 0.0;
    double unital_residual = 0.0;
};

struct KrausSet {
    std::vector<CMatrix> factors; // each n x m
    std::size_t multiplicity() const { return factors.size(); }
};

/// Certificate for a Hermitian target with spectrum in [0,1], dilating to
/// diag(1,0) (m=2) or diag(1,r,0) (m=3; the middle point gets the zero map,
/// so r only matters for the restriction identity). Throws NotIncluded when
/// the spectrum leaves [0,1] beyond tolerance, std::invalid_argument when B
/// is not Hermitian.
CpCertificate build_interval_cp(const CMatrix& b, double r, int m);

/// Certificate for a target whose range sits in the triangle conv{1, i, 0},
/// dilating to diag(1, i, 0): values {H, G, I-H-G}. Throws NotIncluded when
/// any of the three positivity gaps fails.
CpCertificate build_triangle_cp(const CMatrix& b);

/// Positivity of the Hermitian pencil cos^2(t) P11 + 2 cos(t) sin(t) P12s +
/// sin^2(t) P22 over t in [0, pi) (the homogenized form of
/// P11 + 2d P12s + d^2 P22 >= 0 for all real d), decided on a grid with one
/// refinement pass around the minimum.
struct PencilReport {
    bool ok = false;
    double worst_gap = 0.0;
    double worst_theta = 0.0;
};

PencilReport pencil_positive(const CMatrix& p11, const CMatrix& p12s, const CMatrix& p22,
                             std::size_t ngrid = 360);

/// PSD completion of [[D1, X], [X*, D2]] under the affine constraint
/// X + X* = S, by Dykstra's alternating projections (PSD cone vs. the
/// affine set; correction terms make the pair converge to the projection
/// onto the intersection). On success the block matrix's psd gap is >= -tol.
/// Throws MaxIterations with the final gap when the cap is hit; callers
/// treat that as an infeasibility signal, never as proof.
struct ExtensionResult {
    CMatrix x;
    double gap = 0.0;
};

ExtensionResult dykstra_extend(const CMatrix& d1, const CMatrix& d2, const CMatrix& s,
                               std::size_t max_iter = 10000, double tol = 1e-9);

/// Certificate for a target with numerical radius at most 1, dilating to the
/// disk matrix [[i,1],[1,-i]] = i(E11 - E22) + (E12 + E21): values
/// (I+G)/2, (I-G)/2, H, with the E12 slot completed by dykstra_extend. When
/// the target touches the rim the projections can stall at their cap; a
/// barrier Newton search over the skew freedom of the slot then finishes
/// the completion.
CpCertificate build_disk_cp(const CMatrix& b);

/// Gap chain recorded by build_cone_cp; every entry is a certified lower
/// bound on the corresponding family (>= -1e-9 scaled on success).
struct ConeDiagnostics {
    double tangent_pair_gap = 0.0; // H -/+ sqrt(r^2-1) G both PSD
    double disk_arc_gap = 0.0;     // cos(t)(H - rI) + sin(t) G <= I on the arc
    double k_bound_gap = 0.0;      // (1 + r cos t) K >= cos(t) H + sin(t) G
    double p_bound_gap = 0.0;      // (1 + r cos t) P >= cos(t) H + sin(t) G
};

/// Certificate for the cone-shaped canonical case (r I + disk matrix) (+) [0]
/// with r > 1: builds the contraction sqrt(r^2-1) H^{-1/2} G H^{-1/2}, the
/// candidate K = H/(r+1) + H^{1/2} C^2 H^{1/2}/(r^2-1), P = min{K, I}, and
/// completes the Choi corner with dykstra_extend. When the clamped candidate
/// admits no completion (K and H need not commute, so the clamp can leave
/// the feasible set), a barrier Newton search over the free certificate
/// parameters recovers a feasible (P, E12) pair. The circle bound for P is
/// certified through the completed corner: compressing it by the isometry
/// column (cos s I, sin s I) produces every member of the P family, so the
/// family minimum is at least twice the corner's smallest eigenvalue.
/// Slots E13, E23 stay zero: pinching a PSD Choi matrix to
/// the {1,2} vs {3} block pattern preserves PSD, the diagonal, and the E12
/// block, so a block-diagonal completion exists whenever any does.
CpCertificate build_cone_cp(const CMatrix& b, double r, ConeDiagnostics* diag = nullptr);

/// Scalar shadow of the K bound for a rank-one slice with contraction value
/// c: (1/(r+1) + c^2/(r^2-1))
///    - [cos(t) (1/(r+1) - r c^2/(r^2-1)) + sin(t) c/sqrt(r^2-1)].
/// Nonnegative for r > 1, |c| <= 1, all t.
double scalar_cone_inequality(double r, double c, double t);

/// Eigen-factorization of the certificate's Choi matrix into Kraus factors;
/// keeps eigenvalues above dim * 2^-52 * lambda_max. The reconstruction
/// Sum_i R_i E_st R_i* equals the Choi blocks within 1e-8 and
/// Sum_i R_i R_i* = I within 1e-8, else NumericalFailure.
KrausSet choi_to_kraus(const CpCertificate& cert);

} // namespace nrd
