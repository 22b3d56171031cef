#pragma once

#include "nrd/cmatrix.hpp"

#include <array>
#include <string>

namespace nrd {

// Matrix classes covered by the dilation pipeline. Everything else (normal
// matrices of dimension 4 and up, 3x3 non-normal without a reducing
// eigenvalue) is Unsupported.
enum class CaseKind {
    Scalar,
    Normal2,
    Normal3Collinear,
    Normal3Generic,
    NonNormal2,
    NonNormal2PlusReducing,
    Unsupported,
};

std::string to_string(CaseKind kind);

struct CaseTag {
    CaseKind kind = CaseKind::Unsupported;
    // Normal3Collinear: middle eigenvalue position in [0,1] on the segment.
    // NonNormal2PlusReducing: modulus of the reducing eigenvalue after the
    // elliptical normalization of the 2x2 block; > 1 means it lies outside
    // the block's numerical range (the cone-shaped canonical form exists),
    // <= 1 means W(A) equals the block's range and dilation goes through
    // the embedding route instead of reduce().
    double r = 0.0;
    // Reducing eigenvalue in original coordinates (NonNormal2PlusReducing).
    cplx mu{0.0, 0.0};
};

/// Invertible change of picture X -> f(U* X U): unitary conjugation followed
/// by a real-affine recombination of the Cartesian pair (X1, X2) of the
/// result, f(X) = (R11 X1 + R12 X2 + t1 I) + i (R21 X1 + R22 X2 + t2 I).
/// Both pieces preserve dilations: compressions commute with f (for
/// isometries, since f is unital-affine) and the unitary lifts as I (x) U,
/// which is what pullback_isometry exploits.
struct Chart {
    std::array<std::array<double, 2>, 2> R{{{1.0, 0.0}, {0.0, 1.0}}};
    std::array<double, 2> t{0.0, 0.0};
    CMatrix U;

    static Chart identity(std::size_t n);

    /// Full action f(U* x U); x must live on U's space.
    CMatrix apply(const CMatrix& x) const;
    /// Affine part only; x may have any (square) dimension. This is how the
    /// dilation target B follows A's reduction.
    CMatrix apply_affine(const CMatrix& x) const;
    /// f on scalars (points of the plane).
    cplx apply_point(cplx z) const;

    Chart inverse() const;
    double det_r() const;
};

/// outer after inner: (compose(o, i))(X) = o(i(X)).
Chart compose(const Chart& outer, const Chart& inner);

/// Decides the case of A. Scalar multiples of I are Scalar at any dimension;
/// dimensions above 3 are Unsupported; normality, collinearity of normal 3x3
/// spectra, and the existence of a reducing eigenvalue for non-normal 3x3
/// are decided with the given tolerance. Never throws for valid input:
/// Unsupported is a value.
CaseTag classify(const CMatrix& a, double tol = 1e-9);

/// Canonical form reached from A, and the chart that realizes it:
/// chart.apply(A) = canonical within 1e-10. Canonical targets:
///   Normal2                -> diag(1, 0)
///   Normal3Collinear       -> diag(1, r, 0), r in [0, 1]
///   Normal3Generic         -> diag(1, i, 0)
///   NonNormal2             -> [[i, 1], [1, -i]] (numerical range = unit disk)
///   NonNormal2PlusReducing -> (r I_2 + [[i,1],[1,-i]]) direct-sum [0], r > 1
struct Reduction {
    CMatrix canonical;
    Chart chart;
};

/// Requires a tag from classify with kind not Scalar/Unsupported; the
/// reducing case additionally requires tag.r > 1 (otherwise the caller must
/// compress to the 2x2 block first, see reducing_split). The disk
/// post-condition (support of the reduced non-normal block identically 1 on
/// a 720-point grid within 1e-8) is enforced here, not assumed.
Reduction reduce(const CMatrix& a, const CaseTag& tag);

/// Decomposition A = A0 (+) [mu] exposed for the embedding route: q is
/// unitary with the joint eigenvector of A and A* as its last column, a0 the
/// leading 2x2 block of q* A q. Throws UnsupportedCase when no reducing
/// eigenvalue exists within the tolerance.
struct ReducingSplit {
    CMatrix q;
    CMatrix a0;
    cplx mu;
};

ReducingSplit reducing_split(const CMatrix& a, double tol = 1e-9);

/// Lifts an isometry of the reduced picture, V*(I (x) chart(A))V = B-tilde,
/// back to the original one: returns W = (I (x) U) V and verifies
/// W*W = I within 1e-8 and W*(I (x) A)W = B within 1e-6*(1+|B|_F),
/// throwing NumericalFailure otherwise. The affine part needs no lifting:
/// it commutes with compressions by isometries.
CMatrix pullback_isometry(const CMatrix& v, const Chart& chart, const CMatrix& a,
                          const CMatrix& b);

/// The canonical disk matrix [[i, 1], [1, -i]]: nilpotent of norm 2, whose
/// numerical range is the closed unit disk.
CMatrix canonical_disk_matrix();

} // namespace nrd
