#pragma once

#include "nrd/cmatrix.hpp"

#include <vector>

namespace nrd {

/// Cartesian decomposition A = H + iG with H, G Hermitian.
struct CartesianPair {
    CMatrix H;
    CMatrix G;
};

CartesianPair cartesian(const CMatrix& a);

/// Eigenvalues in descending order; column j of `vectors` belongs to
/// `values[j]`. Columns are unit vectors with their largest-magnitude entry
/// rotated to the positive real axis, so repeated calls agree bitwise.
struct HermEig {
    std::size_t dim = 0;
    std::vector<double> values;
    CMatrix vectors;
};

/// Cyclic complex Jacobi diagonalization. Input must be Hermitian within
/// 1e-12*(1+|H|_F); the Hermitian part is what actually gets diagonalized.
/// Sweeps stop when the off-diagonal mass drops below 1e-14*|H|_F, with a
/// hard cap of 64 sweeps (quadratic convergence makes the cap unreachable
/// for the matrix sizes this library handles).
HermEig herm_eig(const CMatrix& h);

/// Smallest eigenvalue of the Hermitian part of m. Nonnegative iff PSD.
double psd_gap(const CMatrix& m);

/// Principal square root and pseudo-inverse square root of a PSD matrix.
struct SqrtPair {
    CMatrix sqrt;
    CMatrix pinv_sqrt;
    std::size_t rank = 0;
};

/// Eigenvalues in [-eps_psd, 0) with eps_psd = 1e-9*(1+|h|_F) are clamped to
/// zero; anything more negative throws NumericalFailure. Eigenvalues at or
/// below `cutoff` are treated as zero in both factors; cutoff < 0 selects
/// the default dim * 2^-52 * lambda_max.
SqrtPair sqrt_and_pinv_sqrt(const CMatrix& h, double cutoff = -1.0);

/// Operator-lattice min{K, I} taken spectrally: eigenvalues above 1 clamp
/// to 1, eigenvectors are kept.
CMatrix min_with_identity(const CMatrix& k);

/// Largest singular value.
double sigma_max(const CMatrix& a);

} // namespace nrd
