#pragma once

#include "nrd/cmatrix.hpp"
#include "nrd/cpbuild.hpp"
#include "nrd/normform.hpp"

#include <cstdint>
#include <optional>

namespace nrd {

/// Outcome of a dilation run: an isometry V of shape (k m) x n with
/// V*V = I and V*(I_k (x) A) V = B, plus the recomputed residuals.
struct DilationReport {
    CMatrix V;
    std::size_t k = 0;               // number of copies of A in the dilation
    double isometry_residual = 0.0;  // |V*V - I|_F
    double compression_residual = 0.0; // |V*(I(x)A)V - B|_F / (1 + |B|_F)
    CaseTag tag;

    bool ok() const { return isometry_residual <= 1e-8 && compression_residual <= 1e-6; }
};

/// Stacks the adjoints of the Kraus factors into the Stinespring isometry:
/// row block i is R_i*, so V*V = Sum R_i R_i* and V*(I (x) M)V = Sum R_i M R_i*.
/// Throws NumericalFailure when the stack misses V*V = I by more than 1e-8.
CMatrix assemble(const KrausSet& kraus);

/// Full pipeline: classify(A), inclusion gate, reduction to the canonical
/// picture, case certificate, Kraus factors, assembled isometry, pullback
/// through the chart. Scalar A skips the certificate machinery; a reducible
/// 3x3 whose split-off eigenvalue lies inside the 2x2 block's range routes
/// through the block (the range is unchanged, so B dilates against the block
/// and the block embeds trivially in A).
/// Throws UnsupportedCase, NotIncluded, or NumericalFailure.
DilationReport dilate(const CMatrix& a, const CMatrix& b);

/// dilate plus everything produced along the way, for reporting.
struct DilationTrace {
    DilationReport report;
    CpCertificate certificate; // empty basis for the scalar route
    std::optional<ConeDiagnostics> cone; // present when the cone builder ran
};

DilationTrace dilate_traced(const CMatrix& a, const CMatrix& b);

/// Recomputes both residuals for a claimed dilation isometry. Pure; throws
/// std::invalid_argument on shape mismatch, never on bad residuals (the
/// caller reads ok()).
DilationReport verify_dilation(const CMatrix& v, const CMatrix& a, const CMatrix& b);

/// B = V*(I_k (x) A) V for a seeded Haar-like isometry V (modified
/// Gram-Schmidt on an mt19937_64 complex Gaussian sample, Box-Muller from
/// the raw 53-bit stream). Bitwise deterministic for a given seed.
/// Requires k * dim(A) >= n.
CMatrix random_compression(const CMatrix& a, std::size_t n, std::size_t k,
                           std::uint64_t seed);

} // namespace nrd
