#include "nrd/dilation.hpp"

#include "nrd/errors.hpp"
#include "nrd/numrange.hpp"
#include "nrd/spectral.hpp"

#include <cmath>
#include <random>
#include <stdexcept>
#include <string>

namespace nrd {

namespace {

void fill_residuals(DilationReport& rep, const CMatrix& a, const CMatrix& b) {
    const std::size_t n = b.rows();
    rep.isometry_residual = (rep.V.adjoint() * rep.V - CMatrix::identity(n)).frobenius_norm();
    const CMatrix big = kron(CMatrix::identity(rep.k), a);
    rep.compression_residual =
        (rep.V.adjoint() * big * rep.V - b).frobenius_norm() / (1.0 + b.frobenius_norm());
}

// Identity-embedding isometry C^n -> C^(k m): V*(I_k (x) alpha I_m)V is
// alpha I_n for any isometry, so the cheapest one serves.
DilationReport dilate_scalar(const CMatrix& a, const CMatrix& b, const CaseTag& tag) {
    const std::size_t m = a.rows(), n = b.rows();
    DilationReport rep;
    rep.tag = tag;
    rep.k = (n + m - 1) / m;
    rep.V = CMatrix::zero(rep.k * m, n);
    for (std::size_t j = 0; j < n; ++j) rep.V(j, j) = 1.0;
    fill_residuals(rep, a, b);
    return rep;
}

double gauss(std::mt19937_64& rng) {
    auto unit = [&rng] { return static_cast<double>(rng() >> 11) * 0x1p-53; };
    const double u1 = std::max(unit(), 0x1p-60);
    const double u2 = unit();
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * M_PI * u2);
}

} // namespace

CMatrix assemble(const KrausSet& kraus) {
    if (kraus.factors.empty())
        throw std::invalid_argument("assemble: no Kraus factors");
    const std::size_t n = kraus.factors.front().rows();
    const std::size_t m = kraus.factors.front().cols();
    for (const CMatrix& r : kraus.factors)
        if (r.rows() != n || r.cols() != m)
            throw std::invalid_argument("assemble: Kraus factors disagree in shape");

    CMatrix v = CMatrix::zero(kraus.factors.size() * m, n);
    for (std::size_t i = 0; i < kraus.factors.size(); ++i)
        v.set_block(i * m, 0, kraus.factors[i].adjoint());
    const double res = (v.adjoint() * v - CMatrix::identity(n)).frobenius_norm();
    if (res > 1e-8)
        throw NumericalFailure("assemble", "stacked factors are not an isometry", res);
    return v;
}

DilationTrace dilate_traced(const CMatrix& a, const CMatrix& b) {
    if (!a.is_square() || !b.is_square())
        throw std::invalid_argument("dilate: inputs must be square");
    if (a.rows() == 0 || b.rows() == 0)
        throw std::invalid_argument("dilate: inputs must be nonempty");

    const CaseTag tag = classify(a);
    if (tag.kind == CaseKind::Unsupported)
        throw UnsupportedCase("dilate: " + to_string(tag.kind) +
                              ": no canonical form is covered for this matrix");

    const InclusionReport inc = includes(a, b);
    if (!inc.included)
        throw NotIncluded("dilate: range of B leaves the range of A", inc.margin);

    DilationTrace trace;
    trace.certificate.tag = tag;

    if (tag.kind == CaseKind::Scalar) {
        trace.report = dilate_scalar(a, b, tag);
        return trace;
    }

    if (tag.kind == CaseKind::NonNormal2PlusReducing && tag.r <= 1.0) {
        // The split-off eigenvalue sits inside the block's range, so the
        // range of A equals the block's and B dilates against the block; the
        // block then embeds in A by the coordinate isometry of the split.
        const ReducingSplit split = reducing_split(a);
        DilationTrace inner = dilate_traced(split.a0, b);
        CMatrix embed = CMatrix::zero(3, 2);
        embed(0, 0) = 1.0;
        embed(1, 1) = 1.0;
        trace.report = inner.report;
        trace.report.tag = tag;
        trace.report.V =
            kron(CMatrix::identity(trace.report.k), split.q * embed) * trace.report.V;
        trace.certificate = std::move(inner.certificate);
        trace.cone = inner.cone;
        fill_residuals(trace.report, a, b);
        if (trace.report.isometry_residual > 1e-8)
            throw NumericalFailure("dilate", "embedded isometry drifted",
                                   trace.report.isometry_residual);
        if (trace.report.compression_residual > 1e-6)
            throw NumericalFailure("dilate", "embedded compression drifted",
                                   trace.report.compression_residual);
        return trace;
    }

    const Reduction red = reduce(a, tag);
    const CMatrix bt = red.chart.apply_affine(b);
    switch (tag.kind) {
    case CaseKind::Normal2:
        trace.certificate = build_interval_cp(herm_part(bt), 0.0, 2);
        break;
    case CaseKind::Normal3Collinear:
        trace.certificate = build_interval_cp(herm_part(bt), tag.r, 3);
        break;
    case CaseKind::Normal3Generic:
        trace.certificate = build_triangle_cp(bt);
        break;
    case CaseKind::NonNormal2:
        trace.certificate = build_disk_cp(bt);
        break;
    case CaseKind::NonNormal2PlusReducing: {
        ConeDiagnostics dg;
        trace.certificate = build_cone_cp(bt, tag.r, &dg);
        trace.cone = dg;
        break;
    }
    default:
        throw UnsupportedCase("dilate: unreachable case tag");
    }

    const KrausSet kraus = choi_to_kraus(trace.certificate);
    const CMatrix v0 = assemble(kraus);
    trace.report.V = pullback_isometry(v0, red.chart, a, b);
    trace.report.k = kraus.multiplicity();
    trace.report.tag = tag;
    fill_residuals(trace.report, a, b);
    return trace;
}

DilationReport dilate(const CMatrix& a, const CMatrix& b) {
    return dilate_traced(a, b).report;
}

DilationReport verify_dilation(const CMatrix& v, const CMatrix& a, const CMatrix& b) {
    if (!a.is_square() || !b.is_square())
        throw std::invalid_argument("verify_dilation: A and B must be square");
    if (a.rows() == 0 || v.cols() != b.rows())
        throw std::invalid_argument("verify_dilation: V must map the space of B");
    if (v.rows() == 0 || v.rows() % a.rows() != 0)
        throw std::invalid_argument(
            "verify_dilation: V's row count must be a positive multiple of dim A");
    DilationReport rep;
    rep.V = v;
    rep.k = v.rows() / a.rows();
    rep.tag = classify(a);
    fill_residuals(rep, a, b);
    return rep;
}

CMatrix random_compression(const CMatrix& a, std::size_t n, std::size_t k,
                           std::uint64_t seed) {
    if (!a.is_square() || a.rows() == 0)
        throw std::invalid_argument("random_compression: A must be square and nonempty");
    if (n == 0 || k == 0 || k * a.rows() < n)
        throw std::invalid_argument("random_compression: need k * dim(A) >= n >= 1");

    const std::size_t km = k * a.rows();
    std::mt19937_64 rng(seed);
    CMatrix v(km, n);
    for (std::size_t i = 0; i < km; ++i)
        for (std::size_t j = 0; j < n; ++j) v(i, j) = cplx(gauss(rng), gauss(rng));

    // Modified Gram-Schmidt; Gaussian columns are almost surely independent.
    for (std::size_t j = 0; j < n; ++j) {
        for (std::size_t c = 0; c < j; ++c) {
            cplx proj = 0.0;
            for (std::size_t i = 0; i < km; ++i) proj += std::conj(v(i, c)) * v(i, j);
            for (std::size_t i = 0; i < km; ++i) v(i, j) -= proj * v(i, c);
        }
        double norm = 0.0;
        for (std::size_t i = 0; i < km; ++i) norm += std::norm(v(i, j));
        norm = std::sqrt(norm);
        if (norm < 1e-8)
            throw NumericalFailure("random_compression", "degenerate Gaussian sample", norm);
        for (std::size_t i = 0; i < km; ++i) v(i, j) = v(i, j) * (1.0 / norm);
    }
    return v.adjoint() * kron(CMatrix::identity(k), a) * v;
}

} // namespace nrd
