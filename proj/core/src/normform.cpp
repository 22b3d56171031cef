#include "nrd/normform.hpp"

#include "nrd/errors.hpp"
#include "nrd/numrange.hpp"
#include "nrd/spectral.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <complex>
#include <limits>
#include <numbers>
#include <optional>
#include <stdexcept>
#include <utility>
#include <vector>

namespace nrd {

namespace {

using Mat2 = std::array<std::array<double, 2>, 2>;
using Vec2 = std::array<double, 2>;

Mat2 mul2(const Mat2& a, const Mat2& b) {
    Mat2 c{};
    for (int i = 0; i < 2; ++i)
        for (int j = 0; j < 2; ++j)
            c[i][j] = a[i][0] * b[0][j] + a[i][1] * b[1][j];
    return c;
}

Vec2 mul2v(const Mat2& a, const Vec2& v) {
    return {a[0][0] * v[0] + a[0][1] * v[1], a[1][0] * v[0] + a[1][1] * v[1]};
}

/// Multiplication by a complex scalar as a real 2x2 acting on (Re, Im).
Mat2 cmul_matrix(cplx c) {
    return {{{c.real(), -c.imag()}, {c.imag(), c.real()}}};
}

double det2r(const Mat2& r) { return r[0][0] * r[1][1] - r[0][1] * r[1][0]; }

double norm2r(const Mat2& r) {
    return r[0][0] * r[0][0] + r[0][1] * r[0][1] + r[1][0] * r[1][0] + r[1][1] * r[1][1];
}

bool lex_less(cplx x, cplx y) {
    if (x.real() != y.real())
        return x.real() < y.real();
    return x.imag() < y.imag();
}

cplx det2(const CMatrix& m) { return m(0, 0) * m(1, 1) - m(0, 1) * m(1, 0); }

cplx det3(const CMatrix& m) {
    return m(0, 0) * (m(1, 1) * m(2, 2) - m(1, 2) * m(2, 1)) -
           m(0, 1) * (m(1, 0) * m(2, 2) - m(1, 2) * m(2, 0)) +
           m(0, 2) * (m(1, 0) * m(2, 1) - m(1, 1) * m(2, 0));
}

/// Roots of z^3 + a z^2 + b z + c, Cardano followed by two Newton steps.
std::array<cplx, 3> cubic_roots(cplx a, cplx b, cplx c) {
    const cplx p = b - a * a / 3.0;
    const cplx q = (2.0 / 27.0) * a * a * a - a * b / 3.0 + c;
    std::array<cplx, 3> roots{};
    const cplx s = std::sqrt(q * q / 4.0 + p * p * p / 27.0);
    cplx u3 = -q / 2.0 + s;
    const cplx u3alt = -q / 2.0 - s;
    if (std::abs(u3alt) > std::abs(u3))
        u3 = u3alt;
    if (std::abs(u3) == 0.0) {
        roots.fill(-a / 3.0);
        return roots;
    }
    const cplx u = std::pow(u3, 1.0 / 3.0);
    const cplx omega(-0.5, 0.5 * std::sqrt(3.0));
    cplx w(1.0, 0.0);
    for (auto& z : roots) {
        const cplx uk = u * w;
        z = uk - p / (3.0 * uk) - a / 3.0;
        w *= omega;
    }
    for (auto& z : roots) {
        for (int it = 0; it < 2; ++it) {
            const cplx f = ((z + a) * z + b) * z + c;
            const cplx fp = (3.0 * z + 2.0 * a) * z + b;
            if (std::abs(fp) < 1e-300)
                break;
            z -= f / fp;
        }
    }
    return roots;
}

std::array<cplx, 3> eig3_values(const CMatrix& m) {
    const cplx tr = m.trace();
    const cplx tr2 = (m * m).trace();
    return cubic_roots(-tr, (tr * tr - tr2) / 2.0, -det3(m));
}

/// Eigensystem of a (numerically) normal matrix. All real rotations
/// cos(psi) H + sin(psi) G share A's eigenvectors, so we diagonalize the
/// rotation with the best eigenvalue separation; collisions coming from
/// genuinely repeated eigenvalues of A are harmless because any basis of
/// such an eigenspace works.
struct NormalEigen {
    std::vector<cplx> values;
    CMatrix vectors;
};

NormalEigen normal_eigensystem(const CMatrix& a, double tol) {
    const auto cp = cartesian(a);
    const std::size_t n = a.rows();
    double best_gap = -1.0;
    HermEig best;
    for (int k = 0; k < 6; ++k) {
        const double psi = k * (std::numbers::pi / 6.0);
        HermEig eig = herm_eig(std::cos(psi) * cp.H + std::sin(psi) * cp.G);
        double gap = std::numeric_limits<double>::infinity();
        for (std::size_t i = 0; i + 1 < n; ++i)
            gap = std::min(gap, eig.values[i] - eig.values[i + 1]);
        if (gap > best_gap) {
            best_gap = gap;
            best = std::move(eig);
        }
    }
    const CMatrix d = best.vectors.adjoint() * a * best.vectors;
    NormalEigen out;
    out.vectors = best.vectors;
    out.values.resize(n);
    double off2 = 0.0;
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j) {
            if (i == j)
                out.values[i] = d(i, i);
            else
                off2 += std::norm(d(i, j));
        }
    const double off = std::sqrt(off2);
    if (off > 10.0 * tol * (1.0 + a.frobenius_norm()))
        throw NumericalFailure("normal-eigensystem",
                               "no joint eigenbasis found; matrix is not normal enough", off);
    return out;
}

/// Affine data of the elliptical numerical range of a 2x2 matrix: center
/// alpha0, rotation phi that puts the foci on the real axis, semi-axes
/// a_e >= b_e > 0. The minor axis is the non-normality mass
/// sqrt(|A - alpha0 I|_F^2 - 2 alpha^2) with alpha the focal half-distance.
struct EllipseFrame {
    cplx alpha0;
    double phi = 0.0;
    double a_e = 0.0;
    double b_e = 0.0;
};

EllipseFrame ellipse_frame(const CMatrix& a2) {
    EllipseFrame f;
    f.alpha0 = a2.trace() / 2.0;
    const CMatrix ac = a2 - f.alpha0 * CMatrix::identity(2);
    const cplx lambda = std::sqrt(-det2(ac));
    const double alpha = std::abs(lambda);
    f.phi = alpha > 0.0 ? -std::arg(lambda) : 0.0;
    const double fro = ac.frobenius_norm();
    const double b = std::sqrt(std::max(fro * fro - 2.0 * alpha * alpha, 0.0));
    f.a_e = std::sqrt(alpha * alpha + 0.25 * b * b);
    f.b_e = 0.5 * b;
    if (f.b_e <= 1e-12 * (1.0 + a2.frobenius_norm()))
        throw DegenerateGeometry("elliptical disk has a collapsed minor axis");
    return f;
}

cplx ellipse_point(const EllipseFrame& f, cplx z) {
    const cplx w = std::polar(1.0, f.phi) * (z - f.alpha0);
    return {w.real() / f.a_e, w.imag() / f.b_e};
}

/// Affine-only chart of the frame: rotate by phi, scale the axes to 1, no
/// unitary yet.
Chart ellipse_affine(const EllipseFrame& f, std::size_t n) {
    Chart c = Chart::identity(n);
    const double cs = std::cos(f.phi), sn = std::sin(f.phi);
    c.R = {{{cs / f.a_e, -sn / f.a_e}, {sn / f.b_e, cs / f.b_e}}};
    c.t = {-(c.R[0][0] * f.alpha0.real() + c.R[0][1] * f.alpha0.imag()),
           -(c.R[1][0] * f.alpha0.real() + c.R[1][1] * f.alpha0.imag())};
    return c;
}

/// For a 2x2 nilpotent of norm 2, N = 2 u w* with orthonormal u, w; returns
/// the unitary matching that frame to the canonical disk matrix, i.e.
/// U* N U = [[i,1],[1,-i]]. The right singular vector w comes from N*N, so
/// the result inherits herm_eig's deterministic phase convention.
CMatrix frame_match_unitary(const CMatrix& nmat) {
    const HermEig g = herm_eig(nmat.adjoint() * nmat);
    const CMatrix w = g.vectors.block(0, 0, 2, 1);
    const CMatrix nw = nmat * w;
    const double len = nw.frobenius_norm();
    if (len <= 1e-8)
        throw NumericalFailure("reduce", "nilpotent frame collapsed", len);
    const CMatrix u = (1.0 / len) * nw;
    CMatrix uw(2, 2);
    uw.set_block(0, 0, u);
    uw.set_block(0, 1, w);
    const double s = 1.0 / std::sqrt(2.0);
    // canonical frame: the disk matrix is 2 uc wc* with uc = (i,1)/sqrt(2),
    // wc = (1,i)/sqrt(2)
    const CMatrix fc(2, 2, {cplx(0.0, s), cplx(s, 0.0), cplx(s, 0.0), cplx(0.0, s)});
    return uw * fc.adjoint();
}

struct ReducingPair {
    cplx mu;
    CMatrix x; // 3x1 unit vector
};

/// Joint eigenvector of A and A*: for each candidate eigenvalue the Gram
/// matrix (A-mu)*(A-mu) + (A-mu)(A-mu)* has the joint eigenvectors as its
/// kernel, so its smallest eigenpair decides existence. Plain inverse
/// iteration on A - mu I would only enforce the A side.
std::optional<ReducingPair> find_reducing(const CMatrix& a, double tol) {
    const double thresh = tol * (1.0 + a.frobenius_norm());
    auto roots = eig3_values(a);
    std::sort(roots.begin(), roots.end(), lex_less);
    const CMatrix id = CMatrix::identity(3);
    std::optional<ReducingPair> best;
    double best_res = std::numeric_limits<double>::infinity();
    for (const cplx& root : roots) {
        const CMatrix am = a - root * id;
        const CMatrix gram = am.adjoint() * am + am * am.adjoint();
        const HermEig eig = herm_eig(gram);
        const CMatrix x = eig.vectors.block(0, 2, 3, 1);
        const cplx mu = (x.adjoint() * a * x)(0, 0);
        const double r1 = (a * x - mu * x).frobenius_norm();
        const double r2 = (a.adjoint() * x - std::conj(mu) * x).frobenius_norm();
        const double res = std::max(r1, r2);
        if (res <= thresh && res < best_res) {
            best = ReducingPair{mu, x};
            best_res = res;
        }
    }
    return best;
}

ReducingSplit make_split(const CMatrix& a, const ReducingPair& red) {
    // complete x to an orthonormal basis, x last; start from the two
    // standard basis vectors least aligned with x
    std::array<std::size_t, 3> idx{0, 1, 2};
    std::stable_sort(idx.begin(), idx.end(), [&](std::size_t i, std::size_t j) {
        return std::abs(red.x(i, 0)) < std::abs(red.x(j, 0));
    });
    std::vector<CMatrix> cols;
    for (std::size_t pick : {idx[0], idx[1]}) {
        CMatrix e = CMatrix::zero(3, 1);
        e(pick, 0) = 1.0;
        for (int pass = 0; pass < 2; ++pass) {
            e -= red.x * (red.x.adjoint() * e);
            for (const auto& c : cols)
                e -= c * (c.adjoint() * e);
        }
        const double len = e.frobenius_norm();
        if (len < 1e-8)
            throw NumericalFailure("reduce", "basis completion collapsed", len);
        cols.push_back((1.0 / len) * e);
    }
    CMatrix q(3, 3);
    q.set_block(0, 0, cols[0]);
    q.set_block(0, 1, cols[1]);
    q.set_block(0, 2, red.x);
    const CMatrix qaq = q.adjoint() * a * q;
    return {q, qaq.block(0, 0, 2, 2), red.mu};
}

struct CollinearArrangement {
    std::size_t hi = 0, mid = 0, lo = 0;
    double r = 0.0;
};

CollinearArrangement collinear_arrangement(const std::vector<cplx>& v) {
    std::size_t bi = 0, bj = 1;
    double bd = -1.0;
    for (std::size_t i = 0; i < 3; ++i)
        for (std::size_t j = i + 1; j < 3; ++j) {
            const double d = std::abs(v[i] - v[j]);
            if (d > bd) {
                bd = d;
                bi = i;
                bj = j;
            }
        }
    CollinearArrangement arr;
    arr.mid = 3 - bi - bj;
    arr.hi = bi;
    arr.lo = bj;
    if (lex_less(v[arr.hi], v[arr.lo]))
        std::swap(arr.hi, arr.lo);
    const cplx d = v[arr.hi] - v[arr.lo];
    const double dd = std::norm(d);
    arr.r = dd > 0.0 ? std::clamp(std::real((v[arr.mid] - v[arr.lo]) * std::conj(d)) / dd, 0.0, 1.0)
                     : 0.0;
    return arr;
}

CMatrix pick_columns(const CMatrix& m, const std::vector<std::size_t>& order) {
    CMatrix out(m.rows(), order.size());
    for (std::size_t j = 0; j < order.size(); ++j)
        for (std::size_t i = 0; i < m.rows(); ++i)
            out(i, j) = m(i, order[j]);
    return out;
}

void check_canonical(const CMatrix& a, const Chart& chart, const CMatrix& canonical) {
    const double res = (chart.apply(a) - canonical).frobenius_norm();
    if (!(res <= 1e-10 * (1.0 + canonical.frobenius_norm())))
        throw NumericalFailure("reduce", "canonical form residual beyond tolerance", res);
}

/// Disk post-condition of the non-normal reductions: support of the reduced
/// block is identically 1.
void check_unit_disk(const CMatrix& blk) {
    double worst = 0.0;
    for (int i = 0; i < 720; ++i) {
        const double theta = -std::numbers::pi + 2.0 * std::numbers::pi * i / 720.0;
        worst = std::max(worst, std::abs(support(blk, theta) - 1.0));
    }
    if (worst > 1e-8)
        throw NumericalFailure("reduce", "reduced block does not span the unit disk", worst);
}

void require_dim(const CMatrix& a, std::size_t n) {
    if (a.rows() != n)
        throw std::invalid_argument("reduce: tag does not match the matrix dimension");
}

} // namespace

std::string to_string(CaseKind kind) {
    switch (kind) {
    case CaseKind::Scalar: return "scalar";
    case CaseKind::Normal2: return "normal2";
    case CaseKind::Normal3Collinear: return "normal3_collinear";
    case CaseKind::Normal3Generic: return "normal3_generic";
    case CaseKind::NonNormal2: return "nonnormal2";
    case CaseKind::NonNormal2PlusReducing: return "nonnormal2_plus_reducing";
    case CaseKind::Unsupported: return "unsupported";
    }
    return "unsupported";
}

Chart Chart::identity(std::size_t n) {
    Chart c;
    c.U = CMatrix::identity(n);
    return c;
}

CMatrix Chart::apply(const CMatrix& x) const {
    if (x.rows() != U.rows() || x.cols() != U.cols())
        throw std::invalid_argument("Chart::apply: dimension mismatch with U");
    return apply_affine(U.adjoint() * x * U);
}

CMatrix Chart::apply_affine(const CMatrix& x) const {
    const auto cp = cartesian(x);
    const CMatrix id = CMatrix::identity(x.rows());
    const CMatrix re = R[0][0] * cp.H + R[0][1] * cp.G + t[0] * id;
    const CMatrix im = R[1][0] * cp.H + R[1][1] * cp.G + t[1] * id;
    return re + cplx(0.0, 1.0) * im;
}

cplx Chart::apply_point(cplx z) const {
    const double x = z.real(), y = z.imag();
    return {R[0][0] * x + R[0][1] * y + t[0], R[1][0] * x + R[1][1] * y + t[1]};
}

Chart Chart::inverse() const {
    const double det = det_r();
    if (std::abs(det) <= 1e-12 * norm2r(R))
        throw std::invalid_argument("Chart::inverse: affine part is singular");
    Chart inv;
    inv.R = {{{R[1][1] / det, -R[0][1] / det}, {-R[1][0] / det, R[0][0] / det}}};
    inv.t = {-(inv.R[0][0] * t[0] + inv.R[0][1] * t[1]),
             -(inv.R[1][0] * t[0] + inv.R[1][1] * t[1])};
    inv.U = U.adjoint();
    return inv;
}

double Chart::det_r() const { return det2r(R); }

Chart compose(const Chart& outer, const Chart& inner) {
    if (inner.U.rows() != outer.U.rows())
        throw std::invalid_argument("compose: chart dimensions differ");
    Chart c;
    c.R = mul2(outer.R, inner.R);
    const Vec2 shifted = mul2v(outer.R, inner.t);
    c.t = {shifted[0] + outer.t[0], shifted[1] + outer.t[1]};
    // inner conjugation happens first: X -> (U_i U_o)* X (U_i U_o)
    c.U = inner.U * outer.U;
    return c;
}

CMatrix canonical_disk_matrix() {
    return CMatrix::from_rows({{cplx(0.0, 1.0), cplx(1.0, 0.0)},
                               {cplx(1.0, 0.0), cplx(0.0, -1.0)}});
}

CaseTag classify(const CMatrix& a, double tol) {
    if (!a.is_square() || a.rows() == 0)
        throw std::invalid_argument("classify: matrix must be square and nonempty");
    if (!(tol > 0.0))
        throw std::invalid_argument("classify: tolerance must be positive");
    const std::size_t n = a.rows();
    const double scale = a.frobenius_norm();
    const cplx mean = a.trace() / static_cast<double>(n);
    if ((a - mean * CMatrix::identity(n)).frobenius_norm() <= tol * (1.0 + scale))
        return {CaseKind::Scalar};
    if (n > 3)
        return {CaseKind::Unsupported};
    const CMatrix comm = a * a.adjoint() - a.adjoint() * a;
    const bool normal = comm.frobenius_norm() <= tol * (1.0 + scale * scale);
    if (n == 2)
        return {normal ? CaseKind::Normal2 : CaseKind::NonNormal2};
    if (normal) {
        NormalEigen eg;
        try {
            eg = normal_eigensystem(a, tol);
        } catch (const NumericalFailure&) {
            return {CaseKind::Unsupported}; // normal within tol but not diagonalizable at 10x tol
        }
        const cplx d21 = eg.values[1] - eg.values[0];
        const cplx d31 = eg.values[2] - eg.values[0];
        if (std::abs(std::imag(d21 * std::conj(d31))) <= tol * scale * scale)
            return {CaseKind::Normal3Collinear, collinear_arrangement(eg.values).r};
        return {CaseKind::Normal3Generic};
    }
    const auto red = find_reducing(a, tol);
    if (!red)
        return {CaseKind::Unsupported};
    try {
        const ReducingSplit split = make_split(a, *red);
        const EllipseFrame frame = ellipse_frame(split.a0);
        return {CaseKind::NonNormal2PlusReducing, std::abs(ellipse_point(frame, split.mu)),
                split.mu};
    } catch (const NumericalFailure&) {
        return {CaseKind::Unsupported}; // block degenerate despite the non-normality test
    }
}

ReducingSplit reducing_split(const CMatrix& a, double tol) {
    if (!a.is_square() || a.rows() != 3)
        throw std::invalid_argument("reducing_split: 3x3 matrix required");
    const auto red = find_reducing(a, tol);
    if (!red)
        throw UnsupportedCase("reducing_split: no reducing eigenvalue within tolerance");
    return make_split(a, *red);
}

Reduction reduce(const CMatrix& a, const CaseTag& tag) {
    if (!a.is_square() || a.rows() == 0)
        throw std::invalid_argument("reduce: matrix must be square and nonempty");
    const double sep_tol = 1e-9 * (1.0 + a.frobenius_norm());

    switch (tag.kind) {
    case CaseKind::Scalar:
    case CaseKind::Unsupported:
        throw std::invalid_argument("reduce: no canonical form for tag " + to_string(tag.kind));

    case CaseKind::Normal2: {
        require_dim(a, 2);
        const NormalEigen eg = normal_eigensystem(a, 1e-9);
        std::size_t hi = 0, lo = 1;
        if (lex_less(eg.values[hi], eg.values[lo]))
            std::swap(hi, lo);
        const cplx d = eg.values[hi] - eg.values[lo];
        if (std::abs(d) <= sep_tol)
            throw DegenerateGeometry("normal 2x2 eigenvalues coincide within tolerance");
        Chart chart;
        chart.U = pick_columns(eg.vectors, {hi, lo});
        const cplx c = 1.0 / d;
        chart.R = cmul_matrix(c);
        const cplx shift = -c * eg.values[lo];
        chart.t = {shift.real(), shift.imag()};
        const CMatrix canonical = CMatrix::diag({1.0, 0.0});
        check_canonical(a, chart, canonical);
        return {canonical, chart};
    }

    case CaseKind::Normal3Collinear: {
        require_dim(a, 3);
        const NormalEigen eg = normal_eigensystem(a, 1e-9);
        const CollinearArrangement arr = collinear_arrangement(eg.values);
        const cplx d = eg.values[arr.hi] - eg.values[arr.lo];
        if (std::abs(d) <= sep_tol)
            throw DegenerateGeometry("collinear spectrum has coincident endpoints");
        Chart chart;
        chart.U = pick_columns(eg.vectors, {arr.hi, arr.mid, arr.lo});
        const cplx c = 1.0 / d;
        chart.R = cmul_matrix(c);
        const cplx shift = -c * eg.values[arr.lo];
        chart.t = {shift.real(), shift.imag()};
        const CMatrix canonical = CMatrix::diag({1.0, arr.r, 0.0});
        check_canonical(a, chart, canonical);
        return {canonical, chart};
    }

    case CaseKind::Normal3Generic: {
        require_dim(a, 3);
        const NormalEigen eg = normal_eigensystem(a, 1e-9);
        std::size_t ia = 0;
        for (std::size_t i = 1; i < 3; ++i)
            if (lex_less(eg.values[ia], eg.values[i]))
                ia = i;
        std::size_t ib = (ia + 1) % 3, ic = (ia + 2) % 3;
        const cplx va = eg.values[ia];
        // match the orientation of the target triangle (1, i, 0)
        if (std::imag(std::conj(eg.values[ib] - va) * (eg.values[ic] - va)) < 0.0)
            std::swap(ib, ic);
        const cplx vb = eg.values[ib], vc = eg.values[ic];
        const Mat2 p{{{(va - vc).real(), (vb - vc).real()},
                      {(va - vc).imag(), (vb - vc).imag()}}};
        const double det = det2r(p);
        if (std::abs(det) <= 1e-12 * norm2r(p))
            throw DegenerateGeometry("spectrum triangle is degenerate");
        Chart chart;
        chart.U = pick_columns(eg.vectors, {ia, ib, ic});
        chart.R = {{{p[1][1] / det, -p[0][1] / det}, {-p[1][0] / det, p[0][0] / det}}};
        chart.t = {-(chart.R[0][0] * vc.real() + chart.R[0][1] * vc.imag()),
                   -(chart.R[1][0] * vc.real() + chart.R[1][1] * vc.imag())};
        const CMatrix canonical = CMatrix::diag({1.0, cplx(0.0, 1.0), 0.0});
        check_canonical(a, chart, canonical);
        return {canonical, chart};
    }

    case CaseKind::NonNormal2: {
        require_dim(a, 2);
        const EllipseFrame frame = ellipse_frame(a);
        Chart chart = ellipse_affine(frame, 2);
        chart.U = frame_match_unitary(chart.apply_affine(a));
        const CMatrix canonical = canonical_disk_matrix();
        check_canonical(a, chart, canonical);
        check_unit_disk(chart.apply(a));
        return {canonical, chart};
    }

    case CaseKind::NonNormal2PlusReducing: {
        require_dim(a, 3);
        if (!(tag.r > 1.0))
            throw std::invalid_argument(
                "reduce: reducing eigenvalue lies inside the block's range; "
                "compress to the 2x2 block instead of reducing");
        const ReducingSplit split = reducing_split(a, 1e-9);
        const EllipseFrame frame = ellipse_frame(split.a0);
        const Chart f0 = ellipse_affine(frame, 2);
        const cplx muhat = ellipse_point(frame, split.mu);
        const double r = std::abs(muhat);
        if (!(r > 1.0))
            throw std::invalid_argument(
                "reduce: tag claims an exterior eigenvalue but it normalizes inside the disk");
        // after the block is the unit disk with the eigenvalue at muhat,
        // rotate/scale by c2 and shift so the disk sits at radius r and the
        // eigenvalue at the origin
        const cplx c2 = -r / muhat;
        const CMatrix u0 = frame_match_unitary(f0.apply_affine(split.a0));
        const CMatrix cmat = canonical_disk_matrix();
        const CMatrix v2 = frame_match_unitary(c2 * cmat);
        Chart chart;
        chart.R = mul2(cmul_matrix(c2), f0.R);
        const Vec2 shifted = mul2v(cmul_matrix(c2), f0.t);
        chart.t = {shifted[0] + r, shifted[1]};
        const CMatrix one = CMatrix::identity(1);
        chart.U = split.q * direct_sum(u0, one) * direct_sum(v2, one);
        const CMatrix canonical =
            direct_sum(r * CMatrix::identity(2) + cmat, CMatrix::zero(1, 1));
        check_canonical(a, chart, canonical);
        check_unit_disk(chart.apply(a).block(0, 0, 2, 2) - r * CMatrix::identity(2));
        return {canonical, chart};
    }
    }
    throw std::invalid_argument("reduce: unknown tag");
}

CMatrix pullback_isometry(const CMatrix& v, const Chart& chart, const CMatrix& a,
                          const CMatrix& b) {
    if (!a.is_square() || !b.is_square())
        throw std::invalid_argument("pullback_isometry: A and B must be square");
    const std::size_t m = a.rows();
    if (chart.U.rows() != m || chart.U.cols() != m)
        throw std::invalid_argument("pullback_isometry: chart does not act on A's space");
    if (m == 0 || v.rows() == 0 || v.rows() % m != 0 || v.cols() != b.rows())
        throw std::invalid_argument("pullback_isometry: isometry shape mismatch");
    const std::size_t k = v.rows() / m;
    const CMatrix w = kron(CMatrix::identity(k), chart.U) * v;
    const double iso = (w.adjoint() * w - CMatrix::identity(b.rows())).frobenius_norm();
    if (iso > 1e-8)
        throw NumericalFailure("pullback", "isometry residual beyond tolerance", iso);
    const CMatrix comp = w.adjoint() * kron(CMatrix::identity(k), a) * w;
    const double res = (comp - b).frobenius_norm();
    if (res > 1e-6 * (1.0 + b.frobenius_norm()))
        throw NumericalFailure("pullback", "compression residual beyond tolerance", res);
    return w;
}

} // namespace nrd
