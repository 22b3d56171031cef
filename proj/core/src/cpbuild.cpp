#include "nrd/cpbuild.hpp"

#include "nrd/errors.hpp"
#include "nrd/numrange.hpp"
#include "nrd/spectral.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace nrd {

namespace {

double eps_psd_for(const CMatrix& m) { return 1e-9 * (1.0 + m.frobenius_norm()); }

void require_square(const CMatrix& m, const char* what) {
    if (!m.is_square() || m.rows() == 0)
        throw std::invalid_argument(std::string(what) + ": matrix must be square and nonempty");
}

void require_hermitian(const CMatrix& m, const char* what) {
    require_square(m, what);
    if (!is_hermitian(m, 1e-8 * (1.0 + m.frobenius_norm())))
        throw std::invalid_argument(std::string(what) + ": matrix must be Hermitian");
}

CMatrix rebuild_clamped(const HermEig& eig, double lo, double hi) {
    const std::size_t n = eig.dim;
    CMatrix out(n, n);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j) {
            cplx v = 0.0;
            for (std::size_t k = 0; k < n; ++k)
                v += std::clamp(eig.values[k], lo, hi) * eig.vectors(i, k) *
                     std::conj(eig.vectors(j, k));
            out(i, j) = v;
        }
    return out;
}

CMatrix psd_project(const CMatrix& y) {
    const CMatrix hy = herm_part(y);
    return rebuild_clamped(herm_eig(hy), 0.0, std::numeric_limits<double>::infinity());
}

/// Computes residuals and enforces the certificate invariants. `restriction`
/// is the certificate evaluated on the expansion of the canonical matrix; it
/// must reproduce the target.
void finalize(CpCertificate& cert, const CMatrix& restriction, const CMatrix& target) {
    const std::size_t n = target.rows();
    CMatrix unital_sum = CMatrix::zero(n, n);
    for (const char* lbl : {"E11", "E22", "E33"}) {
        const auto it = cert.basis_values.find(lbl);
        if (it != cert.basis_values.end())
            unital_sum += it->second;
    }
    cert.unital_residual = (unital_sum - CMatrix::identity(n)).frobenius_norm();
    cert.psd_gap = psd_gap(cert.choi);
    if (cert.unital_residual > 1e-9)
        throw NumericalFailure("certificate", "unital residual beyond tolerance",
                               cert.unital_residual);
    if (cert.psd_gap < -eps_psd_for(cert.choi))
        throw NumericalFailure("certificate", "Choi matrix is not PSD", cert.psd_gap);
    const double res = (restriction - target).frobenius_norm();
    if (res > 1e-8 * (1.0 + target.frobenius_norm()))
        throw NumericalFailure("certificate", "restriction does not reproduce the target", res);
    // Iteratively completed corners can leave a -1e-9-scale eigenvalue on the
    // Choi matrix. Having passed the gap check, project onto the PSD cone so
    // the delivered matrix factors exactly; the perturbation is below every
    // downstream tolerance.
    if (cert.psd_gap < 0.0) {
        cert.choi = psd_project(cert.choi);
        cert.psd_gap = psd_gap(cert.choi);
    }
}

/// Certified minimum over t in [-pi, pi] of
/// lambda_min((1 + r cos t) M - cos t H - sin t G), branch-and-bound on a
/// 720-point grid. Throws when the minimum drops below -eps.
///
/// The pencil F(x, y) = M + x(rM - H) - yG is affine in (x, y), so its
/// smallest eigenvalue is jointly concave. An arc segment lies in the
/// triangle spanned by its endpoints and the corner where the two tangent
/// lines meet, and a concave function attains its minimum over a triangle at
/// a vertex, which certifies the whole segment from three point values.
double circle_min(const CMatrix& m, const CMatrix& h, const CMatrix& g, double r, double eps,
                  const char* what) {
    const CMatrix a1 = r * m - h;
    const auto eval_pt = [&](double x, double y) { return psd_gap(m + x * a1 - y * g); };
    const auto eval = [&](double t) { return eval_pt(std::cos(t), std::sin(t)); };

    constexpr int grid = 720;
    const double pi = std::numbers::pi;
    std::vector<double> fs(grid + 1);
    double worst = std::numeric_limits<double>::infinity();
    for (int i = 0; i <= grid; ++i) {
        fs[i] = eval(-pi + 2.0 * pi * i / grid);
        worst = std::min(worst, fs[i]);
    }
    if (worst < -eps)
        throw NumericalFailure(what, "eigenvalue bound fails on the circle", worst);

    struct Seg {
        double lo, hi, flo, fhi;
    };
    std::vector<Seg> stack;
    stack.reserve(2 * grid);
    for (int i = 0; i < grid; ++i)
        stack.push_back({-pi + 2.0 * pi * i / grid, -pi + 2.0 * pi * (i + 1) / grid, fs[i],
                         fs[i + 1]});
    std::size_t budget = 200000;
    while (!stack.empty()) {
        const Seg s = stack.back();
        stack.pop_back();
        const double mid = 0.5 * (s.lo + s.hi);
        const double rad = 1.0 / std::cos(0.5 * (s.hi - s.lo));
        const double corner = eval_pt(rad * std::cos(mid), rad * std::sin(mid));
        if (std::min({s.flo, s.fhi, corner}) >= -eps)
            continue;
        if (budget-- == 0)
            throw NumericalFailure(what, "refinement budget exhausted", worst);
        const double fmid = eval(mid);
        worst = std::min(worst, fmid);
        if (worst < -eps)
            throw NumericalFailure(what, "eigenvalue bound fails on the circle", worst);
        stack.push_back({s.lo, mid, s.flo, fmid});
        stack.push_back({mid, s.hi, fmid, s.fhi});
    }
    return worst;
}

struct CornerRepair {
    CMatrix p;
    CMatrix x;
};

// Real coordinate bases of the Hermitian and skew-Hermitian n x n matrices.
std::vector<CMatrix> herm_units(std::size_t n) {
    std::vector<CMatrix> units;
    units.reserve(n * n);
    for (std::size_t i = 0; i < n; ++i) {
        CMatrix e = CMatrix::zero(n, n);
        e(i, i) = 1.0;
        units.push_back(std::move(e));
    }
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = i + 1; j < n; ++j) {
            CMatrix e = CMatrix::zero(n, n);
            e(i, j) = 1.0;
            e(j, i) = 1.0;
            units.push_back(e);
            e(i, j) = cplx(0.0, 1.0);
            e(j, i) = cplx(0.0, -1.0);
            units.push_back(std::move(e));
        }
    return units;
}

std::vector<CMatrix> skew_units(std::size_t n) {
    std::vector<CMatrix> units;
    units.reserve(n * n);
    for (std::size_t i = 0; i < n; ++i) {
        CMatrix f = CMatrix::zero(n, n);
        f(i, i) = cplx(0.0, 1.0);
        units.push_back(std::move(f));
    }
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = i + 1; j < n; ++j) {
            CMatrix f = CMatrix::zero(n, n);
            f(i, j) = 1.0;
            f(j, i) = -1.0;
            units.push_back(f);
            f(i, j) = cplx(0.0, 1.0);
            f(j, i) = cplx(0.0, 1.0);
            units.push_back(std::move(f));
        }
    return units;
}

/// Maximizes the smallest eigenvalue over the affine family
/// z0 + sum theta_a dirs[a] by a primal barrier Newton iteration on the
/// slack t in Z - tI >= 0. The epigraph formulation is strictly feasible
/// from any start, which keeps Newton fast even when the best slack is
/// exactly 0 (tight inclusions force singular certificates, where plain
/// alternating projections stall). Returns theta as soon as lambda_min(Z)
/// clears -tol; throws NumericalFailure(stage, ...) on a stalled search.
std::vector<double> barrier_feasibility(const CMatrix& z0, const std::vector<CMatrix>& dirs,
                                        double tol, double scale, const char* stage) {
    const std::size_t dim = z0.rows();
    const std::size_t nd = dirs.size() + 1; // the slack shift is the last coordinate
    CMatrix slack_dir = CMatrix::zero(dim, dim);
    for (std::size_t i = 0; i < dim; ++i)
        slack_dir(i, i) = -1.0;
    const auto dir_at = [&](std::size_t a) -> const CMatrix& {
        return a + 1 < nd ? dirs[a] : slack_dir;
    };

    std::vector<double> theta(dirs.size(), 0.0);
    CMatrix zcur = z0;
    double tau = psd_gap(z0) - (1.0 + 0.1 * scale);

    const auto barrier = [&](const CMatrix& zc, double tc, double mu, double& lam_min) {
        const HermEig eig = herm_eig(zc - tc * CMatrix::identity(dim));
        lam_min = eig.values.back();
        if (!(lam_min > 0.0))
            return std::numeric_limits<double>::infinity();
        double logdet = 0.0;
        for (const double lam : eig.values)
            logdet += std::log(lam);
        return -tc / mu - logdet;
    };

    double best_gap = -std::numeric_limits<double>::infinity();
    std::vector<double> grad(nd), step(nd), hess(nd * nd);
    for (double mu = 0.25 * (1.0 + 0.1 * scale); mu > 1e-13; mu /= 10.0) {
        for (int iter = 0; iter < 25; ++iter) {
            const CMatrix s = zcur - tau * CMatrix::identity(dim);
            const HermEig eig = herm_eig(s);
            const double zgap = eig.values.back() + tau;
            best_gap = std::max(best_gap, zgap);
            if (zgap >= -tol)
                return theta;
            double phi_cur = -tau / mu;
            for (const double lam : eig.values)
                phi_cur -= std::log(lam);

            CMatrix sinv(dim, dim);
            for (std::size_t i = 0; i < dim; ++i)
                for (std::size_t j = 0; j < dim; ++j) {
                    cplx v = 0.0;
                    for (std::size_t l = 0; l < dim; ++l)
                        v += (1.0 / eig.values[l]) * eig.vectors(i, l) *
                             std::conj(eig.vectors(j, l));
                    sinv(i, j) = v;
                }
            std::vector<CMatrix> t;
            t.reserve(nd);
            for (std::size_t a = 0; a < nd; ++a)
                t.push_back(sinv * dir_at(a));
            for (std::size_t a = 0; a < nd; ++a) {
                grad[a] = -t[a].trace().real();
                for (std::size_t bb = a; bb < nd; ++bb) {
                    double v = 0.0;
                    for (std::size_t i = 0; i < dim; ++i)
                        for (std::size_t j = 0; j < dim; ++j)
                            v += (t[a](i, j) * t[bb](j, i)).real();
                    hess[a * nd + bb] = v;
                    hess[bb * nd + a] = v;
                }
            }
            grad[nd - 1] -= 1.0 / mu;

            // solve hess * step = -grad, Gaussian elimination with partial
            // pivoting and a small ridge
            std::vector<double> m = hess;
            double ridge = 0.0;
            for (std::size_t a = 0; a < nd; ++a)
                ridge += m[a * nd + a];
            ridge = 1e-12 * (1.0 + ridge / static_cast<double>(nd));
            for (std::size_t a = 0; a < nd; ++a) {
                m[a * nd + a] += ridge;
                step[a] = -grad[a];
            }
            for (std::size_t col = 0; col < nd; ++col) {
                std::size_t piv = col;
                for (std::size_t row = col + 1; row < nd; ++row)
                    if (std::abs(m[row * nd + col]) > std::abs(m[piv * nd + col]))
                        piv = row;
                if (piv != col) {
                    for (std::size_t cc = 0; cc < nd; ++cc)
                        std::swap(m[col * nd + cc], m[piv * nd + cc]);
                    std::swap(step[col], step[piv]);
                }
                const double dpiv = m[col * nd + col];
                if (dpiv == 0.0)
                    continue;
                for (std::size_t row = col + 1; row < nd; ++row) {
                    const double f = m[row * nd + col] / dpiv;
                    if (f == 0.0)
                        continue;
                    for (std::size_t cc = col; cc < nd; ++cc)
                        m[row * nd + cc] -= f * m[col * nd + cc];
                    step[row] -= f * step[col];
                }
            }
            for (std::size_t col = nd; col-- > 0;) {
                const double dpiv = m[col * nd + col];
                if (dpiv == 0.0) {
                    step[col] = 0.0;
                    continue;
                }
                for (std::size_t cc = col + 1; cc < nd; ++cc)
                    step[col] -= m[col * nd + cc] * step[cc];
                step[col] /= dpiv;
            }

            double dec2 = 0.0;
            for (std::size_t a = 0; a < nd; ++a)
                dec2 -= grad[a] * step[a];
            if (dec2 < 1e-4)
                break;

            CMatrix dz = CMatrix::zero(dim, dim);
            for (std::size_t a = 0; a + 1 < nd; ++a)
                dz += step[a] * dirs[a];
            const double dt = step[nd - 1];

            double alpha = 1.0;
            bool moved = false;
            for (int bt = 0; bt < 60; ++bt, alpha *= 0.5) {
                double lam_new;
                const double phi_new = barrier(zcur + alpha * dz, tau + alpha * dt, mu, lam_new);
                if (lam_new > 0.0 && phi_new <= phi_cur - 0.25 * alpha * dec2) {
                    zcur += alpha * dz;
                    tau += alpha * dt;
                    for (std::size_t a = 0; a + 1 < nd; ++a)
                        theta[a] += alpha * step[a];
                    moved = true;
                    break;
                }
            }
            if (!moved)
                break;
        }
    }
    throw NumericalFailure(stage, "certificate feasibility search stalled", best_gap);
}

/// The spectral clamp of K at 1 is not always a valid choice of P: clamping
/// in K's eigenbasis can break the circle bound even though a working P
/// exists whenever the inclusion holds. Every valid certificate has the form
///   Z(P, D) = [[(P+G)/2, (H-rP)/2 + D, 0], [., (P-G)/2, 0], [0, 0, I-P]]
/// with P Hermitian and D skew-Hermitian, so the repair searches that affine
/// family for a PSD point, starting from the clamp.
CornerRepair repair_corner(const CMatrix& h, const CMatrix& g, double r, const CMatrix& p0) {
    const std::size_t n = h.rows();
    const std::size_t dim = 3 * n;
    const double scale = h.frobenius_norm() + g.frobenius_norm();
    const double tol_z = 2e-10 * (1.0 + scale);

    // Hermitian P directions move all four pinned blocks; skew D directions
    // move only the corner slot.
    const std::vector<CMatrix> p_units = herm_units(n);
    const std::vector<CMatrix> d_units = skew_units(n);
    std::vector<CMatrix> dirs;
    dirs.reserve(p_units.size() + d_units.size());
    for (const CMatrix& e : p_units) {
        CMatrix d = CMatrix::zero(dim, dim);
        d.set_block(0, 0, 0.5 * e);
        d.set_block(n, n, 0.5 * e);
        d.set_block(0, n, (-0.5 * r) * e);
        d.set_block(n, 0, (-0.5 * r) * e);
        d.set_block(2 * n, 2 * n, -1.0 * e);
        dirs.push_back(std::move(d));
    }
    for (const CMatrix& f : d_units) {
        CMatrix d = CMatrix::zero(dim, dim);
        d.set_block(0, n, f);
        d.set_block(n, 0, -1.0 * f);
        dirs.push_back(std::move(d));
    }

    const CMatrix p0h = herm_part(p0);
    CMatrix z0 = CMatrix::zero(dim, dim);
    z0.set_block(0, 0, 0.5 * (p0h + g));
    z0.set_block(n, n, 0.5 * (p0h - g));
    z0.set_block(2 * n, 2 * n, CMatrix::identity(n) - p0h);
    z0.set_block(0, n, 0.5 * (h - r * p0h));
    z0.set_block(n, 0, 0.5 * (h - r * p0h));

    const std::vector<double> theta = barrier_feasibility(z0, dirs, tol_z, scale, "cone");
    CMatrix p = p0h;
    for (std::size_t a = 0; a < p_units.size(); ++a)
        p += theta[a] * p_units[a];
    p = herm_part(p);
    CMatrix delta = CMatrix::zero(n, n);
    for (std::size_t b = 0; b < d_units.size(); ++b)
        delta += theta[p_units.size() + b] * d_units[b];
    return {p, 0.5 * (h - r * p) + delta};
}

/// Corner completion with both diagonal blocks pinned: every candidate X
/// differs from S/2 by a skew-Hermitian term, so the search runs over skew
/// directions alone. Fallback for targets touching the boundary, where the
/// alternating projections become tangential and hit their cap.
CMatrix complete_corner(const CMatrix& d1, const CMatrix& d2, const CMatrix& s, double tol,
                        const char* stage) {
    const std::size_t n = d1.rows();
    const std::vector<CMatrix> units = skew_units(n);
    std::vector<CMatrix> dirs;
    dirs.reserve(units.size());
    for (const CMatrix& f : units) {
        CMatrix d = CMatrix::zero(2 * n, 2 * n);
        d.set_block(0, n, f);
        d.set_block(n, 0, -1.0 * f);
        dirs.push_back(std::move(d));
    }
    CMatrix z0 = CMatrix::zero(2 * n, 2 * n);
    z0.set_block(0, 0, d1);
    z0.set_block(n, n, d2);
    z0.set_block(0, n, 0.5 * s);
    z0.set_block(n, 0, 0.5 * s.adjoint());
    const double scale =
        d1.frobenius_norm() + d2.frobenius_norm() + s.frobenius_norm();
    const std::vector<double> theta = barrier_feasibility(z0, dirs, tol, scale, stage);
    CMatrix x = 0.5 * s;
    for (std::size_t b = 0; b < units.size(); ++b)
        x += theta[b] * units[b];
    return x;
}

} // namespace

CpCertificate build_interval_cp(const CMatrix& b, double r, int m) {
    if (m != 2 && m != 3)
        throw std::invalid_argument("build_interval_cp: m must be 2 or 3");
    if (m == 3 && !(r >= 0.0 && r <= 1.0))
        throw std::invalid_argument("build_interval_cp: r must lie in [0,1]");
    require_hermitian(b, "build_interval_cp");
    const std::size_t n = b.rows();
    const CMatrix h = herm_part(b);
    const HermEig eig = herm_eig(h);
    const double margin = std::min(eig.values.back(), 1.0 - eig.values.front());
    if (margin < -eps_psd_for(b))
        throw NotIncluded("build_interval_cp: spectrum leaves [0,1]", margin);

    const CMatrix id = CMatrix::identity(n);
    CpCertificate cert;
    cert.tag.kind = m == 2 ? CaseKind::Normal2 : CaseKind::Normal3Collinear;
    cert.tag.r = m == 2 ? 0.0 : r;
    cert.basis_values["E11"] = h;
    if (m == 2) {
        cert.basis_values["E22"] = id - h;
    } else {
        cert.basis_values["E22"] = CMatrix::zero(n, n);
        cert.basis_values["E33"] = id - h;
    }
    cert.choi = CMatrix::zero(m * n, m * n);
    cert.choi.set_block(0, 0, h);
    cert.choi.set_block((m - 1) * n, (m - 1) * n, id - h);
    // canonical diag(1,0) or diag(1,r,0) expands to E11 + r E22 (+ 0 E33),
    // and the middle point carries the zero map, so the restriction is E11's
    // value for either m
    finalize(cert, h, b);
    return cert;
}

CpCertificate build_triangle_cp(const CMatrix& b) {
    require_square(b, "build_triangle_cp");
    const CartesianPair cp = cartesian(b);
    const std::size_t n = b.rows();
    const CMatrix rest = CMatrix::identity(n) - cp.H - cp.G;
    const double margin = std::min({psd_gap(cp.H), psd_gap(cp.G), psd_gap(rest)});
    if (margin < -eps_psd_for(b))
        throw NotIncluded("build_triangle_cp: range leaves the triangle", margin);

    CpCertificate cert;
    cert.tag.kind = CaseKind::Normal3Generic;
    cert.basis_values["E11"] = cp.H;
    cert.basis_values["E22"] = cp.G;
    cert.basis_values["E33"] = rest;
    cert.choi = CMatrix::zero(3 * n, 3 * n);
    cert.choi.set_block(0, 0, cp.H);
    cert.choi.set_block(n, n, cp.G);
    cert.choi.set_block(2 * n, 2 * n, rest);
    // diag(1, i, 0) = E11 + i E22 + 0 E33
    finalize(cert, cp.H + cplx(0.0, 1.0) * cp.G, b);
    return cert;
}

PencilReport pencil_positive(const CMatrix& p11, const CMatrix& p12s, const CMatrix& p22,
                             std::size_t ngrid) {
    require_hermitian(p11, "pencil_positive");
    require_hermitian(p12s, "pencil_positive");
    require_hermitian(p22, "pencil_positive");
    if (p11.rows() != p12s.rows() || p11.rows() != p22.rows())
        throw std::invalid_argument("pencil_positive: dimension mismatch");
    if (ngrid < 4)
        throw std::invalid_argument("pencil_positive: grid too coarse");

    const double eps = 1e-9 * (1.0 + p11.frobenius_norm() + p12s.frobenius_norm() +
                               p22.frobenius_norm());
    const auto eval = [&](double theta) {
        const double c = std::cos(theta), s = std::sin(theta);
        return psd_gap((c * c) * p11 + (2.0 * c * s) * p12s + (s * s) * p22);
    };
    PencilReport rep;
    rep.worst_gap = std::numeric_limits<double>::infinity();
    const double step = std::numbers::pi / static_cast<double>(ngrid);
    for (std::size_t i = 0; i < ngrid; ++i) {
        const double theta = static_cast<double>(i) * step;
        const double v = eval(theta);
        if (v < rep.worst_gap) {
            rep.worst_gap = v;
            rep.worst_theta = theta;
        }
    }
    const double center = rep.worst_theta;
    for (int j = -64; j <= 64; ++j) {
        const double theta = center + step * j / 64.0;
        const double v = eval(theta);
        if (v < rep.worst_gap) {
            rep.worst_gap = v;
            rep.worst_theta = theta;
        }
    }
    rep.ok = rep.worst_gap >= -eps;
    return rep;
}

ExtensionResult dykstra_extend(const CMatrix& d1, const CMatrix& d2, const CMatrix& s,
                               std::size_t max_iter, double tol) {
    require_hermitian(d1, "dykstra_extend");
    require_hermitian(d2, "dykstra_extend");
    require_hermitian(s, "dykstra_extend");
    if (d1.rows() != d2.rows() || d1.rows() != s.rows())
        throw std::invalid_argument("dykstra_extend: dimension mismatch");
    if (max_iter == 0 || !(tol > 0.0))
        throw std::invalid_argument("dykstra_extend: bad iteration budget or tolerance");
    if (psd_gap(d1) < -eps_psd_for(d1) || psd_gap(d2) < -eps_psd_for(d2))
        throw std::invalid_argument("dykstra_extend: diagonal blocks must be PSD");

    const std::size_t n = d1.rows();
    const CMatrix hd1 = herm_part(d1), hd2 = herm_part(d2), hs = herm_part(s);

    const auto proj_affine = [&](const CMatrix& y) {
        CMatrix z = CMatrix::zero(2 * n, 2 * n);
        z.set_block(0, 0, hd1);
        z.set_block(n, n, hd2);
        const CMatrix off =
            0.5 * (y.block(0, n, n, n) + y.block(n, 0, n, n).adjoint());
        const CMatrix x = 0.5 * hs + 0.5 * (off - off.adjoint());
        z.set_block(0, n, x);
        z.set_block(n, 0, x.adjoint());
        return z;
    };
    CMatrix x = CMatrix::zero(2 * n, 2 * n);
    x.set_block(0, 0, hd1);
    x.set_block(n, n, hd2);
    x.set_block(0, n, 0.5 * hs);
    x.set_block(n, 0, 0.5 * hs);
    double gap = psd_gap(x);
    if (gap >= -tol)
        return {x.block(0, n, n, n), gap};

    CMatrix p = CMatrix::zero(2 * n, 2 * n);
    CMatrix q = CMatrix::zero(2 * n, 2 * n);
    for (std::size_t it = 0; it < max_iter; ++it) {
        const CMatrix y = psd_project(x + p);
        p = x + p - y;
        const CMatrix z = proj_affine(y + q);
        q = y + q - z;
        x = z;
        gap = psd_gap(x);
        if (gap >= -tol)
            return {x.block(0, n, n, n), gap};
    }
    throw MaxIterations("dykstra", gap);
}

CpCertificate build_disk_cp(const CMatrix& b) {
    require_square(b, "build_disk_cp");
    // the canonical disk matrix has Frobenius norm 2, hence the 3
    const double eps_incl = 1e-9 * (3.0 + b.frobenius_norm());
    // Coarse radius enclosure as the gate: full-precision w(B) costs ~1e5
    // eigensolves exactly on the targets this builder sees most (disk
    // compressions have a flat support arc at 1). Clear outsiders are
    // rejected from the lower bound; the borderline band is decided by the
    // completion itself, whose finalized certificate proves W(B) lies in
    // the unit disk.
    const RadiusBounds wb = radius_bounds(b, 1e-3 * (1.0 + b.frobenius_norm()));
    if (1.0 - wb.lb < -eps_incl)
        throw NotIncluded("build_disk_cp: numerical radius exceeds 1", 1.0 - wb.lb);

    const CartesianPair cp = cartesian(b);
    const std::size_t n = b.rows();
    const CMatrix id = CMatrix::identity(n);
    const CMatrix e11 = 0.5 * (id + cp.G);
    const CMatrix e22 = 0.5 * (id - cp.G);
    CMatrix x;
    try {
        // Tight budget: a run that has not converged by then (rim and
        // near-rim targets make the intersection tangential, where the
        // projections slow to a crawl) is cheaper to hand to the barrier
        // search than to let finish.
        x = dykstra_extend(e11, e22, cp.H, 600).x;
    } catch (const MaxIterations&) {
        try {
            x = complete_corner(e11, e22, cp.H, 1e-9, "disk-extension");
        } catch (const NumericalFailure&) {
            // Only now is the expensive exact radius worth it: it separates
            // a genuinely excluded target from a completion breakdown.
            const double margin = 1.0 - numerical_radius(b);
            if (margin < -eps_incl)
                throw NotIncluded("build_disk_cp: numerical radius exceeds 1", margin);
            throw;
        }
    }

    CpCertificate cert;
    cert.tag.kind = CaseKind::NonNormal2;
    cert.basis_values["E11"] = e11;
    cert.basis_values["E22"] = e22;
    cert.basis_values["E12+E21"] = cp.H;
    cert.basis_values["E12"] = x;
    cert.choi = CMatrix::zero(2 * n, 2 * n);
    cert.choi.set_block(0, 0, e11);
    cert.choi.set_block(n, n, e22);
    cert.choi.set_block(0, n, x);
    cert.choi.set_block(n, 0, x.adjoint());
    // disk matrix = i(E11 - E22) + (E12 + E21)
    finalize(cert, cplx(0.0, 1.0) * (e11 - e22) + cp.H, b);
    return cert;
}

CpCertificate build_cone_cp(const CMatrix& b, double r, ConeDiagnostics* diag) {
    if (!(r > 1.0))
        throw std::invalid_argument("build_cone_cp: r must exceed 1");
    require_square(b, "build_cone_cp");
    const CartesianPair cp = cartesian(b);
    const CMatrix& h = cp.H;
    const CMatrix& g = cp.G;
    const std::size_t n = b.rows();
    const CMatrix id = CMatrix::identity(n);
    const double eps = eps_psd_for(b);
    const double sq = std::sqrt(r * r - 1.0);

    ConeDiagnostics local;
    ConeDiagnostics& dg = diag ? *diag : local;

    // the two tangent lines through the apex: +/- sqrt(r^2-1) G <= H
    dg.tangent_pair_gap = std::min(psd_gap(h - sq * g), psd_gap(h + sq * g));
    if (dg.tangent_pair_gap < -eps)
        throw NotIncluded("build_cone_cp: tangent-line inequality fails", dg.tangent_pair_gap);

    // the disk arc: cos t (H - rI) + sin t G <= I for |t| <= t0, cos t0 = -1/r
    const double t0 = std::acos(-1.0 / r);
    dg.disk_arc_gap = std::numeric_limits<double>::infinity();
    for (int i = 0; i < 100; ++i) {
        const double t = -t0 + 2.0 * t0 * i / 99.0;
        dg.disk_arc_gap = std::min(
            dg.disk_arc_gap, psd_gap(id - std::cos(t) * (h - r * id) - std::sin(t) * g));
    }
    if (dg.disk_arc_gap < -eps)
        throw NotIncluded("build_cone_cp: disk-arc inequality fails", dg.disk_arc_gap);

    // contraction C with G = H^{1/2} C H^{1/2} / sqrt(r^2-1); pseudo-inverse
    // roots keep C inside range(H)
    const SqrtPair sp = sqrt_and_pinv_sqrt(h);
    CMatrix contr = herm_part(sq * (sp.pinv_sqrt * g * sp.pinv_sqrt));
    const HermEig ce = herm_eig(contr);
    double overshoot = 0.0;
    for (const double lam : ce.values)
        overshoot = std::max(overshoot, std::abs(lam) - 1.0);
    if (overshoot > 1e-8)
        throw ContractionOvershoot(overshoot);
    contr = rebuild_clamped(ce, -1.0, 1.0);
    const double leak = (g - (1.0 / sq) * (sp.sqrt * contr * sp.sqrt)).frobenius_norm();
    if (leak > 1e-8 * (1.0 + g.frobenius_norm()))
        throw NumericalFailure("contraction", "skew part leaks outside range(H)", leak);

    const CMatrix k =
        (1.0 / (r + 1.0)) * h + (1.0 / (r * r - 1.0)) * (sp.sqrt * (contr * contr) * sp.sqrt);
    const double kgap = psd_gap(k);
    if (kgap < -eps)
        throw NumericalFailure("cone", "candidate K lost positivity", kgap);
    dg.k_bound_gap = circle_min(k, h, g, r, eps, "cone");

    // First candidate: the spectral clamp of K. The quick pencil scan filters
    // genuine violations before attempting the corner completion; either
    // failure falls back to the certificate feasibility search.
    CMatrix p = min_with_identity(k);
    CMatrix x;
    bool have_x = false;
    if (pencil_positive(p + g, h - r * p, p - g).ok) {
        try {
            x = dykstra_extend(0.5 * (p + g), 0.5 * (p - g), h - r * p, 600, 0.4 * eps).x;
            have_x = true;
        } catch (const MaxIterations&) {
        }
    }
    if (!have_x) {
        const CornerRepair fix = repair_corner(h, g, r, p);
        p = fix.p;
        x = fix.x;
        const PencilReport pr = pencil_positive(p + g, h - r * p, p - g);
        if (!pr.ok)
            throw NumericalFailure("cone", "corner pencil lost positivity", pr.worst_gap);
    }

    // With the corner completed, the circle bound for P is certified by one
    // eigensolve: (cos s I, sin s I) is an isometry column map, so
    //   lambda_min((1 + r cos t)P - cos t H - sin t G) >= 2 lambda_min(corner)
    // for every t, the compression running over all t as s sweeps a period.
    const CMatrix s12 = h - r * p;
    CMatrix corner = CMatrix::zero(2 * n, 2 * n);
    corner.set_block(0, 0, 0.5 * (p + g));
    corner.set_block(n, n, 0.5 * (p - g));
    corner.set_block(0, n, x);
    corner.set_block(n, 0, x.adjoint());
    const double corner_gap = psd_gap(corner);
    if (corner_gap < -0.5 * eps)
        throw NumericalFailure("cone", "Choi corner completion is not PSD", corner_gap);
    dg.p_bound_gap = 2.0 * corner_gap;

    CpCertificate cert;
    cert.tag.kind = CaseKind::NonNormal2PlusReducing;
    cert.tag.r = r;
    cert.basis_values["E11"] = 0.5 * (p + g);
    cert.basis_values["E22"] = 0.5 * (p - g);
    cert.basis_values["E33"] = id - p;
    cert.basis_values["E12+E21"] = s12;
    cert.basis_values["E12"] = x;
    cert.basis_values["E13"] = CMatrix::zero(n, n);
    cert.basis_values["E23"] = CMatrix::zero(n, n);
    cert.choi = CMatrix::zero(3 * n, 3 * n);
    cert.choi.set_block(0, 0, cert.basis_values["E11"]);
    cert.choi.set_block(n, n, cert.basis_values["E22"]);
    cert.choi.set_block(0, n, x);
    cert.choi.set_block(n, 0, x.adjoint());
    cert.choi.set_block(2 * n, 2 * n, cert.basis_values["E33"]);
    // canonical (r I + disk matrix) (+) [0] = r(E11+E22) + i(E11-E22) + (E12+E21)
    finalize(cert, r * p + cplx(0.0, 1.0) * g + s12, b);
    return cert;
}

double scalar_cone_inequality(double r, double c, double t) {
    if (!(r > 1.0))
        throw std::invalid_argument("scalar_cone_inequality: r must exceed 1");
    const double lhs = 1.0 / (r + 1.0) + c * c / (r * r - 1.0);
    const double rhs = std::cos(t) * (1.0 / (r + 1.0) - r * c * c / (r * r - 1.0)) +
                       std::sin(t) * c / std::sqrt(r * r - 1.0);
    return lhs - rhs;
}

KrausSet choi_to_kraus(const CpCertificate& cert) {
    const auto it = cert.basis_values.find("E11");
    if (it == cert.basis_values.end())
        throw std::invalid_argument("choi_to_kraus: certificate lacks the E11 value");
    const std::size_t n = it->second.rows();
    const std::size_t mn = cert.choi.rows();
    if (n == 0 || mn == 0 || !cert.choi.is_square() || mn % n != 0)
        throw std::invalid_argument("choi_to_kraus: Choi dimensions are inconsistent");
    const std::size_t m = mn / n;

    const HermEig eig = herm_eig(cert.choi);
    const double lam_max = std::max(eig.values.front(), 0.0);
    const double cutoff = static_cast<double>(mn) * 0x1p-52 * lam_max;
    KrausSet ks;
    for (std::size_t i = 0; i < mn; ++i) {
        const double lam = eig.values[i];
        if (lam <= cutoff)
            continue;
        const double w = std::sqrt(lam);
        CMatrix f(n, m);
        for (std::size_t s = 0; s < m; ++s)
            for (std::size_t j = 0; j < n; ++j)
                f(j, s) = w * eig.vectors(s * n + j, i);
        ks.factors.push_back(std::move(f));
    }

    CMatrix rec = CMatrix::zero(mn, mn);
    CMatrix unital = CMatrix::zero(n, n);
    for (const CMatrix& f : ks.factors) {
        for (std::size_t s = 0; s < m; ++s)
            for (std::size_t t = 0; t < m; ++t)
                for (std::size_t j = 0; j < n; ++j)
                    for (std::size_t l = 0; l < n; ++l)
                        rec(s * n + j, t * n + l) += f(j, s) * std::conj(f(l, t));
        unital += f * f.adjoint();
    }
    const double rres = (rec - cert.choi).frobenius_norm();
    if (rres > 1e-8)
        throw NumericalFailure("kraus", "Choi reconstruction residual beyond tolerance", rres);
    const double ures = (unital - CMatrix::identity(n)).frobenius_norm();
    if (ures > 1e-8)
        throw NumericalFailure("kraus", "Kraus factors are not unital", ures);
    return ks;
}

} // namespace nrd
