#include "nrd/spectral.hpp"

#include "nrd/errors.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

namespace nrd {

CartesianPair cartesian(const CMatrix& a) {
    return {herm_part(a), skew_part_over_i(a)};
}

namespace {

double offdiag_norm(const CMatrix& a) {
    double s = 0.0;
    for (std::size_t p = 0; p < a.rows(); ++p)
        for (std::size_t q = p + 1; q < a.cols(); ++q) s += std::norm(a(p, q));
    return std::sqrt(2.0 * s);
}

// One plane rotation in the (p,q) plane zeroing A(p,q). J has c on both
// diagonal slots, s at (q,p) and -conj(s) at (p,q); A <- J* A J, V <- V J.
void jacobi_rotate(CMatrix& a, CMatrix& v, std::size_t p, std::size_t q) {
    const cplx b = a(p, q);
    const double ab = std::abs(b);
    if (ab == 0.0) return;

    const double diag_p = a(p, p).real();
    const double diag_q = a(q, q).real();
    const double tau = (diag_p - diag_q) / (2.0 * ab);
    const double t = 1.0 / (tau + std::copysign(std::sqrt(tau * tau + 1.0), tau));
    const double c = 1.0 / std::sqrt(1.0 + t * t);
    const cplx s = (t * c) * std::conj(b / ab);

    const std::size_t n = a.rows();
    for (std::size_t i = 0; i < n; ++i) {
        const cplx ap = a(i, p), aq = a(i, q);
        a(i, p) = c * ap + s * aq;
        a(i, q) = -std::conj(s) * ap + c * aq;
        const cplx vp = v(i, p), vq = v(i, q);
        v(i, p) = c * vp + s * vq;
        v(i, q) = -std::conj(s) * vp + c * vq;
    }
    for (std::size_t j = 0; j < n; ++j) {
        const cplx rp = a(p, j), rq = a(q, j);
        a(p, j) = c * rp + std::conj(s) * rq;
        a(q, j) = -s * rp + c * rq;
    }
    // Pivot is zero by construction; writing it kills roundoff residue.
    a(p, q) = 0.0;
    a(q, p) = 0.0;
}

} // namespace

HermEig herm_eig(const CMatrix& h) {
    if (!h.is_square()) throw std::invalid_argument("herm_eig: non-square input");
    const double scale = h.frobenius_norm();
    if (!is_hermitian(h, 1e-12 * (1.0 + scale)))
        throw std::invalid_argument("herm_eig: input is not Hermitian");

    const std::size_t n = h.rows();
    CMatrix a = herm_part(h);
    CMatrix v = CMatrix::identity(n);
    const double thresh = 1e-14 * scale;

    constexpr int max_sweeps = 64;
    int sweep = 0;
    for (; sweep < max_sweeps; ++sweep) {
        if (offdiag_norm(a) <= thresh) break;
        for (std::size_t p = 0; p + 1 < n; ++p)
            for (std::size_t q = p + 1; q < n; ++q) jacobi_rotate(a, v, p, q);
    }
    if (sweep == max_sweeps && offdiag_norm(a) > thresh)
        throw NumericalFailure("herm_eig", "Jacobi sweeps did not converge", offdiag_norm(a));

    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::stable_sort(order.begin(), order.end(), [&](std::size_t i, std::size_t j) {
        return a(i, i).real() > a(j, j).real();
    });

    HermEig out;
    out.dim = n;
    out.values.resize(n);
    out.vectors = CMatrix(n, n);
    for (std::size_t j = 0; j < n; ++j) {
        const std::size_t src = order[j];
        out.values[j] = a(src, src).real();
        // Rotate the largest entry onto the positive real axis for a
        // deterministic representative.
        std::size_t imax = 0;
        double amax = -1.0;
        for (std::size_t i = 0; i < n; ++i) {
            const double m = std::abs(v(i, src));
            if (m > amax) {
                amax = m;
                imax = i;
            }
        }
        cplx phase(1.0, 0.0);
        if (amax > 0.0) phase = std::conj(v(imax, src)) / cplx(amax, 0.0);
        for (std::size_t i = 0; i < n; ++i) out.vectors(i, j) = phase * v(i, src);
    }
    return out;
}

double psd_gap(const CMatrix& m) {
    if (!m.is_square()) throw std::invalid_argument("psd_gap: non-square input");
    if (m.rows() == 0) return 0.0;
    return herm_eig(herm_part(m)).values.back();
}

SqrtPair sqrt_and_pinv_sqrt(const CMatrix& h, double cutoff) {
    const HermEig eig = herm_eig(h);
    const std::size_t n = h.rows();
    const double eps_psd = 1e-9 * (1.0 + h.frobenius_norm());
    const double lam_max = eig.values.empty() ? 0.0 : std::max(eig.values.front(), 0.0);
    if (cutoff < 0.0) cutoff = static_cast<double>(n) * 0x1p-52 * lam_max;

    SqrtPair out;
    out.sqrt = CMatrix(n, n);
    out.pinv_sqrt = CMatrix(n, n);
    std::vector<double> s(n, 0.0), p(n, 0.0);
    for (std::size_t i = 0; i < n; ++i) {
        double lam = eig.values[i];
        if (lam < -eps_psd)
            throw NumericalFailure("sqrt", "matrix has a negative eigenvalue", lam);
        lam = std::max(lam, 0.0);
        if (lam <= cutoff) continue;
        s[i] = std::sqrt(lam);
        p[i] = 1.0 / s[i];
        ++out.rank;
    }
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j) {
            cplx sv = 0.0, pv = 0.0;
            for (std::size_t k = 0; k < n; ++k) {
                const cplx vik_vjk = eig.vectors(i, k) * std::conj(eig.vectors(j, k));
                sv += s[k] * vik_vjk;
                pv += p[k] * vik_vjk;
            }
            out.sqrt(i, j) = sv;
            out.pinv_sqrt(i, j) = pv;
        }
    return out;
}

CMatrix min_with_identity(const CMatrix& k) {
    const HermEig eig = herm_eig(k);
    const std::size_t n = k.rows();
    const double eps_psd = 1e-9 * (1.0 + k.frobenius_norm());
    CMatrix p(n, n);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j) {
            cplx v = 0.0;
            for (std::size_t m = 0; m < n; ++m) {
                const double lam = eig.values[m];
                if (lam < -eps_psd)
                    throw NumericalFailure("min_with_identity", "input is not PSD", lam);
                v += std::min(std::max(lam, 0.0), 1.0) * eig.vectors(i, m) *
                     std::conj(eig.vectors(j, m));
            }
            p(i, j) = v;
        }
    return p;
}

double sigma_max(const CMatrix& a) {
    if (a.rows() == 0 || a.cols() == 0) return 0.0;
    const CMatrix gram = a.adjoint() * a;
    const double lam = herm_eig(gram).values.front();
    return std::sqrt(std::max(lam, 0.0));
}

} // namespace nrd
