#include "nrd/numrange.hpp"

#include "nrd/errors.hpp"
#include "nrd/spectral.hpp"

#include <algorithm>
#include <cmath>
#include <queue>
#include <stdexcept>

namespace nrd {

namespace {

double support_hg(const CMatrix& h, const CMatrix& g, double theta) {
    const CMatrix m = std::cos(theta) * h + std::sin(theta) * g;
    return herm_eig(m).values.front();
}

} // namespace

double support(const CMatrix& a, double theta) {
    const auto [h, g] = cartesian(a);
    return support_hg(h, g, theta);
}

SupportProfile support_profile(const CMatrix& a, std::size_t npoints) {
    if (npoints == 0) throw std::invalid_argument("support_profile: npoints must be positive");
    const auto [h, g] = cartesian(a);
    SupportProfile out;
    out.thetas.reserve(npoints);
    out.values.reserve(npoints);
    const double step = 2.0 * M_PI / static_cast<double>(npoints);
    for (std::size_t i = 0; i < npoints; ++i) {
        const double theta = -M_PI + step * static_cast<double>(i);
        out.thetas.push_back(theta);
        out.values.push_back(support_hg(h, g, theta));
    }
    out.lipschitz = sigma_max(a);
    return out;
}

std::vector<BoundarySample> boundary(const CMatrix& a, std::size_t npoints) {
    if (npoints < 8) throw std::invalid_argument("boundary: npoints must be at least 8");
    const auto [h, g] = cartesian(a);
    const std::size_t n = a.rows();
    std::vector<BoundarySample> out;
    out.reserve(npoints);
    const double step = 2.0 * M_PI / static_cast<double>(npoints);
    for (std::size_t i = 0; i < npoints; ++i) {
        const double theta = -M_PI + step * static_cast<double>(i);
        const CMatrix m = std::cos(theta) * h + std::sin(theta) * g;
        const HermEig eig = herm_eig(m);
        cplx z = 0.0;
        for (std::size_t p = 0; p < n; ++p)
            for (std::size_t q = 0; q < n; ++q)
                z += std::conj(eig.vectors(p, 0)) * a(p, q) * eig.vectors(q, 0);
        out.push_back({theta, z, eig.values.front()});
    }
    return out;
}

namespace {

// Upper bound for max of a support function over [lo, hi], hi - lo < pi.
// Two complementary bounds, the smaller wins:
//  - h is a pointwise max of pure sinusoids Re(e^{-i theta} z); the sinusoid
//    through (lo, flo), (hi, fhi) dominates every competitor on the interval
//    and its amplitude is sqrt((flo-fhi)^2 + 4 flo fhi sin^2(d/2)) / sin(d).
//    Tight (quadratically) near maxima, but it never localizes: for a
//    one-point range it equals the global max on every interval.
//  - the Lipschitz secant cone (flo+fhi)/2 + lip*d/2, which does localize.
double interval_bound(double lo, double hi, double flo, double fhi, double lip) {
    const double d = hi - lo;
    const double secant = 0.5 * (flo + fhi) + 0.5 * lip * d;
    const double sd = std::sin(d);
    if (sd <= 0.0) return std::max(flo, fhi);
    const double sh = std::sin(0.5 * d);
    const double num = (flo - fhi) * (flo - fhi) + 4.0 * flo * fhi * sh * sh;
    return std::min(std::sqrt(std::max(num, 0.0)) / sd, secant);
}

} // namespace

RadiusBounds radius_bounds(const CMatrix& a, double tol) {
    if (!a.is_square()) throw std::invalid_argument("radius_bounds: non-square input");
    if (!(tol > 0.0)) throw std::invalid_argument("radius_bounds: tolerance must be positive");
    const auto [h, g] = cartesian(a);
    const double lip = sigma_max(a);
    if (lip == 0.0) return {0.0, 0.0};
    auto eval = [&](double theta) { return support_hg(h, g, theta); };

    struct Seg {
        double lo, hi, flo, fhi, ub;
    };
    auto cmp = [](const Seg& x, const Seg& y) { return x.ub < y.ub; };
    std::priority_queue<Seg, std::vector<Seg>, decltype(cmp)> queue(cmp);

    double best = -std::numeric_limits<double>::infinity();
    constexpr int initial = 16;
    double prev_theta = -M_PI;
    double prev_val = eval(prev_theta);
    best = prev_val;
    for (int i = 1; i <= initial; ++i) {
        const double theta = -M_PI + 2.0 * M_PI * static_cast<double>(i) / initial;
        const double val = eval(theta);
        best = std::max(best, val);
        queue.push({prev_theta, theta, prev_val, val,
                    interval_bound(prev_theta, theta, prev_val, val, lip)});
        prev_theta = theta;
        prev_val = val;
    }

    long safety = 1'000'000;
    while (!queue.empty() && queue.top().ub > best + tol) {
        if (--safety < 0)
            throw NumericalFailure("radius_bounds", "branch-and-bound stalled",
                                   queue.top().ub - best);
        const Seg s = queue.top();
        queue.pop();
        const double mid = 0.5 * (s.lo + s.hi);
        const double fmid = eval(mid);
        best = std::max(best, fmid);
        queue.push({s.lo, mid, s.flo, fmid, interval_bound(s.lo, mid, s.flo, fmid, lip)});
        queue.push({mid, s.hi, fmid, s.fhi, interval_bound(mid, s.hi, fmid, s.fhi, lip)});
    }
    const double ub = queue.empty() ? best : std::max(best, queue.top().ub);
    return {best, ub};
}

double numerical_radius(const CMatrix& a) {
    if (!a.is_square()) throw std::invalid_argument("numerical_radius: non-square input");
    return radius_bounds(a, 1e-10 * (1.0 + a.frobenius_norm())).lb;
}

InclusionReport includes(const CMatrix& a, const CMatrix& b, std::size_t npoints,
                         bool certify) {
    if (!a.is_square() || !b.is_square())
        throw std::invalid_argument("includes: inputs must be square");
    if (npoints < 8) throw std::invalid_argument("includes: npoints must be at least 8");
    const auto [ha, ga] = cartesian(a);
    const auto [hb, gb] = cartesian(b);
    auto margin_at = [&](double theta) {
        return support_hg(ha, ga, theta) - support_hg(hb, gb, theta);
    };

    InclusionReport rep;
    rep.grid_step = 2.0 * M_PI / static_cast<double>(npoints);
    rep.margin = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < npoints; ++i) {
        const double theta = -M_PI + rep.grid_step * static_cast<double>(i);
        const double m = margin_at(theta);
        if (m < rep.margin) {
            rep.margin = m;
            rep.theta_min = theta;
        }
    }
    // One refinement pass over the bracket around the coarse minimum.
    const double coarse_min = rep.theta_min;
    for (int j = -32; j <= 32; ++j) {
        const double theta = coarse_min + rep.grid_step * static_cast<double>(j) / 32.0;
        const double m = margin_at(theta);
        if (m < rep.margin) {
            rep.margin = m;
            rep.theta_min = theta;
        }
    }

    const double eps_incl = 1e-9 * (1.0 + a.frobenius_norm() + b.frobenius_norm());
    rep.included = rep.margin >= -eps_incl;
    if (certify) {
        // The slack is O(grid_step), so coarse certified upper bounds on the
        // radii keep the verdict rigorous at a tiny fraction of the cost of
        // full-precision w(A), w(B).
        const double lip = radius_bounds(a, 1e-3 * (1.0 + a.frobenius_norm())).ub +
                           radius_bounds(b, 1e-3 * (1.0 + b.frobenius_norm())).ub;
        const double slack = lip * rep.grid_step / 2.0;
        rep.certified = rep.included ? (rep.margin > slack) : (rep.margin < -slack);
    }
    return rep;
}

double cone_disk_support(double r, double theta) {
    if (!(r > 1.0)) throw std::invalid_argument("cone_disk_support: requires r > 1");
    return std::max(0.0, r * std::cos(theta) + 1.0);
}

} // namespace nrd
