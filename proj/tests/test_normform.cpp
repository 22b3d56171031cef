#include "doctest.h"

#include "nrd/cmatrix.hpp"
#include "nrd/errors.hpp"
#include "nrd/normform.hpp"
#include "nrd/numrange.hpp"
#include "nrd/spectral.hpp"
#include "test_helpers.hpp"

#include <cmath>
#include <complex>
#include <numbers>
#include <random>
#include <vector>

using nrd::CaseKind;
using nrd::CaseTag;
using nrd::Chart;
using nrd::CMatrix;
using nrd::cplx;
using nrdtest::frob_dist;

namespace {

const cplx I(0.0, 1.0);

CMatrix cone_matrix(double r) {
    return nrd::direct_sum(r * CMatrix::identity(2) + nrd::canonical_disk_matrix(),
                           CMatrix::zero(1, 1));
}

// Non-normal 2x2 with a well-separated ellipse, fixed for reproducibility.
CMatrix sample_nonnormal2() {
    std::mt19937_64 rng(2024);
    CMatrix a = nrdtest::random_matrix(rng, 2, 2);
    REQUIRE((a * a.adjoint() - a.adjoint() * a).frobenius_norm() > 1e-3);
    return a;
}

// A0 (+) [mu] with mu far outside W(A0), conjugated by a random unitary.
CMatrix sample_exterior_sum(std::uint64_t seed, cplx* mu_out = nullptr) {
    std::mt19937_64 rng(seed);
    CMatrix a0 = nrdtest::random_matrix(rng, 2, 2);
    const cplx center = a0.trace() / 2.0;
    const double radius = nrd::sigma_max(a0 - center * CMatrix::identity(2));
    const cplx mu = center + (2.0 * radius + 1.0) * std::polar(1.0, 0.7);
    if (mu_out)
        *mu_out = mu;
    CMatrix a = nrd::direct_sum(a0, CMatrix(1, 1, {mu}));
    const CMatrix u = nrdtest::random_unitary(rng, 3);
    return u * a * u.adjoint();
}

double chart_r_norm2(const Chart& c) {
    return c.R[0][0] * c.R[0][0] + c.R[0][1] * c.R[0][1] + c.R[1][0] * c.R[1][0] +
           c.R[1][1] * c.R[1][1];
}

} // namespace

TEST_CASE("canonical disk matrix is the norm-2 nilpotent with unit-disk range") {
    const CMatrix c = nrd::canonical_disk_matrix();
    CHECK(c(0, 0) == I);
    CHECK(c(0, 1) == cplx(1.0, 0.0));
    CHECK(c(1, 0) == cplx(1.0, 0.0));
    CHECK(c(1, 1) == -I);
    CHECK((c * c).frobenius_norm() == doctest::Approx(0.0));
    CHECK(c.frobenius_norm() == doctest::Approx(2.0));
    for (int k = 0; k < 36; ++k) {
        const double theta = -std::numbers::pi + k * std::numbers::pi / 18.0;
        CHECK(nrd::support(c, theta) == doctest::Approx(1.0).epsilon(1e-12));
    }
}

TEST_CASE("charts invert, compose, and act on points consistently") {
    std::mt19937_64 rng(7);
    Chart c;
    c.R = {{{1.5, 0.25}, {-0.5, 2.0}}};
    c.t = {0.3, -1.2};
    c.U = nrdtest::random_unitary(rng, 3);

    const CMatrix x = nrdtest::random_matrix(rng, 3, 3);

    SUBCASE("identity chart is the identity action") {
        const Chart id = Chart::identity(3);
        CHECK(frob_dist(id.apply(x), x) < 1e-14);
        CHECK(id.apply_point(cplx(0.3, -2.0)) == cplx(0.3, -2.0));
    }

    SUBCASE("inverse chart undoes apply") {
        const Chart inv = c.inverse();
        CHECK(frob_dist(inv.apply(c.apply(x)), x) < 1e-12);
        CHECK(frob_dist(c.apply(inv.apply(x)), x) < 1e-12);
        const cplx z(0.7, 0.1);
        CHECK(std::abs(inv.apply_point(c.apply_point(z)) - z) < 1e-13);
    }

    SUBCASE("compose matches sequential application") {
        Chart d;
        d.R = {{{0.5, -1.0}, {1.0, 0.75}}};
        d.t = {-0.1, 0.4};
        d.U = nrdtest::random_unitary(rng, 3);
        const Chart dc = nrd::compose(d, c);
        CHECK(frob_dist(dc.apply(x), d.apply(c.apply(x))) < 1e-12);
        const cplx z(-0.2, 1.3);
        CHECK(std::abs(dc.apply_point(c.inverse().apply_point(c.apply_point(z))) -
                       d.apply_point(c.apply_point(z))) < 1e-12);
    }

    SUBCASE("apply on a diagonal matrix transforms the diagonal pointwise") {
        Chart affine = c;
        affine.U = CMatrix::identity(3);
        const CMatrix d = CMatrix::diag({cplx(1.0, 2.0), cplx(-0.5, 0.0), cplx(0.0, -3.0)});
        const CMatrix fd = affine.apply(d);
        for (std::size_t j = 0; j < 3; ++j) {
            CHECK(std::abs(fd(j, j) - affine.apply_point(d(j, j))) < 1e-14);
            for (std::size_t i = 0; i < 3; ++i)
                if (i != j)
                    CHECK(std::abs(fd(i, j)) < 1e-14);
        }
    }

    SUBCASE("singular affine part is rejected") {
        Chart s;
        s.R = {{{1.0, 2.0}, {2.0, 4.0}}};
        s.U = CMatrix::identity(2);
        CHECK_THROWS_AS(s.inverse(), std::invalid_argument);
    }
}

TEST_CASE("classify recognizes the catalogue of cases") {
    CHECK(nrd::classify(3.0 * CMatrix::identity(3)).kind == CaseKind::Scalar);
    CHECK(nrd::classify(cplx(0.0, 2.5) * CMatrix::identity(4)).kind == CaseKind::Scalar);
    CHECK(nrd::classify(CMatrix::diag({1.0, I, -1.0, -I})).kind == CaseKind::Unsupported);
    CHECK(nrd::classify(CMatrix::diag({1.0, 0.0})).kind == CaseKind::Normal2);
    CHECK(nrd::classify(CMatrix::from_rows({{0.0, 2.0}, {0.0, 0.0}})).kind ==
          CaseKind::NonNormal2);
    CHECK(nrd::classify(CMatrix::diag({1.0, I, 0.0})).kind == CaseKind::Normal3Generic);

    const CaseTag col = nrd::classify(CMatrix::diag({1.0, 0.5, 0.0}));
    CHECK(col.kind == CaseKind::Normal3Collinear);
    CHECK(col.r == doctest::Approx(0.5));

    const CaseTag col2 = nrd::classify(CMatrix::diag({cplx(3.0, 3.0), cplx(1.0, 1.0), cplx(2.0, 2.0)}));
    CHECK(col2.kind == CaseKind::Normal3Collinear);
    CHECK(col2.r == doctest::Approx(0.5));

    const CaseTag cone = nrd::classify(cone_matrix(2.0));
    CHECK(cone.kind == CaseKind::NonNormal2PlusReducing);
    CHECK(cone.r == doctest::Approx(2.0).epsilon(1e-9));
    CHECK(std::abs(cone.mu) < 1e-9);

    // eigenvalue inside the block's range: still tagged, but with r < 1
    const CMatrix inside = nrd::direct_sum(nrd::canonical_disk_matrix(), CMatrix(1, 1, {cplx(0.2, 0.0)}));
    const CaseTag tin = nrd::classify(inside);
    CHECK(tin.kind == CaseKind::NonNormal2PlusReducing);
    CHECK(tin.r == doctest::Approx(0.2).epsilon(1e-9));

    // nilpotent Jordan block: non-normal, no reducing eigenvector
    const CMatrix jordan = CMatrix::from_rows({{0.0, 1.0, 0.0}, {0.0, 0.0, 1.0}, {0.0, 0.0, 0.0}});
    CHECK(nrd::classify(jordan).kind == CaseKind::Unsupported);

    CHECK_THROWS_AS(nrd::classify(CMatrix(2, 3)), std::invalid_argument);
    CHECK_THROWS_AS(nrd::classify(CMatrix::identity(2), 0.0), std::invalid_argument);
}

TEST_CASE("classify is invariant under unitary conjugation") {
    std::mt19937_64 rng(11);
    const std::vector<CMatrix> samples = {
        CMatrix::diag({5.0, 3.0}),
        CMatrix::diag({1.0, 0.5, 0.0}),
        CMatrix::diag({1.0, I, 0.0}),
        CMatrix::from_rows({{0.0, 2.0}, {0.0, 0.0}}),
        cone_matrix(1.5),
    };
    for (const CMatrix& a : samples) {
        const CaseTag base = nrd::classify(a);
        for (int rep = 0; rep < 4; ++rep) {
            const CMatrix u = nrdtest::random_unitary(rng, a.rows());
            const CaseTag tag = nrd::classify(u * a * u.adjoint());
            CHECK(tag.kind == base.kind);
            if (base.kind == CaseKind::Normal3Collinear ||
                base.kind == CaseKind::NonNormal2PlusReducing)
                CHECK(tag.r == doctest::Approx(base.r).epsilon(1e-7));
        }
    }
}

TEST_CASE("reduce maps normal matrices to their canonical diagonals") {
    SUBCASE("real segment") {
        const CMatrix a = CMatrix::diag({5.0, 3.0});
        const auto red = nrd::reduce(a, nrd::classify(a));
        CHECK(frob_dist(red.canonical, CMatrix::diag({1.0, 0.0})) == doctest::Approx(0.0));
        CHECK(std::abs(red.chart.apply_point(5.0) - cplx(1.0, 0.0)) < 1e-12);
        CHECK(std::abs(red.chart.apply_point(3.0)) < 1e-12);
        CHECK(frob_dist(red.chart.inverse().apply(red.canonical), a) < 1e-10);
    }

    SUBCASE("order of the diagonal does not matter") {
        const auto red = nrd::reduce(CMatrix::diag({3.0, 5.0}), CaseTag{CaseKind::Normal2});
        CHECK(std::abs(red.chart.apply_point(5.0) - cplx(1.0, 0.0)) < 1e-12);
    }

    SUBCASE("complex pair") {
        const CMatrix a = CMatrix::diag({cplx(1.0, 2.0), cplx(1.0, -1.0)});
        const auto red = nrd::reduce(a, nrd::classify(a));
        CHECK(frob_dist(red.chart.apply(a), CMatrix::diag({1.0, 0.0})) < 1e-10);
        CHECK(frob_dist(red.chart.inverse().apply(red.canonical), a) < 1e-10);
    }

    SUBCASE("collinear triple keeps its middle ratio") {
        const CMatrix a = CMatrix::diag({5.0, 4.0, 3.0});
        const auto red = nrd::reduce(a, nrd::classify(a));
        CHECK(frob_dist(red.canonical, CMatrix::diag({1.0, 0.5, 0.0})) < 1e-12);
        std::mt19937_64 rng(3);
        const CMatrix u = nrdtest::random_unitary(rng, 3);
        const CMatrix b = u * CMatrix::diag({cplx(3.0, 3.0), cplx(1.0, 1.0), cplx(2.0, 2.0)}) * u.adjoint();
        const auto redb = nrd::reduce(b, nrd::classify(b));
        CHECK(frob_dist(redb.canonical, CMatrix::diag({1.0, 0.5, 0.0})) < 1e-9);
        CHECK(std::abs(redb.chart.apply_point(cplx(3.0, 3.0)) - cplx(1.0, 0.0)) < 1e-9);
        CHECK(frob_dist(redb.chart.inverse().apply(redb.canonical), b) < 1e-8);
    }

    SUBCASE("generic triangle lands on (1, i, 0) with positive orientation") {
        const CMatrix a = CMatrix::diag({2.0, 2.0 * I, -1.0});
        const auto red = nrd::reduce(a, nrd::classify(a));
        CHECK(frob_dist(red.canonical, CMatrix::diag({1.0, I, 0.0})) == doctest::Approx(0.0));
        // the chart sends the spectrum onto {1, i, 0}
        std::vector<cplx> image = {red.chart.apply_point(2.0), red.chart.apply_point(2.0 * I),
                                   red.chart.apply_point(-1.0)};
        double hit = 0.0;
        for (const cplx target : {cplx(1.0, 0.0), I, cplx(0.0, 0.0)}) {
            double best = 1e9;
            for (const cplx z : image)
                best = std::min(best, std::abs(z - target));
            hit = std::max(hit, best);
        }
        CHECK(hit < 1e-10);
        CHECK(red.chart.det_r() > 0.0);
        CHECK(frob_dist(red.chart.inverse().apply(red.canonical), a) < 1e-9);
    }
}

TEST_CASE("reduce maps non-normal 2x2 matrices onto the disk matrix") {
    SUBCASE("shift nilpotent") {
        const CMatrix a = CMatrix::from_rows({{0.0, 2.0}, {0.0, 0.0}});
        const auto red = nrd::reduce(a, nrd::classify(a));
        CHECK(frob_dist(red.canonical, nrd::canonical_disk_matrix()) == doctest::Approx(0.0));
        CHECK(frob_dist(red.chart.apply(a), red.canonical) < 1e-10);
        CHECK(frob_dist(red.chart.inverse().apply(red.canonical), a) < 1e-10);
    }

    SUBCASE("random non-normal sample") {
        const CMatrix a = sample_nonnormal2();
        const auto red = nrd::reduce(a, nrd::classify(a));
        CHECK(frob_dist(red.chart.apply(a), nrd::canonical_disk_matrix()) < 1e-10);
        CHECK(frob_dist(red.chart.inverse().apply(red.canonical), a) < 1e-9);
        CHECK(std::abs(red.chart.det_r()) > 1e-12 * chart_r_norm2(red.chart));
        CHECK(nrdtest::unitarity_residual(red.chart.U) < 1e-12);

        // points of W(A) land inside the unit disk, boundary on the circle
        std::mt19937_64 rng(5);
        for (int rep = 0; rep < 24; ++rep) {
            CMatrix x = nrdtest::random_matrix(rng, 2, 1);
            x = (1.0 / x.frobenius_norm()) * x;
            const cplx z = (x.adjoint() * a * x)(0, 0);
            CHECK(std::abs(red.chart.apply_point(z)) < 1.0 + 1e-10);
        }
        for (const auto& sample : nrd::boundary(a, 90))
            CHECK(std::abs(red.chart.apply_point(sample.point)) ==
                  doctest::Approx(1.0).epsilon(1e-8));
    }
}

TEST_CASE("reduce splits off an exterior reducing eigenvalue") {
    SUBCASE("already in canonical position") {
        const CMatrix a = cone_matrix(2.0);
        const auto red = nrd::reduce(a, nrd::classify(a));
        CHECK(frob_dist(red.canonical, a) < 1e-12);
        // the chart is exactly the identity here
        CHECK(std::abs(red.chart.R[0][0] - 1.0) < 1e-12);
        CHECK(std::abs(red.chart.R[0][1]) < 1e-12);
        CHECK(std::abs(red.chart.R[1][0]) < 1e-12);
        CHECK(std::abs(red.chart.R[1][1] - 1.0) < 1e-12);
        CHECK(std::abs(red.chart.t[0]) < 1e-12);
        CHECK(std::abs(red.chart.t[1]) < 1e-12);
        CHECK(frob_dist(red.chart.U, CMatrix::identity(3)) < 1e-9);
    }

    SUBCASE("conjugated random block plus exterior eigenvalue") {
        cplx mu;
        const CMatrix a = sample_exterior_sum(99, &mu);
        const CaseTag tag = nrd::classify(a);
        REQUIRE(tag.kind == CaseKind::NonNormal2PlusReducing);
        REQUIRE(tag.r > 1.0);
        CHECK(std::abs(tag.mu - mu) < 1e-7);
        const auto red = nrd::reduce(a, tag);
        const double r = red.canonical(0, 0).real();
        CHECK(r == doctest::Approx(tag.r).epsilon(1e-9));
        CHECK(frob_dist(red.canonical, cone_matrix(r)) < 1e-10);
        CHECK(frob_dist(red.chart.inverse().apply(red.canonical), a) < 1e-8);
        CHECK(std::abs(red.chart.apply_point(mu)) < 1e-8);
    }

    SUBCASE("interior eigenvalue is rejected by reduce") {
        const CMatrix inside =
            nrd::direct_sum(nrd::canonical_disk_matrix(), CMatrix(1, 1, {cplx(0.2, 0.0)}));
        const CaseTag tag = nrd::classify(inside);
        REQUIRE(tag.kind == CaseKind::NonNormal2PlusReducing);
        CHECK_THROWS_AS(nrd::reduce(inside, tag), std::invalid_argument);
    }
}

TEST_CASE("reduce rejects tags without a canonical form and degenerate geometry") {
    CHECK_THROWS_AS(nrd::reduce(CMatrix::identity(2), CaseTag{CaseKind::Scalar}),
                    std::invalid_argument);
    CHECK_THROWS_AS(nrd::reduce(CMatrix::identity(2), CaseTag{CaseKind::Unsupported}),
                    std::invalid_argument);
    CHECK_THROWS_AS(nrd::reduce(CMatrix::diag({1.0, 0.0}), CaseTag{CaseKind::Normal3Generic}),
                    std::invalid_argument);
    CHECK_THROWS_AS(
        nrd::reduce(CMatrix::diag({1.0, 1.0 + 1e-12}), CaseTag{CaseKind::Normal2}),
        nrd::DegenerateGeometry);
}

TEST_CASE("reducing_split block-diagonalizes and reports the eigenvalue") {
    SUBCASE("canonical position") {
        const auto split = nrd::reducing_split(cone_matrix(1.5));
        CHECK(frob_dist(split.q, CMatrix::identity(3)) < 1e-10);
        CHECK(frob_dist(split.a0, 1.5 * CMatrix::identity(2) + nrd::canonical_disk_matrix()) <
              1e-10);
        CHECK(std::abs(split.mu) < 1e-10);
    }

    SUBCASE("conjugated") {
        cplx mu;
        const CMatrix a = sample_exterior_sum(1234, &mu);
        const auto split = nrd::reducing_split(a);
        CHECK(nrdtest::unitarity_residual(split.q) < 1e-12);
        CHECK(std::abs(split.mu - mu) < 1e-7);
        const CMatrix qaq = split.q.adjoint() * a * split.q;
        double leak = 0.0;
        for (std::size_t i = 0; i < 2; ++i) {
            leak = std::max(leak, std::abs(qaq(i, 2)));
            leak = std::max(leak, std::abs(qaq(2, i)));
        }
        CHECK(leak < 1e-8);
        CHECK(std::abs(qaq(2, 2) - mu) < 1e-7);
    }

    SUBCASE("no reducing eigenvector") {
        const CMatrix jordan =
            CMatrix::from_rows({{0.0, 1.0, 0.0}, {0.0, 0.0, 1.0}, {0.0, 0.0, 0.0}});
        CHECK_THROWS_AS(nrd::reducing_split(jordan), nrd::UnsupportedCase);
    }
}

TEST_CASE("pullback_isometry lifts reduced-picture dilations") {
    const CMatrix a = CMatrix::diag({5.0, 3.0});
    const auto red = nrd::reduce(a, nrd::classify(a));

    SUBCASE("compression to a scalar") {
        // V* diag(1,0) V = [1/2] in the reduced picture, i.e. B = [4]
        const double s = 1.0 / std::sqrt(2.0);
        const CMatrix v(2, 1, {cplx(s, 0.0), cplx(s, 0.0)});
        const CMatrix b(1, 1, {cplx(4.0, 0.0)});
        const CMatrix w = nrd::pullback_isometry(v, red.chart, a, b);
        CHECK(nrdtest::unitarity_residual(w) < 1e-12);
        CHECK(frob_dist(w.adjoint() * a * w, b) < 1e-10);
    }

    SUBCASE("identity dilation with two copies") {
        // V = [I; 0] uses k = 2 copies, compressing to A-tilde itself
        CMatrix v = CMatrix::zero(4, 2);
        v(0, 0) = 1.0;
        v(1, 1) = 1.0;
        const CMatrix w = nrd::pullback_isometry(v, red.chart, a, a);
        CHECK(frob_dist(w.adjoint() * nrd::kron(CMatrix::identity(2), a) * w, a) < 1e-10);
    }

    SUBCASE("shape and residual violations throw") {
        const CMatrix v(2, 1, {cplx(1.0, 0.0), cplx(1.0, 0.0)}); // not an isometry image
        CHECK_THROWS_AS(
            nrd::pullback_isometry(v, red.chart, a, CMatrix(1, 1, {cplx(4.0, 0.0)})),
            nrd::NumericalFailure);
        CHECK_THROWS_AS(nrd::pullback_isometry(CMatrix(3, 1), red.chart, a, CMatrix(1, 1)),
                        std::invalid_argument);
    }
}

TEST_CASE("case names are stable strings") {
    CHECK(nrd::to_string(CaseKind::Scalar) == "scalar");
    CHECK(nrd::to_string(CaseKind::NonNormal2PlusReducing) == "nonnormal2_plus_reducing");
    CHECK(nrd::to_string(CaseKind::Unsupported) == "unsupported");
}
