#include "nrd/cmatrix.hpp"
#include "nrd/cpbuild.hpp"
#include "nrd/dilation.hpp"
#include "nrd/normform.hpp"
#include "nrd/numrange.hpp"
#include "nrd/spectral.hpp"

#include <benchmark/benchmark.h>

#include <random>

namespace {

using nrd::CMatrix;
using nrd::cplx;

CMatrix random_square(std::mt19937_64& rng, std::size_t n) {
    std::normal_distribution<double> gauss;
    CMatrix m(n, n);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j)
            m(i, j) = cplx(gauss(rng), gauss(rng));
    return m;
}

CMatrix cone_matrix(double r) {
    return nrd::direct_sum(r * CMatrix::identity(2) + nrd::canonical_disk_matrix(),
                           CMatrix::zero(1, 1));
}

void bm_herm_eig(benchmark::State& state) {
    std::mt19937_64 rng(11);
    const CMatrix m = random_square(rng, static_cast<std::size_t>(state.range(0)));
    const CMatrix h = 0.5 * (m + m.adjoint());
    for (auto _ : state)
        benchmark::DoNotOptimize(nrd::herm_eig(h));
}

void bm_support_profile(benchmark::State& state) {
    std::mt19937_64 rng(12);
    const CMatrix a = random_square(rng, 6);
    for (auto _ : state)
        benchmark::DoNotOptimize(nrd::support_profile(a, static_cast<std::size_t>(state.range(0))));
}

void bm_includes(benchmark::State& state) {
    const CMatrix a = cone_matrix(2.0);
    const CMatrix b = nrd::random_compression(a, 2, 2, 5);
    for (auto _ : state)
        benchmark::DoNotOptimize(nrd::includes(a, b));
}

void bm_dykstra_extend(benchmark::State& state) {
    // Interior disk target: the alternating-projection path, no barrier stage.
    const CMatrix b = 0.6 * nrd::canonical_disk_matrix();
    const nrd::CartesianPair cp = nrd::cartesian(b);
    const CMatrix e11 = 0.5 * (CMatrix::identity(2) + cp.G);
    const CMatrix e22 = CMatrix::identity(2) - e11;
    for (auto _ : state)
        benchmark::DoNotOptimize(nrd::dykstra_extend(e11, e22, cp.H));
}

void bm_dilate(benchmark::State& state) {
    const CMatrix a = cone_matrix(2.0);
    const std::size_t n = static_cast<std::size_t>(state.range(0));
    const CMatrix b = nrd::random_compression(a, n, 2, 7);
    for (auto _ : state)
        benchmark::DoNotOptimize(nrd::dilate(a, b));
}

} // namespace

BENCHMARK(bm_herm_eig)->Arg(4)->Arg(8)->Arg(16);
BENCHMARK(bm_support_profile)->Arg(360)->Arg(720);
BENCHMARK(bm_includes);
BENCHMARK(bm_dykstra_extend);
BENCHMARK(bm_dilate)->Arg(2)->Arg(4);

BENCHMARK_MAIN();
