#include <benchmark/benchmark.h>

#include <cmath>

#include "widthlab/convex_approx.hpp"
#include "widthlab/covering.hpp"
#include "widthlab/node_classes.hpp"

using namespace widthlab;

namespace {

Dictionary logistic_dictionary(std::size_t members, std::size_t points) {
    const DomainPtr d = GridDomain::monte_carlo_cube(2, points, 12);
    return sample_dictionary(NodeFamily::smooth_mother(2, 4), d, SampleMode::random, members, 34);
}

void BM_NormTorus(benchmark::State& state) {
    const DomainPtr d = GridDomain::torus(static_cast<std::size_t>(state.range(0)));
    std::vector<double> v(d->size());
    for (std::size_t i = 0; i < v.size(); ++i) v[i] = std::sin(d->point(i)[0]);
    const FunctionVector f(d, std::move(v));
    const NormSpec spec(2.0, d);
    for (auto _ : state) benchmark::DoNotOptimize(norm(f, spec));
}
BENCHMARK(BM_NormTorus)->Arg(1024)->Arg(4096);

void BM_GreedyCover(benchmark::State& state) {
    const Dictionary dict =
        logistic_dictionary(static_cast<std::size_t>(state.range(0)), 500);
    const NormSpec spec(2.0, dict.domain());
    for (auto _ : state) {
        const EpsCover cover = greedy_cover(dict, 0.1, spec);
        benchmark::DoNotOptimize(cover.center_indices.size());
    }
}
BENCHMARK(BM_GreedyCover)->Arg(100)->Arg(300);

void BM_ConvexFit(benchmark::State& state) {
    const Dictionary dict = logistic_dictionary(64, 1000);
    const NormSpec spec(2.0, dict.domain());
    const std::size_t n = static_cast<std::size_t>(state.range(0));
    const EpsCover cover = greedy_cover_budget(dict, n, spec);
    std::vector<FunctionVector> basis;
    for (std::size_t c : cover.center_indices) basis.push_back(dict.members()[c]);

    Rng rng(9);
    std::vector<double> coeffs(16);
    std::vector<FunctionVector> used;
    for (double& c : coeffs) {
        c = rng.sign() * rng.uniform() / 16.0;
        used.push_back(dict.members()[rng.index(dict.size())]);
    }
    const FunctionVector target = combine(used, coeffs);
    for (auto _ : state) {
        const ApproxResult res = convex_fit(target, basis, n, spec, {1e-9, 60, false});
        benchmark::DoNotOptimize(res.error);
    }
}
BENCHMARK(BM_ConvexFit)->Arg(8)->Arg(32);

void BM_ShiftedCore(benchmark::State& state) {
    Rng rng(4);
    const std::size_t m = 64, n = 16;
    std::vector<double> pts(m), w(m, 1.0 / m);
    for (std::size_t i = 0; i < m; ++i) pts[i] = static_cast<double>(i);
    const DomainPtr d =
        std::make_shared<GridDomain>(std::move(pts), 1, std::move(w), MeasureKind::probability);
    const NormSpec spec(2.0, d);
    std::vector<FunctionVector> basis;
    for (std::size_t a = 0; a < n; ++a) {
        std::vector<double> v(m);
        for (double& x : v) x = rng.normal();
        basis.emplace_back(d, std::move(v));
    }
    std::vector<double> coeffs(n, 1.0 / (2.0 * n));
    std::vector<double> fv(m);
    for (double& x : fv) x = rng.normal();
    const FunctionVector f(d, std::move(fv));
    for (auto _ : state) {
        const ShiftedCoreResult res = shifted_core(f, basis, coeffs, spec);
        benchmark::DoNotOptimize(res.alpha);
    }
}
BENCHMARK(BM_ShiftedCore);

}  // namespace

BENCHMARK_MAIN();
