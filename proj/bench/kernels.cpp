#include <benchmark/benchmark.h>

#include "geodequiv/catalog.hpp"
#include "geodequiv/coincidence.hpp"
#include "geodequiv/phase.hpp"

using namespace geodequiv;

namespace {

const CatalogEntry& entry() {
    static const CatalogEntry e = lookup("lc-b");
    return e;
}

std::vector<PhasePoint> points(std::size_t count) { return sample_phase_points(entry().pair.g(), entry().box, count, 1); }

void BM_involution_parallel(benchmark::State& st) {
    const auto pts = points(static_cast<std::size_t>(st.range(0)));
    for (auto _ : st) benchmark::DoNotOptimize(involution_matrix(entry().pair, pts));
}

void BM_involution_serial(benchmark::State& st) {
    const auto pts = points(static_cast<std::size_t>(st.range(0)));
    for (auto _ : st) benchmark::DoNotOptimize(involution_matrix_serial(entry().pair, pts));
}

void BM_rank_parallel(benchmark::State& st) {
    const auto pts = points(static_cast<std::size_t>(st.range(0)));
    for (auto _ : st) benchmark::DoNotOptimize(independence_rank(entry().pair, pts));
}

void BM_rank_serial(benchmark::State& st) {
    const auto pts = points(static_cast<std::size_t>(st.range(0)));
    for (auto _ : st) benchmark::DoNotOptimize(independence_rank_serial(entry().pair, pts));
}

void BM_geodesics_parallel(benchmark::State& st) {
    const auto pts = points(static_cast<std::size_t>(st.range(0)));
    for (auto _ : st) benchmark::DoNotOptimize(integrate_geodesics(entry().pair.g(), pts, 10.0));
}

void BM_geodesics_serial(benchmark::State& st) {
    const auto pts = points(static_cast<std::size_t>(st.range(0)));
    for (auto _ : st) benchmark::DoNotOptimize(integrate_geodesics_serial(entry().pair.g(), pts, 10.0));
}

std::pair<Curve, Curve> curves(std::size_t samples) {
    const CoincidenceResult r = geodesic_coincidence(entry().pair, points(1).front(), 5.0);
    return {arclength_reparam(r.g_traj, entry().pair.g(), samples),
            arclength_reparam(r.gbar_traj, entry().pair.g(), samples)};
}

void BM_curve_distance_parallel(benchmark::State& st) {
    const auto [a, b] = curves(static_cast<std::size_t>(st.range(0)));
    for (auto _ : st) benchmark::DoNotOptimize(curve_distance(a, b));
}

void BM_curve_distance_serial(benchmark::State& st) {
    const auto [a, b] = curves(static_cast<std::size_t>(st.range(0)));
    for (auto _ : st) benchmark::DoNotOptimize(curve_distance_serial(a, b));
}

}  // namespace

BENCHMARK(BM_involution_parallel)->Arg(100)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_involution_serial)->Arg(100)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_rank_parallel)->Arg(100)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_rank_serial)->Arg(100)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_geodesics_parallel)->Arg(20)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_geodesics_serial)->Arg(20)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_curve_distance_parallel)->Arg(256)->Arg(2048)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_curve_distance_serial)->Arg(256)->Arg(2048)->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();
