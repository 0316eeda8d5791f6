#include <benchmark/benchmark.h>

#include "intimg/psf.hpp"
#include "intimg/reconstruction.hpp"
#include "intimg/resolution.hpp"
#include "intimg/scene.hpp"

using namespace intimg;

namespace {

OpticalSystemConfig real_virtual() {
    OpticalSystemConfig cfg;
    cfg.z_i_override_mm = 360.0;
    return cfg;
}

const ElementalImageSet& point_images() {
    static const ElementalImageSet eis =
        capture(point_source_scene(400.0), real_virtual(), CaptureSettings{100, 100, 0.1, 1}).images;
    return eis;
}

}  // namespace

static void BM_AggregateSpot(benchmark::State& state) {
    const OpticalSystemConfig cfg = real_virtual();
    const BeamParameters beam = make_beam(cfg);
    const double theta = static_cast<double>(state.range(0));
    const TiltedPlaneSpec plane{theta, 0.0, 360.0, default_analysis_grid(cfg, beam, 360.0, theta, 0.0)};
    for (auto _ : state) benchmark::DoNotOptimize(aggregate_spot(plane, cfg, beam, 1));
    state.counters["samples"] = static_cast<double>(plane.samples_x() * plane.samples_y());
}
BENCHMARK(BM_AggregateSpot)->Arg(0)->Arg(30)->Unit(benchmark::kMillisecond);

static void BM_Backprojection(benchmark::State& state) {
    const TiltedPlaneSpec plane{static_cast<double>(state.range(0)), 0.0, 400.0, {40.0, 40.0, 0.5}};
    for (auto _ : state) benchmark::DoNotOptimize(backproject_geometric(point_images(), plane, 1));
}
BENCHMARK(BM_Backprojection)->Arg(0)->Arg(30)->Unit(benchmark::kMillisecond);

static void BM_DefocusPsf(benchmark::State& state) {
    const OpticalSystemConfig cfg = real_virtual();
    const auto n = static_cast<std::size_t>(state.range(0));
    for (auto _ : state) benchmark::DoNotOptimize(defocus_psf(cfg, 400.0, 360.0, n, 10.0 / 64.0));
}
BENCHMARK(BM_DefocusPsf)->Arg(256)->Arg(1024)->Unit(benchmark::kMillisecond);

static void BM_ApplyDiffraction(benchmark::State& state) {
    const OpticalSystemConfig cfg = real_virtual();
    const TiltedPlaneSpec plane{static_cast<double>(state.range(0)), 0.0, 400.0, {40.0, 40.0, 0.5}};
    const ScalarField2D field = backproject_geometric(point_images(), plane, 1).field;
    DiffractionOptions opts;
    opts.workers = 1;
    for (auto _ : state) benchmark::DoNotOptimize(apply_diffraction(field, plane, cfg, opts));
}
BENCHMARK(BM_ApplyDiffraction)->Arg(0)->Arg(15)->Unit(benchmark::kMillisecond);
BENCHMARK_MAIN();
