// Serial reference against the OpenMP kernels on identical inputs.
#include <benchmark/benchmark.h>

#include "wsal/kernels.hpp"
#include "wsal/world.hpp"

namespace {

using wsal::kernels::Backend;

struct Inputs {
  wsal::World world;
  std::vector<wsal::Point> xs;
  std::vector<double> p;
  std::vector<std::uint32_t> bins;

  explicit Inputs(std::size_t n) : world(wsal::InstanceSpec{}) {
    wsal::rng::Engine e(7);
    for (std::size_t i = 0; i < n; ++i) {
      xs.push_back(world.draw_point(e));
      p.push_back(world.strong_probability(xs.back()));
      bins.push_back(static_cast<std::uint32_t>(xs.back().x * 256));
    }
  }
};

const Inputs& inputs() {
  static Inputs in(1 << 22);
  return in;
}

void BM_PairedErrorSums(benchmark::State& state) {
  const auto& in = inputs();
  const auto backend = static_cast<Backend>(state.range(0));
  const wsal::Classifier h = wsal::ThresholdClassifier{0.48, 1};
  for (auto _ : state) {
    benchmark::DoNotOptimize(wsal::kernels::paired_error_sums(h, in.world.best_in_class(), in.xs, in.p, backend));
  }
  state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(in.xs.size()));
}

void BM_BinSums(benchmark::State& state) {
  const auto& in = inputs();
  const auto backend = static_cast<Backend>(state.range(0));
  std::vector<double> out;
  for (auto _ : state) {
    wsal::kernels::bin_sums(in.bins, in.p, 256, out, backend);
    benchmark::DoNotOptimize(out.data());
  }
  state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(in.bins.size()));
}

void BM_RegionMask(benchmark::State& state) {
  const auto& in = inputs();
  const auto backend = static_cast<Backend>(state.range(0));
  wsal::LabeledSet s(1);
  wsal::rng::Engine e(11);
  for (int i = 0; i < 100000; ++i) {
    const double x = wsal::rng::uniform01(e);
    s.push_back(wsal::Point::line(x), x >= 0.5 ? wsal::Label::positive : wsal::Label::negative);
  }
  const auto region = wsal::ErmIndex(wsal::ClassId::threshold, s).region(wsal::Fraction(1, 8));
  std::vector<std::uint8_t> mask;
  for (auto _ : state) {
    wsal::kernels::region_mask(region, in.xs, mask, backend);
    benchmark::DoNotOptimize(mask.data());
  }
  state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(in.xs.size()));
}

}  // namespace

BENCHMARK(BM_PairedErrorSums)->Arg(0)->Arg(1)->ArgName("omp")->Unit(benchmark::kMillisecond);
BENCHMARK(BM_BinSums)->Arg(0)->Arg(1)->ArgName("omp")->Unit(benchmark::kMillisecond);
BENCHMARK(BM_RegionMask)->Arg(0)->Arg(1)->ArgName("omp")->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();
