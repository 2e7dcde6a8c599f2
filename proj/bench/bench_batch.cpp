#include <benchmark/benchmark.h>

#include "actdiag/batch.hpp"
#include "generators.hpp"

using namespace actdiag;

namespace {

struct Corpus {
  std::vector<ActivityDiagram> diagrams;
  std::vector<GradingPair> pairs;

  explicit Corpus(int pair_count) {
    testsupport::Rng rng(7);
    for (int i = 0; i < 2 * pair_count; ++i) {
      diagrams.push_back(testsupport::random_sound_diagram(rng, testsupport::uniform(rng, 8, 24)));
    }
    for (std::size_t i = 0; i + 1 < diagrams.size(); i += 2) pairs.push_back({&diagrams[i], &diagrams[i + 1]});
  }
};

const Corpus& corpus() {
  static const Corpus c(64);
  return c;
}

void BM_GradeSerial(benchmark::State& state) {
  NgramSimilarity sim;
  for (auto _ : state) benchmark::DoNotOptimize(grade_batch_serial(corpus().pairs, sim));
  state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(corpus().pairs.size()));
}

void BM_GradeParallel(benchmark::State& state) {
  NgramSimilarity sim;
  const int workers = static_cast<int>(state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(grade_batch_parallel(corpus().pairs, sim, workers));
  state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(corpus().pairs.size()));
}

}  // namespace

BENCHMARK(BM_GradeSerial)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_GradeParallel)->Arg(1)->Arg(2)->Arg(4)->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();
