#include <benchmark/benchmark.h>

#include "biasamp/attacker.hpp"
#include "biasamp/cooccurrence.hpp"
#include "biasamp/predictability.hpp"
#include "biasamp/rng.hpp"
#include "biasamp/synthetic.hpp"
#include "biasamp/tree.hpp"

using namespace biasamp;

namespace {

PairedDataset sampled_dataset(std::size_t n, double alpha_d, double alpha_m,
                              std::uint64_t seed) {
  Rng truth_rng(derive_seed(seed, 0));
  Rng pred_rng(derive_seed(seed, 1));
  auto [a, t] = sample_joint(heatmap_joint(alpha_d), n, truth_rng);
  auto [a_hat, t_hat] = sample_joint(heatmap_joint(alpha_m), n, pred_rng);
  PairedDataset data;
  data.a = std::move(a);
  data.t = std::move(t);
  data.a_hat = std::move(a_hat);
  data.t_hat = std::move(t_hat);
  return data;
}

void BM_BuildJoint(benchmark::State& state) {
  auto data = sampled_dataset(static_cast<std::size_t>(state.range(0)), 0.1,
                              0.2, 7);
  for (auto _ : state) {
    benchmark::DoNotOptimize(build_joint(data.a, data.t));
  }
}
BENCHMARK(BM_BuildJoint)->Arg(1000)->Arg(100000);

void BM_BaDirectional(benchmark::State& state) {
  auto data = sampled_dataset(static_cast<std::size_t>(state.range(0)), 0.1,
                              0.2, 7);
  for (auto _ : state) {
    benchmark::DoNotOptimize(ba_directional(data, Direction::AtoT).value);
  }
}
BENCHMARK(BM_BaDirectional)->Arg(5000)->Arg(100000);

void BM_ExactHeatmapCell(benchmark::State& state) {
  auto truth = heatmap_joint(0.05);
  auto prediction = heatmap_joint(-0.2);
  for (auto _ : state) {
    benchmark::DoNotOptimize(dpa_exact_from_joints(
        truth, prediction, Direction::AtoT, QualityKind::Accuracy));
  }
}
BENCHMARK(BM_ExactHeatmapCell);

void BM_AttackerEpoch(benchmark::State& state) {
  auto data = sampled_dataset(2000, 0.1, 0.2, 11);
  Series input = series_from(data.a);
  Series target = series_from(data.t);
  AttackerConfig cfg;
  cfg.width = static_cast<int>(state.range(0));
  cfg.epochs = 1;
  cfg.seed = 3;
  for (auto _ : state) {
    Attacker net = init_attacker(cfg, input, target);
    train_attacker(net, input, target, cfg);
    benchmark::DoNotOptimize(net.parameters().data());
  }
}
BENCHMARK(BM_AttackerEpoch)->Arg(16)->Arg(64);

void BM_TreeTrain(benchmark::State& state) {
  Rng rng(21);
  auto n = static_cast<std::size_t>(state.range(0));
  FeatureMatrix x;
  x.rows = n;
  x.cols = 5;
  x.feature_names = {"f0", "f1", "f2", "f3", "f4"};
  CategoricalLabels y{std::vector<int>(n), 2};
  for (std::size_t i = 0; i < n; ++i) {
    double score = 0.0;
    for (std::size_t f = 0; f < 5; ++f) {
      double v = rng.next_normal();
      x.values.push_back(v);
      score += v;
    }
    y.codes[i] = score > 0 ? 1 : 0;
  }
  for (auto _ : state) {
    benchmark::DoNotOptimize(train_tree(x, y, {5, 8}));
  }
}
BENCHMARK(BM_TreeTrain)->Arg(1000)->Arg(5000);

void BM_EqualizeAccuracy(benchmark::State& state) {
  auto data = sampled_dataset(static_cast<std::size_t>(state.range(0)), 0.1,
                              0.2, 5);
  std::uint64_t seed = 0;
  for (auto _ : state) {
    benchmark::DoNotOptimize(equalize_accuracy(data.t, 0.7, ++seed));
  }
}
BENCHMARK(BM_EqualizeAccuracy)->Arg(100000);

}  // namespace

BENCHMARK_MAIN();
