#include <doctest.h>

#include <cmath>
#include <stdexcept>

#include "biasamp/predictability.hpp"
#include "biasamp/rng.hpp"
#include "biasamp/synthetic.hpp"

using namespace biasamp;

namespace {

// Small correlated dataset with imperfect predictions; cheap enough for
// trained-mode runs inside unit tests.
PairedDataset stochastic_dataset(std::size_t n, std::uint64_t seed) {
  Rng rng(seed);
  PairedDataset data;
  data.a = CategoricalLabels{std::vector<int>(n), 2};
  data.t = CategoricalLabels{std::vector<int>(n), 2};
  data.a_hat = CategoricalLabels{std::vector<int>(n), 2};
  data.t_hat = CategoricalLabels{std::vector<int>(n), 2};
  for (std::size_t i = 0; i < n; ++i) {
    int a = static_cast<int>(rng.below(2));
    int t = rng.below(4) == 0 ? 1 - a : a;
    data.a.codes[i] = a;
    data.t.codes[i] = t;
    data.a_hat->codes[i] = rng.below(5) == 0 ? 1 - a : a;
    data.t_hat->codes[i] = rng.below(3) == 0 ? a : t;
  }
  return data;
}

DpaConfig fast_config() {
  DpaConfig cfg;
  cfg.attacker.depth = 1;
  cfg.attacker.width = 4;
  cfg.attacker.epochs = 15;
  cfg.attacker.batch_size = 32;
  cfg.attacker.learning_rate = 0.01;
  cfg.quality = QualityKind::Accuracy;
  cfg.iterations = 6;
  cfg.master_seed = 1234;
  return cfg;
}

}  // namespace

TEST_CASE("equalize_accuracy flips exactly the required count") {
  auto labels = make_labels({0, 1, 0, 1, 0, 1, 0, 1, 0, 1}, 2);

  SUBCASE("target 1.0 leaves labels unchanged") {
    auto out = equalize_accuracy(labels, 1.0, 99);
    CHECK(out.codes == labels.codes);
  }
  SUBCASE("target 0.8 on n=10 complements exactly 2 positions") {
    auto out = equalize_accuracy(labels, 0.8, 99);
    int changed = 0;
    for (std::size_t i = 0; i < labels.codes.size(); ++i) {
      if (out.codes[i] != labels.codes[i]) ++changed;
    }
    CHECK(changed == 2);
    CHECK(agreement(out, labels) == 0.8);
  }
  SUBCASE("target 0.0 complements every binary label") {
    auto out = equalize_accuracy(labels, 0.0, 99);
    for (std::size_t i = 0; i < labels.codes.size(); ++i) {
      CHECK(out.codes[i] == 1 - labels.codes[i]);
    }
  }
  SUBCASE("single-class labels cannot be flipped") {
    CategoricalLabels degenerate{{0, 0, 0}, 1};
    CHECK_THROWS_AS(equalize_accuracy(degenerate, 0.5, 1), std::invalid_argument);
  }
  SUBCASE("out-of-range target rejected") {
    CHECK_THROWS_AS(equalize_accuracy(labels, 1.5, 1), std::invalid_argument);
  }
}

TEST_CASE("equalized agreement is exactly round(a*n)/n across a sweep") {
  Rng rng(55);
  for (std::size_t n : {3u, 7u, 10u, 33u, 100u, 257u}) {
    CategoricalLabels labels{std::vector<int>(n), 3};
    for (std::size_t i = 0; i < n; ++i) {
      labels.codes[i] = static_cast<int>(rng.below(3));
    }
    for (double target : {0.0, 0.05, 0.25, 0.5, 0.66, 0.75, 0.9, 1.0}) {
      auto out = equalize_accuracy(labels, target, rng.next_u64());
      double expected = std::llround(target * static_cast<double>(n)) /
                        static_cast<double>(n);
      CHECK(agreement(out, labels) == expected);
      // flipped positions always hold a different class
      for (std::size_t i = 0; i < n; ++i) {
        CHECK(out.codes[i] >= 0);
        CHECK(out.codes[i] < 3);
      }
    }
  }
}

TEST_CASE("amplification formulas: bounds, zero case, and the two-scenario contrast") {
  CHECK(dpa_formula(1.0, 1.0) == 0.0);
  CHECK(dpa_formula(0.0, 0.0) == 0.0);
  CHECK(la_formula(1.0, 1.0) == 0.0);
  CHECK(dpa_formula(0.2, 0.1) == doctest::Approx(1.0 / 3.0).epsilon(1e-12));

  // same absolute change, very different relative change
  double la1 = la_formula(0.05, 0.0);
  double la2 = la_formula(0.95, 0.9);
  CHECK(la1 == doctest::Approx(0.05).epsilon(1e-12));
  CHECK(la2 == doctest::Approx(0.05).epsilon(1e-12));
  CHECK(dpa_formula(0.05, 0.0) == 1.0);
  CHECK(dpa_formula(0.95, 0.9) == doctest::Approx(0.05 / 1.85).epsilon(1e-12));

  Rng rng(31);
  for (int i = 0; i < 1000; ++i) {
    double m = rng.next_double() * 10.0;
    double d = rng.next_double() * 10.0;
    double v = dpa_formula(m, d);
    CHECK(v >= -1.0);
    CHECK(v <= 1.0);
  }
}

TEST_CASE("numeric slope of dpa at psi_m = psi_d is 1/(2 psi_d)") {
  const double h = 1e-5;
  for (double psi_d : {0.1, 1.0, 2.0}) {
    double slope =
        (dpa_formula(psi_d + h, psi_d) - dpa_formula(psi_d - h, psi_d)) / (2 * h);
    CHECK(std::fabs(slope - 1.0 / (2.0 * psi_d)) < 1e-6);
    double la_slope =
        (la_formula(psi_d + h, psi_d) - la_formula(psi_d - h, psi_d)) / (2 * h);
    CHECK(std::fabs(la_slope - 1.0) < 1e-6);
  }
}

TEST_CASE("exact-mode biases match the oracle hand values") {
  PairedDataset data;
  data.a = CategoricalLabels{{0, 1, 0, 1}, 2};
  data.t = CategoricalLabels{{0, 0, 1, 1}, 2};
  data.t_hat = CategoricalLabels{{0, 0, 0, 1}, 2};

  DpaConfig cfg;
  cfg.mode = DpaMode::Exact;
  cfg.equalize = false;
  cfg.quality = QualityKind::Accuracy;

  // uniform ground truth joint: no predictability beyond chance
  CHECK(dataset_bias(data, Direction::AtoT, cfg) == 0.5);

  // point-mass predictions
  PairedDataset point = data;
  point.t_hat = CategoricalLabels{{0, 0, 0, 0}, 2};
  CHECK(model_bias(point, Direction::AtoT, cfg) == 1.0);
}

TEST_CASE("exact dpa and la on the tilted pair of joints") {
  auto balanced = heatmap_joint(0.0);
  auto tilted = heatmap_joint(0.25);
  double value = dpa_exact_from_joints(balanced, tilted, Direction::AtoT,
                                       QualityKind::Accuracy);
  CHECK(value == doctest::Approx(0.2).epsilon(1e-12));

  double la_value =
      la_exact_from_joints(balanced, tilted, QualityKind::Accuracy);
  CHECK(la_value == doctest::Approx(0.25).epsilon(1e-12));
}

TEST_CASE("exact mode refuses equalization") {
  DpaConfig cfg;
  cfg.mode = DpaMode::Exact;
  cfg.equalize = true;
  CHECK_THROWS_AS(validate_config(cfg), std::invalid_argument);
  cfg.equalize = false;
  cfg.iterations = 0;
  CHECK_THROWS_AS(validate_config(cfg), std::invalid_argument);
}

TEST_CASE("identical predictions with shared seeds give exactly zero") {
  auto data = stochastic_dataset(160, 42);
  data.a_hat = data.a;
  data.t_hat = data.t;
  auto cfg = fast_config();
  cfg.equalize = false;

  for (auto dir : {Direction::AtoT, Direction::TtoA}) {
    auto r = dpa(data, dir, cfg);
    CHECK(r.value == 0.0);
    CHECK(r.ci_low == 0.0);
    CHECK(r.ci_high == 0.0);
    CHECK(r.iterations == cfg.iterations);
  }
  auto la = leakage_amplification(data, cfg);
  CHECK(la.value == 0.0);
}

TEST_CASE("swapping truth and prediction channels negates dpa and la exactly") {
  auto data = stochastic_dataset(200, 7);
  auto cfg = fast_config();
  cfg.equalize = false;
  cfg.iterations = 4;

  SUBCASE("a_to_t") {
    PairedDataset swapped = data;
    std::swap(swapped.t.codes, swapped.t_hat->codes);
    auto forward = dpa(data, Direction::AtoT, cfg);
    auto backward = dpa(swapped, Direction::AtoT, cfg);
    CHECK(forward.value == -backward.value);
    CHECK(forward.ci_low == -backward.ci_high);
  }
  SUBCASE("t_to_a") {
    PairedDataset swapped = data;
    std::swap(swapped.a.codes, swapped.a_hat->codes);
    auto forward = dpa(data, Direction::TtoA, cfg);
    auto backward = dpa(swapped, Direction::TtoA, cfg);
    CHECK(forward.value == -backward.value);
  }
  SUBCASE("la") {
    PairedDataset swapped = data;
    std::swap(swapped.t.codes, swapped.t_hat->codes);
    auto forward = leakage_amplification(data, cfg);
    auto backward = leakage_amplification(swapped, cfg);
    CHECK(forward.value == -backward.value);
  }
  SUBCASE("exact mode") {
    auto tilted = heatmap_joint(0.15);
    auto flatter = heatmap_joint(-0.05);
    double fwd = dpa_exact_from_joints(flatter, tilted, Direction::AtoT,
                                       QualityKind::Accuracy);
    double bwd = dpa_exact_from_joints(tilted, flatter, Direction::AtoT,
                                       QualityKind::Accuracy);
    CHECK(fwd == -bwd);
  }
}

TEST_CASE("dpa is bit-reproducible and direction channels are enforced") {
  auto data = stochastic_dataset(150, 99);
  auto cfg = fast_config();
  auto first = dpa(data, Direction::AtoT, cfg);
  auto second = dpa(data, Direction::AtoT, cfg);
  CHECK(first.value == second.value);
  CHECK(first.ci_low == second.ci_low);
  CHECK(first.ci_high == second.ci_high);

  PairedDataset missing = data;
  missing.t_hat.reset();
  CHECK_THROWS_WITH_AS(dpa(missing, Direction::AtoT, cfg) /* t_hat gone */,
                       doctest::Contains("t_hat"), std::invalid_argument);
  missing = data;
  missing.a_hat.reset();
  CHECK_THROWS_WITH_AS(dpa(missing, Direction::TtoA, cfg),
                       doctest::Contains("a_hat"), std::invalid_argument);
  missing = data;
  missing.t_hat.reset();
  CHECK_THROWS_AS(leakage_amplification(missing, cfg), std::invalid_argument);
}

TEST_CASE("confidence interval narrows with more iterations") {
  auto data = stochastic_dataset(120, 2025);
  auto cfg = fast_config();
  cfg.equalize = true;
  cfg.attacker.epochs = 8;

  cfg.iterations = 8;
  auto wide = dpa(data, Direction::AtoT, cfg);
  cfg.iterations = 64;
  auto narrow = dpa(data, Direction::AtoT, cfg);

  double wide_width = wide.ci_high - wide.ci_low;
  double narrow_width = narrow.ci_high - narrow.ci_low;
  CHECK(wide_width > 0.0);
  CHECK(narrow_width < wide_width);
}

TEST_CASE("dpa values stay within [-1, 1] on trained runs") {
  auto data = stochastic_dataset(140, 4);
  auto cfg = fast_config();
  cfg.quality = QualityKind::InverseCrossEntropy;
  cfg.iterations = 5;
  for (auto dir : {Direction::AtoT, Direction::TtoA}) {
    auto r = dpa(data, dir, cfg);
    CHECK(r.value >= -1.0);
    CHECK(r.value <= 1.0);
  }
}

TEST_CASE("exact-mode predictability rises with the joint tilt") {
  DpaConfig cfg;
  cfg.mode = DpaMode::Exact;
  cfg.equalize = false;
  cfg.quality = QualityKind::Accuracy;

  double previous = -1.0;
  for (double alpha : {0.0, 0.05, 0.1, 0.2, 0.25}) {
    double psi = bayes_optimal_quality(heatmap_joint(alpha), Direction::AtoT,
                                       QualityKind::Accuracy);
    CHECK(psi == doctest::Approx(0.5 + alpha).epsilon(1e-12));
    CHECK(psi > previous);
    previous = psi;
    // negative tilt is symmetric
    CHECK(bayes_optimal_quality(heatmap_joint(-alpha), Direction::AtoT,
                                QualityKind::Accuracy) ==
          doctest::Approx(psi).epsilon(1e-15));
  }
}
