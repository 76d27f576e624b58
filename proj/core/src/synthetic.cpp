#include "biasamp/synthetic.hpp"

#include <cmath>
#include <cstdio>
#include <ostream>
#include <stdexcept>

#include "biasamp/cooccurrence.hpp"
#include "biasamp/predictability.hpp"
#include "biasamp/rng.hpp"

namespace biasamp {

namespace {

constexpr double kAlphaBound = 0.25 + 1e-12;

std::vector<double> grid_alphas(const HeatmapConfig& cfg) {
  if (!(cfg.step > 0.0)) {
    throw std::invalid_argument("heatmap: step must be > 0");
  }
  auto count = static_cast<std::size_t>(
      std::llround((cfg.alpha_max - cfg.alpha_min) / cfg.step));
  if (count == 0) throw std::invalid_argument("heatmap: empty alpha range");
  std::vector<double> alphas(count);
  for (std::size_t k = 0; k < count; ++k) {
    alphas[k] = cfg.alpha_min + static_cast<double>(k) * cfg.step;
    if (std::fabs(alphas[k]) > kAlphaBound) {
      throw std::invalid_argument("heatmap: |alpha| must stay <= 0.25");
    }
  }
  return alphas;
}

// Exact integer cell values exist whenever the grid is commensurate with
// the 0.25 base probability (true for the default 0.005 step). Integer
// counts keep the co-occurrence cancellations exact.
struct RationalGrid {
  bool valid = false;
  long base_diag = 0;   // (0.25 + alpha_min) / step
  long anti_diag = 0;   // (0.25 - alpha_min) / step
  long off_diag = 0;    // 0.25 / step
};

RationalGrid rationalize(const HeatmapConfig& cfg) {
  RationalGrid r;
  double q0 = (0.25 + cfg.alpha_min) / cfg.step;
  double q1 = (0.25 - cfg.alpha_min) / cfg.step;
  double off = 0.25 / cfg.step;
  auto near_int = [](double v) {
    return std::fabs(v - std::llround(v)) < 1e-9;
  };
  if (near_int(q0) && near_int(q1) && near_int(off)) {
    r.valid = true;
    r.base_diag = std::llround(q0);
    r.anti_diag = std::llround(q1);
    r.off_diag = std::llround(off);
  }
  return r;
}

JointTable cell_joint(const RationalGrid& rational, double alpha,
                      std::size_t k) {
  if (rational.valid) {
    long c00 = rational.base_diag + static_cast<long>(k);
    long c11 = rational.anti_diag - static_cast<long>(k);
    if (c00 < 0 || c11 < 0) {
      throw std::invalid_argument("heatmap: |alpha| must stay <= 0.25");
    }
    JointTable table;
    table.task_count = 2;
    table.attribute_count = 2;
    table.kind = JointTable::Kind::Counts;
    table.cells = {static_cast<double>(c00), static_cast<double>(rational.off_diag),
                   static_cast<double>(rational.off_diag), static_cast<double>(c11)};
    return table;
  }
  return heatmap_joint(alpha);
}

double metric_on_joints(const std::string& metric_id, const JointTable& truth,
                        const JointTable& prediction, Direction direction,
                        QualityKind quality) {
  if (metric_id == "dpa") {
    return dpa_exact_from_joints(truth, prediction, direction, quality);
  }
  if (metric_id == "ba-dir") {
    return ba_directional(truth, prediction, direction).value;
  }
  if (metric_id == "multi-dir") {
    return multi_directional(truth, prediction, direction).result.value;
  }
  if (metric_id == "la") {
    return la_exact_from_joints(truth, prediction, quality);
  }
  throw std::invalid_argument("heatmap: unknown metric '" + metric_id + "'");
}

double sample_sd(const std::vector<double>& values) {
  if (values.size() < 2) return 0.0;
  double mean = 0.0;
  for (double v : values) mean += v;
  mean /= static_cast<double>(values.size());
  double acc = 0.0;
  for (double v : values) acc += (v - mean) * (v - mean);
  return std::sqrt(acc / static_cast<double>(values.size() - 1));
}

}  // namespace

JointTable heatmap_joint(double alpha) {
  if (std::fabs(alpha) > kAlphaBound) {
    throw std::invalid_argument("heatmap_joint: |alpha| must be <= 0.25");
  }
  JointTable table;
  table.task_count = 2;
  table.attribute_count = 2;
  table.kind = JointTable::Kind::Probabilities;
  table.cells = {0.25 + alpha, 0.25, 0.25, 0.25 - alpha};
  return table;
}

HeatmapGrid run_heatmap(const HeatmapConfig& cfg) {
  HeatmapGrid grid;
  grid.alphas = grid_alphas(cfg);
  auto n = grid.alphas.size();
  grid.values.assign(n * n, 0.0);

  RationalGrid rational = rationalize(cfg);
  if (cfg.mode == HeatmapMode::Exact) {
    // dataset joints vary per row, prediction joints per column
    std::vector<JointTable> joints(n);
    for (std::size_t k = 0; k < n; ++k) {
      joints[k] = cell_joint(rational, grid.alphas[k], k);
    }
    for (std::size_t d = 0; d < n; ++d) {
      for (std::size_t m = 0; m < n; ++m) {
        grid.values[d * n + m] = metric_on_joints(
            cfg.metric_id, joints[d], joints[m], cfg.direction, cfg.quality);
      }
    }
    return grid;
  }

  if (cfg.samples < 1) {
    throw std::invalid_argument("heatmap: samples must be >= 1");
  }
  for (std::size_t d = 0; d < n; ++d) {
    for (std::size_t m = 0; m < n; ++m) {
      std::uint64_t cell_seed = derive_seed(derive_seed(cfg.seed, d), m);
      Rng rng_truth(derive_seed(cell_seed, 0));
      Rng rng_pred(derive_seed(cell_seed, 1));
      auto [a_d, t_d] = sample_joint(heatmap_joint(grid.alphas[d]),
                                     static_cast<std::size_t>(cfg.samples),
                                     rng_truth);
      auto [a_m, t_m] = sample_joint(heatmap_joint(grid.alphas[m]),
                                     static_cast<std::size_t>(cfg.samples),
                                     rng_pred);
      grid.values[d * n + m] =
          metric_on_joints(cfg.metric_id, build_joint(a_d, t_d),
                           build_joint(a_m, t_m), cfg.direction, cfg.quality);
    }
  }
  return grid;
}

void write_grid_csv(const HeatmapGrid& grid, std::ostream& out) {
  char buf[64];
  out << "alpha_d\\alpha_m";
  for (double alpha : grid.alphas) {
    std::snprintf(buf, sizeof(buf), "%.17g", alpha);
    out << ',' << buf;
  }
  out << '\n';
  auto n = grid.alphas.size();
  for (std::size_t d = 0; d < n; ++d) {
    std::snprintf(buf, sizeof(buf), "%.17g", grid.alphas[d]);
    out << buf;
    for (std::size_t m = 0; m < n; ++m) {
      std::snprintf(buf, sizeof(buf), "%.17g", grid.at(d, m));
      out << ',' << buf;
    }
    out << '\n';
  }
}

void write_grid_pgm(const HeatmapGrid& grid, std::ostream& out) {
  double lo = grid.values[0];
  double hi = grid.values[0];
  for (double v : grid.values) {
    lo = std::min(lo, v);
    hi = std::max(hi, v);
  }
  auto n = grid.alphas.size();
  out << "P2\n" << n << ' ' << n << "\n255\n";
  for (std::size_t d = 0; d < n; ++d) {
    for (std::size_t m = 0; m < n; ++m) {
      int pixel = 0;
      if (hi > lo) {
        pixel = static_cast<int>(
            std::lround(255.0 * (grid.at(d, m) - lo) / (hi - lo)));
      }
      out << pixel << (m + 1 == n ? '\n' : ' ');
    }
  }
}

PolyData gen_polynomial_data(const PolySynthConfig& cfg) {
  if (cfg.samples < 1) {
    throw std::invalid_argument("poly: samples must be >= 1");
  }
  if (cfg.degree < 1) {
    throw std::invalid_argument("poly: degree must be >= 1");
  }
  std::vector<double> coeffs = cfg.coefficients;
  if (coeffs.empty()) {
    coeffs.assign(static_cast<std::size_t>(cfg.degree) + 1, 1.0);
  }
  if (coeffs.size() != static_cast<std::size_t>(cfg.degree) + 1) {
    throw std::invalid_argument("poly: need degree + 1 coefficients");
  }

  auto poly = [&coeffs](double x) {
    double acc = 0.0;
    for (std::size_t i = coeffs.size(); i-- > 0;) acc = acc * x + coeffs[i];
    return acc;
  };

  Rng rng(derive_seed(cfg.seed, 0x9017u));
  PolyData data;
  auto n = static_cast<std::size_t>(cfg.samples);
  data.a.resize(n);
  data.t.resize(n);
  data.t_hat.resize(n);
  const double sd = std::sqrt(2.0);  // variance 2
  for (std::size_t i = 0; i < n; ++i) {
    double a = 3.0 + sd * rng.next_normal();
    double eps_t = rng.next_normal();
    double eps_m = rng.next_normal();
    data.a[i] = a;
    data.t[i] = poly(a + cfg.alpha1 * eps_t);
    data.t_hat[i] = poly(a + cfg.alpha2 * eps_m);
  }
  return data;
}

RobustnessTable run_robustness(const std::vector<int>& widths,
                               const std::vector<int>& depths,
                               const PolySynthConfig& data_cfg,
                               const AttackerConfig& base) {
  if (widths.empty() || depths.empty()) {
    throw std::invalid_argument("robustness: empty sweep");
  }
  PolyData data = gen_polynomial_data(data_cfg);
  Series input = series_from(data.a);
  Series truth = series_from(data.t);
  Series predicted = series_from(data.t_hat);

  RobustnessTable table;
  std::vector<double> relative_values;
  std::vector<double> absolute_values;
  for (int depth : depths) {
    for (int width : widths) {
      AttackerConfig cfg = base;
      cfg.width = width;
      cfg.depth = depth;
      std::uint64_t seed = derive_seed(
          base.seed, static_cast<std::uint64_t>(width) * 1009u +
                         static_cast<std::uint64_t>(depth));
      RobustnessRow row;
      row.width = width;
      row.depth = depth;
      row.psi_d = predictability_quality(input, truth, cfg,
                                         QualityKind::InverseRmse, seed);
      row.psi_m = predictability_quality(input, predicted, cfg,
                                         QualityKind::InverseRmse, seed);
      row.relative = dpa_formula(row.psi_m, row.psi_d);
      row.absolute = la_formula(row.psi_m, row.psi_d);
      relative_values.push_back(row.relative);
      absolute_values.push_back(row.absolute);
      table.rows.push_back(row);
    }
  }
  table.relative_sd = sample_sd(relative_values);
  table.absolute_sd = sample_sd(absolute_values);
  return table;
}

std::vector<CurvePoint> relative_curves(const std::vector<double>& psi_d_values,
                                        double psi_m_min, double psi_m_max,
                                        double step) {
  if (!(step > 0.0) || psi_m_max < psi_m_min) {
    throw std::invalid_argument("curves: bad psi_m range");
  }
  for (double d : psi_d_values) {
    if (d < 0.0) throw std::invalid_argument("curves: psi_d must be >= 0");
  }
  auto count = static_cast<std::size_t>(
                   std::floor((psi_m_max - psi_m_min) / step + 1e-9)) + 1;
  std::vector<CurvePoint> points;
  points.reserve(psi_d_values.size() * count);
  for (double psi_d : psi_d_values) {
    for (std::size_t k = 0; k < count; ++k) {
      CurvePoint p;
      p.psi_d = psi_d;
      p.psi_m = psi_m_min + static_cast<double>(k) * step;
      p.dpa = dpa_formula(p.psi_m, psi_d);
      p.la = la_formula(p.psi_m, psi_d);
      points.push_back(p);
    }
  }
  return points;
}

}  // namespace biasamp
