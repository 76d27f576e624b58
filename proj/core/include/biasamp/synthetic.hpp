#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "biasamp/attacker.hpp"
#include "biasamp/joint.hpp"

namespace biasamp {

/// 2x2 joint with P(T=0,A=0) = 0.25 + alpha, P(T=1,A=1) = 0.25 - alpha and
/// 0.25 on the off-diagonal. alpha = 0 is the balanced table; |alpha| must
/// stay <= 0.25 so every probability lies in [0, 0.5].
JointTable heatmap_joint(double alpha);

enum class HeatmapMode { Exact, Sampled };

struct HeatmapConfig {
  double alpha_min = -0.25;
  double alpha_max = 0.25;
  double step = 0.005;  // inclusive start, exclusive end: 100 cells/axis
  std::string metric_id = "dpa";  // dpa | ba-dir | multi-dir | la
  Direction direction = Direction::AtoT;
  QualityKind quality = QualityKind::Accuracy;
  HeatmapMode mode = HeatmapMode::Exact;
  int samples = 10000;        // sampled mode: instances per joint per cell
  std::uint64_t seed = 42;    // sampled mode: master seed
};

/// Metric values over the (alpha_d, alpha_m) grid; rows index alpha_d.
struct HeatmapGrid {
  std::vector<double> alphas;
  std::vector<double> values;  // row-major, rows.size() == alphas.size()

  std::size_t size() const { return alphas.size(); }
  double at(std::size_t d, std::size_t m) const {
    return values[d * alphas.size() + m];
  }
};

/// Evaluates the configured metric for every grid cell: the row's alpha
/// builds the dataset joint, the column's alpha the prediction joint.
/// Exact mode works on the joints directly (Bayes oracle for
/// predictability metrics, conditionals for co-occurrence metrics);
/// sampled mode draws `samples` instances from each joint first, with
/// per-cell seeds derived from the master seed so evaluation order is
/// irrelevant.
HeatmapGrid run_heatmap(const HeatmapConfig& cfg);

/// First column alpha_d, header row alpha_m, one value per cell.
void write_grid_csv(const HeatmapGrid& grid, std::ostream& out);

/// ASCII P2 PGM, 8-bit, min/max normalized (a constant grid renders as 0).
/// Rows are alpha_d ascending top to bottom, columns alpha_m ascending.
void write_grid_pgm(const HeatmapGrid& grid, std::ostream& out);

/// Scalar synthetic family: A ~ Normal(3, variance 2),
/// T = poly(A + alpha1 * eps), T_hat = poly(A + alpha2 * eps') with
/// independent standard-normal noise draws.
struct PolySynthConfig {
  int degree = 2;
  double alpha1 = 2.0;
  double alpha2 = 1.0;
  /// Polynomial coefficients, lowest order first; empty means all ones
  /// (x^2 + x + 1 at the default degree).
  std::vector<double> coefficients;
  int samples = 2000;
  std::uint64_t seed = 42;
};

struct PolyData {
  std::vector<double> a;
  std::vector<double> t;
  std::vector<double> t_hat;
};

PolyData gen_polynomial_data(const PolySynthConfig& cfg);

/// One attacker shape of the robustness sweep: scalar-head attacker with
/// inverse-RMSE quality, trained to predict t and t_hat from a; relative
/// amplification is the normalized difference, absolute the raw one.
struct RobustnessRow {
  int width = 0;
  int depth = 0;
  double psi_d = 0.0;
  double psi_m = 0.0;
  double relative = 0.0;
  double absolute = 0.0;
};

struct RobustnessTable {
  std::vector<RobustnessRow> rows;
  double relative_sd = 0.0;
  double absolute_sd = 0.0;
};

RobustnessTable run_robustness(const std::vector<int>& widths,
                               const std::vector<int>& depths,
                               const PolySynthConfig& data_cfg,
                               const AttackerConfig& base);

/// Pure formula evaluation of both amplification flavors across a model
/// bias range, one curve per dataset bias value.
struct CurvePoint {
  double psi_d = 0.0;
  double psi_m = 0.0;
  double dpa = 0.0;
  double la = 0.0;
};

std::vector<CurvePoint> relative_curves(const std::vector<double>& psi_d_values,
                                        double psi_m_min, double psi_m_max,
                                        double step);

}  // namespace biasamp
