#pragma once

#include <array>
#include <vector>

#include "biasamp/labels.hpp"

namespace biasamp::testutil {

// Pairwise count tables for one dataset variant: ground-truth (A, T)
// counts plus the (A, T_hat) and (T, A_hat) prediction tables. Expanded
// into per-instance labels consistent with all three tables (the
// four-way coupling is unconstrained, so any consistent completion works
// for the co-occurrence metrics).
struct PairwiseCounts {
  // at[t][a], a_that[a][t_hat], t_ahat[t][a_hat]
  std::array<std::array<long, 2>, 2> at;
  std::array<std::array<long, 2>, 2> a_that;
  std::array<std::array<long, 2>, 2> t_ahat;
};

inline PairwiseCounts recidivism_unbalanced_counts() {
  PairwiseCounts c;
  c.at = {{{1229, 1402}, {874, 1773}}};
  c.a_that = {{{1165, 938}, {1546, 1629}}};
  c.t_ahat = {{{1056, 1575}, {1115, 1532}}};
  return c;
}

inline PairwiseCounts recidivism_balanced_counts() {
  PairwiseCounts c;
  c.at = {{{874, 874}, {874, 874}}};
  c.a_that = {{{1145, 603}, {948, 800}}};
  c.t_ahat = {{{1083, 665}, {896, 852}}};
  return c;
}

inline PairedDataset expand_counts(const PairwiseCounts& c) {
  std::vector<int> a, t;
  for (int av = 0; av < 2; ++av) {
    for (int tv = 0; tv < 2; ++tv) {
      for (long k = 0; k < c.at[tv][av]; ++k) {
        a.push_back(av);
        t.push_back(tv);
      }
    }
  }
  auto n = a.size();

  // t_hat: fill each A block with the (A, T_hat) counts in order
  std::vector<int> t_hat(n);
  {
    std::size_t row = 0;
    for (int av = 0; av < 2; ++av) {
      long remaining0 = c.a_that[av][0];
      long block = c.at[0][av] + c.at[1][av];
      for (long k = 0; k < block; ++k, ++row) {
        t_hat[row] = remaining0-- > 0 ? 0 : 1;
      }
    }
  }

  // a_hat: fill each T block (rows in file order) with the (T, A_hat) counts
  std::vector<int> a_hat(n);
  {
    std::array<long, 2> remaining0 = {c.t_ahat[0][0], c.t_ahat[1][0]};
    for (std::size_t row = 0; row < n; ++row) {
      int tv = t[row];
      a_hat[row] = remaining0[tv]-- > 0 ? 0 : 1;
    }
  }

  PairedDataset data;
  data.a = CategoricalLabels{std::move(a), 2};
  data.t = CategoricalLabels{std::move(t), 2};
  data.a_hat = CategoricalLabels{std::move(a_hat), 2};
  data.t_hat = CategoricalLabels{std::move(t_hat), 2};
  return data;
}

}  // namespace biasamp::testutil
