#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <utility>
#include <vector>

#include "hermit/dataset.hpp"

namespace hermit {

// Synthetic-data recipe: X ~ N(0,1) with an all-ones first column, per-task
// coefficient blocks of `sparsity` rows per component, uniform-magnitude
// signed coefficients, families sampled at their linked means.
struct SynthSpec {
  int n = 100;
  int d = 15;
  int m_gaussian = 3;
  int m_bernoulli = 10;
  int m_poisson = 2;
  int k_true = 2;
  int sparsity = 3;
  std::pair<double, double> coef_range{1.0, 3.0};
  std::pair<double, double> poisson_coef_range{0.1, 0.3};
  double bias = 1.0;
  double poisson_bias = 3.0;
  Eigen::VectorXd pi_true;  // empty = uniform
  double missing_rate = 0.0;
  std::uint64_t seed = 0;

  int m_total() const { return m_gaussian + m_bernoulli + m_poisson; }
};

struct GroundTruth {
  std::vector<Eigen::MatrixXd> beta;  // k slices d x m
  std::vector<int> delta;             // component labels
  Eigen::MatrixXd alpha;              // d x k gate (empty unless moe)
};

struct SynthData {
  Dataset data;
  GroundTruth truth;
};

// s = floor(d / (2k)), the derived sparsity used by the equal-support grids.
int derived_sparsity(int d, int k);

SynthData generate(const SynthSpec& spec);

// Fresh samples (X, memberships, targets, mask) from an existing true model;
// used for validation and test splits.
SynthData generate_with_truth(const SynthSpec& spec, const GroundTruth& truth,
                              std::uint64_t seed);

// Gate-driven memberships: alpha rows 0..gate_rows_nonzero-1 drawn N(0,1),
// delta_i ~ Multinomial(softmax(x_i alpha)).
SynthData generate_moe(const SynthSpec& spec, int gate_rows_nonzero);

// Set observed Gaussian targets of ceil(p_outlier * n) random rows to 100 and
// observed Bernoulli targets to 1; Poisson targets stay untouched.  Returns
// the contaminated rows in ascending order.
std::pair<Dataset, std::vector<int>> contaminate(const Dataset& data, double p_outlier,
                                                 std::uint64_t seed);

// Task groups sharing X, each with its own mixture structure; target blocks
// are concatenated in group order.
struct GroupedSynthData {
  Dataset data;
  std::vector<GroundTruth> truths;                 // per group
  std::vector<std::pair<int, int>> task_ranges;    // [first, last) per group
};

GroupedSynthData generate_grouped(std::vector<SynthSpec> specs, std::uint64_t seed);

GroupedSynthData generate_grouped_with_truths(std::vector<SynthSpec> specs,
                                              const std::vector<GroundTruth>& truths,
                                              std::uint64_t seed);

}  // namespace hermit
