#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "hermit/dataset.hpp"
#include "hermit/model.hpp"
#include "hermit/penalty.hpp"
#include "hermit/solver.hpp"

namespace hermit {

// Concordant score per task: negative symmetrized KL divergence per
// contributing sample between the full-target posteriors and the single-task
// posteriors.  Tasks observed nowhere come back missing.
std::vector<std::optional<double>> concordant_scores(const MixtureModel& model,
                                                     const Dataset& data);

// Suggested 1-D anomaly cut: boundary of the best two-means split of the
// scores (midpoint between the two cluster means); missing when all scores
// coincide.
std::optional<double> two_means_split(const std::vector<double>& scores);

struct TaskSimilarity {
  Eigen::MatrixXd matrix;  // m x m, symmetric, unit diagonal
  int per_task_k = 20;
  std::vector<std::string> warnings;
};

struct TaskSimilarityConfig {
  int per_task_k = 20;
  PenaltyConfig pen;              // per-task fits use the entrywise penalty
  FitConfig fit;
  std::vector<double> lambda_grid;  // tuned per task on validation likelihood
  int min_samples_factor = 10;      // each task needs >= factor * per_task_k rows
  int jobs = 1;
};

// Independent single-task mixture fits with a shared pre-fixed k, then
// pairwise NMI of their posteriors over the training samples.
TaskSimilarity task_similarity(const Dataset& train, const Dataset& valid,
                               const TaskSimilarityConfig& cfg);

// Classical kernel embedding: double-center the similarity matrix, keep the
// top eigenpairs (eigenvalues clipped at zero), scale eigenvectors by
// sqrt(eigenvalue).  Each eigenvector's largest-magnitude entry is made
// positive, so the embedding is deterministic.
Eigen::MatrixXd kernel_pca(const TaskSimilarity& sim, int dims);

// k-means with 20 seeded restarts; best within-cluster sum of squares wins.
std::vector<int> cluster_tasks(const Eigen::MatrixXd& embedding, int groups,
                               std::uint64_t seed);

}  // namespace hermit
