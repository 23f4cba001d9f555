#pragma once

#include <Eigen/Dense>
#include <vector>

#include "hermit/expfamily.hpp"

namespace hermit {

using BoolMask = Eigen::Array<bool, Eigen::Dynamic, Eigen::Dynamic>;

// Feature matrix, mixed-type target matrix with an observed mask, and the
// per-task family descriptors.  Construction validates:
//   - every row has at least one observed target,
//   - observed Bernoulli entries are in {0,1}, Poisson entries are
//     non-negative integers,
//   - X is free of non-finite values.
class Dataset {
 public:
  Dataset() = default;
  Dataset(Eigen::MatrixXd X, Eigen::MatrixXd Y, BoolMask observed,
          std::vector<Family> tasks);
  // observed mask derived from NaN entries of Y
  Dataset(Eigen::MatrixXd X, Eigen::MatrixXd Y, std::vector<Family> tasks);

  int n() const { return static_cast<int>(X.rows()); }
  int d() const { return static_cast<int>(X.cols()); }
  int m() const { return static_cast<int>(Y.cols()); }

  Eigen::MatrixXd X;
  Eigen::MatrixXd Y;
  BoolMask observed;
  std::vector<Family> tasks;
  bool has_intercept = false;  // first column of X is all ones

  // Row indices (into X) of the samples observing each task.
  const std::vector<std::vector<int>>& task_rows() const { return task_rows_; }

 private:
  void validate_and_index();
  std::vector<std::vector<int>> task_rows_;
};

// Column subset of the targets; rows that observe none of the kept tasks are
// dropped.  Returns the kept row indices through `kept_rows` when non-null.
Dataset select_tasks(const Dataset& data, const std::vector<int>& task_cols,
                     std::vector<int>* kept_rows = nullptr);

Dataset select_rows(const Dataset& data, const std::vector<int>& rows);

std::vector<int> task_indices_of_kind(const Dataset& data, FamilyKind kind);

}  // namespace hermit
