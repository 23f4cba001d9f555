#include "hermit/dataset.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace hermit {

Dataset::Dataset(Eigen::MatrixXd X_in, Eigen::MatrixXd Y_in, BoolMask observed_in,
                 std::vector<Family> tasks_in)
    : X(std::move(X_in)),
      Y(std::move(Y_in)),
      observed(std::move(observed_in)),
      tasks(std::move(tasks_in)) {
  validate_and_index();
}

Dataset::Dataset(Eigen::MatrixXd X_in, Eigen::MatrixXd Y_in, std::vector<Family> tasks_in)
    : X(std::move(X_in)), Y(std::move(Y_in)), tasks(std::move(tasks_in)) {
  observed = Y.array().unaryExpr([](double v) { return !std::isnan(v); });
  validate_and_index();
}

void Dataset::validate_and_index() {
  const int nrows = static_cast<int>(X.rows());
  const int ncols = static_cast<int>(Y.cols());
  if (Y.rows() != nrows) throw std::invalid_argument("X and Y row counts differ");
  if (observed.rows() != nrows || observed.cols() != ncols)
    throw std::invalid_argument("observed mask shape mismatch");
  if (static_cast<int>(tasks.size()) != ncols)
    throw std::invalid_argument("task list length != number of target columns");
  if (!X.allFinite()) throw std::invalid_argument("X contains non-finite values");

  task_rows_.assign(ncols, {});
  for (int i = 0; i < nrows; ++i) {
    bool any = false;
    for (int j = 0; j < ncols; ++j) {
      if (!observed(i, j)) continue;
      any = true;
      const double y = Y(i, j);
      if (!in_support(tasks[j], y))
        throw std::invalid_argument("target (" + std::to_string(i) + "," +
                                    std::to_string(j) + ") outside family support");
      task_rows_[j].push_back(i);
    }
    if (!any)
      throw std::invalid_argument("row " + std::to_string(i) +
                                  " has no observed target");
  }

  has_intercept = X.cols() > 0 && (X.col(0).array() == 1.0).all();
}

Dataset select_tasks(const Dataset& data, const std::vector<int>& task_cols,
                     std::vector<int>* kept_rows) {
  const int m_sub = static_cast<int>(task_cols.size());
  for (int j : task_cols)
    if (j < 0 || j >= data.m()) throw std::invalid_argument("task index out of range");

  std::vector<int> rows;
  for (int i = 0; i < data.n(); ++i) {
    bool any = false;
    for (int j : task_cols) any = any || data.observed(i, j);
    if (any) rows.push_back(i);
  }
  if (rows.empty()) throw std::invalid_argument("no rows observe the selected tasks");

  const int n_sub = static_cast<int>(rows.size());
  Eigen::MatrixXd X(n_sub, data.d()), Y(n_sub, m_sub);
  BoolMask obs(n_sub, m_sub);
  std::vector<Family> tasks(m_sub);
  for (int jj = 0; jj < m_sub; ++jj) tasks[jj] = data.tasks[task_cols[jj]];
  for (int ii = 0; ii < n_sub; ++ii) {
    X.row(ii) = data.X.row(rows[ii]);
    for (int jj = 0; jj < m_sub; ++jj) {
      Y(ii, jj) = data.Y(rows[ii], task_cols[jj]);
      obs(ii, jj) = data.observed(rows[ii], task_cols[jj]);
    }
  }
  if (kept_rows) *kept_rows = rows;
  return Dataset(std::move(X), std::move(Y), std::move(obs), std::move(tasks));
}

Dataset select_rows(const Dataset& data, const std::vector<int>& rows) {
  const int n_sub = static_cast<int>(rows.size());
  if (n_sub == 0) throw std::invalid_argument("empty row selection");
  Eigen::MatrixXd X(n_sub, data.d()), Y(n_sub, data.m());
  BoolMask obs(n_sub, data.m());
  for (int ii = 0; ii < n_sub; ++ii) {
    const int i = rows[ii];
    if (i < 0 || i >= data.n()) throw std::invalid_argument("row index out of range");
    X.row(ii) = data.X.row(i);
    Y.row(ii) = data.Y.row(i);
    for (int j = 0; j < data.m(); ++j) obs(ii, j) = data.observed(i, j);
  }
  return Dataset(std::move(X), std::move(Y), std::move(obs), data.tasks);
}

std::vector<int> task_indices_of_kind(const Dataset& data, FamilyKind kind) {
  std::vector<int> out;
  for (int j = 0; j < data.m(); ++j)
    if (data.tasks[j].kind == kind) out.push_back(j);
  return out;
}

}  // namespace hermit
