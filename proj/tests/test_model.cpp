#include <doctest.h>

#include <algorithm>
#include <cmath>

#include "hermit/model.hpp"
#include "test_helpers.hpp"

using namespace hermit;
using hermit::testing::direct_log_likelihood;
using hermit::testing::mixed_families;
using hermit::testing::random_dataset;
using hermit::testing::random_model;
using Eigen::MatrixXd;
using Eigen::VectorXd;

TEST_CASE("dataset construction validates invariants") {
  auto fams = mixed_families(1, 1, 0);
  MatrixXd X(2, 2);
  X << 1, 0.5, 1, -0.25;
  MatrixXd Y(2, 2);
  Y << 0.1, 1.0, -0.2, 0.0;
  BoolMask obs = BoolMask::Constant(2, 2, true);
  CHECK_NOTHROW(Dataset(X, Y, obs, fams));

  BoolMask empty_row = obs;
  empty_row.row(1).setConstant(false);
  CHECK_THROWS(Dataset(X, Y, empty_row, fams));

  MatrixXd bad = Y;
  bad(0, 1) = 0.5;  // not a Bernoulli value
  CHECK_THROWS(Dataset(X, bad, obs, fams));

  MatrixXd badx = X;
  badx(0, 0) = std::numeric_limits<double>::quiet_NaN();
  CHECK_THROWS(Dataset(badx, Y, obs, fams));

  CHECK(Dataset(X, Y, obs, fams).has_intercept);
}

TEST_CASE("natural_params matches the triple loop") {
  auto fams = mixed_families(2, 1, 0);
  const Dataset data = random_dataset(5, fams, 3, 21);
  MixtureModel model = random_model(3, fams, 2, 33);

  SUBCASE("zero beta gives zeros") {
    for (auto& b : model.beta) b.setZero();
    const auto nat = natural_params(model, data.X);
    for (const auto& slice : nat) CHECK(slice.cwiseAbs().maxCoeff() == 0.0);
  }

  SUBCASE("random case") {
    const auto nat = natural_params(model, data.X);
    for (int r = 0; r < model.k(); ++r)
      for (int i = 0; i < data.n(); ++i)
        for (int j = 0; j < data.m(); ++j) {
          double expect = 0.0;
          for (int l = 0; l < data.d(); ++l)
            expect += data.X(i, l) * model.beta[r](l, j);
          CHECK(nat[r](i, j) == doctest::Approx(expect).epsilon(1e-14));
        }
  }

  SUBCASE("scalar product") {
    MixtureModel tiny;
    tiny.families = {Family{FamilyKind::Gaussian, 1.0}};
    tiny.beta = {(MatrixXd(1, 1) << 3.0).finished()};
    tiny.pi = VectorXd::Ones(1);
    MatrixXd X(1, 1);
    X << 2.0;
    CHECK(natural_params(tiny, X)[0](0, 0) == doctest::Approx(6.0));
  }
}

TEST_CASE("log_likelihood agrees with direct evaluation and special cases") {
  auto fams = mixed_families(1, 1, 1);
  const Dataset data = random_dataset(12, fams, 3, 5, 0.3);

  SUBCASE("k=1 equals the sum of observed log densities") {
    MixtureModel model = random_model(3, fams, 1, 9);
    const auto nat = natural_params(model, data.X);
    double expect = 0.0;
    for (int i = 0; i < data.n(); ++i)
      for (int j = 0; j < data.m(); ++j)
        if (data.observed(i, j))
          expect += log_density(fams[j], data.Y(i, j), nat[0](i, j));
    CHECK(log_likelihood(model, data) == doctest::Approx(expect).epsilon(1e-12));
  }

  SUBCASE("duplicate components match k=1") {
    MixtureModel one = random_model(3, fams, 1, 10);
    MixtureModel two = one;
    two.beta = {one.beta[0], one.beta[0]};
    two.pi = (VectorXd(2) << 0.5, 0.5).finished();
    CHECK(log_likelihood(two, data) ==
          doctest::Approx(log_likelihood(one, data)).epsilon(1e-12));
  }

  SUBCASE("random case matches the direct-density oracle") {
    MixtureModel model = random_model(3, fams, 2, 14);
    CHECK(log_likelihood(model, data) ==
          doctest::Approx(direct_log_likelihood(model, data)).epsilon(1e-9));
  }

  SUBCASE("invariant under joint component permutation") {
    MixtureModel model = random_model(3, fams, 3, 15);
    MixtureModel perm = model;
    std::swap(perm.beta[0], perm.beta[2]);
    std::swap(perm.pi(0), perm.pi(2));
    CHECK(log_likelihood(model, data) == log_likelihood(perm, data));
  }

  SUBCASE("masking all but one column reduces to the single-task likelihood") {
    MixtureModel model = random_model(3, fams, 2, 16);
    const int keep = 1;
    BoolMask obs = data.observed;
    for (int j = 0; j < data.m(); ++j)
      if (j != keep) obs.col(j).setConstant(false);
    std::vector<int> rows;
    for (int i = 0; i < data.n(); ++i)
      if (obs(i, keep)) rows.push_back(i);
    // restrict to rows that still observe something
    Eigen::MatrixXd X(rows.size(), data.d()), Y(rows.size(), data.m());
    BoolMask sub(rows.size(), data.m());
    for (size_t ii = 0; ii < rows.size(); ++ii) {
      X.row(ii) = data.X.row(rows[ii]);
      Y.row(ii) = data.Y.row(rows[ii]);
      for (int j = 0; j < data.m(); ++j) sub(ii, j) = obs(rows[ii], j);
    }
    const Dataset masked(X, Y, sub, data.tasks);

    const Dataset single = select_tasks(masked, {keep});
    MixtureModel single_model = model;
    single_model.families = {model.families[keep]};
    for (int r = 0; r < model.k(); ++r)
      single_model.beta[r] = model.beta[r].col(keep);
    CHECK(log_likelihood(model, masked) ==
          doctest::Approx(log_likelihood(single_model, single)).epsilon(1e-12));
  }
}

TEST_CASE("responsibilities normalize and match the direct ratio") {
  auto fams = mixed_families(1, 2, 1);
  const Dataset data = random_dataset(9, fams, 3, 25, 0.25);
  MixtureModel model = random_model(3, fams, 3, 26);

  const auto resp = responsibilities(model, data);
  for (int i = 0; i < data.n(); ++i) {
    CHECK(resp.rho.row(i).sum() == doctest::Approx(1.0).epsilon(1e-10));
    CHECK(resp.rho.row(i).minCoeff() >= 0.0);
  }

  const auto nat = natural_params(model, data.X);
  for (int i = 0; i < data.n(); ++i) {
    VectorXd w(model.k());
    for (int r = 0; r < model.k(); ++r) {
      double prod = model.pi(r);
      for (int j = 0; j < data.m(); ++j)
        if (data.observed(i, j))
          prod *= std::exp(log_density(fams[j], data.Y(i, j), nat[r](i, j)));
      w(r) = prod;
    }
    w /= w.sum();
    for (int r = 0; r < model.k(); ++r)
      CHECK(resp.rho(i, r) == doctest::Approx(w(r)).epsilon(1e-10));
  }

  SUBCASE("identical components fall back to pi") {
    MixtureModel dup = model;
    dup.beta[1] = dup.beta[0];
    dup.beta[2] = dup.beta[0];
    dup.pi << 0.2, 0.5, 0.3;
    const auto r2 = responsibilities(dup, data);
    for (int i = 0; i < data.n(); ++i)
      for (int r = 0; r < 3; ++r)
        CHECK(r2.rho(i, r) == doctest::Approx(dup.pi(r)).epsilon(1e-9));
  }

  SUBCASE("empty subset rows get pi") {
    const auto r3 = responsibilities(model, data, std::vector<int>{});
    for (int i = 0; i < data.n(); ++i)
      for (int r = 0; r < model.k(); ++r)
        CHECK(r3.rho(i, r) == doctest::Approx(model.pi(r)).epsilon(1e-12));
  }
}

TEST_CASE("cluster_assign takes the argmax with low-index ties") {
  ResponsibilityMatrix rho;
  rho.rho.resize(3, 2);
  rho.rho << 0.9, 0.1, 0.5, 0.5, 0.2, 0.8;
  const auto labels = cluster_assign(rho);
  CHECK(labels[0] == 0);
  CHECK(labels[1] == 0);  // tie -> smaller index
  CHECK(labels[2] == 1);

  Rng rng(31);
  MatrixXd r(20, 4);
  for (int i = 0; i < 20; ++i) {
    for (int c = 0; c < 4; ++c) r(i, c) = rng.uniform(0.0, 1.0);
    r.row(i) /= r.row(i).sum();
  }
  const auto got = cluster_assign(ResponsibilityMatrix{r});
  for (int i = 0; i < 20; ++i) {
    int expect = 0;
    for (int c = 1; c < 4; ++c)
      if (r(i, c) > r(i, expect)) expect = c;
    CHECK(got[i] == expect);
  }
}

TEST_CASE("impute fills unobserved positions with posterior-weighted means") {
  auto fams = mixed_families(1, 1, 1);
  const Dataset data = random_dataset(10, fams, 3, 41, 0.35);
  MixtureModel model = random_model(3, fams, 2, 42);

  const MatrixXd out = impute(model, data);
  const auto resp = responsibilities(model, data);
  const auto nat = natural_params(model, data.X);
  for (int i = 0; i < data.n(); ++i)
    for (int j = 0; j < data.m(); ++j) {
      if (data.observed(i, j)) {
        CHECK(out(i, j) == data.Y(i, j));
        continue;
      }
      double expect = 0.0;
      for (int r = 0; r < model.k(); ++r)
        expect += resp.rho(i, r) * mean(fams[j], nat[r](i, j));
      CHECK(out(i, j) == doctest::Approx(expect).epsilon(1e-10));
      if (fams[j].kind == FamilyKind::Bernoulli) {
        CHECK(out(i, j) >= 0.0);
        CHECK(out(i, j) <= 1.0);
      }
      if (fams[j].kind == FamilyKind::Poisson) CHECK(out(i, j) >= 0.0);
    }

  SUBCASE("k=1 Gaussian imputation is the linear predictor") {
    MixtureModel one = random_model(3, mixed_families(2, 0, 0), 1, 43);
    const Dataset gdata = random_dataset(8, mixed_families(2, 0, 0), 3, 44, 0.3);
    const MatrixXd imp = impute(one, gdata);
    const auto nat1 = natural_params(one, gdata.X);
    for (int i = 0; i < gdata.n(); ++i)
      for (int j = 0; j < gdata.m(); ++j)
        if (!gdata.observed(i, j))
          CHECK(imp(i, j) == doctest::Approx(nat1[0](i, j)).epsilon(1e-12));
  }
}

TEST_CASE("predict weights component means by pi") {
  auto fams = mixed_families(1, 1, 0);
  MixtureModel model = random_model(3, fams, 2, 50);
  Rng rng(51);
  MatrixXd X(4, 3);
  for (int i = 0; i < 4; ++i) {
    X(i, 0) = 1.0;
    for (int j = 1; j < 3; ++j) X(i, j) = rng.normal();
  }
  const MatrixXd got = predict(model, X);
  const auto nat = natural_params(model, X);
  for (int i = 0; i < 4; ++i)
    for (int j = 0; j < 2; ++j) {
      double expect = 0.0;
      for (int r = 0; r < 2; ++r)
        expect += model.pi(r) * mean(fams[j], nat[r](i, j));
      CHECK(got(i, j) == doctest::Approx(expect).epsilon(1e-12));
    }
}

TEST_CASE("normalize_pi floors and renormalizes") {
  VectorXd pi(3);
  pi << 1.0, 0.0, 1.0;
  normalize_pi(pi);
  CHECK(pi.minCoeff() > 0.0);
  CHECK(pi.sum() == doctest::Approx(1.0).epsilon(1e-12));
}
