#include <doctest.h>

#include <cmath>

#include "hermit/datagen.hpp"
#include "hermit/moe.hpp"

using namespace hermit;

TEST_CASE("derived sparsity") {
  CHECK(derived_sparsity(32, 2) == 8);
  CHECK(derived_sparsity(32, 3) == 5);
  CHECK(derived_sparsity(15, 2) == 3);
}

TEST_CASE("generate basics") {
  SynthSpec sp;
  sp.n = 50;
  sp.seed = 5;
  const SynthData out = generate(sp);
  CHECK(out.data.n() == 50);
  CHECK(out.data.m() == 15);
  CHECK(out.data.has_intercept);

  SUBCASE("no missing rate leaves the mask full") {
    CHECK(static_cast<int>(out.data.observed.count()) == 50 * 15);
  }

  SUBCASE("k=1 gives constant memberships") {
    SynthSpec one = sp;
    one.k_true = 1;
    one.sparsity = 3;
    const SynthData d1 = generate(one);
    for (int i = 0; i < one.n; ++i) CHECK(d1.truth.delta[i] == 0);
  }

  SUBCASE("identical seeds are bit-identical") {
    const SynthData again = generate(sp);
    CHECK((again.data.X - out.data.X).cwiseAbs().maxCoeff() == 0.0);
    CHECK((again.data.Y - out.data.Y).cwiseAbs().maxCoeff() == 0.0);
    CHECK(again.truth.delta == out.truth.delta);
  }

  SUBCASE("different seeds differ") {
    SynthSpec other = sp;
    other.seed = 6;
    const SynthData d2 = generate(other);
    CHECK((d2.data.X - out.data.X).cwiseAbs().maxCoeff() > 0.0);
  }
}

TEST_CASE("true support blocks are disjoint across components") {
  SynthSpec sp;
  sp.n = 10;
  sp.d = 15;
  sp.k_true = 3;
  sp.sparsity = 4;
  sp.seed = 9;
  const SynthData out = generate(sp);
  for (int r = 0; r < 3; ++r)
    for (int s = r + 1; s < 3; ++s)
      for (int i = 1; i < sp.d; ++i) {
        const bool in_r = out.truth.beta[r].row(i).cwiseAbs().maxCoeff() > 0.0;
        const bool in_s = out.truth.beta[s].row(i).cwiseAbs().maxCoeff() > 0.0;
        CHECK(!(in_r && in_s));
      }
  // biases on the first row only
  for (int r = 0; r < 3; ++r) {
    CHECK((out.truth.beta[r].row(0).array() != 0.0).all());
    int nonzero_rows = 0;
    for (int i = 1; i < sp.d; ++i)
      nonzero_rows += out.truth.beta[r].row(i).cwiseAbs().maxCoeff() > 0.0;
    CHECK(nonzero_rows == sp.sparsity);
  }
}

TEST_CASE("component frequencies and conditional means track the truth") {
  SynthSpec sp;
  sp.n = 10000;
  sp.seed = 31;
  const SynthData out = generate(sp);
  double freq0 = 0.0;
  for (int i = 0; i < sp.n; ++i) freq0 += out.truth.delta[i] == 0;
  freq0 /= sp.n;
  CHECK(std::abs(freq0 - 0.5) < 0.02);

  // per-component Gaussian sample means against x.beta within 3 standard errors
  for (int r = 0; r < 2; ++r) {
    double resid = 0.0;
    int cnt = 0;
    for (int i = 0; i < sp.n; ++i) {
      if (out.truth.delta[i] != r) continue;
      const double mu = out.data.X.row(i).dot(out.truth.beta[r].col(0));
      resid += out.data.Y(i, 0) - mu;
      ++cnt;
    }
    resid /= cnt;
    CHECK(std::abs(resid) < 3.0 / std::sqrt(static_cast<double>(cnt)));
  }
}

TEST_CASE("missing rate keeps every row nonempty") {
  SynthSpec sp;
  sp.n = 400;
  sp.missing_rate = 0.6;
  sp.seed = 77;
  const SynthData out = generate(sp);
  for (int i = 0; i < sp.n; ++i) {
    int cnt = 0;
    for (int j = 0; j < out.data.m(); ++j) cnt += out.data.observed(i, j);
    CHECK(cnt >= 1);
  }
  const double rate =
      1.0 - static_cast<double>(out.data.observed.count()) / (sp.n * out.data.m());
  CHECK(std::abs(rate - 0.6) < 0.05);
}

TEST_CASE("contaminate hits exactly the requested rows") {
  SynthSpec sp;
  sp.n = 1000;
  sp.seed = 13;
  sp.missing_rate = 0.2;
  const SynthData clean = generate(sp);

  SUBCASE("zero fraction leaves the data untouched") {
    const auto [same, rows] = contaminate(clean.data, 0.0, 1);
    CHECK(rows.empty());
    CHECK((same.Y - clean.data.Y).cwiseAbs().maxCoeff() == 0.0);
  }

  SUBCASE("two percent of 1000 rows is 20 rows") {
    const auto [dirty, rows] = contaminate(clean.data, 0.02, 2);
    CHECK(rows.size() == 20);
    for (int i : rows) {
      for (int j = 0; j < dirty.m(); ++j) {
        if (!dirty.observed(i, j)) continue;
        if (dirty.tasks[j].kind == FamilyKind::Gaussian) CHECK(dirty.Y(i, j) == 100.0);
        if (dirty.tasks[j].kind == FamilyKind::Bernoulli) CHECK(dirty.Y(i, j) == 1.0);
        if (dirty.tasks[j].kind == FamilyKind::Poisson)
          CHECK(dirty.Y(i, j) == clean.data.Y(i, j));
      }
    }
    // untouched rows identical
    size_t p = 0;
    for (int i = 0; i < dirty.n(); ++i) {
      if (p < rows.size() && rows[p] == i) {
        ++p;
        continue;
      }
      for (int j = 0; j < dirty.m(); ++j)
        if (dirty.observed(i, j)) CHECK(dirty.Y(i, j) == clean.data.Y(i, j));
    }
  }
}

TEST_CASE("generate_moe memberships follow the gate") {
  SynthSpec sp;
  sp.n = 10000;
  sp.d = 8;
  sp.m_gaussian = 1;
  sp.m_bernoulli = 1;
  sp.m_poisson = 0;
  sp.k_true = 3;
  sp.sparsity = 2;
  sp.seed = 3;

  SUBCASE("zero gate rows give uniform memberships") {
    const SynthData out = generate_moe(sp, 0);
    Eigen::Vector3d freq = Eigen::Vector3d::Zero();
    for (int i = 0; i < sp.n; ++i) freq(out.truth.delta[i]) += 1.0;
    freq /= sp.n;
    for (int r = 0; r < 3; ++r) CHECK(std::abs(freq(r) - 1.0 / 3.0) < 0.02);
  }

  SUBCASE("empirical frequencies match mean gating rows") {
    const SynthData out = generate_moe(sp, 4);
    GatingModel gate{out.truth.alpha};
    const Eigen::MatrixXd probs = gating_probs(gate, out.data.X);
    Eigen::Vector3d freq = Eigen::Vector3d::Zero();
    for (int i = 0; i < sp.n; ++i) freq(out.truth.delta[i]) += 1.0;
    freq /= sp.n;
    const Eigen::VectorXd expect = probs.colwise().mean();
    for (int r = 0; r < 3; ++r) CHECK(std::abs(freq(r) - expect(r)) < 0.02);
  }

  SUBCASE("k=1 keeps everyone in component zero") {
    SynthSpec one = sp;
    one.k_true = 1;
    const SynthData out = generate_moe(one, 4);
    for (int i = 0; i < one.n; ++i) CHECK(out.truth.delta[i] == 0);
  }
}

TEST_CASE("grouped generation shares X and stacks target blocks") {
  std::vector<SynthSpec> specs(2);
  specs[0].n = specs[1].n = 60;
  specs[0].d = specs[1].d = 10;
  specs[0].k_true = 2;
  specs[1].k_true = 3;
  specs[0].sparsity = 2;
  specs[1].sparsity = 3;
  const GroupedSynthData out = generate_grouped(specs, 21);
  CHECK(out.data.m() == 30);
  CHECK(out.task_ranges[0] == std::pair<int, int>{0, 15});
  CHECK(out.task_ranges[1] == std::pair<int, int>{15, 30});
  CHECK(out.truths[0].beta.size() == 2);
  CHECK(out.truths[1].beta.size() == 3);

  const GroupedSynthData again = generate_grouped(specs, 21);
  CHECK((again.data.Y.array() == out.data.Y.array() ||
         (again.data.Y.array().isNaN() && out.data.Y.array().isNaN()))
            .all());

  // same truths, fresh samples
  const GroupedSynthData fresh = generate_grouped_with_truths(specs, out.truths, 99);
  for (int g = 0; g < 2; ++g)
    for (size_t r = 0; r < out.truths[g].beta.size(); ++r)
      CHECK((fresh.truths[g].beta[r] - out.truths[g].beta[r]).cwiseAbs().maxCoeff() ==
            0.0);
  CHECK((fresh.data.X - out.data.X).cwiseAbs().maxCoeff() > 0.0);
}

TEST_CASE("spec validation") {
  SynthSpec sp;
  sp.sparsity = 8;
  sp.k_true = 2;
  sp.d = 15;  // 8*2+1 > 15
  CHECK_THROWS(generate(sp));
  sp = SynthSpec{};
  sp.missing_rate = 1.0;
  CHECK_THROWS(generate(sp));
  sp = SynthSpec{};
  sp.coef_range = {0.0, 1.0};
  CHECK_THROWS(generate(sp));
}
