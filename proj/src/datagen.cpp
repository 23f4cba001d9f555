#include "hermit/datagen.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "hermit/rng.hpp"

namespace hermit {

namespace {

void validate_spec(const SynthSpec& spec) {
  if (spec.n < 1 || spec.d < 1 || spec.k_true < 1)
    throw std::invalid_argument("synth spec: n, d, k must be positive");
  if (spec.m_gaussian < 0 || spec.m_bernoulli < 0 || spec.m_poisson < 0 ||
      spec.m_total() < 1)
    throw std::invalid_argument("synth spec: need at least one task");
  if (spec.sparsity < 0 || spec.sparsity * spec.k_true + 1 > spec.d)
    throw std::invalid_argument("synth spec: sparsity * k + 1 must fit in d");
  auto check_range = [](const std::pair<double, double>& r) {
    if (!(0.0 < r.first && r.first <= r.second))
      throw std::invalid_argument("synth spec: invalid coefficient range");
  };
  check_range(spec.coef_range);
  check_range(spec.poisson_coef_range);
  if (spec.missing_rate < 0.0 || spec.missing_rate >= 1.0)
    throw std::invalid_argument("synth spec: missing rate must be in [0,1)");
  if (spec.pi_true.size() != 0) {
    if (spec.pi_true.size() != spec.k_true ||
        (spec.pi_true.array() <= 0.0).any() ||
        std::abs(spec.pi_true.sum() - 1.0) > 1e-8)
      throw std::invalid_argument("synth spec: pi_true must be a length-k simplex");
  }
}

std::vector<Family> spec_families(const SynthSpec& spec) {
  std::vector<Family> fams;
  fams.reserve(spec.m_total());
  for (int j = 0; j < spec.m_gaussian; ++j) fams.push_back({FamilyKind::Gaussian, 1.0});
  for (int j = 0; j < spec.m_bernoulli; ++j) fams.push_back({FamilyKind::Bernoulli, 1.0});
  for (int j = 0; j < spec.m_poisson; ++j) fams.push_back({FamilyKind::Poisson, 1.0});
  return fams;
}

Eigen::MatrixXd draw_design(int n, int d, Rng& rng) {
  Eigen::MatrixXd X(n, d);
  for (int i = 0; i < n; ++i) {
    X(i, 0) = 1.0;
    for (int j = 1; j < d; ++j) X(i, j) = rng.normal();
  }
  return X;
}

std::vector<Eigen::MatrixXd> draw_beta(const SynthSpec& spec,
                                       const std::vector<Family>& fams, Rng& rng) {
  const int m = spec.m_total();
  std::vector<Eigen::MatrixXd> beta(spec.k_true, Eigen::MatrixXd::Zero(spec.d, m));
  for (int r = 0; r < spec.k_true; ++r) {
    for (int j = 0; j < m; ++j) {
      const bool pois = fams[j].kind == FamilyKind::Poisson;
      beta[r](0, j) = pois ? spec.poisson_bias : spec.bias;
      const auto& range = pois ? spec.poisson_coef_range : spec.coef_range;
      const int lo = spec.sparsity * r + 1;
      for (int i = lo; i < lo + spec.sparsity; ++i) {
        const double sign = rng.bernoulli(0.5) ? 1.0 : -1.0;
        beta[r](i, j) = sign * rng.uniform(range.first, range.second);
      }
    }
  }
  return beta;
}

double sample_target(const Family& fam, double nat, Rng& rng) {
  switch (fam.kind) {
    case FamilyKind::Gaussian:
      return nat + std::sqrt(fam.dispersion) * rng.normal();
    case FamilyKind::Bernoulli: {
      const double p = nat >= 0.0 ? 1.0 / (1.0 + std::exp(-nat))
                                  : std::exp(nat) / (1.0 + std::exp(nat));
      return rng.bernoulli(p) ? 1.0 : 0.0;
    }
    case FamilyKind::Poisson:
      return static_cast<double>(rng.poisson(std::exp(std::min(nat, 30.0))));
  }
  return 0.0;
}

BoolMask draw_mask(int n, int m, double rate, Rng& rng) {
  BoolMask obs = BoolMask::Constant(n, m, true);
  if (rate <= 0.0) return obs;
  for (int i = 0; i < n; ++i) {
    int kept = 0;
    for (int j = 0; j < m; ++j) {
      obs(i, j) = !rng.bernoulli(rate);
      kept += obs(i, j);
    }
    if (kept == 0) obs(i, rng.uniform_int(m)) = true;  // keep Omega_i nonempty
  }
  return obs;
}

SynthData assemble(const SynthSpec& spec, Eigen::MatrixXd X,
                   std::vector<Eigen::MatrixXd> beta, std::vector<int> delta,
                   Eigen::MatrixXd alpha, Rng& rng) {
  const int m = spec.m_total();
  const auto fams = spec_families(spec);
  Eigen::MatrixXd Y(spec.n, m);
  for (int i = 0; i < spec.n; ++i) {
    const int r = delta[i];
    for (int j = 0; j < m; ++j) {
      const double nat = X.row(i).dot(beta[r].col(j));
      Y(i, j) = sample_target(fams[j], nat, rng);
    }
  }
  BoolMask obs = draw_mask(spec.n, m, spec.missing_rate, rng);
  SynthData out{Dataset(std::move(X), std::move(Y), std::move(obs), fams),
                GroundTruth{std::move(beta), std::move(delta), std::move(alpha)}};
  return out;
}

}  // namespace

int derived_sparsity(int d, int k) {
  if (d < 1 || k < 1) throw std::invalid_argument("derived_sparsity: bad arguments");
  return d / (2 * k);
}

SynthData generate(const SynthSpec& spec) {
  validate_spec(spec);
  Rng rng(spec.seed);
  Eigen::MatrixXd X = draw_design(spec.n, spec.d, rng);
  auto beta = draw_beta(spec, spec_families(spec), rng);

  Eigen::VectorXd pi = spec.pi_true.size()
                           ? spec.pi_true
                           : Eigen::VectorXd::Constant(spec.k_true, 1.0 / spec.k_true);
  std::vector<int> delta(spec.n);
  for (int i = 0; i < spec.n; ++i) delta[i] = rng.categorical(pi);

  return assemble(spec, std::move(X), std::move(beta), std::move(delta),
                  Eigen::MatrixXd(), rng);
}

SynthData generate_with_truth(const SynthSpec& spec, const GroundTruth& truth,
                              std::uint64_t seed) {
  validate_spec(spec);
  if (static_cast<int>(truth.beta.size()) != spec.k_true)
    throw std::invalid_argument("generate_with_truth: component count mismatch");
  for (const auto& b : truth.beta)
    if (b.rows() != spec.d || b.cols() != spec.m_total())
      throw std::invalid_argument("generate_with_truth: beta shape mismatch");

  Rng rng(seed);
  Eigen::MatrixXd X = draw_design(spec.n, spec.d, rng);

  std::vector<int> delta(spec.n);
  if (truth.alpha.size() != 0) {
    Eigen::VectorXd logits(spec.k_true), probs(spec.k_true);
    for (int i = 0; i < spec.n; ++i) {
      logits = (X.row(i) * truth.alpha).transpose();
      const double mx = logits.maxCoeff();
      probs = (logits.array() - mx).exp();
      probs /= probs.sum();
      delta[i] = rng.categorical(probs);
    }
  } else {
    Eigen::VectorXd pi = spec.pi_true.size()
                             ? spec.pi_true
                             : Eigen::VectorXd::Constant(spec.k_true, 1.0 / spec.k_true);
    for (int i = 0; i < spec.n; ++i) delta[i] = rng.categorical(pi);
  }

  return assemble(spec, std::move(X), truth.beta, std::move(delta), truth.alpha, rng);
}

SynthData generate_moe(const SynthSpec& spec, int gate_rows_nonzero) {
  validate_spec(spec);
  if (gate_rows_nonzero < 0 || gate_rows_nonzero > spec.d)
    throw std::invalid_argument("generate_moe: gate_rows_nonzero out of range");
  Rng rng(spec.seed);
  Eigen::MatrixXd X = draw_design(spec.n, spec.d, rng);
  auto beta = draw_beta(spec, spec_families(spec), rng);

  Eigen::MatrixXd alpha = Eigen::MatrixXd::Zero(spec.d, spec.k_true);
  for (int r = 0; r < spec.k_true; ++r)
    for (int i = 0; i < gate_rows_nonzero; ++i) alpha(i, r) = rng.normal();

  std::vector<int> delta(spec.n);
  Eigen::VectorXd logits(spec.k_true), probs(spec.k_true);
  for (int i = 0; i < spec.n; ++i) {
    logits = (X.row(i) * alpha).transpose();
    const double mx = logits.maxCoeff();
    probs = (logits.array() - mx).exp();
    probs /= probs.sum();
    delta[i] = rng.categorical(probs);
  }

  return assemble(spec, std::move(X), std::move(beta), std::move(delta),
                  std::move(alpha), rng);
}

std::pair<Dataset, std::vector<int>> contaminate(const Dataset& data, double p_outlier,
                                                 std::uint64_t seed) {
  if (p_outlier < 0.0 || p_outlier >= 1.0)
    throw std::invalid_argument("contaminate: p_outlier must be in [0,1)");
  const int n_bad = static_cast<int>(std::ceil(p_outlier * data.n()));
  Rng rng(seed);
  std::vector<int> rows = rng.sample_without_replacement(data.n(), n_bad);
  std::sort(rows.begin(), rows.end());

  Eigen::MatrixXd Y = data.Y;
  for (int i : rows) {
    for (int j = 0; j < data.m(); ++j) {
      if (!data.observed(i, j)) continue;
      if (data.tasks[j].kind == FamilyKind::Gaussian) Y(i, j) = 100.0;
      if (data.tasks[j].kind == FamilyKind::Bernoulli) Y(i, j) = 1.0;
    }
  }
  return {Dataset(data.X, std::move(Y), data.observed, data.tasks), rows};
}

namespace {

GroupedSynthData grouped_impl(std::vector<SynthSpec> specs,
                              const std::vector<GroundTruth>* truths,
                              std::uint64_t seed) {
  if (specs.empty()) throw std::invalid_argument("generate_grouped: no groups");
  const int n = specs[0].n, d = specs[0].d;
  for (auto& s : specs) {
    if (s.n != n || s.d != d)
      throw std::invalid_argument("generate_grouped: groups must share n and d");
  }
  if (truths && truths->size() != specs.size())
    throw std::invalid_argument("generate_grouped: truths/specs length mismatch");

  Rng xrng(derive_seed(seed, 0));
  const Eigen::MatrixXd X = draw_design(n, d, xrng);

  GroupedSynthData out;
  std::vector<Eigen::MatrixXd> y_blocks;
  std::vector<BoolMask> mask_blocks;
  std::vector<Family> fams;
  int offset = 0;
  for (size_t g = 0; g < specs.size(); ++g) {
    SynthSpec spec = specs[g];
    spec.seed = derive_seed(seed, 1 + g);
    validate_spec(spec);
    Rng rng(spec.seed);
    std::vector<Eigen::MatrixXd> beta;
    if (truths)
      beta = (*truths)[g].beta;
    else
      beta = draw_beta(spec, spec_families(spec), rng);
    Eigen::VectorXd pi = spec.pi_true.size()
                             ? spec.pi_true
                             : Eigen::VectorXd::Constant(spec.k_true, 1.0 / spec.k_true);
    std::vector<int> delta(n);
    for (int i = 0; i < n; ++i) delta[i] = rng.categorical(pi);

    Eigen::MatrixXd Xcopy = X;
    SynthData part = assemble(spec, std::move(Xcopy), std::move(beta),
                              std::move(delta), Eigen::MatrixXd(), rng);
    y_blocks.push_back(part.data.Y);
    mask_blocks.push_back(part.data.observed);
    for (const auto& f : part.data.tasks) fams.push_back(f);
    out.truths.push_back(std::move(part.truth));
    out.task_ranges.emplace_back(offset, offset + spec.m_total());
    offset += spec.m_total();
  }

  Eigen::MatrixXd Y(n, offset);
  BoolMask obs(n, offset);
  int c = 0;
  for (size_t g = 0; g < y_blocks.size(); ++g) {
    Y.middleCols(c, y_blocks[g].cols()) = y_blocks[g];
    obs.middleCols(c, y_blocks[g].cols()) = mask_blocks[g];
    c += static_cast<int>(y_blocks[g].cols());
  }
  out.data = Dataset(X, std::move(Y), std::move(obs), std::move(fams));
  return out;
}

}  // namespace

GroupedSynthData generate_grouped(std::vector<SynthSpec> specs, std::uint64_t seed) {
  return grouped_impl(std::move(specs), nullptr, seed);
}

GroupedSynthData generate_grouped_with_truths(std::vector<SynthSpec> specs,
                                              const std::vector<GroundTruth>& truths,
                                              std::uint64_t seed) {
  return grouped_impl(std::move(specs), &truths, seed);
}

}  // namespace hermit
