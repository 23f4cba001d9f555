#include "hermit/expfamily.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace hermit {

namespace {

constexpr double kNatClamp = 30.0;

double softplus(double x) {
  // log(1 + e^x) without overflow
  return std::max(x, 0.0) + std::log1p(std::exp(-std::abs(x)));
}

double clamp_nat(double nat) { return std::clamp(nat, -kNatClamp, kNatClamp); }

void check_nat(double nat) {
  if (!std::isfinite(nat)) throw std::domain_error("non-finite natural parameter");
}

}  // namespace

Family make_family(FamilyKind kind, double dispersion) {
  if (kind != FamilyKind::Gaussian && dispersion != 1.0)
    throw std::invalid_argument("dispersion is fixed at 1 for Bernoulli and Poisson");
  if (!(dispersion > 0.0)) throw std::invalid_argument("dispersion must be positive");
  return Family{kind, dispersion};
}

Family family_from_string(const std::string& name) {
  if (name == "gaussian") return Family{FamilyKind::Gaussian, 1.0};
  if (name == "bernoulli") return Family{FamilyKind::Bernoulli, 1.0};
  if (name == "poisson") return Family{FamilyKind::Poisson, 1.0};
  throw std::invalid_argument("unknown family: " + name);
}

std::string family_to_string(const Family& fam) {
  switch (fam.kind) {
    case FamilyKind::Gaussian: return "gaussian";
    case FamilyKind::Bernoulli: return "bernoulli";
    case FamilyKind::Poisson: return "poisson";
  }
  return "gaussian";
}

bool in_support(const Family& fam, double y) {
  switch (fam.kind) {
    case FamilyKind::Gaussian:
      return std::isfinite(y);
    case FamilyKind::Bernoulli:
      return y == 0.0 || y == 1.0;
    case FamilyKind::Poisson:
      return std::isfinite(y) && y >= 0.0 && y == std::floor(y);
  }
  return false;
}

double log_density(const Family& fam, double y, double nat) {
  check_nat(nat);
  if (!in_support(fam, y)) throw std::domain_error("y outside family support");
  switch (fam.kind) {
    case FamilyKind::Gaussian: {
      const double s2 = fam.dispersion;
      const double resid = y - nat;
      return -0.5 * resid * resid / s2 - 0.5 * std::log(2.0 * M_PI * s2);
    }
    case FamilyKind::Bernoulli:
      return y * nat - softplus(nat);
    case FamilyKind::Poisson: {
      const double natc = clamp_nat(nat);
      return y * natc - std::exp(natc) - std::lgamma(y + 1.0);
    }
  }
  return 0.0;
}

double cumulant(const Family& fam, double nat) {
  check_nat(nat);
  switch (fam.kind) {
    case FamilyKind::Gaussian:
      return 0.5 * nat * nat;
    case FamilyKind::Bernoulli:
      return softplus(nat);
    case FamilyKind::Poisson:
      return std::exp(clamp_nat(nat));
  }
  return 0.0;
}

double mean(const Family& fam, double nat) {
  check_nat(nat);
  switch (fam.kind) {
    case FamilyKind::Gaussian:
      return nat;
    case FamilyKind::Bernoulli:
      return nat >= 0.0 ? 1.0 / (1.0 + std::exp(-nat))
                        : std::exp(nat) / (1.0 + std::exp(nat));
    case FamilyKind::Poisson:
      return std::exp(clamp_nat(nat));
  }
  return 0.0;
}

double nll_grad_nat(const Family& fam, double y, double nat) {
  if (!in_support(fam, y)) throw std::domain_error("y outside family support");
  return (mean(fam, nat) - y) / fam.dispersion;
}

}  // namespace hermit
