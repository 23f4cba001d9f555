#pragma once

#include <string>

namespace hermit {

enum class FamilyKind { Gaussian, Bernoulli, Poisson };

// One target's exponential-dispersion distribution.  `dispersion` is a(phi):
// sigma^2 for Gaussian tasks, always 1 for Bernoulli and Poisson.
struct Family {
  FamilyKind kind = FamilyKind::Gaussian;
  double dispersion = 1.0;
};

Family make_family(FamilyKind kind, double dispersion = 1.0);
Family family_from_string(const std::string& name);
std::string family_to_string(const Family& fam);

bool in_support(const Family& fam, double y);

// log f(y | nat), canonical form exp{(y*nat - b(nat))/a + c(y)}.
double log_density(const Family& fam, double y, double nat);

// Cumulant b(nat).  Poisson exponentiation is clamped to |nat| <= 30.
double cumulant(const Family& fam, double nat);

// Conditional mean b'(nat): identity / logistic / exp.
double mean(const Family& fam, double nat);

// -d/dnat log f(y | nat) = (b'(nat) - y) / a.
double nll_grad_nat(const Family& fam, double y, double nat);

}  // namespace hermit
