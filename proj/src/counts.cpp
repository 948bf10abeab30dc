#include "bnbp/counts.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

namespace bnbp {

void NegBinParams::validate() const {
  if (!(r > 0.0)) throw std::invalid_argument("negbin: r must be > 0");
  if (!(b > 0.0 && b < 1.0))
    throw std::invalid_argument("negbin: b must lie in (0, 1)");
}

double negbin_log_pmf(long k, double r, double b) {
  NegBinParams{r, b}.validate();
  if (k < 0) return -std::numeric_limits<double>::infinity();
  return std::lgamma(k + r) - std::lgamma(k + 1.0) - std::lgamma(r) +
         r * std::log1p(-b) + k * std::log(b);
}

double negbin_pmf(long k, double r, double b) {
  return k < 0 ? 0.0 : std::exp(negbin_log_pmf(k, r, b));
}

long draw_negbin(double r, double b, Rng& rng) {
  NegBinParams{r, b}.validate();
  double lambda = rng.gamma(r, (1.0 - b) / b);
  return rng.poisson(lambda);
}

AugmentedNegBin draw_negbin_augmented(double r, double b, Rng& rng) {
  NegBinParams{r, b}.validate();
  AugmentedNegBin out;
  out.lambda = rng.gamma(r, (1.0 - b) / b);
  out.count = rng.poisson(out.lambda);
  return out;
}

CountMeasure draw_nbp(double r, const AtomicMeasure& weights, Rng& rng) {
  CountMeasure out;
  out.atoms.reserve(weights.atoms.size());
  for (const auto& a : weights.atoms)
    out.atoms.push_back({a.location, draw_negbin(r, a.weight, rng)});
  return out;
}

CountMeasure draw_bernoulli_process(const AtomicMeasure& weights, Rng& rng) {
  CountMeasure out;
  out.atoms.reserve(weights.atoms.size());
  for (const auto& a : weights.atoms) {
    if (!(a.weight >= 0.0 && a.weight <= 1.0))
      throw std::invalid_argument("bernoulli process: weight outside [0, 1]");
    out.atoms.push_back({a.location, rng.uniform() < a.weight ? 1L : 0L});
  }
  return out;
}

CountMeasure draw_plp(const AtomicMeasure& weights, Rng& rng) {
  CountMeasure out;
  out.atoms.reserve(weights.atoms.size());
  for (const auto& a : weights.atoms) {
    if (!(a.weight >= 0.0))
      throw std::invalid_argument("poisson process marks: negative weight");
    out.atoms.push_back({a.location, rng.poisson(a.weight)});
  }
  return out;
}

}  // namespace bnbp
