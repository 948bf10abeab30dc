#pragma once

#include "bnbp/measure.hpp"
#include "bnbp/rng.hpp"

namespace bnbp {

struct NegBinParams {
  double r = 1.0;  // real-valued shape, > 0
  double b = 0.5;  // success probability, in (0, 1)

  void validate() const;
};

// P(k) = Gamma(k + r) / (Gamma(k + 1) Gamma(r)) * (1 - b)^r * b^k
double negbin_log_pmf(long k, double r, double b);
double negbin_pmf(long k, double r, double b);

// gamma-Poisson mixture draw; valid for any real r > 0
long draw_negbin(double r, double b, Rng& rng);

struct AugmentedNegBin {
  double lambda = 0.0;  // Gamma(r, (1-b)/b) in shape/rate form
  long count = 0;       // Poisson(lambda)
};
AugmentedNegBin draw_negbin_augmented(double r, double b, Rng& rng);

// Mark every atom of a weight measure with a conditionally independent count.
CountMeasure draw_nbp(double r, const AtomicMeasure& weights, Rng& rng);
CountMeasure draw_bernoulli_process(const AtomicMeasure& weights, Rng& rng);
CountMeasure draw_plp(const AtomicMeasure& weights, Rng& rng);

}  // namespace bnbp
