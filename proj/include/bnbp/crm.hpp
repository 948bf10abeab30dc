#pragma once

#include <functional>
#include <vector>

#include "bnbp/measure.hpp"
#include "bnbp/rng.hpp"

namespace bnbp {

struct FixedAtomSpec {
  double location = 0.0;
  double rho = 0.0;  // base-measure mass at this location, in (0, 1]
};

// Beta process BP(concentration, mass, H). discount > 0 selects the
// three-parameter extension (ordinary-component tail exponent -1-discount).
struct BpParams {
  double mass = 1.0;           // gamma
  double concentration = 1.0;  // theta
  double discount = 0.0;       // alpha in [0, 1)
  std::vector<FixedAtomSpec> fixed_atoms;

  void validate() const;  // throws std::invalid_argument
};

// Beta process with freely parameterized fixed-atom beta laws.
struct RbpFixedAtom {
  double location = 0.0;
  double rho = 0.0;    // beta shape 1
  double sigma = 0.0;  // beta shape 2
};

struct RbpParams {
  double mass = 1.0;
  double concentration = 1.0;
  std::vector<RbpFixedAtom> fixed_atoms;

  void validate() const;
};

// Gamma process GaP(concentration, rate, H); fixed atoms are
// Gamma(concentration * rho, rate) in shape/rate form.
struct GapParams {
  double concentration = 1.0;  // c
  double rate = 1.0;           // beta (inverse scale)
  std::vector<FixedAtomSpec> fixed_atoms;

  void validate() const;
};

// One round of the size-biased beta-process construction: round m holds
// Poisson(mass * concentration / (concentration + m)) atoms with
// Beta(1, concentration + m) weights.
struct SizeBiasedDraw {
  struct Round {
    long index = 0;
    std::vector<Atom> atoms;
  };
  std::vector<Round> rounds;
  // exact value of E[mass discarded past the last round]:
  // mass * concentration / (concentration + n_rounds)
  double dropped_mass_bound = 0.0;

  AtomicMeasure flatten() const;
};

SizeBiasedDraw sample_bp_size_biased(double mass, double concentration,
                                     long rounds, Rng& rng);

// Tabulated inverse CDF for a Levy intensity restricted to [lo, hi].
// Integration runs on a log-spaced grid, refined until the total integral is
// stable to rel_tol; throws numeric_error if that never happens.
class IntensityTable {
 public:
  IntensityTable(std::function<double(double)> density, double lo, double hi,
                 double rel_tol = 1e-10);

  double total() const { return total_; }
  double sample(Rng& rng) const;  // one weight from the normalized restriction

 private:
  std::vector<double> grid_;  // log-spaced knots
  std::vector<double> cum_;   // cumulative integral at knots
  double total_ = 0.0;
};

// Ordinary-component intensity densities (without fixed atoms).
double bp_levy_density(double b, const BpParams& p);
double gap_levy_density(double g, const GapParams& p);

// Draw with ordinary-component weights below `epsilon` discarded. The report
// carries exact expectations of what the threshold dropped.
struct ThresholdDraw {
  AtomicMeasure measure;
  double epsilon = 0.0;
  std::size_t n_fixed = 0;              // leading atoms came from fixed_atoms
  double expected_dropped_mass = 0.0;   // integral of b nu(db) over (0, eps)
  double expected_dropped_odds = 0.0;   // integral of b/(1-b) nu(db), (0, eps)

  // expected count mass a negative-binomial mark with parameter r would have
  // placed on the dropped atoms: r * integral b/(1-b) nu(db)
  double expected_dropped_counts(double r) const {
    return r * expected_dropped_odds;
  }
};

ThresholdDraw sample_bp_threshold(const BpParams& p, double epsilon, Rng& rng);
ThresholdDraw sample_bp_threshold(const BpParams& p, double epsilon,
                                  const IntensityTable& table, Rng& rng);
ThresholdDraw sample_rbp_threshold(const RbpParams& p, double epsilon,
                                   Rng& rng);
ThresholdDraw sample_gap(const GapParams& p, double epsilon, Rng& rng);

// Weight maps between the beta, beta-prime and gamma families. Locations are
// carried through unchanged.
AtomicMeasure bp_to_beta_prime(const AtomicMeasure& bp);  // b -> b/(1-b)

// Scale each gamma-process atom g by an independent Gamma(shape, rate) draw:
// g / tau gives beta-prime weights, g / (g + tau) gives beta-process weights.
// The tau shape is concentration * (1 - mass * rho(location)); rho is looked
// up in `fixed` and is zero for locations not listed there.
AtomicMeasure gamma_ratio_to_beta_prime(const AtomicMeasure& gap,
                                        double concentration, double mass,
                                        double rate,
                                        const std::vector<FixedAtomSpec>& fixed,
                                        Rng& rng);
AtomicMeasure gammas_to_bp(const AtomicMeasure& gap, double concentration,
                           double mass, double rate,
                           const std::vector<FixedAtomSpec>& fixed, Rng& rng);

}  // namespace bnbp
