#pragma once

#include <iosfwd>
#include <vector>

#include "bnbp/counts.hpp"
#include "bnbp/crm.hpp"

namespace bnbp {

enum class AtomProvenance { OldRepeated, OldUnrepeated, New };

// Posterior of a (three-parameter-free) beta process under N Bernoulli
// process draws, reported in the same canonical form as the prior: updated
// mass/concentration plus fixed-atom base weights rho.
struct BpPosterior {
  BpParams params;
  std::vector<AtomProvenance> provenance;  // parallel to params.fixed_atoms
};

// Same posterior but with each fixed atom carrying its own beta law.
struct RbpPosterior {
  RbpParams params;
  std::vector<AtomProvenance> provenance;
};

// Throws std::invalid_argument on non-binary counts or invalid priors.
BpPosterior bp_posterior_bernoulli(const BpParams& prior,
                                   const std::vector<CountMeasure>& draws);
RbpPosterior rbp_posterior_bernoulli(const RbpParams& prior,
                                     const std::vector<CountMeasure>& draws);
RbpPosterior rbp_posterior_negbin(const RbpParams& prior, double r,
                                  const std::vector<CountMeasure>& draws);

// Key-value text block, one "name value" pair per line; locations sorted.
void write_report(std::ostream& os, const BpPosterior& post);
void write_report(std::ostream& os, const RbpPosterior& post);

}  // namespace bnbp
