#include "bnbp/conjugacy.hpp"

#include <algorithm>
#include <map>
#include <ostream>
#include <set>
#include <stdexcept>

namespace bnbp {

namespace {

// location -> summed counts over draws; throws on duplicate locations within
// a single draw and (optionally) on counts outside {0, 1}
std::map<double, long> sum_counts(const std::vector<CountMeasure>& draws,
                                  bool binary_only) {
  std::map<double, long> total;
  for (const auto& draw : draws) {
    std::set<double> seen;
    for (const auto& a : draw.atoms) {
      if (!seen.insert(a.location).second)
        throw std::invalid_argument("posterior: duplicate atom in one draw");
      if (a.count < 0)
        throw std::invalid_argument("posterior: negative count");
      if (binary_only && a.count > 1)
        throw std::invalid_argument("posterior: Bernoulli count outside {0,1}");
      total[a.location] += a.count;
    }
  }
  return total;
}

const char* provenance_name(AtomProvenance p) {
  switch (p) {
    case AtomProvenance::OldRepeated: return "old-repeated";
    case AtomProvenance::OldUnrepeated: return "old-unrepeated";
    default: return "new";
  }
}

}  // namespace

BpPosterior bp_posterior_bernoulli(const BpParams& prior,
                                   const std::vector<CountMeasure>& draws) {
  prior.validate();
  if (prior.discount != 0.0)
    throw std::invalid_argument(
        "bp posterior: only the two-parameter process is conjugate here");
  auto totals = sum_counts(draws, true);
  double n = static_cast<double>(draws.size());
  double prod = prior.mass * prior.concentration;  // invariant under update
  if (!(prod > 0.0))
    throw std::invalid_argument("bp posterior: mass * concentration is zero");

  BpPosterior post;
  post.params.concentration = prior.concentration + n;
  post.params.mass = prod / post.params.concentration;
  post.params.discount = 0.0;
  for (const auto& fa : prior.fixed_atoms) {
    auto it = totals.find(fa.location);
    long s = it == totals.end() ? 0 : it->second;
    if (it != totals.end()) totals.erase(it);
    post.params.fixed_atoms.push_back({fa.location, fa.rho + s / prod});
    post.provenance.push_back(s > 0 ? AtomProvenance::OldRepeated
                                    : AtomProvenance::OldUnrepeated);
  }
  for (const auto& [loc, s] : totals) {
    if (s == 0) continue;  // unmarked novel location carries no information
    post.params.fixed_atoms.push_back({loc, s / prod});
    post.provenance.push_back(AtomProvenance::New);
  }
  return post;
}

namespace {

RbpPosterior rbp_posterior_impl(const RbpParams& prior, double per_draw_mass,
                                const std::vector<CountMeasure>& draws,
                                bool binary_only) {
  prior.validate();
  auto totals = sum_counts(draws, binary_only);
  double n = static_cast<double>(draws.size());
  // mass 0 (fixed atoms only) is a legitimate prior: the per-atom updates
  // never divide by it, and the ordinary-component mass just stays 0
  double prod = prior.mass * prior.concentration;
  double added = per_draw_mass * n;  // N for Bernoulli, r N for neg-bin

  RbpPosterior post;
  post.params.concentration = prior.concentration + added;
  post.params.mass = prod / post.params.concentration;
  for (const auto& fa : prior.fixed_atoms) {
    auto it = totals.find(fa.location);
    long s = it == totals.end() ? 0 : it->second;
    if (it != totals.end()) totals.erase(it);
    post.params.fixed_atoms.push_back(
        {fa.location, fa.rho + s, fa.sigma + added - (binary_only ? s : 0)});
    post.provenance.push_back(s > 0 ? AtomProvenance::OldRepeated
                                    : AtomProvenance::OldUnrepeated);
  }
  for (const auto& [loc, s] : totals) {
    if (s == 0) continue;
    post.params.fixed_atoms.push_back(
        {loc, static_cast<double>(s),
         prior.concentration + added - (binary_only ? s : 0)});
    post.provenance.push_back(AtomProvenance::New);
  }
  return post;
}

}  // namespace

RbpPosterior rbp_posterior_bernoulli(const RbpParams& prior,
                                     const std::vector<CountMeasure>& draws) {
  return rbp_posterior_impl(prior, 1.0, draws, true);
}

RbpPosterior rbp_posterior_negbin(const RbpParams& prior, double r,
                                  const std::vector<CountMeasure>& draws) {
  if (!(r > 0.0)) throw std::invalid_argument("rbp posterior: r must be > 0");
  return rbp_posterior_impl(prior, r, draws, false);
}

void write_report(std::ostream& os, const BpPosterior& post) {
  os.precision(17);
  os << "family beta-process\n"
     << "concentration " << post.params.concentration << '\n'
     << "mass " << post.params.mass << '\n';
  for (std::size_t i = 0; i < post.params.fixed_atoms.size(); ++i) {
    const auto& fa = post.params.fixed_atoms[i];
    os << "atom " << fa.location << " rho " << fa.rho << " provenance "
       << provenance_name(post.provenance[i]) << '\n';
  }
}

void write_report(std::ostream& os, const RbpPosterior& post) {
  os.precision(17);
  os << "family beta-process-free-atoms\n"
     << "concentration " << post.params.concentration << '\n'
     << "mass " << post.params.mass << '\n';
  for (std::size_t i = 0; i < post.params.fixed_atoms.size(); ++i) {
    const auto& fa = post.params.fixed_atoms[i];
    os << "atom " << fa.location << " rho " << fa.rho << " sigma " << fa.sigma
       << " provenance " << provenance_name(post.provenance[i]) << '\n';
  }
}

}  // namespace bnbp
