#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "bnbp/corpus.hpp"
#include "bnbp/rng.hpp"

namespace bnbp {

enum class SamplerMode { ExactSlice, FiniteApprox };

struct SamplerConfig {
  SamplerMode mode = SamplerMode::ExactSlice;
  int finite_k = 100;          // truncation level, FiniteApprox only
  double gamma0 = 3.0;         // shared-measure mass
  double theta0 = 3.0;         // shared-measure concentration
  double gamma_d = 1.0;        // per-group mass
  double theta_d = 10.0;       // per-group concentration
  double eta = 0.1;            // topic Dirichlet smoothing
  double zeta_base = 1.5;      // slice levels zeta_k = zeta_base^-k
  double rw_step = 0.5;        // logit-scale random-walk scale for b0
  bool collapsed_b0 = false;   // integrate group weights out of the b0 move
  double r_override = 0.0;     // <= 0: use heuristic_r per document

  void validate() const;
};

// r_d matching the expected document length implied by the priors:
// N_d * (theta0 - 1) / (theta0 * gamma0); requires theta0 > 1 and N_d >= 1.
double heuristic_r(long doc_length, double gamma0, double theta0);

struct HbnbpState {
  int K = 0;  // instantiated components
  // topics[k][field][word]
  std::vector<std::vector<std::vector<double>>> topics;
  std::vector<double> b0;                  // shared weights, length K
  std::vector<long> round_gap;             // exact mode: g_k >= 0
  std::vector<long> round_index;           // exact mode: m_k = sum g_1..g_k
  std::vector<std::vector<double>> b;      // b[d][k], group weights
  std::vector<std::vector<double>> lambda; // lambda[d][k]
  std::vector<std::vector<int>> z;         // z[d][n], 0-based component ids
  std::vector<std::vector<double>> u;      // slice variables, exact mode
  std::vector<std::vector<long>> n_dk;     // assignment counts
};

class HbnbpSampler {
 public:
  HbnbpSampler(const TokenCorpus& corpus, const SamplerConfig& cfg);

  void init(Rng& rng);  // draw a full state from the priors

  // One sweep in the fixed order: slices, lambda, assignments, group
  // weights, topics, shared weights, rounds (exact mode only).
  void sweep(Rng& rng);

  // Individual kernels (exposed for validation).
  void sample_u(Rng& rng);
  void sample_lambda(Rng& rng);
  void sample_z(Rng& rng);
  void sample_b_dk(Rng& rng);
  void sample_topics(Rng& rng);
  void sample_b0(Rng& rng);
  void sample_rounds(Rng& rng);

  // Conditionally regenerate the data layer (lambda, counts, assignments,
  // slices and tokens) given the weights -- the "resample data" half of a
  // prior-reproduction check. Document lengths change with the draw.
  void resample_data(Rng& rng);

  // Restrict the representation to at most k components (no growth). Used by
  // truncated prior-reproduction runs.
  void cap_components(int k) { cap_ = k; }

  const HbnbpState& state() const { return state_; }
  HbnbpState& state() { return state_; }
  const std::vector<double>& doc_r() const { return r_; }
  const TokenCorpus& corpus() const { return corpus_; }
  const SamplerConfig& config() const { return cfg_; }

  long used_components(double threshold) const;  // # { k : b0_k > threshold }
  double log_joint() const;                      // up to an additive constant

  // posterior parameters of individual conditionals, exposed for tests
  std::pair<double, double> b_dk_posterior_shapes(int d, int k) const;
  std::vector<double> topic_posterior_alpha(int k, int field) const;
  double b0_log_target(int k, double b0) const;  // density the MH move sees

 private:
  void grow_to(int k_new, Rng& rng);
  void instantiate_component(Rng& rng);  // append component K -> K+1
  void refresh_counts();
  int max_slice_index(double u_val) const;
  long sample_round_gap_prior(long m_prev, long c_at_m_prev, Rng& rng) const;
  double log_round_prior_tail(int from_k, const std::vector<long>& gaps) const;

  TokenCorpus corpus_;
  SamplerConfig cfg_;
  std::vector<double> r_;  // per-document negative-binomial shape
  HbnbpState state_;
  int cap_ = -1;  // < 0: unbounded
};

// One retained posterior sample: what prediction needs.
struct PosteriorSample {
  long iteration = 0;
  std::vector<double> b0;
  std::vector<std::vector<std::vector<double>>> topics;
};

PosteriorSample snapshot(const HbnbpSampler& s, long iteration);

// Monte Carlo predictive log-likelihood of a held-out document: group
// weights and rates are integrated out with `inner_draws` fresh draws per
// retained sample, then averaged over samples in log space. The document
// length enters through its own factor, so two documents with identical
// word frequencies but different lengths score differently.
double predictive_loglik(const std::vector<PosteriorSample>& samples,
                         const std::vector<std::vector<int>>& tokens,
                         const SamplerConfig& cfg, double r_d, int inner_draws,
                         Rng& rng);

// sample-store records, one JSON object per line
void write_samples(std::ostream& os,
                   const std::vector<PosteriorSample>& samples);
std::vector<PosteriorSample> read_samples(std::istream& is);

// 5x5-grid bar topics: 5 row bars and 5 column bars over a 25-word
// vocabulary; every document mixes bars through a flat Dirichlet.
Corpus make_toy_bars(int docs, int words_per_doc, std::uint64_t seed);
std::vector<std::vector<double>> toy_bar_topics();

}  // namespace bnbp
