#include "bnbp/hbnbp.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace bnbp {

namespace {

constexpr double kFloor = 1e-12;

double clamp01(double b) {
  return std::min(1.0 - kFloor, std::max(kFloor, b));
}

double logit(double b) { return std::log(b) - std::log1p(-b); }

double inv_logit(double l) {
  if (l >= 0.0) return 1.0 / (1.0 + std::exp(-l));
  double e = std::exp(l);
  return e / (1.0 + e);
}

double log_poisson_pmf(long k, double rate) {
  if (rate <= 0.0) return k == 0 ? 0.0 : -std::numeric_limits<double>::infinity();
  return k * std::log(rate) - rate - std::lgamma(k + 1.0);
}

// log P(X >= c) for X ~ Poisson(rate), stable for large c / small rate where
// the plain tail underflows.  The series 1 + r/(c+1) + r^2/((c+1)(c+2)) + ...
// lies in [1, e^rate], so only the leading pmf needs log treatment.
double log_poisson_tail(long c, double rate) {
  if (c <= 0) return 0.0;
  if (rate <= 0.0) return -std::numeric_limits<double>::infinity();
  double series = 0.0, term = 1.0;
  for (long j = c + 1; term > 1e-18 * (1.0 + series); ++j) {
    term *= rate / j;
    series += term;
  }
  return log_poisson_pmf(c, rate) + std::log1p(series);
}

// log(1 - e^-x) without the catastrophic rounding of exp(-x) -> 1.0 at tiny x
double log1mexp(double x) {
  return x > 0.6931471805599453 ? std::log1p(-std::exp(-x))
                                : std::log(-std::expm1(-x));
}

// Dirichlet draws with very small concentration can underflow individual
// cells to exactly zero; keep the support strictly positive so downstream
// likelihood products never collapse to an all-zero categorical.
void clamp_zero_cells(std::vector<double>& p) {
  for (double& x : p)
    if (x < 1e-300) x = 1e-300;
}

double digamma(double x) {
  double r = 0.0;
  while (x < 6.0) {
    r -= 1.0 / x;
    x += 1.0;
  }
  double f = 1.0 / (x * x);
  return r + std::log(x) - 0.5 / x -
         f * (1.0 / 12.0 - f * (1.0 / 120.0 - f / 252.0));
}

}  // namespace

void SamplerConfig::validate() const {
  if (mode == SamplerMode::FiniteApprox) {
    if (finite_k < 1)
      throw std::invalid_argument("sampler: finite_k must be >= 1");
    if (!(gamma0 / finite_k < 1.0))
      throw std::invalid_argument("sampler: need gamma0 < finite_k");
  }
  if (!(gamma0 > 0.0) || !(theta0 > 0.0))
    throw std::invalid_argument("sampler: shared mass/concentration invalid");
  if (!(gamma_d > 0.0) || !(theta_d > 0.0))
    throw std::invalid_argument("sampler: group mass/concentration invalid");
  if (!(eta > 0.0)) throw std::invalid_argument("sampler: eta must be > 0");
  if (!(zeta_base > 1.0))
    throw std::invalid_argument("sampler: zeta_base must exceed 1");
  if (!(rw_step > 0.0))
    throw std::invalid_argument("sampler: rw_step must be > 0");
  // group weights must stay inside the unit interval for every b0 in [0, 1]
  if (!(gamma_d <= 1.0))
    throw std::invalid_argument("sampler: gamma_d must be <= 1");
}

double heuristic_r(long doc_length, double gamma0, double theta0) {
  if (doc_length < 1)
    throw std::invalid_argument("heuristic_r: document must be non-empty");
  if (!(theta0 > 1.0))
    throw std::invalid_argument(
        "heuristic_r: needs theta0 > 1 (finite expected length)");
  return doc_length * (theta0 - 1.0) / (theta0 * gamma0);
}

HbnbpSampler::HbnbpSampler(const TokenCorpus& corpus, const SamplerConfig& cfg)
    : corpus_(corpus), cfg_(cfg) {
  cfg_.validate();
  if (corpus_.docs.empty())
    throw std::invalid_argument("sampler: empty corpus");
  if (corpus_.vocab_sizes.empty())
    throw std::invalid_argument("sampler: no fields");
  for (const auto& d : corpus_.docs)
    for (const auto& tok : d.tokens) {
      if (tok.size() != corpus_.vocab_sizes.size())
        throw std::invalid_argument("sampler: token arity mismatch");
      for (std::size_t f = 0; f < tok.size(); ++f)
        if (tok[f] < 0 || tok[f] >= corpus_.vocab_sizes[f])
          throw std::invalid_argument("sampler: token out of vocabulary");
    }
  r_.reserve(corpus_.docs.size());
  for (const auto& d : corpus_.docs)
    r_.push_back(cfg_.r_override > 0.0
                     ? cfg_.r_override
                     : heuristic_r(static_cast<long>(d.tokens.size()),
                                   cfg_.gamma0, cfg_.theta0));
}

int HbnbpSampler::max_slice_index(double u_val) const {
  if (!(u_val > 0.0)) throw numeric_error("slice: non-positive u");
  if (u_val >= 1.0) return 0;
  return static_cast<int>(
      std::floor(-std::log(u_val) / std::log(cfg_.zeta_base) + 1e-12));
}

long HbnbpSampler::sample_round_gap_prior(long m_prev, long c_at_m_prev,
                                          Rng& rng) const {
  auto rate = [&](long m) { return cfg_.theta0 * cfg_.gamma0 / (cfg_.theta0 + m); };
  double log_denom = log_poisson_tail(c_at_m_prev, rate(m_prev));
  double p0 =
      std::exp(log_poisson_tail(c_at_m_prev + 1, rate(m_prev)) - log_denom);
  double u = rng.uniform();
  if (u < p0) return 0;
  u -= p0;
  double base =
      std::exp(log_poisson_pmf(c_at_m_prev, rate(m_prev)) - log_denom);
  double survive = 1.0;  // prob all rounds between stayed empty
  const long walk_cap = 100000;
  for (long gap = 1; gap < walk_cap; ++gap) {
    double empty = std::exp(-rate(m_prev + gap));
    double p = base * survive * (1.0 - empty);
    if (u < p) return gap;
    u -= p;
    survive *= empty;
  }
  // Deep tail: survival decays only polynomially in the gap, so when the
  // starting round index is large the walk can run out of iterations with
  // real mass left.  The per-round masses telescope, so the remaining CDF is
  // base * (survive - S(g)) with
  //   S(g) = exp(-theta0*gamma0 * (psi(theta0+m_prev+g+1) - psi(theta0+m_prev+1)))
  // and we can invert it by bisection on g.
  double target = survive - u / base;
  // guard against rounding drift in the walk: never go past the 1 - 1e-12
  // quantile of the tail
  if (!(target > survive * 1e-12)) target = survive * 1e-12;
  double log_target = std::log(target);
  double scale = cfg_.theta0 * cfg_.gamma0;
  double psi0 = digamma(cfg_.theta0 + m_prev + 1.0);
  auto log_surv = [&](long g) {
    return -scale * (digamma(cfg_.theta0 + m_prev + g + 1.0) - psi0);
  };
  long lo = walk_cap - 1, hi = 2 * walk_cap;
  if (log_surv(lo) <= log_target) return walk_cap;
  // cap at ~1e15 rounds: beyond that the component weight Beta(1, theta0+m)
  // is below double resolution of 1-b anyway, and capping keeps cumulative
  // round indices far from integer overflow
  while (log_surv(hi) > log_target && hi < (1L << 50)) {
    lo = hi;
    hi *= 2;
  }
  while (lo + 1 < hi) {
    long mid = lo + (hi - lo) / 2;
    if (log_surv(mid) <= log_target) hi = mid;
    else lo = mid;
  }
  return hi;
}

void HbnbpSampler::instantiate_component(Rng& rng) {
  int k = state_.K;
  int D = static_cast<int>(corpus_.docs.size());

  if (cfg_.mode == SamplerMode::ExactSlice) {
    long m_prev = k == 0 ? 0 : state_.round_index[k - 1];
    long c = 0;
    for (int j = 0; j < k; ++j)
      if (state_.round_index[j] == m_prev) ++c;
    if (k == 0) c = 0;
    long gap = sample_round_gap_prior(m_prev, c, rng);
    state_.round_gap.push_back(gap);
    state_.round_index.push_back(m_prev + gap);
    state_.b0.push_back(
        clamp01(rng.beta(1.0, cfg_.theta0 + m_prev + gap)));
  } else {
    double a = cfg_.theta0 * cfg_.gamma0 / cfg_.finite_k;
    state_.b0.push_back(clamp01(rng.beta(a, cfg_.theta0 - a)));
  }

  std::vector<std::vector<double>> topic;
  for (int v : corpus_.vocab_sizes) {
    topic.push_back(rng.dirichlet(std::vector<double>(v, cfg_.eta)));
    clamp_zero_cells(topic.back());
  }
  state_.topics.push_back(std::move(topic));

  double b0k = state_.b0.back();
  for (int d = 0; d < D; ++d) {
    double a = cfg_.gamma_d * cfg_.theta_d * b0k;
    double bdk = clamp01(rng.beta(a, cfg_.theta_d - a));
    state_.b[d].push_back(bdk);
    // conditioned on an all-zero count column: shape r_d, rate 1/b
    state_.lambda[d].push_back(rng.gamma(r_[d], 1.0 / bdk));
    state_.n_dk[d].push_back(0);
  }
  ++state_.K;
}

void HbnbpSampler::grow_to(int k_new, Rng& rng) {
  if (cap_ >= 0) k_new = std::min(k_new, cap_);
  while (state_.K < k_new) instantiate_component(rng);
}

void HbnbpSampler::init(Rng& rng) {
  int D = static_cast<int>(corpus_.docs.size());
  state_ = HbnbpState{};
  state_.b.assign(D, {});
  state_.lambda.assign(D, {});
  state_.n_dk.assign(D, {});
  int k0 = cfg_.mode == SamplerMode::FiniteApprox
               ? cfg_.finite_k
               : (cap_ >= 0 ? cap_ : 8);
  while (state_.K < k0) instantiate_component(rng);

  state_.z.assign(D, {});
  state_.u.assign(D, {});
  for (int d = 0; d < D; ++d) {
    std::size_t n = corpus_.docs[d].tokens.size();
    state_.z[d].resize(n);
    state_.u[d].resize(n);
    for (std::size_t i = 0; i < n; ++i) {
      int z = static_cast<int>(rng.uniform() * state_.K);
      z = std::min(z, state_.K - 1);
      state_.z[d][i] = z;
      state_.u[d][i] =
          rng.uniform() * std::pow(cfg_.zeta_base, -(z + 1.0));
    }
  }
  refresh_counts();
  sample_lambda(rng);
}

void HbnbpSampler::refresh_counts() {
  for (std::size_t d = 0; d < corpus_.docs.size(); ++d) {
    std::fill(state_.n_dk[d].begin(), state_.n_dk[d].end(), 0L);
    for (int z : state_.z[d]) ++state_.n_dk[d][z];
  }
}

void HbnbpSampler::sample_u(Rng& rng) {
  if (cfg_.mode != SamplerMode::ExactSlice) return;
  for (std::size_t d = 0; d < state_.z.size(); ++d)
    for (std::size_t i = 0; i < state_.z[d].size(); ++i)
      state_.u[d][i] = rng.uniform() *
                       std::pow(cfg_.zeta_base, -(state_.z[d][i] + 1.0));
}

void HbnbpSampler::sample_lambda(Rng& rng) {
  for (std::size_t d = 0; d < corpus_.docs.size(); ++d)
    for (int k = 0; k < state_.K; ++k)
      state_.lambda[d][k] = rng.gamma(r_[d] + state_.n_dk[d][k],
                                      1.0 / state_.b[d][k]);
}

void HbnbpSampler::sample_z(Rng& rng) {
  std::vector<double> w;
  for (std::size_t d = 0; d < corpus_.docs.size(); ++d) {
    const auto& toks = corpus_.docs[d].tokens;
    for (std::size_t i = 0; i < toks.size(); ++i) {
      int kmax;
      if (cfg_.mode == SamplerMode::ExactSlice) {
        kmax = max_slice_index(state_.u[d][i]);
        grow_to(kmax, rng);
        kmax = std::min(kmax, state_.K);
      } else {
        kmax = state_.K;
      }
      // work in log space: with sharp topics the per-component products can
      // underflow to zero simultaneously even though the conditional is fine
      w.assign(kmax, 0.0);
      double mx = -std::numeric_limits<double>::infinity();
      for (int k = 0; k < kmax; ++k) {
        double lk = std::log(state_.lambda[d][k]);
        if (cfg_.mode == SamplerMode::ExactSlice)
          lk += (k + 1.0) * std::log(cfg_.zeta_base);  // 1 / zeta_k
        for (std::size_t f = 0; f < toks[i].size(); ++f)
          lk += std::log(state_.topics[k][f][toks[i][f]]);
        w[k] = lk;
        mx = std::max(mx, lk);
      }
      for (int k = 0; k < kmax; ++k) w[k] = std::exp(w[k] - mx);
      state_.z[d][i] = static_cast<int>(rng.categorical(w));
    }
  }
  refresh_counts();
}

std::pair<double, double> HbnbpSampler::b_dk_posterior_shapes(int d,
                                                              int k) const {
  double a = cfg_.gamma_d * cfg_.theta_d * state_.b0[k];
  return {a + state_.n_dk[d][k],
          cfg_.theta_d * (1.0 - cfg_.gamma_d * state_.b0[k]) + r_[d]};
}

void HbnbpSampler::sample_b_dk(Rng& rng) {
  for (std::size_t d = 0; d < corpus_.docs.size(); ++d)
    for (int k = 0; k < state_.K; ++k) {
      auto [a, b] = b_dk_posterior_shapes(static_cast<int>(d), k);
      state_.b[d][k] = clamp01(rng.beta(a, b));
    }
}

std::vector<double> HbnbpSampler::topic_posterior_alpha(int k,
                                                        int field) const {
  std::vector<double> alpha(corpus_.vocab_sizes[field], cfg_.eta);
  for (std::size_t d = 0; d < corpus_.docs.size(); ++d)
    for (std::size_t i = 0; i < state_.z[d].size(); ++i)
      if (state_.z[d][i] == k)
        alpha[corpus_.docs[d].tokens[i][field]] += 1.0;
  return alpha;
}

void HbnbpSampler::sample_topics(Rng& rng) {
  int F = static_cast<int>(corpus_.vocab_sizes.size());
  // accumulate all counts in one pass instead of K full scans
  std::vector<std::vector<std::vector<double>>> alpha(state_.K);
  for (int k = 0; k < state_.K; ++k)
    for (int f = 0; f < F; ++f)
      alpha[k].push_back(
          std::vector<double>(corpus_.vocab_sizes[f], cfg_.eta));
  for (std::size_t d = 0; d < corpus_.docs.size(); ++d)
    for (std::size_t i = 0; i < state_.z[d].size(); ++i)
      for (int f = 0; f < F; ++f)
        alpha[state_.z[d][i]][f][corpus_.docs[d].tokens[i][f]] += 1.0;
  for (int k = 0; k < state_.K; ++k)
    for (int f = 0; f < F; ++f) {
      state_.topics[k][f] = rng.dirichlet(alpha[k][f]);
      clamp_zero_cells(state_.topics[k][f]);
    }
}

double HbnbpSampler::b0_log_target(int k, double b0) const {
  double lp;
  if (cfg_.mode == SamplerMode::FiniteApprox) {
    double a0 = cfg_.theta0 * cfg_.gamma0 / cfg_.finite_k;
    lp = (a0 - 1.0) * std::log(b0) +
         (cfg_.theta0 - a0 - 1.0) * std::log1p(-b0);
  } else {
    lp = (cfg_.theta0 + state_.round_index[k] - 1.0) * std::log1p(-b0);
  }
  for (std::size_t d = 0; d < corpus_.docs.size(); ++d) {
    double a = cfg_.gamma_d * cfg_.theta_d * b0;
    double c = cfg_.theta_d * (1.0 - cfg_.gamma_d * b0);
    if (cfg_.collapsed_b0) {
      lp += std::lgamma(state_.n_dk[d][k] + a) + std::lgamma(r_[d] + c) -
            std::lgamma(a) - std::lgamma(c);
    } else {
      double bdk = state_.b[d][k];
      lp += a * std::log(bdk) + c * std::log1p(-bdk) - std::lgamma(a) -
            std::lgamma(c);
    }
  }
  return lp;
}

void HbnbpSampler::sample_b0(Rng& rng) {
  for (int k = 0; k < state_.K; ++k) {
    double cur = state_.b0[k];
    double prop = clamp01(inv_logit(logit(cur) + rng.normal(0.0, cfg_.rw_step)));
    // Jacobian of the logit parameterization: b (1 - b)
    double log_acc = b0_log_target(k, prop) - b0_log_target(k, cur) +
                     std::log(prop) + std::log1p(-prop) - std::log(cur) -
                     std::log1p(-cur);
    bool accept = std::isfinite(log_acc) &&
                  (log_acc >= 0.0 || std::log(rng.uniform()) < log_acc);
    if (!accept) continue;
    state_.b0[k] = prop;
    if (cfg_.collapsed_b0) {
      // the move integrated the group weights out; redraw them right away so
      // the rest of the state matches the new shared weight
      for (std::size_t d = 0; d < corpus_.docs.size(); ++d) {
        auto [a, b] = b_dk_posterior_shapes(static_cast<int>(d), k);
        state_.b[d][k] = clamp01(rng.beta(a, b));
      }
    }
  }
}

double HbnbpSampler::log_round_prior_tail(int from_k,
                                          const std::vector<long>& gaps) const {
  auto rate = [&](long m) {
    return cfg_.theta0 * cfg_.gamma0 / (cfg_.theta0 + m);
  };
  double lp = 0.0;
  long m = 0;
  // atoms are visited in nondecreasing round order, so the occupancy of the
  // current round is the only count ever queried
  long cur_m = -1, cur_count = 0;
  auto count_at = [&](long mm) { return mm == cur_m ? cur_count : 0L; };
  for (int j = 0; j < state_.K; ++j) {
    long g = gaps[j];
    if (j >= from_k) {
      long c = count_at(m);
      double log_tail_c = log_poisson_tail(c, rate(m));
      if (g == 0) {
        lp += log_poisson_tail(c + 1, rate(m)) - log_tail_c;
      } else {
        lp += log_poisson_pmf(c, rate(m)) - log_tail_c;
        // sum of -rate(m+h) for h in [1, g); the harmonic-like sum telescopes
        // to a digamma difference, needed because gaps can be very large
        if (g <= 64) {
          for (long h = 1; h < g; ++h) lp += -rate(m + h);
        } else {
          lp += -cfg_.theta0 * cfg_.gamma0 *
                (digamma(cfg_.theta0 + m + g) - digamma(cfg_.theta0 + m + 1.0));
        }
        lp += log1mexp(rate(m + g));
      }
      // weight prior factor for this atom at its (candidate) round
      long mj = m + g;
      lp += std::log(cfg_.theta0 + mj) +
            (cfg_.theta0 + mj - 1.0) * std::log1p(-state_.b0[j]);
    }
    m += g;
    if (m == cur_m) {
      ++cur_count;
    } else {
      cur_m = m;
      cur_count = 1;
    }
  }
  return lp;
}

void HbnbpSampler::sample_rounds(Rng& rng) {
  if (cfg_.mode != SamplerMode::ExactSlice) return;
  for (int k = 0; k < state_.K; ++k) {
    long g_cur = state_.round_gap[k];
    double cap = std::pow(cfg_.zeta_base, -static_cast<double>(g_cur)) *
                 std::pow(1.0 - state_.b0[k], static_cast<double>(g_cur));
    double v = rng.uniform() * cap;
    if (!(v > 0.0)) continue;  // envelope underflowed; keep the current gap

    // slice envelope A(g) = zeta_base^-g (1 - b0_k)^g; given v, the support
    // is finite and each candidate is reweighted by 1 / A(g)
    double log_inv_env = std::log(cfg_.zeta_base) - std::log1p(-state_.b0[k]);
    std::vector<long> support;
    std::vector<double> logw;
    std::vector<long> gaps = state_.round_gap;
    for (long g = 0;; ++g) {
      double level = std::pow(cfg_.zeta_base, -static_cast<double>(g)) *
                     std::pow(1.0 - state_.b0[k], static_cast<double>(g));
      if (level < v) break;
      gaps[k] = g;
      support.push_back(g);
      logw.push_back(log_round_prior_tail(k, gaps) + g * log_inv_env);
    }
    if (support.empty()) continue;  // numerically degenerate; keep g_cur
    for (double& lw : logw)
      if (std::isnan(lw)) lw = -std::numeric_limits<double>::infinity();
    double mx = *std::max_element(logw.begin(), logw.end());
    if (!std::isfinite(mx)) continue;  // every candidate underflowed; keep g_cur
    std::vector<double> w(logw.size());
    for (std::size_t i = 0; i < logw.size(); ++i)
      w[i] = std::exp(logw[i] - mx);
    long g_new = support[rng.categorical(w)];
    if (g_new != state_.round_gap[k]) {
      state_.round_gap[k] = g_new;
      long m = 0;
      for (int j = 0; j < state_.K; ++j) {
        m += state_.round_gap[j];
        state_.round_index[j] = m;
      }
    }
  }
}

void HbnbpSampler::sweep(Rng& rng) {
  if (cfg_.mode == SamplerMode::ExactSlice) {
    sample_u(rng);
    sample_lambda(rng);
    sample_z(rng);
    sample_b_dk(rng);
    sample_topics(rng);
    sample_b0(rng);
    sample_rounds(rng);
    if (cap_ < 0) {
      // drop trailing never-used components; they are redrawn from their
      // conditionals when a slice reaches that deep again
      int keep = 1;
      for (std::size_t d = 0; d < state_.z.size(); ++d)
        for (int z : state_.z[d]) keep = std::max(keep, z + 1);
      if (keep < state_.K) {
        state_.K = keep;
        state_.b0.resize(keep);
        state_.topics.resize(keep);
        state_.round_gap.resize(keep);
        state_.round_index.resize(keep);
        for (std::size_t d = 0; d < state_.b.size(); ++d) {
          state_.b[d].resize(keep);
          state_.lambda[d].resize(keep);
          state_.n_dk[d].resize(keep);
        }
      }
    }
  } else {
    sample_lambda(rng);
    sample_z(rng);
    sample_b_dk(rng);
    sample_topics(rng);
    sample_b0(rng);
  }
}

void HbnbpSampler::resample_data(Rng& rng) {
  for (std::size_t d = 0; d < corpus_.docs.size(); ++d) {
    auto& doc = corpus_.docs[d];
    doc.tokens.clear();
    state_.z[d].clear();
    state_.u[d].clear();
    for (int k = 0; k < state_.K; ++k) {
      double b = state_.b[d][k];
      double lam = rng.gamma(r_[d], (1.0 - b) / b);
      state_.lambda[d][k] = lam;
      long cnt = rng.poisson(lam);
      for (long i = 0; i < cnt; ++i) {
        std::vector<int> tok;
        for (std::size_t f = 0; f < corpus_.vocab_sizes.size(); ++f)
          tok.push_back(
              static_cast<int>(rng.categorical(state_.topics[k][f])));
        doc.tokens.push_back(std::move(tok));
        state_.z[d].push_back(k);
        state_.u[d].push_back(rng.uniform() *
                              std::pow(cfg_.zeta_base, -(k + 1.0)));
      }
    }
  }
  refresh_counts();
}

long HbnbpSampler::used_components(double threshold) const {
  long n = 0;
  for (double b : state_.b0)
    if (b > threshold) ++n;
  return n;
}

double HbnbpSampler::log_joint() const {
  double lp = 0.0;
  if (cfg_.mode == SamplerMode::FiniteApprox) {
    double a0 = cfg_.theta0 * cfg_.gamma0 / cfg_.finite_k;
    for (double b0 : state_.b0)
      lp += (a0 - 1.0) * std::log(b0) +
            (cfg_.theta0 - a0 - 1.0) * std::log1p(-b0);
  } else {
    lp += log_round_prior_tail(0, state_.round_gap);
  }
  for (std::size_t d = 0; d < corpus_.docs.size(); ++d)
    for (int k = 0; k < state_.K; ++k) {
      double a = cfg_.gamma_d * cfg_.theta_d * state_.b0[k];
      double c = cfg_.theta_d * (1.0 - cfg_.gamma_d * state_.b0[k]);
      double b = state_.b[d][k];
      lp += (a - 1.0) * std::log(b) + (c - 1.0) * std::log1p(-b) -
            std::lgamma(a) - std::lgamma(c) + std::lgamma(a + c);
      // counts marginalized over lambda: negative binomial
      long n = state_.n_dk[d][k];
      lp += std::lgamma(n + r_[d]) - std::lgamma(n + 1.0) -
            std::lgamma(r_[d]) + r_[d] * std::log1p(-b) + n * std::log(b);
    }
  for (std::size_t d = 0; d < corpus_.docs.size(); ++d)
    for (std::size_t i = 0; i < state_.z[d].size(); ++i)
      for (std::size_t f = 0; f < corpus_.vocab_sizes.size(); ++f)
        lp += std::log(
            state_.topics[state_.z[d][i]][f][corpus_.docs[d].tokens[i][f]]);
  for (int k = 0; k < state_.K; ++k)
    for (std::size_t f = 0; f < corpus_.vocab_sizes.size(); ++f)
      for (double p : state_.topics[k][f])
        lp += (cfg_.eta - 1.0) * std::log(std::max(p, 1e-300));
  return lp;
}

}  // namespace bnbp
