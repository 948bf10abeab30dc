#pragma once

#include <cstdint>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "bnbp/errors.hpp"

namespace bnbp {

inline std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

// All sampling routines take an Rng by reference; derived streams keep
// replicates independent without sharing generator state.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : seed_(seed), gen_(splitmix64(seed)) {}

  Rng derive(std::uint64_t stream) const {
    return Rng(splitmix64(seed_ ^ splitmix64(stream + 0x51ed2701)));
  }

  double uniform() { return unif_(gen_); }

  double uniform(double lo, double hi) { return lo + (hi - lo) * unif_(gen_); }

  double normal(double mean, double sd) {
    std::normal_distribution<double> d(mean, sd);
    return d(gen_);
  }

  // shape / rate parameterization
  double gamma(double shape, double rate) {
    std::gamma_distribution<double> d(shape, 1.0 / rate);
    return d(gen_);
  }

  double beta(double a, double b) {
    // via two gammas; guard against underflow at very small shapes
    for (int attempt = 0; attempt < 64; ++attempt) {
      double x = gamma(a, 1.0);
      double y = gamma(b, 1.0);
      if (x + y > 0.0) return x / (x + y);
    }
    // both shapes so small that the draws underflow: fall back on the
    // limiting two-point law P(1) = a/(a+b)
    return uniform() < a / (a + b) ? 1.0 : 0.0;
  }

  long poisson(double mean) {
    if (mean < 0.0) throw std::invalid_argument("poisson: negative mean");
    if (mean == 0.0) return 0;
    std::poisson_distribution<long> d(mean);
    return d(gen_);
  }

  std::vector<double> dirichlet(const std::vector<double>& alpha) {
    std::vector<double> x(alpha.size());
    double s = 0.0;
    for (std::size_t i = 0; i < alpha.size(); ++i) {
      x[i] = gamma(alpha[i], 1.0);
      s += x[i];
    }
    if (s <= 0.0) {
      // extreme underflow: pick a single coordinate by the normalized alphas
      double t = 0.0;
      for (double a : alpha) t += a;
      double u = uniform() * t, c = 0.0;
      for (std::size_t i = 0; i < alpha.size(); ++i) {
        c += alpha[i];
        x[i] = 0.0;
        if (u <= c) {
          x[i] = 1.0;
          u = 2.0 * t;  // mark done
        }
      }
      return x;
    }
    for (double& v : x) v /= s;
    return x;
  }

  // index into a vector of unnormalized non-negative weights
  std::size_t categorical(const std::vector<double>& w) {
    double total = 0.0;
    for (double v : w) total += v;
    if (!(total > 0.0)) throw numeric_error("categorical: weights sum to zero");
    double u = uniform() * total, c = 0.0;
    for (std::size_t i = 0; i < w.size(); ++i) {
      c += w[i];
      if (u <= c) return i;
    }
    return w.size() - 1;
  }

  std::string save_state() const {
    std::ostringstream os;
    os << gen_ << ' ' << seed_;
    return os.str();
  }

  void load_state(const std::string& s) {
    std::istringstream is(s);
    is >> gen_ >> seed_;
    if (!is) throw data_error("rng: bad saved state");
  }

 private:
  std::uint64_t seed_;
  std::mt19937_64 gen_;
  std::uniform_real_distribution<double> unif_{0.0, 1.0};
};

}  // namespace bnbp
