#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <cmath>
#include <functional>
#include <sstream>
#include <vector>

#include "bnbp/conjugacy.hpp"
#include "doctest.h"

using namespace bnbp;

namespace {

// plain fixed-grid Simpson, written independently of the library quadrature
double simpson(const std::function<double(double)>& f, double a, double b,
               int n) {
  double h = (b - a) / n, s = f(a) + f(b);
  for (int i = 1; i < n; ++i) s += (i % 2 ? 4.0 : 2.0) * f(a + i * h);
  return s * h / 3.0;
}

// posterior mean of a single atom weight under a Beta(rho, sigma) prior and
// negative-binomial observations, straight from the defining integrals
double quadrature_posterior_mean(double rho, double sigma, double r,
                                 const std::vector<long>& ks) {
  auto dens = [&](double b) {
    double lp = (rho - 1.0) * std::log(b) + (sigma - 1.0) * std::log1p(-b);
    for (long k : ks) lp += r * std::log1p(-b) + k * std::log(b);
    return std::exp(lp);
  };
  auto num = [&](double b) { return b * dens(b); };
  double lo = 1e-9, hi = 1.0 - 1e-9;
  return simpson(num, lo, hi, 200000) / simpson(dens, lo, hi, 200000);
}

CountMeasure draw_at(std::vector<std::pair<double, long>> atoms) {
  CountMeasure m;
  for (auto [loc, c] : atoms) m.atoms.push_back({loc, c});
  return m;
}

}  // namespace

TEST_CASE("beta-process / Bernoulli update in canonical form") {
  BpParams prior;
  prior.mass = 1.5;
  prior.concentration = 3.0;
  prior.fixed_atoms = {{0.5, 0.2}};
  // two draws: fixed atom hit once; one novel location in the second draw
  std::vector<CountMeasure> draws = {draw_at({{0.5, 1}}),
                                     draw_at({{0.5, 0}, {0.9, 1}})};
  auto post = bp_posterior_bernoulli(prior, draws);
  CHECK(post.params.concentration == doctest::Approx(5.0));
  CHECK(post.params.mass == doctest::Approx(0.9));
  REQUIRE(post.params.fixed_atoms.size() == 2);
  CHECK(post.params.fixed_atoms[0].rho ==
        doctest::Approx(0.2 + 1.0 / 4.5));  // product gamma*theta = 4.5
  CHECK(post.provenance[0] == AtomProvenance::OldRepeated);
  CHECK(post.params.fixed_atoms[1].location == 0.9);
  CHECK(post.params.fixed_atoms[1].rho == doctest::Approx(1.0 / 4.5));
  CHECK(post.provenance[1] == AtomProvenance::New);

  // mass-concentration product is invariant
  CHECK(post.params.mass * post.params.concentration ==
        doctest::Approx(prior.mass * prior.concentration));

  // non-binary counts rejected
  CHECK_THROWS_AS(bp_posterior_bernoulli(prior, {draw_at({{0.5, 2}})}),
                  std::invalid_argument);
}

TEST_CASE("free-atom Bernoulli update") {
  RbpParams prior;
  prior.mass = 1.0;
  prior.concentration = 4.0;
  prior.fixed_atoms = {{0.5, 2.0, 3.0}};
  std::vector<CountMeasure> draws = {draw_at({{0.5, 1}}), draw_at({{0.5, 1}}),
                                     draw_at({{0.5, 0}, {0.2, 1}})};
  auto post = rbp_posterior_bernoulli(prior, draws);
  CHECK(post.params.concentration == doctest::Approx(7.0));
  CHECK(post.params.mass == doctest::Approx(4.0 / 7.0));
  REQUIRE(post.params.fixed_atoms.size() == 2);
  // old atom: (rho + 2, sigma + 3 - 2); classical beta-Bernoulli form
  CHECK(post.params.fixed_atoms[0].rho == doctest::Approx(4.0));
  CHECK(post.params.fixed_atoms[0].sigma == doctest::Approx(4.0));
  // new atom: (1, theta + 3 - 1)
  CHECK(post.params.fixed_atoms[1].rho == doctest::Approx(1.0));
  CHECK(post.params.fixed_atoms[1].sigma == doctest::Approx(6.0));
}

TEST_CASE("free-atom negative-binomial update") {
  RbpParams prior;
  prior.mass = 1.0;
  prior.concentration = 2.0;
  prior.fixed_atoms = {{0.5, 1.0, 1.0}};
  double r = 3.0;
  std::vector<CountMeasure> draws = {draw_at({{0.5, 4}}),
                                     draw_at({{0.5, 0}, {0.7, 2}})};
  auto post = rbp_posterior_negbin(prior, r, draws);
  CHECK(post.params.concentration == doctest::Approx(8.0));  // theta + r N
  CHECK(post.params.mass == doctest::Approx(0.25));
  REQUIRE(post.params.fixed_atoms.size() == 2);
  CHECK(post.params.fixed_atoms[0].rho == doctest::Approx(5.0));
  CHECK(post.params.fixed_atoms[0].sigma == doctest::Approx(7.0));
  CHECK(post.provenance[0] == AtomProvenance::OldRepeated);
  CHECK(post.params.fixed_atoms[1].rho == doctest::Approx(2.0));
  CHECK(post.params.fixed_atoms[1].sigma == doctest::Approx(8.0));
  CHECK(post.provenance[1] == AtomProvenance::New);
}

TEST_CASE("single-atom update agrees with direct quadrature") {
  Rng rng(909);
  for (int rep = 0; rep < 20; ++rep) {
    double rho = 0.5 + 3.0 * rng.uniform();
    double sigma = 0.5 + 5.0 * rng.uniform();
    double r = 0.5 + 4.0 * rng.uniform();
    std::vector<long> ks;
    std::vector<CountMeasure> draws;
    int n = 1 + static_cast<int>(3.0 * rng.uniform());
    for (int i = 0; i < n; ++i) {
      long k = static_cast<long>(6.0 * rng.uniform());
      ks.push_back(k);
      draws.push_back(draw_at({{0.5, k}}));
    }
    RbpParams prior;
    prior.mass = 1.0;
    prior.concentration = 2.0;
    prior.fixed_atoms = {{0.5, rho, sigma}};
    auto post = rbp_posterior_negbin(prior, r, draws);
    double a = post.params.fixed_atoms[0].rho;
    double b = post.params.fixed_atoms[0].sigma;
    double oracle = quadrature_posterior_mean(rho, sigma, r, ks);
    CHECK(a / (a + b) == doctest::Approx(oracle).epsilon(1e-6));
  }
}

TEST_CASE("sequential updating equals the batch update") {
  Rng rng(1234);
  for (int rep = 0; rep < 100; ++rep) {
    RbpParams prior;
    prior.mass = 0.2 + 2.0 * rng.uniform();
    prior.concentration = 0.5 + 4.0 * rng.uniform();
    int n_atoms = 1 + static_cast<int>(3.0 * rng.uniform());
    for (int a = 0; a < n_atoms; ++a)
      prior.fixed_atoms.push_back({0.1 * (a + 1), 0.5 + rng.uniform(),
                                   0.5 + 2.0 * rng.uniform()});
    double r = 0.5 + 3.0 * rng.uniform();
    int n_draws = 2 + static_cast<int>(3.0 * rng.uniform());
    std::vector<CountMeasure> draws;
    for (int d = 0; d < n_draws; ++d) {
      CountMeasure m;
      for (int a = 0; a < n_atoms; ++a)
        m.atoms.push_back({0.1 * (a + 1),
                           static_cast<long>(4.0 * rng.uniform())});
      // novel locations appear from specific draws onwards
      if (d >= 1) m.atoms.push_back({0.9, static_cast<long>(3.0 * rng.uniform())});
      if (d >= 2) m.atoms.push_back({0.95, 1 + static_cast<long>(2.0 * rng.uniform())});
      draws.push_back(std::move(m));
    }

    auto batch = rbp_posterior_negbin(prior, r, draws);
    RbpParams seq = prior;
    for (const auto& d : draws) seq = rbp_posterior_negbin(seq, r, {d}).params;

    CHECK(seq.concentration == doctest::Approx(batch.params.concentration));
    CHECK(seq.mass == doctest::Approx(batch.params.mass));
    REQUIRE(seq.fixed_atoms.size() == batch.params.fixed_atoms.size());
    for (const auto& ba : batch.params.fixed_atoms) {
      bool found = false;
      for (const auto& sa : seq.fixed_atoms)
        if (sa.location == ba.location) {
          found = true;
          CHECK(sa.rho == doctest::Approx(ba.rho));
          CHECK(sa.sigma == doctest::Approx(ba.sigma));
        }
      CHECK(found);
    }
  }
}

TEST_CASE("Bernoulli sequential updating equals batch (canonical form)") {
  Rng rng(4321);
  for (int rep = 0; rep < 100; ++rep) {
    BpParams prior;
    prior.mass = 0.2 + 1.0 * rng.uniform();
    prior.concentration = 1.0 + 4.0 * rng.uniform();
    prior.fixed_atoms = {{0.5, 0.3 * rng.uniform() + 0.05}};
    std::vector<CountMeasure> draws;
    int n_draws = 2 + static_cast<int>(3.0 * rng.uniform());
    for (int d = 0; d < n_draws; ++d) {
      CountMeasure m;
      m.atoms.push_back({0.5, rng.uniform() < 0.5 ? 1L : 0L});
      if (d >= 1) m.atoms.push_back({0.9, rng.uniform() < 0.7 ? 1L : 0L});
      draws.push_back(std::move(m));
    }
    auto batch = bp_posterior_bernoulli(prior, draws);
    BpParams seq = prior;
    for (const auto& d : draws) seq = bp_posterior_bernoulli(seq, {d}).params;
    CHECK(seq.concentration == doctest::Approx(batch.params.concentration));
    CHECK(seq.mass == doctest::Approx(batch.params.mass));
    REQUIRE(seq.fixed_atoms.size() == batch.params.fixed_atoms.size());
    for (std::size_t i = 0; i < seq.fixed_atoms.size(); ++i) {
      bool found = false;
      for (const auto& sa : seq.fixed_atoms)
        if (sa.location == batch.params.fixed_atoms[i].location) {
          found = true;
          CHECK(sa.rho == doctest::Approx(batch.params.fixed_atoms[i].rho));
        }
      CHECK(found);
    }
  }
}

TEST_CASE("atoms unseen in the data keep their base weight (Bernoulli, canonical)") {
  BpParams prior;
  prior.mass = 1.0;
  prior.concentration = 2.0;
  prior.fixed_atoms = {{0.5, 0.3}};
  auto post = bp_posterior_bernoulli(prior, {draw_at({{0.5, 0}})});
  CHECK(post.provenance[0] == AtomProvenance::OldUnrepeated);
  CHECK(post.params.fixed_atoms[0].rho == doctest::Approx(0.3));
  // but its realized beta law still changes through theta and gamma
  CHECK(post.params.concentration == doctest::Approx(3.0));
}

TEST_CASE("report serialization") {
  RbpParams prior;
  prior.mass = 1.0;
  prior.concentration = 2.0;
  prior.fixed_atoms = {{0.5, 1.0, 1.0}};
  auto post = rbp_posterior_negbin(prior, 3.0, {draw_at({{0.5, 4}})});
  std::ostringstream os;
  write_report(os, post);
  auto text = os.str();
  CHECK(text.find("concentration 5") != std::string::npos);
  CHECK(text.find("rho 5") != std::string::npos);
  CHECK(text.find("old-repeated") != std::string::npos);
}
