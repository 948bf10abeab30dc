#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <cmath>
#include <vector>

#include "bnbp/asymptotics.hpp"
#include "doctest.h"
#include "stats.hpp"

using namespace bnbp;

TEST_CASE("expected total count is exactly linear in r") {
  // telescoping makes the series collapse to gamma theta r / (theta - 1)
  for (double r : {1.0, 2.5, 10.0, 300.0, 1000.0}) {
    CHECK(xi_bnbp(r, 3.0, 3.0) == doctest::Approx(4.5 * r).epsilon(1e-10));
    CHECK(xi_bnbp_asymptote(r, 3.0, 3.0) == doctest::Approx(4.5 * r));
  }
  CHECK(xi_bnbp(2.0, 1.0, 2.0) == doctest::Approx(4.0).epsilon(1e-10));
  CHECK_THROWS_AS(xi_bnbp(1.0, 3.0, 1.0), std::domain_error);
  CHECK_THROWS_AS(xi_bnbp(1.0, 3.0, 0.7), std::domain_error);
}

TEST_CASE("expected occupied atoms: harmonic form, quadrature, asymptote") {
  CHECK(phi_bnbp(1.0, 3.0, 3.0) == doctest::Approx(3.0));
  CHECK(phi_bnbp(3.0, 3.0, 3.0) ==
        doctest::Approx(9.0 * (1.0 / 3 + 1.0 / 4 + 1.0 / 5)));
  for (double r : {1.0, 2.0, 5.0, 17.0, 100.0}) {
    double exact = phi_bnbp(r, 3.0, 3.0);
    double quad = phi_bnbp_quadrature(r, 3.0, 3.0);
    CHECK(std::abs(exact - quad) <= 1e-8 * std::max(1.0, exact));
  }
  // log-growth: Phi(r) - gamma theta log r approaches a constant
  double d1 = phi_bnbp(1e4, 3.0, 3.0) - phi_bnbp_asymptote(1e4, 3.0, 3.0);
  double d2 = phi_bnbp(1e5, 3.0, 3.0) - phi_bnbp_asymptote(1e5, 3.0, 3.0);
  CHECK(std::abs(d1 - d2) < 0.01);
}

TEST_CASE("occupancy spectrum") {
  // j = 1, r = 3, mass = concentration = 3: 9 * 3 * Gamma(6)/Gamma(7) = 4.5
  CHECK(phi_j_bnbp(1, 3.0, 3.0, 3.0) == doctest::Approx(4.5).epsilon(1e-10));
  // sums over j reproduce Phi and xi
  double phi_sum = 0.0, xi_sum = 0.0;
  for (long j = 1; j <= 4000; ++j) {
    double v = phi_j_bnbp(j, 5.0, 3.0, 3.0);
    phi_sum += v;
    xi_sum += j * v;
  }
  CHECK(phi_sum == doctest::Approx(phi_bnbp(5.0, 3.0, 3.0)).epsilon(1e-6));
  CHECK(xi_sum == doctest::Approx(xi_bnbp(5.0, 3.0, 3.0)).epsilon(1e-3));
  // 1/j tail
  CHECK(phi_j_bnbp(1000, 3.0, 3.0, 3.0) ==
        doctest::Approx(phi_j_bnbp_asymptote(1000, 3.0, 3.0)).epsilon(0.02));
}

TEST_CASE("power-law variant") {
  CHECK(xi_3bnbp(10.0, 3.0, 3.0, 0.5) == doctest::Approx(36.0));
  CHECK_THROWS_AS(xi_3bnbp(1.0, 3.0, 0.3, 0.5), std::domain_error);
  // prefactor (gamma/alpha) Gamma(theta+1)/Gamma(theta+alpha) = 10.8325...
  double pref = phi_3bnbp_asymptote(1.0, 3.0, 3.0, 0.5);
  CHECK(pref == doctest::Approx(6.0 * std::tgamma(4.0) / std::tgamma(3.5)));
  CHECK(pref == doctest::Approx(10.8325).epsilon(1e-4));
  // exact integral approaches the r^alpha law from below
  double r1 = phi_3bnbp(1e4, 3.0, 3.0, 0.5) /
              phi_3bnbp_asymptote(1e4, 3.0, 3.0, 0.5);
  double r2 = phi_3bnbp(1e6, 3.0, 3.0, 0.5) /
              phi_3bnbp_asymptote(1e6, 3.0, 3.0, 0.5);
  CHECK(std::abs(1.0 - r1) < 0.02);
  CHECK(std::abs(1.0 - r2) < std::abs(1.0 - r1));
  // spectrum sums match the totals here too
  double phi_sum = 0.0, xi_sum = 0.0;
  for (long j = 1; j <= 400000; ++j) {
    double v = phi_j_3bnbp(j, 5.0, 3.0, 3.0, 0.5);
    phi_sum += v;
    xi_sum += j * v;
  }
  CHECK(phi_sum ==
        doctest::Approx(phi_3bnbp(5.0, 3.0, 3.0, 0.5)).epsilon(1e-4));
  CHECK(xi_sum == doctest::Approx(xi_3bnbp(5.0, 3.0, 3.0, 0.5)).epsilon(2e-2));
  // j^-(1+alpha) tail against the closed asymptote
  CHECK(phi_j_3bnbp(2000, 7.0, 3.0, 3.0, 0.5) ==
        doctest::Approx(phi_j_3bnbp_asymptote(2000, 7.0, 3.0, 3.0, 0.5))
            .epsilon(0.05));
}

TEST_CASE("urn-scheme comparators") {
  // harmonic number H_100 for unit concentration
  double h100 = 0.0;
  for (int i = 1; i <= 100; ++i) h100 += 1.0 / i;
  CHECK(dp_expected_clusters(100, 1.0) == doctest::Approx(h100));
  CHECK(dp_expected_clusters_asymptote(100, 1.0) ==
        doctest::Approx(std::log(100.0)));
  CHECK(dp_cluster_size_asymptote(3, 1.5) == doctest::Approx(0.5));
  CHECK(pyp_expected_clusters_asymptote(1, 1.0, 0.5) ==
        doctest::Approx(2.2568).epsilon(1e-4));

  // exact E[K_n] recursion: E[K_{i+1}] = E[K_i] + (theta + alpha E[K_i])/(theta+i)
  auto exact_k = [](long n, double th, double al) {
    double k = 0.0;
    for (long i = 0; i < n; ++i) k += (th + al * k) / (th + i);
    return k;
  };
  Rng rng(606);
  RunningStats crp, py;
  for (int i = 0; i < 2000; ++i) {
    crp.add(static_cast<double>(simulate_urn(500, 2.0, 0.0, rng).clusters));
    py.add(static_cast<double>(simulate_urn(500, 1.0, 0.5, rng).clusters));
  }
  CHECK(std::abs(crp.z_against(exact_k(500, 2.0, 0.0))) < 4.0);
  CHECK(std::abs(py.z_against(exact_k(500, 1.0, 0.5))) < 4.0);
  CHECK(exact_k(500, 2.0, 0.0) == doctest::Approx(dp_expected_clusters(500, 2.0)));
  // asymptote tracks the exact recursion within a few percent by n = 1e5
  CHECK(pyp_expected_clusters_asymptote(100000, 1.0, 0.5) ==
        doctest::Approx(exact_k(100000, 1.0, 0.5)).epsilon(0.03));
  // sizes add up to n
  auto u = simulate_urn(500, 1.0, 0.5, rng);
  long total = 0;
  for (long s : u.sizes) total += s;
  CHECK(total == 500);
}

TEST_CASE("growth simulation accounting and determinism") {
  GrowthConfig cfg;
  cfg.replicates = 5;
  cfg.epsilon = 1e-4;
  std::vector<double> grid = {2.0, 8.0, 32.0};
  auto a = simulate_growth(grid, cfg, 42);
  REQUIRE(a.size() == 15);
  for (const auto& t : a) {
    CHECK(t.total_count >= t.occupied);
    long from_sizes = 0;
    for (long c : t.size_counts) from_sizes += c;
    CHECK(from_sizes <= t.occupied);
  }
  auto b = simulate_growth(grid, cfg, 42);
  GrowthConfig serial = cfg;
  serial.threads = 1;
  auto c = simulate_growth(grid, cfg, 42);
  for (std::size_t i = 0; i < a.size(); ++i) {
    CHECK(a[i].total_count == b[i].total_count);
    CHECK(a[i].occupied == c[i].occupied);
  }
}

TEST_CASE("growth-law fitting") {
  std::vector<GrowthTriple> tr;
  for (double r : {10.0, 20.0, 40.0, 80.0, 160.0}) {
    GrowthTriple t;
    t.r = r;
    t.occupied = static_cast<long>(std::lround(500.0 + 200.0 * std::log(r)));
    tr.push_back(t);
  }
  auto fit = fit_growth_law(tr, GrowthModel::LogLinear);
  CHECK(fit.slope == doctest::Approx(200.0).epsilon(0.02));
  CHECK(fit.intercept == doctest::Approx(500.0).epsilon(0.05));

  tr.clear();
  for (double r : {10.0, 20.0, 40.0, 80.0, 160.0}) {
    GrowthTriple t;
    t.r = r;
    t.occupied = static_cast<long>(std::lround(300.0 * std::pow(r, 0.6)));
    tr.push_back(t);
  }
  fit = fit_growth_law(tr, GrowthModel::PowerLaw);
  CHECK(fit.slope == doctest::Approx(0.6).epsilon(0.02));
  CHECK(fit.prefactor == doctest::Approx(300.0).epsilon(0.05));

  // constant occupancy gives slope zero
  for (auto& t : tr) t.occupied = 7;
  fit = fit_growth_law(tr, GrowthModel::LogLinear);
  CHECK(fit.slope == doctest::Approx(0.0));

  tr.resize(1);
  CHECK_THROWS_AS(fit_growth_law(tr, GrowthModel::LogLinear),
                  std::invalid_argument);
}
