#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <cmath>
#include <vector>

#include "bnbp/asymptotics.hpp"
#include "bnbp/counts.hpp"
#include "bnbp/crm.hpp"
#include "doctest.h"
#include "stats.hpp"

using namespace bnbp;

namespace {

// chi-square upper quantile via the Wilson-Hilferty cube approximation
double chi2_quantile(double z, double df) {
  double t = 1.0 - 2.0 / (9.0 * df) + z * std::sqrt(2.0 / (9.0 * df));
  return df * t * t * t;
}

}  // namespace

TEST_CASE("pmf closed-form spot values") {
  CHECK(negbin_pmf(0, 2.5, 0.3) == doctest::Approx(std::pow(0.7, 2.5)));
  CHECK(negbin_pmf(1, 2.0, 0.5) == doctest::Approx(0.25));
  // geometric special case r = 1
  for (long k = 0; k < 6; ++k)
    CHECK(negbin_pmf(k, 1.0, 0.4) ==
          doctest::Approx(0.6 * std::pow(0.4, k)).epsilon(1e-12));
  CHECK(negbin_pmf(-1, 2.0, 0.5) == 0.0);
}

TEST_CASE("pmf sums to one and stays finite far in the tail") {
  for (double r : {0.5, 2.0, 7.3}) {
    double s = 0.0;
    for (long k = 0; k < 4000; ++k) s += negbin_pmf(k, r, 0.3);
    CHECK(s == doctest::Approx(1.0).epsilon(1e-12));
  }
  double lp = negbin_log_pmf(1000000, 2.0, 0.5);
  CHECK(std::isfinite(lp));
  CHECK(lp < -100.0);
  CHECK_THROWS_AS(negbin_pmf(1, 0.0, 0.5), std::invalid_argument);
  CHECK_THROWS_AS(negbin_pmf(1, 2.0, 1.0), std::invalid_argument);
}

TEST_CASE("real-valued r draws match moments") {
  Rng rng(31);
  RunningStats s;
  for (int i = 0; i < 40000; ++i) s.add(draw_negbin(2.5, 0.4, rng));
  // mean r b / (1-b), var r b / (1-b)^2
  CHECK(std::abs(s.z_against(2.5 * 0.4 / 0.6)) < 4.0);
  CHECK(s.var() == doctest::Approx(2.5 * 0.4 / 0.36).epsilon(0.05));
}

TEST_CASE("augmented draw marginally matches the pmf") {
  Rng rng(57);
  struct Case {
    double r, b;
  } cases[] = {{1.0, 0.3}, {3.0, 0.5}, {10.0, 0.9}};
  for (auto c : cases) {
    const int reps = 30000;
    std::vector<long> hist;
    RunningStats lam;
    for (int i = 0; i < reps; ++i) {
      auto a = draw_negbin_augmented(c.r, c.b, rng);
      lam.add(a.lambda);
      if (a.count >= static_cast<long>(hist.size()))
        hist.resize(a.count + 1, 0);
      ++hist[a.count];
    }
    // lambda has mean r b / (1-b)
    CHECK(std::abs(lam.z_against(c.r * c.b / (1.0 - c.b))) < 4.0);
    // chi-square against the pmf, cells pooled to expected >= 10
    double chi = 0.0;
    long df = 0;
    double pooled_obs = 0.0, pooled_exp = 0.0;
    for (std::size_t k = 0; k < hist.size() + 20; ++k) {
      double e = reps * negbin_pmf(static_cast<long>(k), c.r, c.b);
      double o = k < hist.size() ? hist[k] : 0.0;
      pooled_obs += o;
      pooled_exp += e;
      if (pooled_exp >= 10.0) {
        chi += (pooled_obs - pooled_exp) * (pooled_obs - pooled_exp) /
               pooled_exp;
        ++df;
        pooled_obs = pooled_exp = 0.0;
      }
    }
    pooled_exp += reps * std::exp(negbin_log_pmf(0, c.r, c.b)) * 0.0;  // rest
    REQUIRE(df > 2);
    CHECK(chi < chi2_quantile(3.1, static_cast<double>(df - 1)));
  }
}

TEST_CASE("marking a weight measure") {
  AtomicMeasure m;
  m.atoms = {{0.1, 0.2}, {0.2, 0.5}, {0.3, 0.8}};
  Rng rng(13);
  RunningStats total;
  for (int i = 0; i < 40000; ++i) total.add(draw_nbp(2.0, m, rng).total());
  double want = 2.0 * (0.2 / 0.8 + 0.5 / 0.5 + 0.8 / 0.2);
  CHECK(std::abs(total.z_against(want)) < 4.0);

  auto marks = draw_nbp(2.0, m, rng);
  REQUIRE(marks.atoms.size() == 3);
  for (std::size_t i = 0; i < 3; ++i)
    CHECK(marks.atoms[i].location == m.atoms[i].location);
  CHECK(draw_nbp(2.0, AtomicMeasure{}, rng).atoms.empty());
}

TEST_CASE("number of marked atoms matches the mean-measure integral") {
  // BNBP(3; 3, 3): expected occupied atoms is gamma theta sum 1/(theta+i)
  double want = phi_bnbp(3.0, 3.0, 3.0);
  CHECK(want == doctest::Approx(9.0 * (1.0 / 3 + 1.0 / 4 + 1.0 / 5)));
  Rng rng(19);
  BpParams p;
  p.mass = 3.0;
  p.concentration = 3.0;
  IntensityTable table([&](double b) { return bp_levy_density(b, p); }, 1e-6,
                       1.0 - 1e-12);
  RunningStats occ;
  for (int i = 0; i < 3000; ++i) {
    auto w = sample_bp_threshold(p, 1e-6, table, rng);
    occ.add(static_cast<double>(draw_nbp(3.0, w.measure, rng).support_size()));
  }
  CHECK(std::abs(occ.z_against(want)) < 4.0);
}

TEST_CASE("Bernoulli and Poisson marks") {
  AtomicMeasure m;
  m.atoms = {{0.1, 1.0}, {0.2, 0.0}, {0.3, 0.4}};
  Rng rng(23);
  RunningStats ones, pois;
  for (int i = 0; i < 30000; ++i) {
    auto b = draw_bernoulli_process(m, rng);
    CHECK(b.atoms[0].count == 1);  // weight exactly one
    CHECK(b.atoms[1].count == 0);
    for (const auto& a : b.atoms) CHECK((a.count == 0 || a.count == 1));
    ones.add(static_cast<double>(b.total()));
  }
  CHECK(std::abs(ones.z_against(1.4)) < 4.0);

  AtomicMeasure g;
  g.atoms = {{0.5, 2.5}};
  for (int i = 0; i < 30000; ++i)
    pois.add(static_cast<double>(draw_plp(g, rng).total()));
  CHECK(std::abs(pois.z_against(2.5)) < 4.0);

  AtomicMeasure bad;
  bad.atoms = {{0.1, 1.2}};
  CHECK_THROWS_AS(draw_bernoulli_process(bad, rng), std::invalid_argument);
  bad.atoms = {{0.1, -0.2}};
  CHECK_THROWS_AS(draw_plp(bad, rng), std::invalid_argument);
}
