#pragma once

#include <cstdint>
#include <iosfwd>
#include <vector>

#include "bnbp/rng.hpp"

namespace bnbp {

// ---- beta-negative-binomial process (discount 0) ----

// E[total count] as the shape r grows, exact series; requires
// concentration > 1 (otherwise the expectation is infinite -> domain_error).
double xi_bnbp(double r, double mass, double concentration);
double xi_bnbp_asymptote(double r, double mass, double concentration);

// E[number of marked atoms]; exact (finite for every concentration > 0).
double phi_bnbp(double r, double mass, double concentration);
// the same quantity via adaptive quadrature of the defining integral
double phi_bnbp_quadrature(double r, double mass, double concentration);
double phi_bnbp_asymptote(double r, double mass, double concentration);

// E[number of atoms with count exactly j], exact closed form.
double phi_j_bnbp(long j, double r, double mass, double concentration);
double phi_j_bnbp_asymptote(long j, double mass, double concentration);

// ---- three-parameter (power-law) variant, discount in (0, 1) ----

double xi_3bnbp(double r, double mass, double concentration, double discount);
double xi_3bnbp_asymptote(double r, double mass, double concentration,
                          double discount);
double phi_3bnbp(double r, double mass, double concentration, double discount);
double phi_3bnbp_asymptote(double r, double mass, double concentration,
                           double discount);
double phi_j_3bnbp(long j, double r, double mass, double concentration,
                   double discount);
double phi_j_3bnbp_asymptote(long j, double r, double mass,
                             double concentration, double discount);

// ---- urn-scheme comparators ----

double dp_expected_clusters(long n, double concentration);  // exact sum
double dp_expected_clusters_asymptote(long n, double concentration);
double dp_cluster_size_asymptote(long j, double concentration);
double pyp_expected_clusters_asymptote(long n, double concentration,
                                       double discount);
double pyp_cluster_size_asymptote(long j, long n, double concentration,
                                  double discount);

struct UrnDraw {
  long clusters = 0;
  std::vector<long> sizes;  // one entry per cluster
};
UrnDraw simulate_urn(long n, double concentration, double discount, Rng& rng);

// ---- Monte Carlo growth curves ----

struct GrowthTriple {
  double r = 0.0;
  long total_count = 0;             // N(r)
  long occupied = 0;                // K(r): atoms with count > 0
  std::vector<long> size_counts;    // size_counts[j-1] = #atoms with count j
};

struct GrowthConfig {
  double mass = 3.0;
  double concentration = 3.0;
  double discount = 0.0;
  double epsilon = 1e-6;   // weight threshold for the simulated process
  int replicates = 100;
  int max_size_tracked = 32;
  int threads = 0;         // 0 = hardware concurrency
};

// One triple per (grid point, replicate); deterministic in `seed` regardless
// of thread count. Grid points are simulated in parallel.
std::vector<GrowthTriple> simulate_growth(const std::vector<double>& r_grid,
                                          const GrowthConfig& cfg,
                                          std::uint64_t seed);

enum class GrowthModel { LogLinear, PowerLaw };

struct GrowthLawFit {
  GrowthModel model = GrowthModel::LogLinear;
  double slope = 0.0;      // vs log r (LogLinear) or log-log (PowerLaw)
  double intercept = 0.0;
  double prefactor = 0.0;  // exp(intercept) for PowerLaw, else intercept
  double rss = 0.0;
  long points = 0;
};

// Fits mean occupied-count per grid point against log r (LogLinear: K on
// log r) or log mean-K on log r (PowerLaw).
GrowthLawFit fit_growth_law(const std::vector<GrowthTriple>& triples,
                            GrowthModel model);

void write_triples_csv(std::ostream& os,
                       const std::vector<GrowthTriple>& triples);

}  // namespace bnbp
