#include "bnbp/asymptotics.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <future>
#include <ostream>
#include <stdexcept>
#include <thread>

#include "bnbp/counts.hpp"
#include "bnbp/crm.hpp"
#include "quad.hpp"

namespace bnbp {

namespace {

void check_rate(double r) {
  if (!(r > 0.0)) throw std::invalid_argument("growth: r must be > 0");
}

double lg(double x) { return std::lgamma(x); }

// log of the constant in front of the power-law intensity
double log_c3(double mass, double concentration, double discount) {
  return std::log(mass) + lg(1.0 + concentration) - lg(1.0 - discount) -
         lg(concentration + discount);
}

void check_discount(double discount) {
  if (!(discount > 0.0 && discount < 1.0))
    throw std::invalid_argument("growth: discount must lie in (0, 1)");
}

}  // namespace

double xi_bnbp(double r, double mass, double concentration) {
  check_rate(r);
  if (!(concentration > 1.0))
    throw std::domain_error(
        "xi: expected total count is infinite unless concentration > 1");
  // partial sum of Gamma(n+r)/Gamma(n+r+theta) plus its exact telescoped tail
  const long kTerms = 64;
  double s = 0.0;
  for (long n = 1; n <= kTerms; ++n)
    s += std::exp(lg(n + r) - lg(n + r + concentration));
  s += std::exp(lg(kTerms + 1 + r) - lg(kTerms + r + concentration)) /
       (concentration - 1.0);
  return mass * concentration * std::exp(lg(r + concentration) - lg(r)) * s;
}

double xi_bnbp_asymptote(double r, double mass, double concentration) {
  check_rate(r);
  if (!(concentration > 1.0))
    throw std::domain_error("xi: requires concentration > 1");
  return mass * concentration / (concentration - 1.0) * r;
}

double phi_bnbp_quadrature(double r, double mass, double concentration) {
  check_rate(r);
  if (!(concentration > 0.0) || !(mass > 0.0))
    throw std::invalid_argument("phi: bad mass/concentration");
  double gt = mass * concentration;
  auto f = [&](double b) {
    if (b < 1e-12) return r;  // limit of (1 - (1-b)^r) / b
    return -std::expm1(r * std::log1p(-b)) / b *
           std::pow(1.0 - b, concentration - 1.0);
  };
  return gt * detail::adaptive_simpson_rel(f, 0.0, 1.0, 1e-11);
}

double phi_bnbp(double r, double mass, double concentration) {
  check_rate(r);
  if (!(concentration > 0.0) || !(mass > 0.0))
    throw std::invalid_argument("phi: bad mass/concentration");
  double rn = std::round(r);
  if (std::abs(r - rn) < 1e-9 && rn >= 1.0) {
    double s = 0.0;
    for (long i = 0; i < static_cast<long>(rn); ++i)
      s += 1.0 / (concentration + i);
    return mass * concentration * s;
  }
  return phi_bnbp_quadrature(r, mass, concentration);
}

double phi_bnbp_asymptote(double r, double mass, double concentration) {
  check_rate(r);
  return mass * concentration * std::log(r);
}

double phi_j_bnbp(long j, double r, double mass, double concentration) {
  check_rate(r);
  if (j < 1) throw std::invalid_argument("phi_j: j must be >= 1");
  return mass * concentration *
         std::exp(lg(j + r) - lg(j + 1.0) - lg(r) + lg(static_cast<double>(j)) +
                  lg(r + concentration) - lg(j + r + concentration));
}

double phi_j_bnbp_asymptote(long j, double mass, double concentration) {
  if (j < 1) throw std::invalid_argument("phi_j: j must be >= 1");
  return mass * concentration / j;
}

double xi_3bnbp(double r, double mass, double concentration, double discount) {
  check_rate(r);
  check_discount(discount);
  if (!(concentration + discount > 1.0))
    throw std::domain_error(
        "xi: infinite unless concentration + discount > 1");
  // the beta integral collapses: E[N] is exactly linear in r
  return mass * concentration / (concentration + discount - 1.0) * r;
}

double xi_3bnbp_asymptote(double r, double mass, double concentration,
                          double discount) {
  return xi_3bnbp(r, mass, concentration, discount);
}

double phi_3bnbp(double r, double mass, double concentration,
                 double discount) {
  check_rate(r);
  check_discount(discount);
  if (!(concentration + discount > 0.0))
    throw std::invalid_argument("phi: concentration + discount must be > 0");
  double a = discount, th = concentration;
  double p = 1.0 / (1.0 - a);  // b = u^p flattens the b^-(1+a) singularity
  auto f = [&](double u) {
    if (u <= 0.0) return p * r;
    double b = std::min(std::pow(u, p), 1.0 - 1e-16);
    // (1 - (1-b)^r) / b, which tends to r as b -> 0
    double ratio = b < 1e-14 ? r : -std::expm1(r * std::log1p(-b)) / b;
    return p * ratio * std::pow(1.0 - b, th + a - 1.0);
  };
  double integral = detail::adaptive_simpson_rel(f, 0.0, 1.0, 1e-11);
  return std::exp(log_c3(mass, th, a)) * integral;
}

double phi_3bnbp_asymptote(double r, double mass, double concentration,
                           double discount) {
  check_rate(r);
  check_discount(discount);
  return mass / discount *
         std::exp(lg(concentration + 1.0) - lg(concentration + discount)) *
         std::pow(r, discount);
}

double phi_j_3bnbp(long j, double r, double mass, double concentration,
                   double discount) {
  check_rate(r);
  check_discount(discount);
  if (j < 1) throw std::invalid_argument("phi_j: j must be >= 1");
  return std::exp(log_c3(mass, concentration, discount) + lg(j + r) -
                  lg(j + 1.0) - lg(r) + lg(j - discount) +
                  lg(r + concentration + discount) -
                  lg(j + r + concentration));
}

double phi_j_3bnbp_asymptote(long j, double r, double mass,
                             double concentration, double discount) {
  check_rate(r);
  check_discount(discount);
  if (j < 1) throw std::invalid_argument("phi_j: j must be >= 1");
  return std::exp(log_c3(mass, concentration, discount) + lg(j - discount) -
                  lg(j + 1.0)) *
         std::pow(r, discount);
}

double dp_expected_clusters(long n, double concentration) {
  if (n < 0) throw std::invalid_argument("dp: n must be >= 0");
  if (!(concentration > 0.0))
    throw std::invalid_argument("dp: concentration must be > 0");
  double s = 0.0;
  for (long i = 0; i < n; ++i) s += concentration / (concentration + i);
  return s;
}

double dp_expected_clusters_asymptote(long n, double concentration) {
  return concentration * std::log(static_cast<double>(n));
}

double dp_cluster_size_asymptote(long j, double concentration) {
  if (j < 1) throw std::invalid_argument("dp: j must be >= 1");
  return concentration / j;
}

double pyp_expected_clusters_asymptote(long n, double concentration,
                                       double discount) {
  check_discount(discount);
  return std::exp(lg(concentration + 1.0) - lg(concentration + discount)) /
         discount * std::pow(static_cast<double>(n), discount);
}

double pyp_cluster_size_asymptote(long j, long n, double concentration,
                                  double discount) {
  check_discount(discount);
  if (j < 1) throw std::invalid_argument("pyp: j must be >= 1");
  return std::exp(lg(concentration + 1.0) - lg(1.0 - discount) -
                  lg(concentration + discount) + lg(j - discount) -
                  lg(j + 1.0)) *
         std::pow(static_cast<double>(n), discount);
}

UrnDraw simulate_urn(long n, double concentration, double discount, Rng& rng) {
  if (!(discount >= 0.0 && discount < 1.0))
    throw std::invalid_argument("urn: discount must lie in [0, 1)");
  if (!(concentration > -discount))
    throw std::invalid_argument("urn: concentration must exceed -discount");
  UrnDraw out;
  for (long i = 0; i < n; ++i) {
    double denom = concentration + i;
    double p_new =
        (concentration + discount * out.clusters) / denom;
    if (i == 0 || rng.uniform() < p_new) {
      out.sizes.push_back(1);
      ++out.clusters;
    } else {
      double u = rng.uniform() * (i - discount * out.clusters);
      double c = 0.0;
      for (auto& s : out.sizes) {
        c += s - discount;
        if (u <= c) {
          ++s;
          break;
        }
      }
    }
  }
  return out;
}

std::vector<GrowthTriple> simulate_growth(const std::vector<double>& r_grid,
                                          const GrowthConfig& cfg,
                                          std::uint64_t seed) {
  if (cfg.replicates < 1)
    throw std::invalid_argument("growth: replicates must be >= 1");
  BpParams p;
  p.mass = cfg.mass;
  p.concentration = cfg.concentration;
  p.discount = cfg.discount;
  p.validate();
  IntensityTable table([&](double b) { return bp_levy_density(b, p); },
                       cfg.epsilon, 1.0 - 1e-12);

  Rng root(seed);
  std::vector<GrowthTriple> out(r_grid.size() * cfg.replicates);
  auto run_point = [&](std::size_t gi) {
    for (int rep = 0; rep < cfg.replicates; ++rep) {
      Rng rng = root.derive(gi * cfg.replicates + rep);
      auto draw = sample_bp_threshold(p, cfg.epsilon, table, rng);
      auto marks = draw_nbp(r_grid[gi], draw.measure, rng);
      GrowthTriple t;
      t.r = r_grid[gi];
      t.size_counts.assign(cfg.max_size_tracked, 0);
      for (const auto& a : marks.atoms) {
        if (a.count <= 0) continue;
        t.total_count += a.count;
        ++t.occupied;
        if (a.count <= cfg.max_size_tracked) ++t.size_counts[a.count - 1];
      }
      out[gi * cfg.replicates + rep] = std::move(t);
    }
  };

  unsigned n_threads = cfg.threads > 0
                           ? static_cast<unsigned>(cfg.threads)
                           : std::max(1u, std::thread::hardware_concurrency());
  n_threads = std::min<unsigned>(n_threads, r_grid.size());
  if (n_threads <= 1) {
    for (std::size_t gi = 0; gi < r_grid.size(); ++gi) run_point(gi);
    return out;
  }
  std::vector<std::future<void>> futs;
  std::atomic<std::size_t> next{0};
  for (unsigned t = 0; t < n_threads; ++t)
    futs.push_back(std::async(std::launch::async, [&] {
      for (std::size_t gi = next++; gi < r_grid.size(); gi = next++)
        run_point(gi);
    }));
  for (auto& f : futs) f.get();
  return out;
}

GrowthLawFit fit_growth_law(const std::vector<GrowthTriple>& triples,
                            GrowthModel model) {
  // average occupied counts per grid value first
  std::vector<std::pair<double, std::pair<double, long>>> acc;  // r -> (sum,n)
  for (const auto& t : triples) {
    auto it = std::find_if(acc.begin(), acc.end(),
                           [&](const auto& e) { return e.first == t.r; });
    if (it == acc.end())
      acc.push_back({t.r, {static_cast<double>(t.occupied), 1}});
    else {
      it->second.first += t.occupied;
      ++it->second.second;
    }
  }
  if (acc.size() < 2)
    throw std::invalid_argument("fit: need at least two distinct r values");

  std::vector<std::pair<double, double>> pts;
  for (const auto& [r, sn] : acc) {
    double mean_k = sn.first / sn.second;
    double x = std::log(r);
    double y = model == GrowthModel::PowerLaw ? std::log(mean_k) : mean_k;
    if (!std::isfinite(y))
      throw numeric_error("fit: zero mean occupancy under a log model");
    pts.push_back({x, y});
  }
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (auto [x, y] : pts) {
    sx += x;
    sy += y;
    sxx += x * x;
    sxy += x * y;
  }
  double n = static_cast<double>(pts.size());
  double denom = n * sxx - sx * sx;
  GrowthLawFit fit;
  fit.model = model;
  fit.points = pts.size();
  fit.slope = (n * sxy - sx * sy) / denom;
  fit.intercept = (sy - fit.slope * sx) / n;
  fit.prefactor = model == GrowthModel::PowerLaw ? std::exp(fit.intercept)
                                                 : fit.intercept;
  for (auto [x, y] : pts) {
    double e = y - (fit.intercept + fit.slope * x);
    fit.rss += e * e;
  }
  return fit;
}

void write_triples_csv(std::ostream& os,
                       const std::vector<GrowthTriple>& triples) {
  os << "r,total_count,occupied\n";
  os.precision(17);
  for (const auto& t : triples)
    os << t.r << ',' << t.total_count << ',' << t.occupied << '\n';
}

}  // namespace bnbp
