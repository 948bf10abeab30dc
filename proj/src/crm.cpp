#include "bnbp/crm.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "quad.hpp"

namespace bnbp {

namespace {

constexpr double kWeightFloor = 1e-12;

double clamp01(double b) {
  return std::min(1.0 - kWeightFloor, std::max(kWeightFloor, b));
}

}  // namespace

void BpParams::validate() const {
  if (!(mass >= 0.0)) throw std::invalid_argument("bp: mass must be >= 0");
  if (discount == 0.0) {
    if (!(concentration > 0.0))
      throw std::invalid_argument("bp: concentration must be > 0");
  } else {
    if (!(discount > 0.0 && discount < 1.0))
      throw std::invalid_argument("bp: discount must lie in (0, 1)");
    if (!(concentration > -discount))
      throw std::invalid_argument("bp: concentration must exceed -discount");
  }
  for (const auto& fa : fixed_atoms) {
    if (!(fa.rho > 0.0))
      throw std::invalid_argument("bp: fixed-atom rho must be positive");
    double a = concentration * mass * fa.rho - discount;
    double b = concentration * (1.0 - mass * fa.rho) + discount;
    if (!(a > 0.0) || !(b > 0.0))
      throw std::invalid_argument("bp: fixed atom yields non-positive shape");
  }
}

void RbpParams::validate() const {
  if (!(mass >= 0.0)) throw std::invalid_argument("rbp: mass must be >= 0");
  if (!(concentration > 0.0))
    throw std::invalid_argument("rbp: concentration must be > 0");
  for (const auto& fa : fixed_atoms)
    if (!(fa.rho > 0.0) || !(fa.sigma > 0.0))
      throw std::invalid_argument("rbp: fixed-atom shapes must be positive");
}

void GapParams::validate() const {
  if (!(concentration >= 0.0))
    throw std::invalid_argument("gap: concentration must be >= 0");
  if (!(rate > 0.0)) throw std::invalid_argument("gap: rate must be > 0");
  for (const auto& fa : fixed_atoms)
    if (!(fa.rho > 0.0))
      throw std::invalid_argument("gap: fixed-atom rho must be positive");
}

AtomicMeasure SizeBiasedDraw::flatten() const {
  AtomicMeasure m;
  for (const auto& r : rounds)
    m.atoms.insert(m.atoms.end(), r.atoms.begin(), r.atoms.end());
  return m;
}

SizeBiasedDraw sample_bp_size_biased(double mass, double concentration,
                                     long rounds, Rng& rng) {
  if (!(mass >= 0.0) || !(concentration > 0.0))
    throw std::invalid_argument("size-biased bp: bad mass/concentration");
  if (rounds < 0)
    throw std::invalid_argument("size-biased bp: rounds must be >= 0");
  SizeBiasedDraw out;
  for (long m = 0; m < rounds; ++m) {
    SizeBiasedDraw::Round round;
    round.index = m;
    long c = rng.poisson(mass * concentration / (concentration + m));
    round.atoms.reserve(c);
    for (long j = 0; j < c; ++j)
      round.atoms.push_back({rng.uniform(), rng.beta(1.0, concentration + m)});
    out.rounds.push_back(std::move(round));
  }
  // telescoping sum of rate * mean weight over all dropped rounds
  out.dropped_mass_bound = mass * concentration / (concentration + rounds);
  return out;
}

IntensityTable::IntensityTable(std::function<double(double)> density,
                               double lo, double hi, double rel_tol) {
  if (!(lo > 0.0) || !(hi > lo))
    throw std::invalid_argument("intensity table: need 0 < lo < hi");
  double ta = std::log(lo), tb = std::log(hi);
  auto g = [&](double t) {
    double x = std::exp(t);
    return density(x) * x;  // Jacobian of the log transform
  };

  // composite Simpson, panels doubled until the total stabilizes
  long n = 512;
  double prev = 0.0;
  bool converged = false;
  for (int pass = 0; pass < 14; ++pass, n *= 2) {
    double h = (tb - ta) / n;
    double s = g(ta) + g(tb);
    for (long i = 1; i < n; ++i) s += (i % 2 ? 4.0 : 2.0) * g(ta + i * h);
    double total = s * h / 3.0;
    if (pass > 0 &&
        std::abs(total - prev) <= rel_tol * std::max(std::abs(total), 1e-300)) {
      converged = true;
      prev = total;
      n /= 2;  // the grid that already agreed
      break;
    }
    prev = total;
  }
  if (!converged)
    throw numeric_error("intensity table: integral did not converge");

  grid_.resize(n + 1);
  cum_.resize(n + 1);
  double h = (tb - ta) / n;
  cum_[0] = 0.0;
  grid_[0] = ta;
  for (long i = 1; i <= n; ++i) {
    grid_[i] = ta + i * h;
    double mid = 0.5 * (grid_[i - 1] + grid_[i]);
    cum_[i] =
        cum_[i - 1] + h / 6.0 * (g(grid_[i - 1]) + 4.0 * g(mid) + g(grid_[i]));
  }
  total_ = cum_.back();
  if (!std::isfinite(total_))
    throw numeric_error("intensity table: non-finite integral");
}

double IntensityTable::sample(Rng& rng) const {
  if (!(total_ > 0.0))
    throw numeric_error("intensity table: zero total intensity");
  double u = rng.uniform() * total_;
  auto it = std::upper_bound(cum_.begin(), cum_.end(), u);
  std::size_t i = std::min<std::size_t>(cum_.size() - 1,
                                        std::max<std::ptrdiff_t>(
                                            1, it - cum_.begin()));
  double seg = cum_[i] - cum_[i - 1];
  double frac = seg > 0.0 ? (u - cum_[i - 1]) / seg : 0.5;
  double t = grid_[i - 1] + frac * (grid_[i] - grid_[i - 1]);
  return std::exp(t);
}

double bp_levy_density(double b, const BpParams& p) {
  if (b <= 0.0 || b >= 1.0) return 0.0;
  if (p.discount == 0.0)
    return p.mass * p.concentration / b *
           std::pow(1.0 - b, p.concentration - 1.0);
  double logc = std::lgamma(1.0 + p.concentration) -
                std::lgamma(1.0 - p.discount) -
                std::lgamma(p.concentration + p.discount);
  return p.mass * std::exp(logc) * std::pow(b, -1.0 - p.discount) *
         std::pow(1.0 - b, p.concentration + p.discount - 1.0);
}

double gap_levy_density(double g, const GapParams& p) {
  if (g <= 0.0) return 0.0;
  return p.concentration / g * std::exp(-p.rate * g);
}

namespace {

// integral of b^pw * levy density over (0, eps); pw is 1 (mass) or the
// leading power of b/(1-b) (odds, handled by an extra 1/(1-b) factor)
double dropped_integral(const BpParams& p, double eps, bool odds) {
  if (p.mass == 0.0 || eps <= 0.0) return 0.0;
  if (p.discount == 0.0) {
    double th = p.concentration;
    double gt = p.mass * th;
    if (!odds) return p.mass * (1.0 - std::pow(1.0 - eps, th));
    if (std::abs(th - 1.0) < 1e-12) return -gt * std::log1p(-eps);
    return gt * (1.0 - std::pow(1.0 - eps, th - 1.0)) / (th - 1.0);
  }
  double a = p.discount, th = p.concentration;
  double c = p.mass * std::exp(std::lgamma(1.0 + th) -
                               std::lgamma(1.0 - a) - std::lgamma(th + a));
  double tail = odds ? th + a - 2.0 : th + a - 1.0;
  // substitute b = u^(1/(1-a)) so the b^-a singularity flattens out
  double expo = 1.0 / (1.0 - a);
  auto f = [&](double u) {
    double b = std::pow(u, expo);
    return expo * std::pow(1.0 - b, tail);
  };
  double upper = std::pow(eps, 1.0 - a);
  return c * detail::adaptive_simpson(f, 0.0, upper, 1e-14 + 1e-12 * upper);
}

ThresholdDraw threshold_draw_common(const AtomicMeasure& fixed,
                                    const BpParams& ordinary, double eps,
                                    const IntensityTable* table, Rng& rng) {
  ThresholdDraw out;
  out.epsilon = eps;
  out.n_fixed = fixed.atoms.size();
  out.measure = fixed;
  out.expected_dropped_mass = dropped_integral(ordinary, eps, false);
  out.expected_dropped_odds = dropped_integral(ordinary, eps, true);
  if (ordinary.mass > 0.0) {
    long n = rng.poisson(table->total());
    for (long i = 0; i < n; ++i)
      out.measure.atoms.push_back({rng.uniform(), clamp01(table->sample(rng))});
  }
  return out;
}

}  // namespace

ThresholdDraw sample_bp_threshold(const BpParams& p, double epsilon,
                                  const IntensityTable& table, Rng& rng) {
  p.validate();
  if (!(epsilon > 0.0 && epsilon < 1.0))
    throw std::invalid_argument("bp threshold: epsilon must be in (0, 1)");
  AtomicMeasure fixed;
  for (const auto& fa : p.fixed_atoms) {
    double a = p.concentration * p.mass * fa.rho - p.discount;
    double b = p.concentration * (1.0 - p.mass * fa.rho) + p.discount;
    fixed.atoms.push_back({fa.location, rng.beta(a, b)});
  }
  return threshold_draw_common(fixed, p, epsilon, &table, rng);
}

ThresholdDraw sample_bp_threshold(const BpParams& p, double epsilon,
                                  Rng& rng) {
  p.validate();
  if (!(epsilon > 0.0 && epsilon < 1.0))
    throw std::invalid_argument("bp threshold: epsilon must be in (0, 1)");
  if (p.mass == 0.0) {
    AtomicMeasure fixed;
    for (const auto& fa : p.fixed_atoms) {
      double a = p.concentration * p.mass * fa.rho - p.discount;
      double b = p.concentration * (1.0 - p.mass * fa.rho) + p.discount;
      fixed.atoms.push_back({fa.location, rng.beta(a, b)});
    }
    return threshold_draw_common(fixed, p, epsilon, nullptr, rng);
  }
  IntensityTable table([&](double b) { return bp_levy_density(b, p); },
                       epsilon, 1.0 - kWeightFloor);
  return sample_bp_threshold(p, epsilon, table, rng);
}

ThresholdDraw sample_rbp_threshold(const RbpParams& p, double epsilon,
                                   Rng& rng) {
  p.validate();
  if (!(epsilon > 0.0 && epsilon < 1.0))
    throw std::invalid_argument("rbp threshold: epsilon must be in (0, 1)");
  AtomicMeasure fixed;
  for (const auto& fa : p.fixed_atoms)
    fixed.atoms.push_back({fa.location, rng.beta(fa.rho, fa.sigma)});
  BpParams ordinary;  // ordinary component matches the two-parameter process
  ordinary.mass = p.mass;
  ordinary.concentration = p.concentration;
  if (p.mass == 0.0)
    return threshold_draw_common(fixed, ordinary, epsilon, nullptr, rng);
  IntensityTable table(
      [&](double b) { return bp_levy_density(b, ordinary); }, epsilon,
      1.0 - kWeightFloor);
  return threshold_draw_common(fixed, ordinary, epsilon, &table, rng);
}

ThresholdDraw sample_gap(const GapParams& p, double epsilon, Rng& rng) {
  p.validate();
  if (!(epsilon > 0.0))
    throw std::invalid_argument("gap: epsilon must be positive");
  ThresholdDraw out;
  out.epsilon = epsilon;
  for (const auto& fa : p.fixed_atoms)
    out.measure.atoms.push_back(
        {fa.location, rng.gamma(p.concentration * fa.rho, p.rate)});
  out.n_fixed = p.fixed_atoms.size();
  // E[dropped mass] = c * integral_0^eps exp(-rate g) dg
  out.expected_dropped_mass =
      p.concentration * (-std::expm1(-p.rate * epsilon)) / p.rate;
  out.expected_dropped_odds = 0.0;  // no odds notion for unbounded weights
  if (p.concentration > 0.0) {
    double hi = std::max(2.0 * epsilon, 45.0 / p.rate);
    IntensityTable table([&](double g) { return gap_levy_density(g, p); },
                         epsilon, hi);
    long n = rng.poisson(table.total());
    for (long i = 0; i < n; ++i)
      out.measure.atoms.push_back({rng.uniform(), table.sample(rng)});
  }
  return out;
}

AtomicMeasure bp_to_beta_prime(const AtomicMeasure& bp) {
  AtomicMeasure out;
  out.atoms.reserve(bp.atoms.size());
  for (const auto& a : bp.atoms) {
    if (!(a.weight >= 0.0 && a.weight < 1.0))
      throw std::domain_error("bp_to_beta_prime: weight outside [0, 1)");
    out.atoms.push_back({a.location, a.weight / (1.0 - a.weight)});
  }
  return out;
}

namespace {

double fixed_rho_at(const std::vector<FixedAtomSpec>& fixed, double loc) {
  for (const auto& fa : fixed)
    if (fa.location == loc) return fa.rho;
  return 0.0;
}

AtomicMeasure scale_by_gamma(const AtomicMeasure& gap, double concentration,
                             double mass, double rate,
                             const std::vector<FixedAtomSpec>& fixed, Rng& rng,
                             bool to_unit_interval) {
  if (!(concentration > 0.0) || !(rate > 0.0))
    throw std::invalid_argument("gamma scaling: bad concentration/rate");
  AtomicMeasure out;
  out.atoms.reserve(gap.atoms.size());
  for (const auto& a : gap.atoms) {
    double shape = concentration * (1.0 - mass * fixed_rho_at(fixed, a.location));
    if (!(shape > 0.0))
      throw std::invalid_argument("gamma scaling: non-positive tau shape");
    double tau = rng.gamma(shape, rate);
    while (!(tau > 0.0)) tau = rng.gamma(shape, rate);
    double w = to_unit_interval ? a.weight / (tau + a.weight) : a.weight / tau;
    out.atoms.push_back({a.location, to_unit_interval ? clamp01(w) : w});
  }
  return out;
}

}  // namespace

AtomicMeasure gamma_ratio_to_beta_prime(const AtomicMeasure& gap,
                                        double concentration, double mass,
                                        double rate,
                                        const std::vector<FixedAtomSpec>& fixed,
                                        Rng& rng) {
  return scale_by_gamma(gap, concentration, mass, rate, fixed, rng, false);
}

AtomicMeasure gammas_to_bp(const AtomicMeasure& gap, double concentration,
                           double mass, double rate,
                           const std::vector<FixedAtomSpec>& fixed, Rng& rng) {
  return scale_by_gamma(gap, concentration, mass, rate, fixed, rng, true);
}

}  // namespace bnbp
