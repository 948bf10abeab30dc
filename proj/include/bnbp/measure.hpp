#pragma once

#include <iosfwd>
#include <vector>

namespace bnbp {

struct Atom {
  double location = 0.0;
  double weight = 0.0;
};

// Finite atomic measure sum_k weight_k * delta(location_k).
struct AtomicMeasure {
  std::vector<Atom> atoms;

  double total_mass() const;
  std::size_t size() const { return atoms.size(); }
};

struct CountAtom {
  double location = 0.0;
  long count = 0;
};

// Integer-marked atoms; zero-count atoms are kept only when a caller
// explicitly puts them there (e.g. Bernoulli draws keep support implicit).
struct CountMeasure {
  std::vector<CountAtom> atoms;

  long total() const;
  std::size_t support_size() const;  // atoms with count > 0
};

// Rescale weights to sum to one. Throws std::domain_error on zero/negative
// total mass.
AtomicMeasure normalize_to_dp(const AtomicMeasure& m);

// CSV with header "location,weight" (or "location,count").
void write_csv(std::ostream& os, const AtomicMeasure& m);
void write_csv(std::ostream& os, const CountMeasure& m);
AtomicMeasure read_measure_csv(std::istream& is);

}  // namespace bnbp
