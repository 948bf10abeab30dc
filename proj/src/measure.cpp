#include "bnbp/measure.hpp"

#include <istream>
#include <ostream>
#include <sstream>
#include <stdexcept>

#include "bnbp/errors.hpp"

namespace bnbp {

double AtomicMeasure::total_mass() const {
  double s = 0.0;
  for (const auto& a : atoms) s += a.weight;
  return s;
}

long CountMeasure::total() const {
  long s = 0;
  for (const auto& a : atoms) s += a.count;
  return s;
}

std::size_t CountMeasure::support_size() const {
  std::size_t s = 0;
  for (const auto& a : atoms)
    if (a.count > 0) ++s;
  return s;
}

AtomicMeasure normalize_to_dp(const AtomicMeasure& m) {
  double total = m.total_mass();
  if (!(total > 0.0))
    throw std::domain_error("normalize_to_dp: total mass must be positive");
  AtomicMeasure out = m;
  for (auto& a : out.atoms) a.weight /= total;
  return out;
}

void write_csv(std::ostream& os, const AtomicMeasure& m) {
  os << "location,weight\n";
  os.precision(17);
  for (const auto& a : m.atoms) os << a.location << ',' << a.weight << '\n';
}

void write_csv(std::ostream& os, const CountMeasure& m) {
  os << "location,count\n";
  os.precision(17);
  for (const auto& a : m.atoms) os << a.location << ',' << a.count << '\n';
}

AtomicMeasure read_measure_csv(std::istream& is) {
  std::string line;
  if (!std::getline(is, line) || line.rfind("location,", 0) != 0)
    throw data_error("measure csv: missing header");
  AtomicMeasure m;
  while (std::getline(is, line)) {
    if (line.empty()) continue;
    std::istringstream ls(line);
    Atom a;
    char comma = 0;
    if (!(ls >> a.location >> comma >> a.weight) || comma != ',')
      throw data_error("measure csv: bad row '" + line + "'");
    m.atoms.push_back(a);
  }
  return m;
}

}  // namespace bnbp
