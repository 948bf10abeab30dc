#pragma once

#include <stdexcept>
#include <string>

namespace bnbp {

// Thrown when a quadrature or series evaluation cannot reach its tolerance,
// or a sampler produces a non-finite value.
struct numeric_error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Thrown for malformed input files (corpora, sample stores, manifests).
struct data_error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

}  // namespace bnbp
