#pragma once

#include <stdexcept>
#include <string>

namespace netdiff {

/// Malformed network data: non-binary entries, asymmetric matrices, bad lengths.
class FormatError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Dataset files that cannot be turned into a valid NetworkDataset.
class LoadError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Caller broke a documented precondition (dimension mismatch, bad parameter).
class ContractError : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

/// The sampler produced a non-finite state.
class NumericalError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace netdiff
