#pragma once

#include <stdexcept>

namespace locpred {

// Layout of the nk x nk moment matrix: item i with label a maps to
// row/column i*k + a.
struct LabelIndexing {
  int n = 0;
  int k = 0;

  int size() const { return n * k; }
  int row(int item, int label) const { return item * k + label; }

  bool operator==(const LabelIndexing&) const = default;
};

inline LabelIndexing make_indexing(int n, int k) {
  if (n < 1) throw std::invalid_argument("indexing: n must be >= 1");
  if (k < 1) throw std::invalid_argument("indexing: k must be >= 1");
  return LabelIndexing{n, k};
}

}  // namespace locpred
