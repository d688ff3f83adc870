#pragma once

#include "qprob/interval.hpp"
#include "qprob/partition.hpp"

namespace qprob {

// Qualitative product: exact product of the two semantics, then approximated.
inline QRange qmul(const Partition& p, QRange a, QRange b) {
  return p.approximate(multiply(p.semantics(a), p.semantics(b)));
}

// Qualitative quotient, truncated to 1.
inline QRange qdiv(const Partition& p, QRange a, QRange b) {
  return p.approximate(divide_truncated(p.semantics(a), p.semantics(b)));
}

}  // namespace qprob
