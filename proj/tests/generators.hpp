#pragma once

// Seeded random instances for property tests.

#include <cmath>
#include <cstdint>
#include <random>
#include <vector>

#include "pcap/ap_core.hpp"

namespace gen {

using Rng = std::mt19937_64;

inline double uniform(Rng& rng, double lo, double hi) {
  return std::uniform_real_distribution<double>(lo, hi)(rng);
}

inline int integer(Rng& rng, int lo, int hi) {
  return std::uniform_int_distribution<int>(lo, hi)(rng);
}

inline std::vector<pcap::TrigTerm> terms(Rng& rng, int max_terms, double max_amp,
                                         double max_freq) {
  std::vector<pcap::TrigTerm> out;
  const int k = integer(rng, 0, max_terms);
  for (int i = 0; i < k; ++i) {
    out.push_back({uniform(rng, 0.0, max_amp), uniform(rng, 0.05, max_freq),
                   uniform(rng, -M_PI, M_PI)});
  }
  return out;
}

inline double amp_sum(const std::vector<pcap::TrigTerm>& t) {
  double s = 0.0;
  for (const auto& x : t) s += std::abs(x.amp);
  return s;
}

/// f with mean >= 1 + sum |amp| (so f >= 1).
inline pcap::TrigPoly positive_poly(Rng& rng, int max_terms = 5) {
  auto t = terms(rng, max_terms, 1.0, 3.0);
  return pcap::TrigPoly(1.0 + amp_sum(t) + uniform(rng, 0.0, 1.0), t);
}

/// u with mean >= 0.5 + sum |amp|.
inline pcap::TrigSeq positive_seq(Rng& rng, int max_terms = 5) {
  auto t = terms(rng, max_terms, 1.0, 3.0);
  return pcap::TrigSeq(0.5 + amp_sum(t) + uniform(rng, 0.0, 1.0), t);
}

/// Wexler sequence with theta in [0.5, 2] and |c| < theta / 4.
inline pcap::WexlerSeq wexler(Rng& rng) {
  const double theta = uniform(rng, 0.5, 2.0);
  auto t = terms(rng, 3, 1.0, 3.0);
  const double budget = uniform(rng, 0.0, 0.24) * theta;
  const double s = amp_sum(t);
  if (s > 0.0) {
    for (auto& x : t) x.amp *= budget / s;
  }
  return pcap::WexlerSeq(theta, pcap::TrigSeq(0.0, t));
}

}  // namespace gen
