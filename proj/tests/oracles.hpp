#pragma once

#include <cmath>
#include <cstddef>
#include <map>
#include <numeric>
#include <set>
#include <utility>
#include <vector>

// Reference implementations written directly from the formulas, used to check
// the library. Deliberately naive.
namespace oracle {

/// Population standard deviation over mean.
inline double burstiness(const std::vector<double>& x) {
  if (x.empty()) return 0.0;
  double sum = 0.0;
  for (double v : x) sum += v;
  const double mean = sum / static_cast<double>(x.size());
  if (mean == 0.0) return 0.0;
  double sq = 0.0;
  for (double v : x) sq += (v - mean) * (v - mean);
  return std::sqrt(sq / static_cast<double>(x.size())) / mean;
}

/// Natural-log entropy of the empirical distribution of `labels`.
template <typename T>
double entropy(const std::vector<T>& labels) {
  std::map<T, double> counts;
  for (const auto& l : labels) counts[l] += 1.0;
  double h = 0.0;
  for (const auto& [label, c] : counts) {
    const double p = c / static_cast<double>(labels.size());
    h -= p * std::log(p);
  }
  return h;
}

inline double entropy_of(const std::vector<double>& p) {
  double h = 0.0;
  for (double v : p) {
    if (v > 0) h -= v * std::log(v);
  }
  return h;
}

/// (location, is_flatline) for every rhythm violation.
inline std::set<std::pair<std::size_t, bool>> rhythm(const std::vector<std::size_t>& len, std::size_t theta_high,
                                                    std::size_t theta_low, double lambda, std::size_t run,
                                                    double band) {
  std::set<std::pair<std::size_t, bool>> out;
  for (std::size_t t = 1; t < len.size(); ++t) {
    if (len[t - 1] > theta_high && len[t] >= theta_low) out.insert({t, false});
  }
  const auto n = len.size();
  std::vector<int> flat(n, 0);
  for (std::size_t t = 0; t < n; ++t) {
    if (t == 0) {
      flat[t] = 1;
      continue;
    }
    // ema[t-1] recomputed from scratch
    double ema = static_cast<double>(len[0]);
    for (std::size_t k = 1; k < t; ++k) ema = lambda * ema + (1 - lambda) * static_cast<double>(len[k]);
    flat[t] = std::fabs(static_cast<double>(len[t]) - ema) <= band * ema ? 1 : 0;
  }
  for (std::size_t start = 0; start < n; ++start) {
    if (!flat[start] || (start > 0 && flat[start - 1])) continue;
    std::size_t length = 0;
    while (start + length < n && flat[start + length]) ++length;
    if (length >= run) out.insert({start, true});
  }
  return out;
}

}  // namespace oracle
