#pragma once

#include <cmath>
#include <cstddef>
#include <set>
#include <string>
#include <vector>

#include "mispron/error.hpp"

namespace mispron {

/// Scores keyed by speaker or model. `labels` may be left empty for
/// anonymous vectors; otherwise it must parallel `values` with unique entries.
struct ScoreVector {
  std::vector<std::string> labels;
  std::vector<double> values;

  std::size_t size() const noexcept { return values.size(); }
};

namespace detail {

inline void check_pair(const ScoreVector& x, const ScoreVector& y, std::size_t min_len) {
  for (const auto* v : {&x, &y}) {
    if (!v->labels.empty()) {
      if (v->labels.size() != v->values.size()) throw LengthMismatch("score labels and values differ in length");
      if (std::set<std::string>(v->labels.begin(), v->labels.end()).size() != v->labels.size())
        throw InputError("duplicate score labels");
    }
  }
  if (x.size() != y.size())
    throw LengthMismatch("score vectors differ in length (" + std::to_string(x.size()) + " vs " +
                         std::to_string(y.size()) + ")");
  if (x.size() < min_len)
    throw LengthMismatch("need at least " + std::to_string(min_len) + " scores, got " + std::to_string(x.size()));
  if (!x.labels.empty() && !y.labels.empty() && x.labels != y.labels)
    throw InputError("score vectors are labelled differently");
}

}  // namespace detail

/// Product-moment correlation. Throws ZeroVariance rather than returning NaN.
inline double pearson(const ScoreVector& x, const ScoreVector& y) {
  detail::check_pair(x, y, 2);
  auto constant = [](const std::vector<double>& v) {
    for (const double e : v)
      if (e != v.front()) return false;
    return true;
  };
  if (constant(x.values) || constant(y.values)) throw ZeroVariance();
  const auto n = static_cast<double>(x.size());
  double mx = 0.0, my = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    mx += x.values[i];
    my += y.values[i];
  }
  mx /= n;
  my /= n;
  double sxy = 0.0, sxx = 0.0, syy = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double dx = x.values[i] - mx, dy = y.values[i] - my;
    sxy += dx * dy;
    sxx += dx * dx;
    syy += dy * dy;
  }
  if (sxx == 0.0 || syy == 0.0) throw ZeroVariance();
  const double r = sxy / std::sqrt(sxx * syy);
  return std::fmax(-1.0, std::fmin(1.0, r));
}

/// Euclidean distance divided by sqrt(n); lies in [0, 1] for inputs in [0, 1].
inline double normalized_euclidean(const ScoreVector& x, const ScoreVector& y) {
  detail::check_pair(x, y, 1);
  double ss = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double d = x.values[i] - y.values[i];
    ss += d * d;
  }
  return std::sqrt(ss) / std::sqrt(static_cast<double>(x.size()));
}

}  // namespace mispron
