#pragma once

#include <cmath>
#include <cstdint>
#include <random>
#include <stdexcept>
#include <string>

namespace beamsweep {

using Rng = std::mt19937_64;

inline double db_to_linear(double db) { return std::pow(10.0, db / 10.0); }
inline double linear_to_db(double x) { return 10.0 * std::log10(x); }
inline double deg_to_rad(double deg) { return deg * M_PI / 180.0; }
inline double rad_to_deg(double rad) { return rad * 180.0 / M_PI; }

// Closed angular interval [lo, hi].
struct Interval {
  double lo = 0.0;
  double hi = 0.0;

  double width() const { return hi - lo; }
  double midpoint() const { return 0.5 * (lo + hi); }
  bool contains(double x) const { return x >= lo && x <= hi; }
};

// Node (h, i) of the codebook tree, h in [1, H], i in [1, 2^h].
struct Vertex {
  int level = 0;
  int index = 0;

  Vertex() = default;
  Vertex(int h, int i) : level(h), index(i) {}

  Vertex left_child() const { return {level + 1, 2 * index - 1}; }
  Vertex right_child() const { return {level + 1, 2 * index}; }
  Vertex parent() const { return {level - 1, (index + 1) / 2}; }

  // Leaf indices at level h_total spanned by this vertex's subtree.
  int first_leaf(int h_total) const { return (index - 1) * (1 << (h_total - level)) + 1; }
  int last_leaf(int h_total) const { return index * (1 << (h_total - level)); }

  bool operator==(const Vertex& o) const { return level == o.level && index == o.index; }
  bool operator!=(const Vertex& o) const { return !(*this == o); }
};

// Scalar-operation tally for the bandit policy. Channel physics is never
// counted; log/exp/sqrt count as one operation each.
struct OpCounter {
  long long count = 0;
  void add(long long n) { count += n; }
};

}  // namespace beamsweep
