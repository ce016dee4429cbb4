#pragma once

// Graded sequences and the partition-lattice convolution algebra on them:
// the star product, its exponential and logarithm, and the cluster
// forward/inverse transforms relating distribution-like and
// correlation-like families.  The scalar type is a template parameter so
// identity checks can run in exact rational arithmetic while histogram-mode
// callers use double.

#include <functional>
#include <stdexcept>
#include <vector>

#include "hsgas/partition.hpp"

namespace hsgas {

using Rational = boost::multiprecision::cpp_rational;

// Toy-mode graded sequence: one symmetric scalar value per level 0..n_max.
template <class T>
struct GradedSequence {
  std::vector<T> levels;  // levels[s] = value at grade s

  int order() const { return static_cast<int>(levels.size()) - 1; }
  static GradedSequence unit(int n_max) {
    GradedSequence g;
    g.levels.assign(n_max + 1, T(0));
    g.levels[0] = T(1);
    return g;
  }
};

namespace detail {
template <class T>
std::vector<std::vector<T>> binomial_table(int n) {
  std::vector<std::vector<T>> c(n + 1);
  for (int i = 0; i <= n; ++i) {
    c[i].assign(i + 1, T(1));
    for (int j = 1; j < i; ++j) c[i][j] = c[i - 1][j - 1] + c[i - 1][j];
  }
  return c;
}
}  // namespace detail

// (f * g)_s = sum over subsets Z of an s-set of f_{|Z|} g_{s-|Z|}; for
// symmetric toy levels this is the binomial convolution.
template <class T>
GradedSequence<T> star_product(const GradedSequence<T>& f, const GradedSequence<T>& g) {
  if (f.order() != g.order())
    throw std::invalid_argument("star_product: truncation orders differ");
  const int n = f.order();
  auto binom = detail::binomial_table<T>(n);
  GradedSequence<T> out;
  out.levels.assign(n + 1, T(0));
  for (int s = 0; s <= n; ++s)
    for (int k = 0; k <= s; ++k) out.levels[s] += binom[s][k] * f.levels[k] * g.levels[s - k];
  return out;
}

// exp_star: level s = delta_{s,0} + sum over partitions of an s-set of the
// product of h over block sizes.  Requires h_0 = 0.
template <class T>
GradedSequence<T> exp_star(const GradedSequence<T>& h) {
  if (!(h.levels.at(0) == T(0)))
    throw std::invalid_argument("exp_star: level 0 of the argument must be 0");
  const int n = h.order();
  GradedSequence<T> out;
  out.levels.assign(n + 1, T(0));
  out.levels[0] = T(1);
  for (int s = 1; s <= n; ++s) {
    T acc(0);
    enumerate_set_partitions(s, [&](const SetPartition& p) {
      T prod(1);
      for (const auto& blk : p.blocks) prod *= h.levels[blk.size()];
      acc += prod;
    });
    out.levels[s] = acc;
  }
  return out;
}

// ln_star: level s = sum over partitions of (-1)^{|P|-1}(|P|-1)! times the
// product of u over block sizes.  Requires u_0 = 1.
template <class T>
GradedSequence<T> ln_star(const GradedSequence<T>& u) {
  if (!(u.levels.at(0) == T(1)))
    throw std::invalid_argument("ln_star: level 0 of the argument must be 1");
  const int n = u.order();
  GradedSequence<T> out;
  out.levels.assign(n + 1, T(0));
  for (int s = 1; s <= n; ++s) {
    T acc(0);
    enumerate_set_partitions(s, [&](const SetPartition& p) {
      T w(static_cast<long long>(mobius_weight(p).convert_to<long long>()));
      T prod(1);
      for (const auto& blk : p.blocks) prod *= u.levels[blk.size()];
      acc += w * prod;
    });
    out.levels[s] = acc;
  }
  return out;
}

// F_s = sum over partitions P of {0..s-1} of the product of G over blocks.
// The callable receives a block as a sorted index list.
template <class T>
T cluster_forward(int s, const std::function<T(const std::vector<int>&)>& g_of_block) {
  T acc(0);
  enumerate_set_partitions(s, [&](const SetPartition& p) {
    T prod(1);
    for (const auto& blk : p.blocks) prod *= g_of_block(blk);
    acc += prod;
  });
  return acc;
}

// G_s = sum over partitions of (-1)^{|P|-1}(|P|-1)! times the product of F
// over blocks; the Moebius inverse of cluster_forward.
template <class T>
T cluster_invert(int s, const std::function<T(const std::vector<int>&)>& f_of_block) {
  T acc(0);
  enumerate_set_partitions(s, [&](const SetPartition& p) {
    T w(static_cast<long long>(mobius_weight(p).convert_to<long long>()));
    T prod(1);
    for (const auto& blk : p.blocks) prod *= f_of_block(blk);
    acc += w * prod;
  });
  return acc;
}

}  // namespace hsgas
