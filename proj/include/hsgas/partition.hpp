#pragma once

// Set partitions of {1..n} with the weights that drive every cumulant and
// cluster transform: the signed factorial weight (-1)^{|P|-1} (|P|-1)!,
// Stirling numbers of the second kind, Bell numbers, and the alternating
// binomial coefficients of the reduced cumulants.  Enumeration is by
// restricted-growth strings, which yields each partition exactly once with
// blocks already sorted by their smallest element.

#include <boost/multiprecision/cpp_int.hpp>

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <stdexcept>
#include <vector>

namespace hsgas {

using BigInt = boost::multiprecision::cpp_int;

// A partition of {0..n-1} into disjoint nonempty blocks, blocks ordered by
// smallest element, elements ascending within a block.
struct SetPartition {
  std::vector<std::vector<int>> blocks;
  int order() const { return static_cast<int>(blocks.size()); }
};

inline constexpr int kPartitionEnumerationCap = 12;  // Bell(12) = 4,213,597

// Calls f for every partition of an n-element set, in restricted-growth
// order.  The visited object is reused between calls.
inline void enumerate_set_partitions(int n, const std::function<void(const SetPartition&)>& f) {
  if (n < 1 || n > kPartitionEnumerationCap)
    throw std::invalid_argument("enumerate_set_partitions: n must lie in [1, 12]");
  std::vector<int> rgs(n, 0);  // rgs[i] = block id of element i
  SetPartition part;
  auto emit = [&] {
    int k = 0;
    for (int v : rgs) k = std::max(k, v + 1);
    part.blocks.assign(k, {});
    for (int i = 0; i < n; ++i) part.blocks[rgs[i]].push_back(i);
    f(part);
  };
  // Iterative successor walk over restricted growth strings.
  while (true) {
    emit();
    int i = n - 1;
    for (; i > 0; --i) {
      int maxprev = 0;
      for (int j = 0; j < i; ++j) maxprev = std::max(maxprev, rgs[j]);
      if (rgs[i] <= maxprev) break;
    }
    if (i == 0) return;
    ++rgs[i];
    for (int j = i + 1; j < n; ++j) rgs[j] = 0;
  }
}

inline std::vector<SetPartition> all_set_partitions(int n) {
  std::vector<SetPartition> out;
  enumerate_set_partitions(n, [&](const SetPartition& p) { out.push_back(p); });
  return out;
}

// (-1)^{k-1} (k-1)! for a partition with k blocks -- the Moebius weight of
// the partition lattice as it enters cumulant inversion.
inline BigInt mobius_weight_for_block_count(int block_count) {
  BigInt w = 1;
  for (int k = 2; k < block_count; ++k) w *= k;  // (k-1)!
  if (block_count % 2 == 0) w = -w;
  return w;
}

inline BigInt mobius_weight(const SetPartition& p) {
  return mobius_weight_for_block_count(p.order());
}

inline constexpr int kStirlingCap = 30;

// Stirling number of the second kind, exact.
inline BigInt stirling2(int n, int k) {
  if (n < 0 || k < 0 || k > n || n > kStirlingCap)
    throw std::invalid_argument("stirling2: need 0 <= k <= n <= 30");
  std::vector<std::vector<BigInt>> s(n + 1, std::vector<BigInt>(k + 1, 0));
  s[0][0] = 1;
  for (int i = 1; i <= n; ++i)
    for (int j = 1; j <= std::min(i, k); ++j) s[i][j] = BigInt(j) * s[i - 1][j] + s[i - 1][j - 1];
  return s[n][k];
}

inline BigInt bell_number(int n) {
  BigInt b = 0;
  for (int k = (n == 0 ? 0 : 1); k <= n; ++k) b += stirling2(n, k);
  if (n == 0) b = 1;
  return b;
}

inline BigInt factorial_big(int n) {
  BigInt f = 1;
  for (int k = 2; k <= n; ++k) f *= k;
  return f;
}

struct CumulantBoundResult {
  BigInt lhs;     // sum_k s(n+1,k) (k-1)!
  double rhs;     // n! e^{n+2}
  bool holds;
};

// The partition-sum norm bound: sum over partitions of an (n+1)-set of
// (|P|-1)! is at most n! e^{n+2}.
inline CumulantBoundResult cumulant_bound_check(int n) {
  if (n < 0 || n > kPartitionEnumerationCap)
    throw std::invalid_argument("cumulant_bound_check: n must lie in [0, 12]");
  BigInt lhs = 0;
  for (int k = 1; k <= n + 1; ++k) lhs += stirling2(n + 1, k) * factorial_big(k - 1);
  const double rhs = static_cast<double>(factorial_big(n)) * std::exp(static_cast<double>(n) + 2.0);
  return {lhs, rhs, static_cast<double>(lhs) <= rhs};
}

// Sum over all partitions of {1..n} of (-1)^{|P|-1}(|P|-1)!; equals the
// Kronecker delta_{n,1}, which is why particle number is conserved by the
// cumulant expansion of additive observables.
inline BigInt delta_identity_check(int n) {
  if (n < 1 || n > 10) throw std::invalid_argument("delta_identity_check: n must lie in [1, 10]");
  BigInt sum = 0;
  for (int k = 1; k <= n; ++k) sum += stirling2(n, k) * factorial_big(k - 1) *
                                      (k % 2 == 1 ? 1 : -1);
  return sum;
}

// Alternating binomial coefficients [(-1)^k C(n,k)]_{k=0..n} expressing the
// (1+n)th reduced cumulant through plain evolution operators of decreasing
// particle number.
inline std::vector<BigInt> reduced_cumulant_coefficients(int n) {
  if (n < 0 || n > 20) throw std::invalid_argument("reduced_cumulant_coefficients: n in [0, 20]");
  std::vector<BigInt> c(n + 1);
  BigInt binom = 1;
  for (int k = 0; k <= n; ++k) {
    c[k] = (k % 2 == 0) ? binom : -binom;
    binom = binom * (n - k) / (k + 1);
  }
  return c;
}

}  // namespace hsgas
