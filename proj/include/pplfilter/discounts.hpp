#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "pplfilter/ngram_counts.hpp"

namespace pplfilter {

// Modified Kneser-Ney discounts for one order, in count units.
struct Discount {
  double d1 = 0;
  double d2 = 0;
  double d3plus = 0;

  double for_count(std::uint64_t c) const {
    if (c == 0) return 0;
    if (c == 1) return d1;
    if (c == 2) return d2;
    return d3plus;
  }
  // Each discount must lie in (0, r] for its count class r.
  bool valid() const { return d1 > 0 && d1 <= 1 && d2 > 0 && d2 <= 2 && d3plus > 0 && d3plus <= 3; }

  friend bool operator==(const Discount&, const Discount&) = default;
};

inline constexpr Discount kFallbackDiscount{0.5, 1.0, 1.5};

struct DiscountSet {
  std::vector<Discount> per_order;  // index k - 1
  std::vector<std::string> warnings;

  const Discount& at_order(int k) const { return per_order[static_cast<std::size_t>(k - 1)]; }
};

// Discounts from counts-of-counts n1..n4:
//   Y = n1 / (n1 + 2 n2),  D1 = 1 - 2Y n2/n1,  D2 = 2 - 3Y n3/n2,  D3+ = 3 - 4Y n4/n3.
// Empty when some n_r is zero.
std::optional<Discount> discount_from_counts_of_counts(const std::array<std::uint64_t, 5>& n);

// Per-order discounts. Without `fallback`, a zero count-of-count or an
// out-of-range discount throws InputError naming the order; with it, that
// order uses kFallbackDiscount and a warning is recorded.
DiscountSet estimate_discounts(const NGramCounts& counts, bool fallback = false);

}  // namespace pplfilter
