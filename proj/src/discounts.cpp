#include "pplfilter/discounts.hpp"

#include <sstream>

#include "pplfilter/error.hpp"

namespace pplfilter {

std::optional<Discount> discount_from_counts_of_counts(const std::array<std::uint64_t, 5>& n) {
  for (int r = 1; r <= 4; ++r) {
    if (n[static_cast<std::size_t>(r)] == 0) return std::nullopt;
  }
  const auto n1 = static_cast<double>(n[1]);
  const auto n2 = static_cast<double>(n[2]);
  const auto n3 = static_cast<double>(n[3]);
  const auto n4 = static_cast<double>(n[4]);
  const double y = n1 / (n1 + 2.0 * n2);
  return Discount{1.0 - 2.0 * y * n2 / n1, 2.0 - 3.0 * y * n3 / n2, 3.0 - 4.0 * y * n4 / n3};
}

DiscountSet estimate_discounts(const NGramCounts& counts, bool fallback) {
  DiscountSet set;
  for (int k = 1; k <= counts.order; ++k) {
    const auto& n = counts.counts_of_counts[static_cast<std::size_t>(k - 1)];
    std::optional<Discount> d = discount_from_counts_of_counts(n);

    std::string problem;
    if (!d) {
      for (int r = 1; r <= 4; ++r) {
        if (n[static_cast<std::size_t>(r)] == 0) {
          problem = "no " + std::to_string(k) + "-grams occur exactly " + std::to_string(r) +
                    " time(s) (n" + std::to_string(r) + " = 0)";
          break;
        }
      }
    } else if (!d->valid()) {
      std::ostringstream msg;
      msg << "discounts out of range: D1=" << d->d1 << " D2=" << d->d2 << " D3+=" << d->d3plus;
      problem = msg.str();
    }

    if (problem.empty()) {
      set.per_order.push_back(*d);
      continue;
    }
    if (!fallback) {
      throw InputError("cannot estimate discounts for order " + std::to_string(k) + ": " + problem +
                       "; the corpus is too small or degenerate (enable fallback discounts to proceed)");
    }
    set.warnings.push_back("order " + std::to_string(k) + ": " + problem + "; using fallback discounts 0.5 1 1.5");
    set.per_order.push_back(kFallbackDiscount);
  }
  return set;
}

}  // namespace pplfilter
