#include "shiftsig/multiplicity.hpp"

#include <algorithm>
#include <numeric>

#include "shiftsig/error.hpp"

namespace shiftsig::multiplicity {

std::vector<double> bh_adjust(std::span<const double> p_raw) {
  const std::size_t m = p_raw.size();
  if (m == 0) throw Error(ErrorKind::EmptyResultSet, "no p-values to adjust");
  for (double p : p_raw) {
    if (!(p > 0.0 && p <= 1.0)) {
      throw Error(ErrorKind::InvalidConfig, "p-value outside (0, 1]");
    }
  }
  std::vector<std::size_t> order(m);
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return p_raw[a] < p_raw[b]; });

  std::vector<double> adjusted(m);
  const auto md = static_cast<double>(m);
  double running = 1.0;
  for (std::size_t r = m; r-- > 0;) {
    const std::size_t idx = order[r];
    running = std::min(running, md * p_raw[idx] / static_cast<double>(r + 1));
    adjusted[idx] = running;
  }
  return adjusted;
}

void bh_adjust(std::span<ShiftResult> results) {
  std::vector<double> raw(results.size());
  std::transform(results.begin(), results.end(), raw.begin(),
                 [](const ShiftResult& r) { return r.p_raw; });
  const auto adjusted = bh_adjust(raw);
  for (std::size_t i = 0; i < results.size(); ++i) results[i].p_adjusted = adjusted[i];
}

std::vector<ShiftResult> discoveries(std::span<const ShiftResult> results, double alpha) {
  std::vector<ShiftResult> out;
  std::copy_if(results.begin(), results.end(), std::back_inserter(out),
               [alpha](const ShiftResult& r) { return r.significant_at(alpha); });
  std::stable_sort(out.begin(), out.end(),
                   [](const ShiftResult& a, const ShiftResult& b) { return a.distance > b.distance; });
  return out;
}

}  // namespace shiftsig::multiplicity
