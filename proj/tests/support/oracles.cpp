#include "support/oracles.hpp"

#include <cmath>
#include <limits>

namespace irec::testing {

std::vector<double> simplex_oracle(std::span<const double> v) {
  const std::size_t d = v.size();
  std::vector<double> best;
  double best_dist = std::numeric_limits<double>::infinity();
  for (std::size_t mask = 1; mask < (std::size_t{1} << d); ++mask) {
    double sum = 0.0;
    double size = 0.0;
    for (std::size_t i = 0; i < d; ++i) {
      if (mask >> i & 1) {
        sum += v[i];
        size += 1.0;
      }
    }
    // Stationary point on the face: equal shift of the support onto sum 1.
    const double shift = (1.0 - sum) / size;
    std::vector<double> h(d, 0.0);
    bool feasible = true;
    for (std::size_t i = 0; i < d; ++i) {
      if (mask >> i & 1) {
        h[i] = v[i] + shift;
        if (h[i] < 0.0) feasible = false;
      }
    }
    if (!feasible) continue;
    double dist = 0.0;
    for (std::size_t i = 0; i < d; ++i) dist += (h[i] - v[i]) * (h[i] - v[i]);
    if (dist < best_dist) {
      best_dist = dist;
      best = h;
    }
  }
  return best;
}

namespace {

double predicted(const bssmf::FactorModel& model, const bssmf::Observation& o) {
  const std::size_t u = *model.user_index(o.user);
  const std::size_t i = *model.item_index(o.item);
  double p = 0.0;
  for (std::size_t t = 0; t < model.rank(); ++t) {
    p += model.W()(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(t)) *
         model.H()(static_cast<Eigen::Index>(t), static_cast<Eigen::Index>(u));
  }
  return p;
}

}  // namespace

double objective_oracle(std::span<const bssmf::Observation> data, const bssmf::FactorModel& model) {
  double total = 0.0;
  for (const auto& o : data) {
    const double e = o.value - predicted(model, o);
    total += 0.5 * e * e;
  }
  return total;
}

double rmse_oracle(std::span<const bssmf::Observation> data, const bssmf::FactorModel& model) {
  double sq = 0.0;
  for (const auto& o : data) {
    const double e = o.value - predicted(model, o);
    sq += e * e;
  }
  return std::sqrt(sq / static_cast<double>(data.size()));
}

}  // namespace irec::testing
