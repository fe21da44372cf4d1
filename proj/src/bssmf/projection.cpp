#include "irec/bssmf/projection.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <stdexcept>

#include "irec/common/error.hpp"

namespace irec::bssmf {

void project_box(std::span<double> v, double lo, double hi) {
  if (!(lo <= hi)) throw std::invalid_argument("box bounds need lo <= hi");
  for (double& x : v) x = std::clamp(x, lo, hi);
}

std::vector<double> project_box(std::span<const double> v, double lo, double hi) {
  std::vector<double> out(v.begin(), v.end());
  project_box(std::span<double>(out), lo, hi);
  return out;
}

double simplex_threshold(std::span<const double> v, std::vector<double>& scratch) {
  if (v.empty()) throw NonFiniteInput("cannot project an empty vector");
  for (const double x : v) {
    if (!std::isfinite(x)) throw NonFiniteInput("simplex projection input is not finite");
  }
  scratch.assign(v.begin(), v.end());
  std::sort(scratch.begin(), scratch.end(), std::greater<>());
  // Largest k with u_k - (sum_{j<=k} u_j - 1) / k > 0; k = 1 always qualifies.
  double prefix = 0.0;
  double tau = scratch[0] - 1.0;
  for (std::size_t k = 0; k < scratch.size(); ++k) {
    prefix += scratch[k];
    const double candidate = (prefix - 1.0) / static_cast<double>(k + 1);
    if (scratch[k] - candidate > 0.0) {
      tau = candidate;
    } else {
      break;
    }
  }
  return tau;
}

void project_simplex(std::span<double> v, std::vector<double>& scratch) {
  // Points already on the simplex up to summation rounding are fixed points;
  // recomputing tau for them would smear ulp-sized mass onto zero entries.
  double sum = 0.0;
  bool nonnegative = true;
  for (const double x : v) {
    if (!std::isfinite(x)) throw NonFiniteInput("simplex projection input is not finite");
    nonnegative = nonnegative && x >= 0.0;
    sum += x;
  }
  const double slack = 4.0 * static_cast<double>(v.size()) * std::numeric_limits<double>::epsilon();
  if (nonnegative && !v.empty() && std::abs(sum - 1.0) <= slack) return;
  const double tau = simplex_threshold(v, scratch);
  for (double& x : v) x = std::max(x - tau, 0.0);
}

std::vector<double> project_simplex(std::span<const double> v) {
  std::vector<double> out(v.begin(), v.end());
  std::vector<double> scratch;
  project_simplex(std::span<double>(out), scratch);
  return out;
}

}  // namespace irec::bssmf
