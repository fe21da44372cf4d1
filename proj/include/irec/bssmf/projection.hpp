#pragma once

#include <span>
#include <vector>

namespace irec::bssmf {

// Clamps every entry into [lo, hi]. Requires lo <= hi.
void project_box(std::span<double> v, double lo, double hi);
std::vector<double> project_box(std::span<const double> v, double lo, double hi);

// Euclidean projection onto {h : h >= 0, sum(h) = 1}. The result has the form
// h_i = max(v_i - tau, 0). Throws NonFiniteInput on NaN/inf and on empty input.
// `scratch` is reused between calls to avoid allocation in hot loops.
void project_simplex(std::span<double> v, std::vector<double>& scratch);
std::vector<double> project_simplex(std::span<const double> v);

// The threshold tau of the projection of v.
double simplex_threshold(std::span<const double> v, std::vector<double>& scratch);

}  // namespace irec::bssmf
