#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "irec/common/error.hpp"

namespace irec::stats {

using Sample = std::vector<double>;

class InsufficientData : public DataError {
 public:
  using DataError::DataError;
};

class AllValuesTied : public DataError {
 public:
  using DataError::DataError;
};

struct TestResult {
  double statistic = 0.0;
  double p_value = 1.0;
  double df = 0.0;  // numerator df for Levene; denominator df in df2
  double df2 = 0.0;
  std::string method;
};

struct PairwiseResult {
  std::size_t group_a = 0;  // indices into the input groups, group_a < group_b
  std::size_t group_b = 0;
  double z = 0.0;
  double p_value = 1.0;
  double p_adjusted = 1.0;
};

enum class Magnitude { Negligible, Small, Medium, Large };
std::string_view to_string(Magnitude magnitude);
// |delta| < 0.147 negligible, < 0.33 small, < 0.474 medium, otherwise large.
Magnitude classify_delta(double delta);

struct EffectSize {
  double delta = 0.0;
  Magnitude magnitude = Magnitude::Negligible;
};

// Mean-centred Levene W against F(g - 1, N - g). At least two groups of at
// least two values each, otherwise InsufficientData. Zero spread everywhere
// gives W = 0, p = 1; zero within-group spread with unequal group spreads gives
// W = inf, p = 0.
TestResult levene(std::span<const Sample> groups);

// Kruskal-Wallis H on pooled midranks with the tie correction, against
// chi-square(g - 1). Needs at least two non-empty groups and N >= 3
// (InsufficientData) and two distinct values overall (AllValuesTied).
TestResult kruskal_wallis(std::span<const Sample> groups);

// Dunn's z for every pair (a < b) on pooled midranks, two-sided normal
// p-values, Bonferroni-adjusted by the number of pairs and capped at 1.
std::vector<PairwiseResult> dunn_posthoc(std::span<const Sample> groups);

// (#{a_i > b_j} - #{a_i < b_j}) / (|a| |b|). EmptyInput if either is empty.
EffectSize cliffs_delta(std::span<const double> a, std::span<const double> b);

// Midranks (1-based) of the values, in input order.
std::vector<double> midranks(std::span<const double> values);

}  // namespace irec::stats
