#include "irec/stats/inference.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include <fmt/format.h>

#include "irec/stats/distributions.hpp"

namespace irec::stats {

std::string_view to_string(Magnitude magnitude) {
  switch (magnitude) {
    case Magnitude::Negligible:
      return "negligible";
    case Magnitude::Small:
      return "small";
    case Magnitude::Medium:
      return "medium";
    case Magnitude::Large:
      return "large";
  }
  return "negligible";
}

Magnitude classify_delta(double delta) {
  const double d = std::abs(delta);
  if (d < 0.147) return Magnitude::Negligible;
  if (d < 0.33) return Magnitude::Small;
  if (d < 0.474) return Magnitude::Medium;
  return Magnitude::Large;
}

std::vector<double> midranks(std::span<const double> values) {
  std::vector<std::size_t> order(values.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return values[a] < values[b]; });
  std::vector<double> ranks(values.size());
  for (std::size_t i = 0; i < order.size();) {
    std::size_t j = i + 1;
    while (j < order.size() && values[order[j]] == values[order[i]]) ++j;
    const double rank = 0.5 * static_cast<double>(i + 1 + j);  // mean of i+1..j
    for (std::size_t k = i; k < j; ++k) ranks[order[k]] = rank;
    i = j;
  }
  return ranks;
}

namespace {

void require_finite(std::span<const Sample> groups) {
  for (const auto& g : groups) {
    for (const double v : g) {
      if (!std::isfinite(v)) throw NonFiniteInput("sample contains a non-finite value");
    }
  }
}

struct PooledRanks {
  std::vector<double> mean_rank;  // per group
  std::vector<double> n;          // per group
  double total = 0.0;             // N
  double tie_sum = 0.0;           // sum over tie blocks of t^3 - t
};

PooledRanks pool_ranks(std::span<const Sample> groups) {
  if (groups.size() < 2) throw InsufficientData("need at least two groups");
  std::vector<double> all;
  for (const auto& g : groups) {
    if (g.empty()) throw InsufficientData("every group needs at least one value");
    all.insert(all.end(), g.begin(), g.end());
  }
  if (all.size() < 3) throw InsufficientData("need at least three values in total");
  require_finite(groups);
  const auto ranks = midranks(all);

  PooledRanks out;
  out.total = static_cast<double>(all.size());
  std::size_t offset = 0;
  for (const auto& g : groups) {
    double sum = 0.0;
    for (std::size_t k = 0; k < g.size(); ++k) sum += ranks[offset + k];
    out.mean_rank.push_back(sum / static_cast<double>(g.size()));
    out.n.push_back(static_cast<double>(g.size()));
    offset += g.size();
  }
  std::sort(all.begin(), all.end());
  for (std::size_t i = 0; i < all.size();) {
    std::size_t j = i + 1;
    while (j < all.size() && all[j] == all[i]) ++j;
    const double t = static_cast<double>(j - i);
    out.tie_sum += t * t * t - t;
    i = j;
  }
  if (all.front() == all.back()) throw AllValuesTied("all values are tied");
  return out;
}

}  // namespace

TestResult levene(std::span<const Sample> groups) {
  if (groups.size() < 2) throw InsufficientData("Levene needs at least two groups");
  for (const auto& g : groups) {
    if (g.size() < 2) throw InsufficientData("Levene needs at least two values per group");
  }
  require_finite(groups);

  const double k = static_cast<double>(groups.size());
  double total = 0.0;
  std::vector<std::vector<double>> dev(groups.size());
  std::vector<double> dev_mean(groups.size());
  double grand = 0.0;
  for (std::size_t i = 0; i < groups.size(); ++i) {
    const auto& g = groups[i];
    const double mean = std::accumulate(g.begin(), g.end(), 0.0) / static_cast<double>(g.size());
    for (const double v : g) dev[i].push_back(std::abs(v - mean));
    const double s = std::accumulate(dev[i].begin(), dev[i].end(), 0.0);
    dev_mean[i] = s / static_cast<double>(g.size());
    grand += s;
    total += static_cast<double>(g.size());
  }
  grand /= total;

  double between = 0.0;
  double within = 0.0;
  for (std::size_t i = 0; i < groups.size(); ++i) {
    const double d = dev_mean[i] - grand;
    between += static_cast<double>(groups[i].size()) * d * d;
    for (const double z : dev[i]) within += (z - dev_mean[i]) * (z - dev_mean[i]);
  }

  TestResult r;
  r.method = "levene-mean";
  r.df = k - 1.0;
  r.df2 = total - k;
  if (within == 0.0) {
    r.statistic = between == 0.0 ? 0.0 : std::numeric_limits<double>::infinity();
    r.p_value = between == 0.0 ? 1.0 : 0.0;
    return r;
  }
  r.statistic = (total - k) / (k - 1.0) * between / within;
  r.p_value = f_sf(r.statistic, r.df, r.df2);
  return r;
}

TestResult kruskal_wallis(std::span<const Sample> groups) {
  const PooledRanks pooled = pool_ranks(groups);
  const double n = pooled.total;
  double sum = 0.0;
  for (std::size_t i = 0; i < pooled.n.size(); ++i) {
    const double rank_sum = pooled.mean_rank[i] * pooled.n[i];
    sum += rank_sum * rank_sum / pooled.n[i];
  }
  const double h = 12.0 / (n * (n + 1.0)) * sum - 3.0 * (n + 1.0);
  const double correction = 1.0 - pooled.tie_sum / (n * n * n - n);

  TestResult r;
  r.method = "kruskal-wallis";
  r.statistic = std::max(0.0, h / correction);
  r.df = static_cast<double>(groups.size()) - 1.0;
  r.p_value = chi2_sf(r.statistic, r.df);
  return r;
}

std::vector<PairwiseResult> dunn_posthoc(std::span<const Sample> groups) {
  const PooledRanks pooled = pool_ranks(groups);
  const double n = pooled.total;
  const double variance = n * (n + 1.0) / 12.0 - pooled.tie_sum / (12.0 * (n - 1.0));
  const std::size_t g = groups.size();
  const double pairs = static_cast<double>(g * (g - 1) / 2);

  std::vector<PairwiseResult> out;
  for (std::size_t a = 0; a < g; ++a) {
    for (std::size_t b = a + 1; b < g; ++b) {
      PairwiseResult p;
      p.group_a = a;
      p.group_b = b;
      const double se = std::sqrt(variance * (1.0 / pooled.n[a] + 1.0 / pooled.n[b]));
      p.z = (pooled.mean_rank[a] - pooled.mean_rank[b]) / se;
      p.p_value = std::min(1.0, 2.0 * normal_sf(std::abs(p.z)));
      p.p_adjusted = std::min(1.0, p.p_value * pairs);
      out.push_back(p);
    }
  }
  return out;
}

EffectSize cliffs_delta(std::span<const double> a, std::span<const double> b) {
  if (a.empty() || b.empty()) throw EmptyInput("Cliff's delta needs two non-empty samples");
  for (const double y : b) {
    if (!std::isfinite(y)) throw NonFiniteInput("sample contains a non-finite value");
  }
  std::vector<double> sorted(b.begin(), b.end());
  std::sort(sorted.begin(), sorted.end());
  double greater = 0.0;
  double less = 0.0;
  for (const double x : a) {
    if (!std::isfinite(x)) throw NonFiniteInput("sample contains a non-finite value");
    const auto lo = std::lower_bound(sorted.begin(), sorted.end(), x);
    const auto hi = std::upper_bound(sorted.begin(), sorted.end(), x);
    greater += static_cast<double>(lo - sorted.begin());
    less += static_cast<double>(sorted.end() - hi);
  }
  EffectSize e;
  e.delta = (greater - less) / (static_cast<double>(a.size()) * static_cast<double>(b.size()));
  e.magnitude = classify_delta(e.delta);
  return e;
}

}  // namespace irec::stats
