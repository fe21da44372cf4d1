#include "irec/bssmf/fit.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <unordered_map>

#include <fmt/format.h>
#include <nlohmann/json.hpp>

#include "irec/bssmf/projection.hpp"
#include "irec/common/parallel.hpp"
#include "irec/common/rng.hpp"

namespace irec::bssmf {

void FitConfig::validate() const {
  if (rank < 1) throw ConfigError("rank must be >= 1");
  if (max_outer < 1) throw ConfigError("max_outer must be >= 1");
  if (!(rel_tol > 0.0)) throw ConfigError("rel_tol must be > 0");
  if (!(armijo.shrink > 0.0 && armijo.shrink < 1.0)) {
    throw ConfigError("Armijo shrink factor must lie in (0, 1)");
  }
  if (!(armijo.sufficient_decrease > 0.0 && armijo.sufficient_decrease < 1.0)) {
    throw ConfigError("Armijo decrease constant must lie in (0, 1)");
  }
  if (!(lo <= hi)) throw ConfigError("rating bounds need lo <= hi");
  if (inner_steps < 1) throw ConfigError("inner_steps must be >= 1");
}

std::string to_string(StopReason reason) {
  return reason == StopReason::tolerance ? "tolerance" : "cap";
}

namespace {

using Eigen::Index;
using Eigen::Map;
using Eigen::MatrixXd;
using Eigen::VectorXd;

constexpr int kMaxBacktracks = 60;

struct Entry {
  std::size_t other;  // user index in by-item lists, item index in by-user lists
  double value;
};

// Observations grouped both ways, compressed-row style.
struct Observations {
  std::vector<std::size_t> item_offsets, user_offsets;
  std::vector<Entry> by_item, by_user;
};

Observations index_observations(std::span<const Observation> train,
                                const std::unordered_map<ItemId, std::size_t>& item_pos,
                                const std::unordered_map<UserId, std::size_t>& user_pos) {
  const std::size_t m = item_pos.size();
  const std::size_t n = user_pos.size();
  Observations obs;
  obs.item_offsets.assign(m + 1, 0);
  obs.user_offsets.assign(n + 1, 0);
  for (const auto& r : train) {
    ++obs.item_offsets[item_pos.at(r.item) + 1];
    ++obs.user_offsets[user_pos.at(r.user) + 1];
  }
  for (std::size_t i = 0; i < m; ++i) obs.item_offsets[i + 1] += obs.item_offsets[i];
  for (std::size_t u = 0; u < n; ++u) obs.user_offsets[u + 1] += obs.user_offsets[u];
  obs.by_item.resize(train.size());
  obs.by_user.resize(train.size());
  auto item_fill = obs.item_offsets;
  auto user_fill = obs.user_offsets;
  for (const auto& r : train) {
    const std::size_t i = item_pos.at(r.item);
    const std::size_t u = user_pos.at(r.user);
    const double x = r.value;
    obs.by_item[item_fill[i]++] = {u, x};
    obs.by_user[user_fill[u]++] = {i, x};
  }
  return obs;
}

double full_objective(const Observations& obs, const RowMatrix& w, const MatrixXd& h) {
  double total = 0.0;
  const std::size_t n = obs.user_offsets.size() - 1;
  for (std::size_t u = 0; u < n; ++u) {
    const auto hu = h.col(static_cast<Index>(u));
    for (std::size_t k = obs.user_offsets[u]; k < obs.user_offsets[u + 1]; ++k) {
      const auto& e = obs.by_user[k];
      const double res = w.row(static_cast<Index>(e.other)).dot(hu) - e.value;
      total += res * res;
    }
  }
  return 0.5 * total;
}

// Max absolute row sum; bounds the largest eigenvalue of a symmetric matrix,
// so 1/bound is a step the Armijo test accepts without backtracking.
template <typename Matrix>
double eigenvalue_bound(const Matrix& gram) {
  return gram.cwiseAbs().rowwise().sum().maxCoeff();
}

// Projected gradient on the W block. With B_i = sum h_u h_u^T and
// c_i = sum x_iu h_u over row i's observations, the block objective is
// sum_i (1/2 w_i^T B_i w_i - c_i^T w_i) + const, so trial steps are evaluated
// in O(m r^2) without touching the observations.
class WBlock {
 public:
  WBlock(std::size_t m, std::size_t r)
      : m_(m), r_(r), gram_(m * r * r), lin_(m, r), delta_(r), curvature_(r) {}

  void update(const Observations& obs, RowMatrix& w, const MatrixXd& h,
              const FitConfig& config) {
    const auto r = static_cast<Index>(r_);
    double lipschitz = 0.0;
    MatrixXd b(r, r);
    for (std::size_t i = 0; i < m_; ++i) {
      b.setZero();
      auto c = lin_.row(static_cast<Index>(i));
      c.setZero();
      for (std::size_t k = obs.item_offsets[i]; k < obs.item_offsets[i + 1]; ++k) {
        const auto hu = h.col(static_cast<Index>(obs.by_item[k].other));
        b.selfadjointView<Eigen::Lower>().rankUpdate(hu);
        c += obs.by_item[k].value * hu.transpose();
      }
      b.triangularView<Eigen::StrictlyUpper>() = b.transpose();
      Map<MatrixXd>(gram_.data() + i * r_ * r_, r, r) = b;
      lipschitz = std::max(lipschitz, eigenvalue_bound(b));
    }
    if (!(lipschitz > 0.0)) return;
    const double safe_step = 1.0 / lipschitz;
    step_ = std::max(step_, safe_step);

    RowMatrix grad(w.rows(), w.cols());
    RowMatrix trial(w.rows(), w.cols());
    for (std::size_t inner = 0; inner < config.inner_steps; ++inner) {
      for (std::size_t i = 0; i < m_; ++i) {
        const auto ii = static_cast<Index>(i);
        curvature_.noalias() = gram(i) * w.row(ii).transpose();
        grad.row(ii) = curvature_.transpose() - lin_.row(ii);
      }
      bool accepted = false;
      double alpha = step_ / config.armijo.shrink;  // try a longer step first
      for (int bt = 0; bt < kMaxBacktracks; ++bt, alpha *= config.armijo.shrink) {
        trial = w - alpha * grad;
        project_box(std::span<double>(trial.data(), static_cast<std::size_t>(trial.size())),
                    config.lo, config.hi);
        double change = 0.0;
        double directional = 0.0;
        for (std::size_t i = 0; i < m_; ++i) {
          const auto ii = static_cast<Index>(i);
          delta_.noalias() = (trial.row(ii) - w.row(ii)).transpose();
          const double gd = grad.row(ii).dot(delta_);
          directional += gd;
          curvature_.noalias() = gram(i) * delta_;
          change += gd + 0.5 * delta_.dot(curvature_);
        }
        if (directional == 0.0) return;  // stationary for this block
        if (change <= config.armijo.sufficient_decrease * directional) {
          w.swap(trial);
          step_ = alpha;
          accepted = true;
          break;
        }
      }
      if (!accepted) return;
    }
  }

 private:
  Map<const MatrixXd> gram(std::size_t i) const {
    const auto r = static_cast<Index>(r_);
    return Map<const MatrixXd>(gram_.data() + i * r_ * r_, r, r);
  }

  std::size_t m_, r_;
  std::vector<double> gram_;
  RowMatrix lin_;
  VectorXd delta_, curvature_;
  double step_ = 0.0;
};

// Projected gradient on one column of H; the columns are independent given W.
struct ColumnWorkspace {
  explicit ColumnWorkspace(Index r)
      : gram(r, r), lin(r), grad(r), trial(r), delta(r), curvature(r) {}
  MatrixXd gram;
  VectorXd lin, grad, trial, delta, curvature;
  std::vector<double> scratch;
};

void update_column(const Observations& obs, const RowMatrix& w, MatrixXd& h,
                   std::size_t u, const FitConfig& config, ColumnWorkspace& ws) {
  const Index r = w.cols();
  ws.gram.setZero();
  ws.lin.setZero();
  for (std::size_t k = obs.user_offsets[u]; k < obs.user_offsets[u + 1]; ++k) {
    const auto wi = w.row(static_cast<Index>(obs.by_user[k].other)).transpose();
    ws.gram.selfadjointView<Eigen::Lower>().rankUpdate(wi);
    ws.lin += obs.by_user[k].value * wi;
  }
  ws.gram.triangularView<Eigen::StrictlyUpper>() = ws.gram.transpose();
  const double lipschitz = eigenvalue_bound(ws.gram);
  if (!(lipschitz > 0.0)) return;

  auto hu = h.col(static_cast<Index>(u));
  for (std::size_t inner = 0; inner < config.inner_steps; ++inner) {
    ws.grad.noalias() = ws.gram * hu;
    ws.grad -= ws.lin;
    bool accepted = false;
    double alpha = 1.0 / lipschitz;
    for (int bt = 0; bt < kMaxBacktracks; ++bt, alpha *= config.armijo.shrink) {
      ws.trial = hu - alpha * ws.grad;
      project_simplex(std::span<double>(ws.trial.data(), static_cast<std::size_t>(r)),
                      ws.scratch);
      ws.delta = ws.trial - hu;
      const double directional = ws.grad.dot(ws.delta);
      if (directional == 0.0) return;
      ws.curvature.noalias() = ws.gram * ws.delta;
      const double change = directional + 0.5 * ws.delta.dot(ws.curvature);
      if (change <= config.armijo.sufficient_decrease * directional) {
        hu = ws.trial;
        accepted = true;
        break;
      }
    }
    if (!accepted) return;
  }
}

}  // namespace

FitResult fit(std::span<const Observation> train, const FitConfig& config,
              const FitObserver& observer, std::span<const ItemId> items) {
  config.validate();
  if (train.empty()) throw DegenerateData("training set is empty");

  std::vector<ItemId> rated_items;
  std::vector<UserId> user_ids;
  for (const auto& o : train) {
    if (!std::isfinite(o.value)) throw NonFiniteInput("training value is not finite");
    rated_items.push_back(o.item);
    user_ids.push_back(o.user);
  }
  for (auto* ids : {&rated_items, &user_ids}) {
    std::sort(ids->begin(), ids->end());
    ids->erase(std::unique(ids->begin(), ids->end()), ids->end());
  }
  {
    std::vector<std::pair<UserId, ItemId>> pairs;
    pairs.reserve(train.size());
    for (const auto& o : train) pairs.emplace_back(o.user, o.item);
    std::sort(pairs.begin(), pairs.end());
    if (std::adjacent_find(pairs.begin(), pairs.end()) != pairs.end()) {
      throw DataError("training data has a duplicate (user, item) entry");
    }
  }
  std::vector<ItemId> item_ids =
      items.empty() ? rated_items : std::vector<ItemId>(items.begin(), items.end());
  std::unordered_map<ItemId, std::size_t> item_pos;
  std::unordered_map<UserId, std::size_t> user_pos;
  for (std::size_t k = 0; k < item_ids.size(); ++k) {
    if (!item_pos.emplace(item_ids[k], k).second) {
      throw DataError(fmt::format("duplicate item id {}", item_ids[k]));
    }
  }
  for (std::size_t k = 0; k < user_ids.size(); ++k) user_pos.emplace(user_ids[k], k);
  for (const ItemId id : rated_items) {
    if (!item_pos.contains(id)) {
      throw DataError(fmt::format("item {} is rated but not in the item list", id));
    }
  }
  const Observations obs = index_observations(train, item_pos, user_pos);
  for (std::size_t i = 0; i < item_ids.size(); ++i) {
    if (obs.item_offsets[i] == obs.item_offsets[i + 1]) {
      throw DegenerateData(fmt::format("item {} has no observations", item_ids[i]));
    }
  }

  const std::size_t m = item_ids.size();
  const std::size_t n = user_ids.size();
  const auto r = static_cast<Index>(config.rank);
  Rng rng(config.seed);
  RowMatrix w(static_cast<Index>(m), r);
  for (Index i = 0; i < w.rows(); ++i) {
    for (Index t = 0; t < r; ++t) w(i, t) = rng.uniform(config.lo, config.hi);
  }
  MatrixXd h = MatrixXd::Constant(r, static_cast<Index>(n), 1.0 / static_cast<double>(r));
  FactorModel model(std::move(w), std::move(h), config.lo, config.hi,
                    std::move(item_ids), std::move(user_ids));

  FitReport report;
  report.objective.push_back(full_objective(obs, model.W(), model.H()));
  if (observer) observer({0, report.objective.back(), model});

  WBlock w_block(m, config.rank);
  for (std::size_t outer = 1; outer <= config.max_outer; ++outer) {
    w_block.update(obs, model.W(), model.H(), config);
    parallel_chunks(n, config.threads, [&](std::size_t begin, std::size_t end) {
      ColumnWorkspace ws(r);
      for (std::size_t u = begin; u < end; ++u) {
        update_column(obs, model.W(), model.H(), u, config, ws);
      }
    });
    const double previous = report.objective.back();
    const double current = full_objective(obs, model.W(), model.H());
    report.objective.push_back(current);
    report.iterations = outer;
    if (observer) observer({outer, current, model});
    const double decrease = previous - current;
    if (current == 0.0 || decrease <= config.rel_tol * previous) {
      report.stop = StopReason::tolerance;
      break;
    }
  }
  report.train_rmse = rmse(model, train);
  return {std::move(model), std::move(report)};
}

FitResult fit(const data::RatingDataset& train, const FitConfig& config,
              const FitObserver& observer, std::span<const ItemId> items) {
  const auto obs = observations(train);
  return fit(obs, config, observer, items);
}

std::string report_to_json(const FitReport& report, const FitConfig& config) {
  nlohmann::json doc;
  doc["rank"] = config.rank;
  doc["seed"] = config.seed;
  doc["max_outer"] = config.max_outer;
  doc["rel_tol"] = config.rel_tol;
  doc["iterations"] = report.iterations;
  doc["stop_reason"] = to_string(report.stop);
  doc["train_rmse"] = report.train_rmse;
  doc["objective"] = report.objective;
  return doc.dump(1) + "\n";
}

}  // namespace irec::bssmf
