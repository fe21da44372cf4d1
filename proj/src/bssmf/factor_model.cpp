#include "irec/bssmf/factor_model.hpp"

#include <cmath>

#include <fmt/format.h>
#include <nlohmann/json.hpp>

namespace irec::bssmf {

FactorModel::FactorModel(RowMatrix w, Eigen::MatrixXd h, double lo, double hi,
                         std::vector<ItemId> item_ids, std::vector<UserId> user_ids)
    : w_(std::move(w)),
      h_(std::move(h)),
      lo_(lo),
      hi_(hi),
      item_ids_(std::move(item_ids)),
      user_ids_(std::move(user_ids)) {
  if (static_cast<std::size_t>(w_.rows()) != item_ids_.size() ||
      static_cast<std::size_t>(h_.cols()) != user_ids_.size() ||
      w_.cols() != h_.rows() || w_.cols() < 1) {
    throw DimensionMismatch(fmt::format(
        "W is {}x{}, H is {}x{}, with {} item ids and {} user ids", w_.rows(),
        w_.cols(), h_.rows(), h_.cols(), item_ids_.size(), user_ids_.size()));
  }
  for (std::size_t k = 0; k < item_ids_.size(); ++k) {
    if (!item_index_.emplace(item_ids_[k], k).second) {
      throw DataError(fmt::format("duplicate item id {}", item_ids_[k]));
    }
  }
  for (std::size_t k = 0; k < user_ids_.size(); ++k) {
    if (!user_index_.emplace(user_ids_[k], k).second) {
      throw DataError(fmt::format("duplicate user id {}", user_ids_[k]));
    }
  }
}

std::optional<std::size_t> FactorModel::item_index(ItemId id) const {
  const auto it = item_index_.find(id);
  if (it == item_index_.end()) return std::nullopt;
  return it->second;
}

std::optional<std::size_t> FactorModel::user_index(UserId id) const {
  const auto it = user_index_.find(id);
  if (it == user_index_.end()) return std::nullopt;
  return it->second;
}

std::string FactorModel::invariant_violation() const {
  if (!(lo_ <= hi_)) return fmt::format("bounds lo={} > hi={}", lo_, hi_);
  for (Eigen::Index i = 0; i < w_.rows(); ++i) {
    for (Eigen::Index t = 0; t < w_.cols(); ++t) {
      const double x = w_(i, t);
      if (!(x >= lo_ && x <= hi_)) {
        return fmt::format("W({}, {}) = {} outside [{}, {}]", i, t, x, lo_, hi_);
      }
    }
  }
  for (Eigen::Index u = 0; u < h_.cols(); ++u) {
    double sum = 0.0;
    for (Eigen::Index t = 0; t < h_.rows(); ++t) {
      const double x = h_(t, u);
      if (!(x >= 0.0)) return fmt::format("H({}, {}) = {} is negative", t, u, x);
      sum += x;
    }
    if (!(std::fabs(sum - 1.0) <= kSimplexSumTolerance)) {
      return fmt::format("H column {} sums to {:.17g}", u, sum);
    }
  }
  return {};
}

Eigen::VectorXd predict(const FactorModel& model, std::size_t user) {
  if (user >= model.n_users()) {
    throw IndexOutOfRange(fmt::format("user index {} >= {}", user, model.n_users()));
  }
  return model.W() * model.H().col(static_cast<Eigen::Index>(user));
}

double predict(const FactorModel& model, std::size_t user, std::size_t item) {
  if (user >= model.n_users() || item >= model.n_items()) {
    throw IndexOutOfRange(fmt::format("(user {}, item {}) out of range", user, item));
  }
  return model.W().row(static_cast<Eigen::Index>(item))
      .dot(model.H().col(static_cast<Eigen::Index>(user)));
}

Eigen::VectorXd user_type_scores(const FactorModel& model, std::size_t t) {
  if (t >= model.rank()) {
    throw IndexOutOfRange(fmt::format("type index {} >= rank {}", t, model.rank()));
  }
  return model.W().col(static_cast<Eigen::Index>(t));
}

std::vector<Observation> observations(std::span<const data::Rating> triples) {
  std::vector<Observation> out;
  out.reserve(triples.size());
  for (const auto& r : triples) {
    out.push_back({r.user, r.item, static_cast<double>(r.value)});
  }
  return out;
}

std::vector<Observation> observations(const data::RatingDataset& data) {
  return observations(data.triples());
}

namespace {

double squared_error(const FactorModel& model, std::span<const Observation> data,
                     bool as_dimension_error) {
  double total = 0.0;
  for (const Observation& o : data) {
    const auto u = model.user_index(o.user);
    const auto i = model.item_index(o.item);
    if (!u || !i) {
      const auto what = fmt::format("entry ({}, {}) is outside the model", o.user, o.item);
      if (as_dimension_error) throw DimensionMismatch(what);
      throw IndexOutOfRange(what);
    }
    const double e = o.value - predict(model, *u, *i);
    total += e * e;
  }
  return total;
}

}  // namespace

double objective(std::span<const Observation> data, const FactorModel& model) {
  return 0.5 * squared_error(model, data, true);
}

double objective(const data::RatingDataset& data, const FactorModel& model) {
  const auto obs = observations(data);
  return objective(obs, model);
}

double rmse(const FactorModel& model, std::span<const Observation> triples) {
  if (triples.empty()) throw EmptyInput("rmse needs at least one triple");
  return std::sqrt(squared_error(model, triples, false) /
                   static_cast<double>(triples.size()));
}

double rmse(const FactorModel& model, std::span<const data::Rating> triples) {
  const auto obs = observations(triples);
  return rmse(model, obs);
}

std::string model_to_json(const FactorModel& model) {
  nlohmann::json doc;
  doc["lo"] = model.lo();
  doc["hi"] = model.hi();
  doc["r"] = model.rank();
  doc["item_ids"] = model.item_ids();
  doc["user_ids"] = model.user_ids();
  std::vector<double> w(model.W().data(), model.W().data() + model.W().size());
  std::vector<double> h(model.H().data(), model.H().data() + model.H().size());
  doc["W"] = std::move(w);
  doc["H"] = std::move(h);
  return doc.dump() + "\n";
}

FactorModel model_from_json(std::string_view text) {
  try {
    const auto doc = nlohmann::json::parse(text);
    const auto r = doc.at("r").get<std::size_t>();
    auto items = doc.at("item_ids").get<std::vector<ItemId>>();
    auto users = doc.at("user_ids").get<std::vector<UserId>>();
    const auto w = doc.at("W").get<std::vector<double>>();
    const auto h = doc.at("H").get<std::vector<double>>();
    if (r < 1 || w.size() != items.size() * r || h.size() != users.size() * r) {
      throw DataError("model document has inconsistent dimensions");
    }
    const auto m = static_cast<Eigen::Index>(items.size());
    const auto n = static_cast<Eigen::Index>(users.size());
    const auto k = static_cast<Eigen::Index>(r);
    RowMatrix wm = Eigen::Map<const RowMatrix>(w.data(), m, k);
    Eigen::MatrixXd hm = Eigen::Map<const Eigen::MatrixXd>(h.data(), k, n);
    FactorModel model(std::move(wm), std::move(hm), doc.at("lo").get<double>(),
                      doc.at("hi").get<double>(), std::move(items), std::move(users));
    if (auto bad = model.invariant_violation(); !bad.empty()) {
      throw DataError("infeasible model: " + bad);
    }
    return model;
  } catch (const nlohmann::json::exception& e) {
    throw DataError(std::string("model document: ") + e.what());
  }
}

}  // namespace irec::bssmf
