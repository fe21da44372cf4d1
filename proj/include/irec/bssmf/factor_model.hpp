#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include <Eigen/Dense>

#include "irec/common/error.hpp"
#include "irec/common/ids.hpp"
#include "irec/data/ratings.hpp"

namespace irec::bssmf {

using RowMatrix = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

// X ~ W H with W (items x r) in [lo, hi] and H (r x users) column-stochastic.
// Column t of W is latent user type t; column u of H holds user u's mixture
// weights over the types.
class FactorModel {
 public:
  FactorModel() = default;
  FactorModel(RowMatrix w, Eigen::MatrixXd h, double lo, double hi,
              std::vector<ItemId> item_ids, std::vector<UserId> user_ids);

  const RowMatrix& W() const { return w_; }
  const Eigen::MatrixXd& H() const { return h_; }
  RowMatrix& W() { return w_; }
  Eigen::MatrixXd& H() { return h_; }

  double lo() const { return lo_; }
  double hi() const { return hi_; }
  std::size_t rank() const { return static_cast<std::size_t>(w_.cols()); }
  std::size_t n_items() const { return item_ids_.size(); }
  std::size_t n_users() const { return user_ids_.size(); }

  const std::vector<ItemId>& item_ids() const { return item_ids_; }
  const std::vector<UserId>& user_ids() const { return user_ids_; }
  std::optional<std::size_t> item_index(ItemId id) const;
  std::optional<std::size_t> user_index(UserId id) const;

  // Empty string when feasible, otherwise a description of the first
  // violation. Column sums are checked to within 1e-12.
  std::string invariant_violation() const;

 private:
  RowMatrix w_;
  Eigen::MatrixXd h_;
  double lo_ = 1.0;
  double hi_ = 5.0;
  std::vector<ItemId> item_ids_;
  std::vector<UserId> user_ids_;
  std::unordered_map<ItemId, std::size_t> item_index_;
  std::unordered_map<UserId, std::size_t> user_index_;
};

inline constexpr double kSimplexSumTolerance = 1e-12;

// One observed entry of X. Ratings are integers, but synthetic and planted
// matrices are real-valued, so the numerical code works on doubles.
struct Observation {
  UserId user = 0;
  ItemId item = 0;
  double value = 0.0;
};

std::vector<Observation> observations(const data::RatingDataset& data);
std::vector<Observation> observations(std::span<const data::Rating> triples);

// W h_user, every entry in [lo, hi] by convexity; no clipping is applied.
Eigen::VectorXd predict(const FactorModel& model, std::size_t user);
double predict(const FactorModel& model, std::size_t user, std::size_t item);

// Column t of W: the score latent type t gives each item.
Eigen::VectorXd user_type_scores(const FactorModel& model, std::size_t t);

// 1/2 sum over observed (u, i) of (X_iu - (WH)_iu)^2. Throws DimensionMismatch
// when the data references a user or item the model does not have.
double objective(std::span<const Observation> data, const FactorModel& model);
double objective(const data::RatingDataset& data, const FactorModel& model);

// Root mean squared error over (user, item, rating) triples. Throws EmptyInput
// on an empty list and IndexOutOfRange on unknown ids.
double rmse(const FactorModel& model, std::span<const Observation> triples);
double rmse(const FactorModel& model, std::span<const data::Rating> triples);

// JSON document {lo, hi, r, W (row-major), H (column-major), item_ids,
// user_ids}. Doubles are written in shortest round-trip form.
std::string model_to_json(const FactorModel& model);
// Throws DataError on a malformed document or an infeasible model.
FactorModel model_from_json(std::string_view text);

}  // namespace irec::bssmf
