#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <span>
#include <string>
#include <vector>

#include "irec/bssmf/factor_model.hpp"
#include "irec/common/error.hpp"
#include "irec/data/ratings.hpp"

namespace irec::bssmf {

class DegenerateData : public DataError {
 public:
  using DataError::DataError;
};

struct ArmijoParams {
  double shrink = 0.5;                 // step multiplier on each backtrack
  double sufficient_decrease = 1e-4;   // sigma in f(x+) <= f(x) + sigma <g, x+ - x>
};

struct FitConfig {
  std::size_t rank = 5;
  std::size_t max_outer = 500;
  double rel_tol = 1e-5;
  std::uint64_t seed = 0;
  ArmijoParams armijo;
  double lo = 1.0;
  double hi = 5.0;
  // Projected-gradient steps per block (W, then every H column) in one outer
  // iteration.
  std::size_t inner_steps = 10;
  // Worker threads for the H-column updates; results do not depend on it.
  std::size_t threads = 1;

  // Throws ConfigError on an out-of-range field.
  void validate() const;
};

enum class StopReason { tolerance, cap };

struct FitReport {
  // objective[0] is the initial value, objective[t] the value after outer t.
  std::vector<double> objective;
  double train_rmse = 0.0;
  std::size_t iterations = 0;
  StopReason stop = StopReason::cap;
};

struct FitProgress {
  std::size_t iteration;  // 0 for the initial point
  double objective;
  const FactorModel& model;
};

using FitObserver = std::function<void(const FitProgress&)>;

struct FitResult {
  FactorModel model;
  FitReport report;
};

// Alternating projected gradient on the masked least-squares objective: one W
// block (box projection, shared step) then every H column (simplex
// projection), each step accepted by Armijo backtracking so the objective never
// increases. Rows of W follow `items` when given (every one must be rated in
// train, otherwise DegenerateData); by default they are the items of train.
// Users are the distinct users of train, in increasing id order.
FitResult fit(std::span<const Observation> train, const FitConfig& config,
              const FitObserver& observer = {}, std::span<const ItemId> items = {});
FitResult fit(const data::RatingDataset& train, const FitConfig& config,
              const FitObserver& observer = {}, std::span<const ItemId> items = {});

std::string to_string(StopReason reason);
std::string report_to_json(const FitReport& report, const FitConfig& config);

}  // namespace irec::bssmf
