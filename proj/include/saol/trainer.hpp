#ifndef SAOL_TRAINER_HPP
#define SAOL_TRAINER_HPP

#include <cstdint>
#include <deque>
#include <functional>
#include <iosfwd>
#include <optional>

#include "saol/objective.hpp"

namespace saol {

struct ArmijoConfig {
  double a0 = 0.1;   // initial step length
  double b = 0.9;    // shrink factor
  double c = 1e-4;   // sufficient-decrease slope
  int k_max = 40;    // trial cap
};

struct TrainerConfig {
  Eigen::Index batch_size = 500;
  ObjectiveParams objective;
  ArmijoConfig armijo;
  Eigen::Index avg_window = 2000;  // w, line-search cost averaging
  Eigen::Index stop_window = 200;  // l, stopping statistic window
  double stop_tol = 5e-5;          // delta
  Eigen::Index max_iters = 100000;
  std::uint64_t seed = 0;

  void validate() const;
};

// Fixed-capacity sliding mean.
class SlidingWindow {
 public:
  explicit SlidingWindow(Eigen::Index capacity);
  void push(double x);
  double mean() const;
  // Mean of the window as it would be after push(x).
  double mean_with(double x) const;
  Eigen::Index size() const { return static_cast<Eigen::Index>(buf_.size()); }

 private:
  Eigen::Index capacity_;
  std::deque<double> buf_;
  double sum_ = 0.0;
};

struct IterationRecord {
  Eigen::Index iter = 0;
  double batch_cost = 0.0;
  double window_avg = 0.0;   // f-bar after this iteration
  double step = 0.0;         // accepted step length, 0 on failure
  int trials = 0;            // line-search evaluations
  double grad_norm_sq = 0.0;  // ||G||_F^2 under the product metric
  bool accepted = false;
  double stop_stat = -1.0;   // v, -1 before the stop window fills
};

enum class StopReason { converged, max_iters };

struct TrainReport {
  AnalysisOperator op;
  Eigen::Index iterations = 0;
  StopReason reason = StopReason::max_iters;
  std::vector<IterationRecord> log;
  Eigen::Index accepted_steps = 0;
  Eigen::Index failed_searches = 0;
};

struct TrainError : std::runtime_error {
  Eigen::Index iteration;
  TrainError(const std::string& what, Eigen::Index iter)
      : std::runtime_error(what), iteration(iter) {}
};

// Uniform-with-replacement index draw, deterministic under the rng state.
std::vector<Eigen::Index> sample_batch(Eigen::Index population, Eigen::Index size, Rng& rng);

// Projection of the per-factor Euclidean gradient onto the product tangent space.
TangentDirection riemannian_gradient(const AnalysisOperator& op,
                                     const Eigen::Ref<const Matrix>& batch,
                                     const ObjectiveParams& params);

struct ArmijoResult {
  bool accepted = false;
  double step = 0.0;
  int trials = 0;
  AnalysisOperator op;
  double cost = 0.0;  // batch cost of the returned operator
};

// Backtracking search along the geodesic in direction -g. f_ref is the
// current sliding-window average; the candidate average includes the new
// batch cost per the averaging Armijo test.
ArmijoResult armijo_search(const AnalysisOperator& op, const TangentDirection& g,
                           const Eigen::Ref<const Matrix>& batch, const ObjectiveParams& params,
                           const SlidingWindow& window, double f_ref, double a_init,
                           const ArmijoConfig& cfg);

// Relative variation of the running cost mean. Returns (v, stop).
std::pair<double, bool> stopping_check(double phi, const SlidingWindow& phi_window, double tol);

struct TrainHooks {
  // Called after every iteration with the current operator and its record.
  std::function<void(const AnalysisOperator&, const IterationRecord&)> on_iteration;
  std::ostream* jsonl_log = nullptr;  // line-delimited JSON iteration records
};

TrainReport train(const SignalSet& signals, const AnalysisOperator& init,
                  const TrainerConfig& config, const TrainHooks& hooks = {});

}  // namespace saol

#endif
