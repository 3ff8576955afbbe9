#include "saol/trainer.hpp"

#include <cmath>
#include <ostream>

#include <json.hpp>

namespace saol {

void TrainerConfig::validate() const {
  if (batch_size < 1) throw std::invalid_argument("batch_size must be >= 1");
  if (armijo.a0 <= 0) throw std::invalid_argument("a0 must be positive");
  if (armijo.b <= 0 || armijo.b >= 1) throw std::invalid_argument("b must lie in (0,1)");
  if (armijo.c <= 0 || armijo.c >= 1) throw std::invalid_argument("c must lie in (0,1)");
  if (armijo.k_max < 1) throw std::invalid_argument("k_max must be >= 1");
  if (avg_window < 1) throw std::invalid_argument("avg_window must be >= 1");
  if (stop_window < 1) throw std::invalid_argument("stop_window must be >= 1");
  if (max_iters < 0) throw std::invalid_argument("max_iters must be >= 0");
}

SlidingWindow::SlidingWindow(Eigen::Index capacity) : capacity_(capacity) {
  if (capacity < 1) throw std::invalid_argument("SlidingWindow: capacity must be >= 1");
}

void SlidingWindow::push(double x) {
  buf_.push_back(x);
  sum_ += x;
  if (static_cast<Eigen::Index>(buf_.size()) > capacity_) {
    sum_ -= buf_.front();
    buf_.pop_front();
  }
}

double SlidingWindow::mean() const {
  if (buf_.empty()) throw std::logic_error("SlidingWindow: empty");
  return sum_ / static_cast<double>(buf_.size());
}

double SlidingWindow::mean_with(double x) const {
  double s = sum_ + x;
  Eigen::Index n = static_cast<Eigen::Index>(buf_.size()) + 1;
  if (n > capacity_) {
    s -= buf_.front();
    n = capacity_;
  }
  return s / static_cast<double>(n);
}

std::vector<Eigen::Index> sample_batch(Eigen::Index population, Eigen::Index size, Rng& rng) {
  if (population < 1 || size < 1) throw std::invalid_argument("sample_batch: empty draw");
  std::uniform_int_distribution<Eigen::Index> dist(0, population - 1);
  std::vector<Eigen::Index> idx(size);
  for (auto& i : idx) i = dist(rng);
  return idx;
}

TangentDirection riemannian_gradient(const AnalysisOperator& op,
                                     const Eigen::Ref<const Matrix>& batch,
                                     const ObjectiveParams& params) {
  auto euclid = euclidean_gradient(op, batch, params);
  TangentDirection g;
  g.parts.reserve(euclid.size());
  for (size_t i = 0; i < euclid.size(); ++i)
    g.parts.push_back(project_to_tangent(op.factors()[i], euclid[i]));
  return g;
}

ArmijoResult armijo_search(const AnalysisOperator& op, const TangentDirection& g,
                           const Eigen::Ref<const Matrix>& batch, const ObjectiveParams& params,
                           const SlidingWindow& window, double f_ref, double a_init,
                           const ArmijoConfig& cfg) {
  const double g2 = g.squared_norm();
  TangentDirection descent;
  descent.parts.reserve(g.parts.size());
  for (const auto& part : g.parts) descent.parts.push_back(-part);

  double a = a_init;
  for (int k = 1; k <= cfg.k_max; ++k) {
    AnalysisOperator cand = geodesic_step(op, descent, a);
    double cost = sample_cost(cand, batch, params);
    if (window.mean_with(cost) <= f_ref - a * cfg.c * g2)
      return {true, a, k, std::move(cand), cost};
    a *= cfg.b;
  }
  return {false, 0.0, cfg.k_max, op, 0.0};
}

std::pair<double, bool> stopping_check(double phi, const SlidingWindow& phi_window, double tol) {
  double phi_bar = phi_window.mean();
  if (phi_bar == 0.0) return {0.0, true};  // cost collapsed to zero
  double v = std::abs(phi - phi_bar) / phi_bar;
  return {v, v < tol};
}

TrainReport train(const SignalSet& signals, const AnalysisOperator& init,
                  const TrainerConfig& config, const TrainHooks& hooks) {
  config.validate();
  if (signals.sample_length() != init.cols())
    throw std::invalid_argument("train: sample length does not match operator");

  Rng rng(config.seed);
  AnalysisOperator op = init;
  SlidingWindow window(config.avg_window);
  SlidingWindow phi_window(config.stop_window);

  auto gather = [&](const std::vector<Eigen::Index>& idx) {
    Matrix batch(signals.sample_length(), static_cast<Eigen::Index>(idx.size()));
    for (size_t j = 0; j < idx.size(); ++j) batch.col(static_cast<Eigen::Index>(j)) = signals.samples.col(idx[j]);
    return batch;
  };

  TrainReport report;
  report.reason = StopReason::max_iters;

  try {
    // seed the averaging window so the Armijo reference exists at i = 0
    window.push(sample_cost(op, gather(sample_batch(signals.count(), config.batch_size, rng)),
                            config.objective));

    double a_init = config.armijo.a0;
    double phi_total = 0.0;

    for (Eigen::Index iter = 0; iter < config.max_iters; ++iter) {
      Matrix batch = gather(sample_batch(signals.count(), config.batch_size, rng));
      TangentDirection g = riemannian_gradient(op, batch, config.objective);

      IterationRecord rec;
      rec.iter = iter;

      double f_ref = window.mean();
      rec.grad_norm_sq = g.squared_norm();
      if (rec.grad_norm_sq > 0.0) {
        ArmijoResult res = armijo_search(op, g, batch, config.objective, window, f_ref, a_init,
                                         config.armijo);
        rec.trials = res.trials;
        if (res.accepted) {
          op = std::move(res.op);
          rec.accepted = true;
          rec.step = res.step;
          rec.batch_cost = res.cost;
          a_init = std::min(res.step / config.armijo.b, config.armijo.a0);
          ++report.accepted_steps;
        } else {
          rec.batch_cost = sample_cost(op, batch, config.objective);
          a_init = config.armijo.a0;
          ++report.failed_searches;
        }
      } else {
        rec.batch_cost = sample_cost(op, batch, config.objective);
      }

      window.push(rec.batch_cost);
      rec.window_avg = window.mean();

      phi_total += rec.batch_cost;
      double phi = phi_total / static_cast<double>(iter + 1);
      phi_window.push(phi);

      bool stop = false;
      if (phi_window.size() >= config.stop_window)
        std::tie(rec.stop_stat, stop) = stopping_check(phi, phi_window, config.stop_tol);

      if (hooks.jsonl_log) {
        nlohmann::json line{{"iter", rec.iter},       {"cost", rec.batch_cost},
                            {"avg", rec.window_avg},  {"step", rec.step},
                            {"trials", rec.trials},   {"accepted", rec.accepted},
                            {"v", rec.stop_stat}};
        *hooks.jsonl_log << line.dump() << '\n';
      }
      report.log.push_back(rec);
      if (hooks.on_iteration) hooks.on_iteration(op, rec);

      if (stop) {
        report.reason = StopReason::converged;
        report.iterations = iter + 1;
        break;
      }
      report.iterations = iter + 1;
    }
  } catch (const RankDeficiencyError& e) {
    throw TrainError(std::string("rank deficiency during training: ") + e.what(),
                     static_cast<Eigen::Index>(report.log.size()));
  }

  report.op = std::move(op);
  return report;
}

}  // namespace saol
