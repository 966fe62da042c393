#include "dtnlab/ode.hpp"

#include <algorithm>
#include <cmath>

#include "dtnlab/errors.hpp"

namespace dtnlab {
namespace {

constexpr double kOvershootLimit = 1e-6;  // relative to M, before clamping

double subcritical_rhs(const SubcriticalByCount& m, double n) {
  const double safe_n = std::max(n, 1e-12);
  return (m.a * std::pow(safe_n, -m.b) + m.c) * n * (m.M - n);
}

double supercritical_rhs(const SupercriticalByCount& m, double n) {
  return m.a * std::exp(-m.b * n) * n * (m.M - n);
}

// Classical fixed-step RK4 for the autonomous count-indexed models.
template <typename Model, typename Rhs>
Trajectory rk4_by_count(const Model& model, double horizon, double step, Rhs rhs) {
  if (step <= 0.0) throw InvalidInput("ode: step must be positive");
  if (horizon < 0.0) throw InvalidInput("ode: horizon must be >= 0");
  Trajectory out;
  double t = 0.0;
  double n = model.n0;
  out.times.push_back(t);
  out.values.push_back(n);
  while (t < horizon - 1e-12 * horizon) {
    const double h = std::min(step, horizon - t);
    const double k1 = rhs(model, n);
    const double k2 = rhs(model, n + 0.5 * h * k1);
    const double k3 = rhs(model, n + 0.5 * h * k2);
    const double k4 = rhs(model, n + h * k3);
    n += h / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
    t += h;
    if (n > model.M) {
      out.max_overshoot = std::max(out.max_overshoot, n - model.M);
      if (out.max_overshoot > kOvershootLimit * model.M) {
        throw StepTooLarge("ode: RK4 overshoots M, reduce the step");
      }
      n = model.M;
    }
    if (n < model.n0) n = model.n0;
    out.times.push_back(t);
    out.values.push_back(n);
  }
  return out;
}

template <typename Model, typename Rhs>
std::vector<double> auto_curve(const Model& model, std::span<const double> times,
                               Rhs rhs) {
  double horizon = 0.0;
  for (const double t : times) horizon = std::max(horizon, t);
  if (horizon == 0.0) return std::vector<double>(times.size(), model.n0);

  // Step halved until the endpoint settles.
  double step = horizon / 1e4;
  Trajectory traj = rk4_by_count(model, horizon, step, rhs);
  for (int refine = 0; refine < 6; ++refine) {
    Trajectory finer = rk4_by_count(model, horizon, step * 0.5, rhs);
    const bool settled =
        std::abs(finer.values.back() - traj.values.back()) < 1e-8 * model.M;
    step *= 0.5;
    traj = std::move(finer);
    if (settled) break;
  }

  std::vector<double> out;
  out.reserve(times.size());
  const double grid = traj.times[1] - traj.times[0];
  for (const double t : times) {
    const auto idx = static_cast<std::size_t>(t / grid);
    if (idx + 1 >= traj.times.size()) {
      out.push_back(traj.values.back());
      continue;
    }
    const double frac = (t - traj.times[idx]) / grid;
    out.push_back(traj.values[idx] * (1.0 - frac) + traj.values[idx + 1] * frac);
  }
  return out;
}

}  // namespace

double logistic_n(const StandardLogistic& model, double t) {
  return model.M * model.n0 /
         ((model.M - model.n0) * std::exp(-model.beta * model.M * t) + model.n0);
}

double ps_standard(const StandardLogistic& model, double deadline) {
  return ps_from_n(logistic_n(model, deadline), model.M);
}

double supercritical_time_n(const SupercriticalByTime& model, double t) {
  return (model.n0 - model.M) * std::exp(-model.b * t) + model.M;
}

double pairwise_time_n(const PairwiseByTime& model, double t) {
  if (model.n0 <= 0.0 || model.n0 >= model.M) {
    throw DegenerateInitial("ode: pairwise closed form needs 0 < n0 < M");
  }
  if (model.b == 0.0) throw InvalidInput("ode: pairwise closed form needs b != 0");
  // a*M*e^(-b*t)/b + k collapses to (a*M/b)*expm1(-b*t) + ln((M-n0)/n0),
  // which is exact at t = 0 and avoids differencing two huge terms.
  const double exponent = (model.a * model.M / model.b) * std::expm1(-model.b * t) -
                          model.c * model.M * t +
                          std::log((model.M - model.n0) / model.n0);
  return model.M / (std::exp(exponent) + 1.0);
}

Trajectory integrate_by_count(const SubcriticalByCount& model, double horizon,
                              double step) {
  return rk4_by_count(model, horizon, step,
                      [](const SubcriticalByCount& m, double n) {
                        return subcritical_rhs(m, n);
                      });
}

Trajectory integrate_by_count(const SupercriticalByCount& model, double horizon,
                              double step) {
  return rk4_by_count(model, horizon, step,
                      [](const SupercriticalByCount& m, double n) {
                        return supercritical_rhs(m, n);
                      });
}

std::vector<double> model_n_curve(const OdeModel& model,
                                  std::span<const double> times) {
  return std::visit(
      [&](const auto& m) -> std::vector<double> {
        using T = std::decay_t<decltype(m)>;
        if constexpr (std::is_same_v<T, SubcriticalByCount>) {
          return auto_curve(m, times, [](const SubcriticalByCount& mm, double n) {
            return subcritical_rhs(mm, n);
          });
        } else if constexpr (std::is_same_v<T, SupercriticalByCount>) {
          return auto_curve(m, times, [](const SupercriticalByCount& mm, double n) {
            return supercritical_rhs(mm, n);
          });
        } else {
          std::vector<double> out;
          out.reserve(times.size());
          for (const double t : times) {
            if constexpr (std::is_same_v<T, StandardLogistic>) {
              out.push_back(logistic_n(m, t));
            } else if constexpr (std::is_same_v<T, SupercriticalByTime>) {
              out.push_back(supercritical_time_n(m, t));
            } else {
              out.push_back(pairwise_time_n(m, t));
            }
          }
          return out;
        }
      },
      model);
}

double model_node_count(const OdeModel& model) {
  return std::visit([](const auto& m) { return m.M; }, model);
}

std::string model_name(const OdeModel& model) {
  struct Namer {
    std::string operator()(const StandardLogistic&) const { return "standard-logistic"; }
    std::string operator()(const SubcriticalByCount&) const { return "subcritical-by-count"; }
    std::string operator()(const SupercriticalByCount&) const { return "supercritical-by-count"; }
    std::string operator()(const SupercriticalByTime&) const { return "supercritical-by-time"; }
    std::string operator()(const PairwiseByTime&) const { return "pairwise-by-time"; }
  };
  return std::visit(Namer{}, model);
}

RecoveredParams recover_pairwise_time_params(const RecoverySamples& samples) {
  const double M = samples.M;
  if (M < 2.0 || samples.t1 <= 0.0) {
    throw InvalidInput("recover: need M >= 2 and t1 > 0");
  }
  const double values[4] = {samples.n0, samples.n1, samples.n2, samples.n3};
  for (const double n : values) {
    if (!(n > 0.0 && n < M)) {
      throw InvalidInput("recover: samples must lie strictly inside (0, M)");
    }
  }
  if (samples.n1 < samples.n0 || samples.n2 < samples.n1 ||
      samples.n3 < samples.n2) {
    throw InvalidInput("recover: samples must be nondecreasing");
  }

  const auto f = [&](double n) {
    return std::log(samples.n0 * (M - n) / (n * (M - samples.n0))) / M;
  };
  const double f1 = f(samples.n1);
  const double f2 = f(samples.n2);
  const double f3 = f(samples.n3);
  const double scale = std::max({std::abs(f1), std::abs(f2), std::abs(f3)});

  const double numerator = f1 * f1 + f2 * f2 - f1 * (f2 + f3);
  const double denominator = samples.t1 * (3.0 * f1 - 3.0 * f2 + f3);
  // Pure-logistic data (a = 0, f(t) = -c*t) drives both to an exact 0/0. The
  // thresholds sit far above double cancellation residue but far below any
  // genuinely exponential signal.
  constexpr double kTol = 1e-13;
  if (scale == 0.0 ||
      (std::abs(numerator) <= kTol * scale * scale &&
       std::abs(denominator) <= kTol * samples.t1 * scale)) {
    throw DegenerateSamples("recover: samples are pure-logistic (a = 0)");
  }
  if (denominator == 0.0) {
    throw InconsistentSamples("recover: singular sample system");
  }
  const double c = numerator / denominator;
  const double y = f1 + c * samples.t1;
  if (std::abs(y) <= kTol * std::max(scale, std::abs(c) * samples.t1)) {
    throw DegenerateSamples("recover: vanishing exponential component");
  }
  // With c from the consistency condition, the linear route determines z up
  // to the sign of the square root; only the branch in (0,1) is admissible.
  const double z = (f2 + 2.0 * c * samples.t1) / y - 1.0;
  if (!(z > 0.0 && z < 1.0)) {
    throw InconsistentSamples("recover: decay factor outside (0, 1)");
  }
  const double b = -std::log(z) / samples.t1;
  const double a = y * b / (z - 1.0);
  return RecoveredParams{a, b, c};
}

double ps_from_n(double n, double node_count) {
  if (node_count < 2.0) throw InvalidInput("ps_from_n: need M >= 2");
  return std::clamp((n - 1.0) / (node_count - 1.0), 0.0, 1.0);
}

DelayEstimate average_delivery_delay(
    std::span<const std::pair<double, double>> ps_curve, double horizon) {
  if (ps_curve.size() < 2) throw InvalidInput("delay: need at least 2 samples");
  if (ps_curve.front().first > 1e-12) {
    throw InvalidInput("delay: curve must start at t = 0");
  }
  if (ps_curve.back().first < horizon - 1e-9 * horizon) {
    throw InvalidInput("delay: curve does not reach the horizon");
  }
  DelayEstimate out;
  double p_at_horizon = ps_curve.back().second;
  for (std::size_t k = 0; k + 1 < ps_curve.size(); ++k) {
    double t0 = ps_curve[k].first;
    const double p0 = ps_curve[k].second;
    double t1 = ps_curve[k + 1].first;
    double p1 = ps_curve[k + 1].second;
    if (t0 >= horizon) break;
    if (t1 > horizon) {  // clip the final slice at the horizon
      const double frac = (horizon - t0) / (t1 - t0);
      p1 = p0 + (p1 - p0) * frac;
      t1 = horizon;
    }
    out.mean_delay += (t1 - t0) * 0.5 * ((1.0 - p0) + (1.0 - p1));
    if (t1 == horizon) p_at_horizon = p1;
  }
  out.truncation_tail = 1.0 - p_at_horizon;
  out.truncated = p_at_horizon < 0.99;
  return out;
}

std::vector<ModelScore> compare_models(
    std::span<const std::pair<double, double>> sim_ps,
    std::span<const OdeModel> candidates) {
  if (sim_ps.empty()) throw InvalidInput("compare: empty simulation curve");
  std::vector<double> times;
  times.reserve(sim_ps.size());
  for (const auto& [t, p] : sim_ps) times.push_back(t);

  std::vector<ModelScore> scores;
  scores.reserve(candidates.size());
  for (const auto& model : candidates) {
    const std::vector<double> curve = model_n_curve(model, times);
    const double node_count = model_node_count(model);
    double sum_sq = 0.0;
    for (std::size_t k = 0; k < sim_ps.size(); ++k) {
      const double diff = ps_from_n(curve[k], node_count) - sim_ps[k].second;
      sum_sq += diff * diff;
    }
    scores.push_back({model_name(model), std::sqrt(sum_sq / sim_ps.size()), model});
  }
  std::stable_sort(scores.begin(), scores.end(),
                   [](const ModelScore& a, const ModelScore& b) {
                     return a.rmse < b.rmse;
                   });
  return scores;
}

}  // namespace dtnlab
