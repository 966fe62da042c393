#include "dtnlab/estimation.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>

#include "dtnlab/errors.hpp"
#include "dtnlab/ode.hpp"

namespace dtnlab {

std::map<int, DeltaStat> delta_n_by_count(std::span<const RunTrace> traces,
                                          int node_count) {
  struct Sums {
    double gain = 0.0;
    double steps = 0.0;
    int support = 0;
  };
  std::map<int, Sums> pooled;
  for (const auto& trace : traces) {
    // Each segment of constant N = j spans steps [s_k, s_{k+1}); the run
    // observed j for (t^l - t^f)/dt + 1 = s_{k+1} - s_k steps and then jumped
    // to n_{k+1}. The final segment has no observed transition and is skipped.
    for (std::size_t k = 0; k + 1 < trace.n_steps.size(); ++k) {
      const auto [step, n] = trace.n_steps[k];
      const auto [next_step, next_n] = trace.n_steps[k + 1];
      if (n < 1 || n > node_count) {
        throw TraceCorrupt("estimation: infected count outside [1, M]");
      }
      auto& sums = pooled[n];
      sums.gain += next_n - n;
      sums.steps += next_step - step;
      sums.support += 1;
    }
  }
  std::map<int, DeltaStat> result;
  for (const auto& [j, sums] : pooled) {
    result[j] = DeltaStat{sums.gain / sums.steps, sums.support};
  }
  return result;
}

RateSeries beta_num_estimate(const std::map<int, DeltaStat>& deltas, double dt,
                             int node_count) {
  if (dt <= 0.0) throw InvalidInput("estimation: dt must be positive");
  RateSeries series;
  series.domain = RateDomain::ByCount;
  for (const auto& [j, stat] : deltas) {
    if (j < 1 || j > node_count - 1) continue;  // zero denominator at 0 and M
    if (stat.delta < 0.0) {
      throw TraceCorrupt("estimation: negative delta-N, trace corrupt");
    }
    const double denom = dt * static_cast<double>(j) *
                         static_cast<double>(node_count - j);
    series.points.push_back({static_cast<double>(j), stat.delta / denom, stat.support});
  }
  return series;
}

RateSeries r_num_estimate(const std::map<int, DeltaStat>& deltas, double dt) {
  if (dt <= 0.0) throw InvalidInput("estimation: dt must be positive");
  RateSeries series;
  series.domain = RateDomain::ByCount;
  for (const auto& [j, stat] : deltas) {
    if (stat.delta < 0.0) {
      throw TraceCorrupt("estimation: negative delta-N, trace corrupt");
    }
    series.points.push_back({static_cast<double>(j), stat.delta / dt, stat.support});
  }
  return series;
}

namespace {

RateSeries time_series(const EnsembleStats& stats, double dt, int node_count,
                       bool pairwise) {
  if (dt <= 0.0) throw InvalidInput("estimation: dt must be positive");
  if (stats.mean_n_at.size() < 2) {
    throw InvalidInput("estimation: ensemble has no mean trace");
  }
  RateSeries series;
  series.domain = RateDomain::ByTime;
  const auto& mean = stats.mean_n_at;
  for (std::size_t j = 0; j + 1 < mean.size(); ++j) {
    if (mean[j] >= node_count) break;  // undefined past full infection
    const double delta = mean[j + 1] - mean[j];
    if (delta < 0.0) throw TraceCorrupt("estimation: decreasing mean trace");
    double value = delta / dt;
    if (pairwise) value /= mean[j] * (node_count - mean[j]);
    series.points.push_back({j * dt, value, stats.runs});
  }
  return series;
}

}  // namespace

RateSeries beta_time_estimate(const EnsembleStats& stats, double dt,
                              int node_count) {
  return time_series(stats, dt, node_count, /*pairwise=*/true);
}

RateSeries r_time_estimate(const EnsembleStats& stats, double dt) {
  return time_series(stats, dt, stats.node_count, /*pairwise=*/false);
}

double mean_beta(const EnsembleStats& stats, double t_max, int node_count) {
  const double dt = stats.dt;
  if (t_max <= 0.0) throw InvalidInput("mean_beta: window must be positive");
  const auto steps = static_cast<std::size_t>(std::floor(t_max / dt + 1e-9));
  if (steps < 1 || stats.mean_n_at.size() < steps + 1) {
    throw InvalidInput("mean_beta: trace does not cover the window");
  }
  double integral = 0.0;
  for (std::size_t j = 0; j < steps; ++j) {
    const double n_lo = stats.mean_n_at[j];
    const double n_hi = stats.mean_n_at[j + 1];
    if (n_lo >= node_count || n_hi >= node_count) {
      throw DegenerateWindow("mean_beta: mean trace reaches M inside the window");
    }
    const double w_lo = 1.0 / (n_lo * (node_count - n_lo));
    const double w_hi = 1.0 / (n_hi * (node_count - n_hi));
    integral += (n_hi - n_lo) * 0.5 * (w_lo + w_hi);
  }
  return integral / (steps * dt);
}

BetaOptResult beta_opt(std::span<const std::pair<double, double>> sim_ps,
                       int node_count, double n0, double beta_lo,
                       double beta_hi) {
  if (sim_ps.size() < 2) throw InvalidInput("beta_opt: need at least 2 samples");
  if (!(beta_lo > 0.0 && beta_hi > beta_lo)) {
    throw InvalidInput("beta_opt: invalid search bounds");
  }
  const double grid_dt = sim_ps[1].first - sim_ps[0].first;
  if (grid_dt <= 0.0) throw InvalidInput("beta_opt: samples must increase in T");

  const auto objective = [&](double beta) {
    StandardLogistic model{beta, static_cast<double>(node_count), n0};
    double sum = 0.0;
    for (const auto& [deadline, prob] : sim_ps) {
      const double diff = ps_standard(model, deadline) - prob;
      sum += diff * diff * grid_dt;
    }
    if (!std::isfinite(sum)) throw InvalidInput("beta_opt: non-finite objective");
    return sum;
  };

  // Coarse bracket on a log grid, then golden-section inside it. Ties favor
  // the smaller rate.
  constexpr int kGrid = 96;
  const double log_lo = std::log(beta_lo);
  const double log_hi = std::log(beta_hi);
  int best = 0;
  double best_value = objective(beta_lo);
  for (int g = 1; g < kGrid; ++g) {
    const double beta = std::exp(log_lo + (log_hi - log_lo) * g / (kGrid - 1));
    const double value = objective(beta);
    if (value < best_value) {
      best_value = value;
      best = g;
    }
  }
  if (best == 0) return {beta_lo, true};
  if (best == kGrid - 1) return {beta_hi, true};

  double lo = log_lo + (log_hi - log_lo) * (best - 1) / (kGrid - 1);
  double hi = log_lo + (log_hi - log_lo) * (best + 1) / (kGrid - 1);
  constexpr double kInvPhi = 0.6180339887498949;
  double x1 = hi - kInvPhi * (hi - lo);
  double x2 = lo + kInvPhi * (hi - lo);
  double f1 = objective(std::exp(x1));
  double f2 = objective(std::exp(x2));
  for (int iter = 0; iter < 120 && hi - lo > 1e-12; ++iter) {
    if (f1 <= f2) {
      hi = x2;
      x2 = x1;
      f2 = f1;
      x1 = hi - kInvPhi * (hi - lo);
      f1 = objective(std::exp(x1));
    } else {
      lo = x1;
      x1 = x2;
      f1 = f2;
      x2 = lo + kInvPhi * (hi - lo);
      f2 = objective(std::exp(x2));
    }
  }
  return {std::exp(0.5 * (lo + hi)), false};
}

void write_by_count_csv(const std::string& path, const RateSeries& beta_num) {
  std::FILE* f = std::fopen(path.c_str(), "w");
  if (!f) throw ConfigError("cannot open for writing: " + path);
  std::fprintf(f, "N,beta_num,support\n");
  for (const auto& point : beta_num.points) {
    std::fprintf(f, "%.0f,%.10g,%d\n", point.x, point.value, point.support);
  }
  std::fclose(f);
}

void write_by_time_csv(const std::string& path, const RateSeries& beta_time,
                       const RateSeries& r_time, const EnsembleStats& stats) {
  std::FILE* f = std::fopen(path.c_str(), "w");
  if (!f) throw ConfigError("cannot open for writing: " + path);
  std::fprintf(f, "t,beta_time,R_time,N_mean\n");
  const std::size_t rows = std::min(beta_time.points.size(), r_time.points.size());
  for (std::size_t j = 0; j < rows; ++j) {
    std::fprintf(f, "%.10g,%.10g,%.10g,%.10g\n", beta_time.points[j].x,
                 beta_time.points[j].value, r_time.points[j].value,
                 stats.mean_n_at[j]);
  }
  std::fclose(f);
}

}  // namespace dtnlab
