#pragma once

#include <map>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "dtnlab/sim.hpp"

namespace dtnlab {

enum class RateDomain : std::uint8_t { ByCount, ByTime };

struct RatePoint {
  double x = 0.0;      // infected count N or time t
  double value = 0.0;  // rate, 1/s
  int support = 0;     // contributing run-samples
};

struct RateSeries {
  RateDomain domain = RateDomain::ByCount;
  std::vector<RatePoint> points;
};

// Average change in N over one step, conditioned on the current count being
// j, pooled across runs. A run contributes to j only if it observed j and
// the following transition; negative averages cannot arise from valid
// monotone traces and raise TraceCorrupt downstream.
struct DeltaStat {
  double delta = 0.0;
  int support = 0;
};
std::map<int, DeltaStat> delta_n_by_count(std::span<const RunTrace> traces, int node_count);

// Pairwise infection rate by count: delta / (dt * j * (M - j)).
RateSeries beta_num_estimate(const std::map<int, DeltaStat>& deltas, double dt,
                             int node_count);
// Infection rate by count: delta / dt.
RateSeries r_num_estimate(const std::map<int, DeltaStat>& deltas, double dt);

// Time-indexed estimates from the ensemble-mean trace; the series stops
// before any step where the mean reaches M.
RateSeries beta_time_estimate(const EnsembleStats& stats, double dt, int node_count);
RateSeries r_time_estimate(const EnsembleStats& stats, double dt);

// Window-averaged pairwise rate: (1/T_max) * integral of N'/(N*(M-N)) with
// forward-difference slopes and trapezoidal weights on the reciprocal factor.
// Throws DegenerateWindow if the mean trace reaches M inside the window.
double mean_beta(const EnsembleStats& stats, double t_max, int node_count);

// Constant rate minimizing the integrated squared error of the standard
// logistic delivery curve against sampled (deadline, probability) pairs on a
// uniform grid. `boundary` reports an optimum pinned at a search bound.
struct BetaOptResult {
  double beta = 0.0;
  bool boundary = false;
};
BetaOptResult beta_opt(std::span<const std::pair<double, double>> sim_ps,
                       int node_count, double n0, double beta_lo = 1e-9,
                       double beta_hi = 1e-3);

// CSV exports: `N,beta_num,support` and `t,beta_time,R_time,N_mean`.
void write_by_count_csv(const std::string& path, const RateSeries& beta_num);
void write_by_time_csv(const std::string& path, const RateSeries& beta_time,
                       const RateSeries& r_time, const EnsembleStats& stats);

}  // namespace dtnlab
