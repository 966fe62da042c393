#pragma once

#include <span>
#include <string>
#include <utility>
#include <variant>
#include <vector>

namespace dtnlab {

// dN/dt = beta * N * (M - N); the classical sparse-network model.
struct StandardLogistic {
  double beta = 0.0;
  double M = 0.0;
  double n0 = 1.0;
};

// dN/dt = (a * N^-b + c) * N * (M - N); subcritical, count-indexed rate.
struct SubcriticalByCount {
  double a = 0.0, b = 0.0, c = 0.0;
  double M = 0.0;
  double n0 = 1.0;
};

// dN/dt = a * e^(-b*N) * N * (M - N); supercritical, count-indexed rate.
struct SupercriticalByCount {
  double a = 0.0, b = 0.0;
  double M = 0.0;
  double n0 = 1.0;
};

// dN/dt = b * (M - n0) * e^(-b*t); the single-parameter supercritical model
// with closed form N(t) = (n0 - M) * e^(-b*t) + M.
struct SupercriticalByTime {
  double b = 0.0;
  double M = 0.0;
  double n0 = 1.0;
};

// dN/dt = (a * e^(-b*t) + c) * N * (M - N); time-indexed pairwise rate with a
// closed form valid for either regime.
struct PairwiseByTime {
  double a = 0.0, b = 0.0, c = 0.0;
  double M = 0.0;
  double n0 = 1.0;
};

using OdeModel = std::variant<StandardLogistic, SubcriticalByCount,
                              SupercriticalByCount, SupercriticalByTime,
                              PairwiseByTime>;

double logistic_n(const StandardLogistic& model, double t);
double ps_standard(const StandardLogistic& model, double deadline);

double supercritical_time_n(const SupercriticalByTime& model, double t);

// Closed form N(t) = M / (exp(a*M*e^(-b*t)/b - c*M*t + k) + 1),
// k = ln(M - n0) - ln(n0) - a*M/b. Throws DegenerateInitial when n0 is 0 or M.
double pairwise_time_n(const PairwiseByTime& model, double t);

// Fixed-step classical RK4 for the count-indexed models. The trajectory is
// clamped to [n0, M]; an overshoot beyond 1e-6*M before clamping raises
// StepTooLarge.
struct Trajectory {
  std::vector<double> times;
  std::vector<double> values;
  double max_overshoot = 0.0;  // diagnostic, pre-clamp
};
Trajectory integrate_by_count(const SubcriticalByCount& model, double horizon,
                              double step);
Trajectory integrate_by_count(const SupercriticalByCount& model, double horizon,
                              double step);

// N(t) for any model on the given times; count-indexed models are integrated
// with an automatically refined RK4 step (halved until the endpoint moves by
// less than 1e-8*M).
std::vector<double> model_n_curve(const OdeModel& model,
                                  std::span<const double> times);

double model_node_count(const OdeModel& model);
std::string model_name(const OdeModel& model);

// Mean infected counts at t = 0, t1, 2*t1, 3*t1.
struct RecoverySamples {
  double n0 = 0.0, n1 = 0.0, n2 = 0.0, n3 = 0.0;
  double t1 = 0.0;
  double M = 0.0;
};

// Inverts the pairwise-by-time closed form from four trajectory samples.
// Pure-logistic data (a = 0) makes the linear system singular and raises
// DegenerateSamples; samples admitting no decay factor z in (0,1) raise
// InconsistentSamples.
struct RecoveredParams {
  double a = 0.0, b = 0.0, c = 0.0;
};
RecoveredParams recover_pairwise_time_params(const RecoverySamples& samples);

// p = (n - 1) / (M - 1), clamped to [0, 1]. Throws InvalidInput for M < 2.
double ps_from_n(double n, double node_count);

// Trapezoidal integral of 1 - p over [0, horizon] on the sampled curve.
// `truncation_tail` is 1 - p(horizon); `truncated` flags p(horizon) < 0.99.
struct DelayEstimate {
  double mean_delay = 0.0;
  double truncation_tail = 0.0;
  bool truncated = false;
};
DelayEstimate average_delivery_delay(std::span<const std::pair<double, double>> ps_curve,
                                     double horizon);

// RMSE of each candidate's delivery curve against the sampled simulation
// curve, ascending.
struct ModelScore {
  std::string name;
  double rmse = 0.0;
  OdeModel model;
};
std::vector<ModelScore> compare_models(std::span<const std::pair<double, double>> sim_ps,
                                       std::span<const OdeModel> candidates);

}  // namespace dtnlab
