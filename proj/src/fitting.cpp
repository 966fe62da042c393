#include "dtnlab/fitting.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>

#include "dtnlab/errors.hpp"

namespace dtnlab {
namespace {

bool is_power(CurveFamily family) { return family == CurveFamily::PowerLawOffset; }

double eval_family(CurveFamily family, double a, double b, double c, double x) {
  if (is_power(family)) return a * std::pow(x, -b) + c;
  return a * std::exp(-b * x) + c;
}

int param_count(CurveFamily family) { return family_has_offset(family) ? 3 : 2; }

// Solves the (possibly damped) normal equations in place, n <= 3.
bool solve_linear(double m[3][3], double rhs[3], double out[3], int n) {
  int perm[3] = {0, 1, 2};
  for (int col = 0; col < n; ++col) {
    int pivot = col;
    for (int row = col + 1; row < n; ++row) {
      if (std::abs(m[perm[row]][col]) > std::abs(m[perm[pivot]][col])) pivot = row;
    }
    std::swap(perm[col], perm[pivot]);
    const double diag = m[perm[col]][col];
    if (diag == 0.0 || !std::isfinite(diag)) return false;
    for (int row = col + 1; row < n; ++row) {
      const double factor = m[perm[row]][col] / diag;
      for (int k = col; k < n; ++k) m[perm[row]][k] -= factor * m[perm[col]][k];
      rhs[perm[row]] -= factor * rhs[perm[col]];
    }
  }
  for (int col = n - 1; col >= 0; --col) {
    double acc = rhs[perm[col]];
    for (int k = col + 1; k < n; ++k) acc -= m[perm[col]][k] * out[k];
    out[col] = acc / m[perm[col]][col];
    if (!std::isfinite(out[col])) return false;
  }
  return true;
}

struct Candidate {
  double a = 0.0, b = 0.0, c = 0.0;
  double sse = 0.0;
  bool valid = false;
};

// Levenberg-style damped Gauss-Newton from one start. Damping scales with
// diag(J^T J), which keeps the iteration equivariant under rescaling of the
// value axis.
Candidate refine(const std::vector<double>& xs, const std::vector<double>& ys,
                 CurveFamily family, fitting_detail::Start start) {
  const int np = param_count(family);
  const auto n = xs.size();
  double p[3] = {start.a, start.b, start.c};

  const auto sse_at = [&](const double q[3]) {
    double sum = 0.0;
    for (std::size_t k = 0; k < n; ++k) {
      const double r = eval_family(family, q[0], q[1], q[2], xs[k]) - ys[k];
      sum += r * r;
    }
    return sum;
  };

  double sse = sse_at(p);
  if (!std::isfinite(sse)) return {};
  double mu = 1e-3;

  for (int iter = 0; iter < 200; ++iter) {
    double jtj[3][3] = {};
    double jtr[3] = {};
    for (std::size_t k = 0; k < n; ++k) {
      const double x = xs[k];
      double basis, dfdb;
      if (is_power(family)) {
        basis = std::pow(x, -p[1]);
        dfdb = -p[0] * std::log(x) * basis;
      } else {
        basis = std::exp(-p[1] * x);
        dfdb = -p[0] * x * basis;
      }
      const double r = p[0] * basis + p[2] - ys[k];
      const double grad[3] = {basis, dfdb, 1.0};
      for (int i = 0; i < np; ++i) {
        jtr[i] += grad[i] * r;
        for (int j = 0; j < np; ++j) jtj[i][j] += grad[i] * grad[j];
      }
    }

    bool stepped = false;
    double trial[3] = {p[0], p[1], p[2]};
    for (int damp = 0; damp < 60; ++damp) {
      double lhs[3][3];
      double rhs[3];
      for (int i = 0; i < np; ++i) {
        for (int j = 0; j < np; ++j) lhs[i][j] = jtj[i][j];
        lhs[i][i] += mu * std::max(jtj[i][i], 1e-300);
        rhs[i] = -jtr[i];
      }
      double delta[3] = {};
      if (solve_linear(lhs, rhs, delta, np)) {
        for (int i = 0; i < np; ++i) trial[i] = p[i] + delta[i];
        const double trial_sse = sse_at(trial);
        if (std::isfinite(trial_sse) && trial_sse <= sse) {
          double rel_change = 0.0;
          const double scale =
              std::max({std::abs(p[0]), std::abs(p[1]), std::abs(p[2]), 1e-300});
          for (int i = 0; i < np; ++i) {
            rel_change = std::max(
                rel_change,
                std::abs(delta[i]) / std::max(std::abs(p[i]), 1e-12 * scale));
          }
          for (int i = 0; i < np; ++i) p[i] = trial[i];
          const bool plateau = sse - trial_sse <= 1e-16 * sse;
          sse = trial_sse;
          mu = std::max(mu * 0.5, 1e-15);
          stepped = true;
          if (rel_change < 1e-10 || plateau) {
            return {p[0], p[1], p[2], sse, true};
          }
          break;
        }
      }
      mu *= 2.0;  // residual went up: damp harder, retry
    }
    if (!stepped) break;
  }
  if (!std::isfinite(p[0]) || !std::isfinite(p[1]) || !std::isfinite(p[2])) {
    return {};
  }
  return {p[0], p[1], p[2], sse, true};
}

}  // namespace

const char* family_name(CurveFamily family) {
  switch (family) {
    case CurveFamily::PowerLawOffset: return "power-offset";
    case CurveFamily::ExpOfN: return "exp-n";
    case CurveFamily::ExpOfTOffset: return "exp-t-offset";
    case CurveFamily::ExpOfT: return "exp-t";
  }
  return "?";
}

std::optional<CurveFamily> family_from_name(const std::string& name) {
  if (name == "power-offset") return CurveFamily::PowerLawOffset;
  if (name == "exp-n") return CurveFamily::ExpOfN;
  if (name == "exp-t-offset") return CurveFamily::ExpOfTOffset;
  if (name == "exp-t") return CurveFamily::ExpOfT;
  return std::nullopt;
}

bool family_has_offset(CurveFamily family) {
  return family == CurveFamily::PowerLawOffset ||
         family == CurveFamily::ExpOfTOffset;
}

double FitResult::eval(double x) const { return eval_family(family, a, b, c, x); }

namespace fitting_detail {

double sse(const std::vector<double>& xs, const std::vector<double>& ys,
           CurveFamily family, double a, double b, double c) {
  double sum = 0.0;
  for (std::size_t k = 0; k < xs.size(); ++k) {
    const double r = eval_family(family, a, b, c, xs[k]) - ys[k];
    sum += r * r;
  }
  return sum;
}

std::vector<Start> initial_guesses(const std::vector<double>& xs,
                                   const std::vector<double>& ys,
                                   CurveFamily family) {
  std::vector<Start> starts;
  std::vector<double> offsets{0.0};
  if (family_has_offset(family)) offsets.push_back(ys.back());

  for (const double c0 : offsets) {
    // Log-linear regression of (y - c0) against ln x (power) or x (exp).
    double sx = 0.0, sy = 0.0, sxx = 0.0, sxy = 0.0;
    int m = 0;
    for (std::size_t k = 0; k < xs.size(); ++k) {
      const double shifted = ys[k] - c0;
      if (shifted <= 0.0) continue;
      const double u = is_power(family) ? std::log(xs[k]) : xs[k];
      const double v = std::log(shifted);
      sx += u;
      sy += v;
      sxx += u * u;
      sxy += u * v;
      ++m;
    }
    if (m < 2) continue;
    const double det = m * sxx - sx * sx;
    if (det == 0.0) continue;
    const double slope = (m * sxy - sx * sy) / det;
    const double intercept = (sy - slope * sx) / m;
    const double b0 = -slope;

    for (const double b_scale : {1.0, 0.5, 2.0}) {
      const double b_start = b0 * b_scale;
      // Closed-form amplitude for this (b, c).
      double num = 0.0, den = 0.0;
      for (std::size_t k = 0; k < xs.size(); ++k) {
        const double basis = is_power(family) ? std::pow(xs[k], -b_start)
                                              : std::exp(-b_start * xs[k]);
        num += basis * (ys[k] - c0);
        den += basis * basis;
      }
      const double a_start = den > 0.0 ? num / den : std::exp(intercept);
      starts.push_back({a_start, b_start, c0});
    }
  }
  if (starts.empty()) {
    const double span = std::max(xs.back() - xs.front(), 1e-12);
    starts.push_back({ys.front(), is_power(family) ? 1.0 : 1.0 / span, 0.0});
  }
  return starts;
}

}  // namespace fitting_detail

std::pair<double, double> default_trim(const RateSeries& series, int node_count) {
  if (series.points.empty()) throw TooFewPoints("fit: empty series");
  if (series.domain == RateDomain::ByCount) {
    return {series.points.front().x, 0.96 * node_count};
  }
  return {series.points.front().x, series.points.back().x};
}

FitResult fit(const RateSeries& series, CurveFamily family,
              const FitOptions& options) {
  std::vector<double> xs, ys;
  xs.reserve(series.points.size());
  ys.reserve(series.points.size());
  for (const auto& point : series.points) {
    if (point.support < options.min_support) continue;
    if (options.trim &&
        (point.x < options.trim->first || point.x > options.trim->second)) {
      continue;
    }
    if (is_power(family) && point.x <= 0.0) continue;  // ln x undefined at 0
    xs.push_back(point.x);
    ys.push_back(point.value);
  }
  const int np = param_count(family);
  if (static_cast<int>(xs.size()) < 3 * np) {
    throw TooFewPoints("fit: need at least 3 points per parameter");
  }

  Candidate best;
  for (const auto& start : fitting_detail::initial_guesses(xs, ys, family)) {
    const Candidate candidate = refine(xs, ys, family, start);
    if (candidate.valid && (!best.valid || candidate.sse < best.sse)) {
      best = candidate;
    }
  }
  if (!best.valid) throw NoConvergence("fit: no start converged");

  FitResult result;
  result.family = family;
  result.a = best.a;
  result.b = best.b;
  result.c = family_has_offset(family) ? best.c : 0.0;
  result.rmse = std::sqrt(best.sse / xs.size());
  result.n_points = static_cast<int>(xs.size());
  result.trimmed_domain = {xs.front(), xs.back()};
  double y_scale = 0.0;
  for (const double y : ys) y_scale = std::max(y_scale, std::abs(y));
  result.unidentifiable = std::abs(result.a) <= 1e-8 * y_scale;
  result.decay_violation = result.b <= 0.0;
  return result;
}

std::string fit_report(const FitResult& result) {
  char buffer[256];
  if (family_has_offset(result.family)) {
    std::snprintf(buffer, sizeof buffer,
                  "family=%s; a=%.6g; b=%.6g; c=%.6g; rmse=%.6g; n_points=%d; "
                  "trim=[%.6g,%.6g]",
                  family_name(result.family), result.a, result.b, result.c,
                  result.rmse, result.n_points, result.trimmed_domain.first,
                  result.trimmed_domain.second);
  } else {
    std::snprintf(buffer, sizeof buffer,
                  "family=%s; a=%.6g; b=%.6g; rmse=%.6g; n_points=%d; "
                  "trim=[%.6g,%.6g]",
                  family_name(result.family), result.a, result.b, result.rmse,
                  result.n_points, result.trimmed_domain.first,
                  result.trimmed_domain.second);
  }
  std::string report(buffer);
  if (result.unidentifiable) report += "; flag=unidentifiable";
  if (result.decay_violation) report += "; flag=non-decaying";
  return report;
}

}  // namespace dtnlab
