#pragma once

#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "dtnlab/estimation.hpp"

namespace dtnlab {

// The four rate-curve families: a*x^-b + c, a*e^(-b*x) over counts, and
// a*e^(-b*t) + c / a*e^(-b*t) over time.
enum class CurveFamily : std::uint8_t {
  PowerLawOffset,
  ExpOfN,
  ExpOfTOffset,
  ExpOfT
};

const char* family_name(CurveFamily family);
std::optional<CurveFamily> family_from_name(const std::string& name);
bool family_has_offset(CurveFamily family);

struct FitOptions {
  std::optional<std::pair<double, double>> trim;  // inclusive x window
  int min_support = 10;  // points with fewer run-samples are dropped
};

struct FitResult {
  CurveFamily family = CurveFamily::PowerLawOffset;
  double a = 0.0, b = 0.0, c = 0.0;  // c stays 0 for two-parameter families
  double rmse = 0.0;
  int n_points = 0;
  std::pair<double, double> trimmed_domain{0.0, 0.0};
  bool unidentifiable = false;   // exponential amplitude vanished; b is free
  bool decay_violation = false;  // fitted b <= 0

  double eval(double x) const;
};

// Least squares via damped Gauss-Newton over a fixed grid of starts; returns
// the lowest-RMSE converged candidate. Throws TooFewPoints when fewer than
// 3 * parameter-count points survive trimming, NoConvergence when every
// start fails.
FitResult fit(const RateSeries& series, CurveFamily family,
              const FitOptions& options = {});

// Count-domain series drop the top 4% of the count axis, where the sampled
// rates lose power-law/exponential shape; time-domain series keep everything.
std::pair<double, double> default_trim(const RateSeries& series, int node_count);

// `family=...; a=...; b=...; c=...; rmse=...; n_points=...; trim=[lo,hi]`
std::string fit_report(const FitResult& result);

namespace fitting_detail {
struct Start {
  double a = 0.0, b = 0.0, c = 0.0;
};
// Exposed so tests can verify the returned fit beats every raw start.
std::vector<Start> initial_guesses(const std::vector<double>& xs,
                                   const std::vector<double>& ys,
                                   CurveFamily family);
double sse(const std::vector<double>& xs, const std::vector<double>& ys,
           CurveFamily family, double a, double b, double c);
}  // namespace fitting_detail

}  // namespace dtnlab
