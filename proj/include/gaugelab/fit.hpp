#pragma once

#include <span>

namespace gaugelab {

struct LinearFit {
    double slope;
    double intercept;
    double slope_stderr;  // ordinary least squares; 0 for two points
};

LinearFit linear_fit(std::span<const double> x, std::span<const double> y);

/// Slope of log|y| against log|x|.
double log_log_slope(std::span<const double> x, std::span<const double> y);

/// Trend of a long series estimated from `batches` batch means, so that
/// bounded oscillation inside a batch does not masquerade as fit error.
LinearFit batch_means_trend(std::span<const double> t, std::span<const double> y, int batches = 10);

}  // namespace gaugelab
