#include "gaugelab/fit.hpp"

#include <cmath>
#include <stdexcept>
#include <vector>

namespace gaugelab {

LinearFit linear_fit(std::span<const double> x, std::span<const double> y)
{
    const std::size_t n = x.size();
    if (n != y.size() || n < 2)
        throw std::invalid_argument("linear_fit: need at least two paired points");
    double mx = 0, my = 0;
    for (std::size_t i = 0; i < n; ++i) {
        mx += x[i];
        my += y[i];
    }
    mx /= static_cast<double>(n);
    my /= static_cast<double>(n);
    double sxx = 0, sxy = 0;
    for (std::size_t i = 0; i < n; ++i) {
        sxx += (x[i] - mx) * (x[i] - mx);
        sxy += (x[i] - mx) * (y[i] - my);
    }
    if (sxx == 0.0)
        throw std::invalid_argument("linear_fit: degenerate abscissa");
    const double slope = sxy / sxx;
    const double intercept = my - slope * mx;
    double stderr_ = 0.0;
    if (n > 2) {
        double ssr = 0;
        for (std::size_t i = 0; i < n; ++i) {
            const double r = y[i] - (intercept + slope * x[i]);
            ssr += r * r;
        }
        stderr_ = std::sqrt(ssr / static_cast<double>(n - 2) / sxx);
    }
    return {slope, intercept, stderr_};
}

double log_log_slope(std::span<const double> x, std::span<const double> y)
{
    std::vector<double> lx, ly;
    for (std::size_t i = 0; i < x.size(); ++i) {
        lx.push_back(std::log(std::abs(x[i])));
        ly.push_back(std::log(std::abs(y[i])));
    }
    return linear_fit(lx, ly).slope;
}

LinearFit batch_means_trend(std::span<const double> t, std::span<const double> y, int batches)
{
    if (batches < 3 || t.size() != y.size() || t.size() < static_cast<std::size_t>(batches))
        throw std::invalid_argument("batch_means_trend: series too short");
    const std::size_t len = t.size() / static_cast<std::size_t>(batches);
    std::vector<double> bt, by;
    for (int b = 0; b < batches; ++b) {
        double st = 0, sy = 0;
        for (std::size_t i = 0; i < len; ++i) {
            st += t[b * len + i];
            sy += y[b * len + i];
        }
        bt.push_back(st / static_cast<double>(len));
        by.push_back(sy / static_cast<double>(len));
    }
    return linear_fit(bt, by);
}

}  // namespace gaugelab
