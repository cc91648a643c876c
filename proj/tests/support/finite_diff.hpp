#pragma once

#include <algorithm>
#include <cmath>
#include <functional>
#include <span>
#include <vector>

namespace testsupport {

/// Central finite differences of a scalar function, independent of any
/// analytic gradient path.
inline std::vector<double> central_differences(
    const std::function<double(const std::vector<double>&)>& f,
    std::vector<double> x, double h) {
    std::vector<double> grad(x.size());
    for (size_t i = 0; i < x.size(); ++i) {
        const double original = x[i];
        x[i] = original + h;
        const double upper = f(x);
        x[i] = original - h;
        const double lower = f(x);
        x[i] = original;
        grad[i] = (upper - lower) / (2.0 * h);
    }
    return grad;
}

/// Gradient-check relative error with a unit floor in the denominator.
inline double rel_error(double analytic, double numeric) {
    const double scale = std::max({1.0, std::abs(analytic), std::abs(numeric)});
    return std::abs(analytic - numeric) / scale;
}

inline double max_rel_error(std::span<const double> analytic,
                            std::span<const double> numeric) {
    double worst = 0.0;
    for (size_t i = 0; i < analytic.size(); ++i) {
        worst = std::max(worst, rel_error(analytic[i], numeric[i]));
    }
    return worst;
}

}  // namespace testsupport
