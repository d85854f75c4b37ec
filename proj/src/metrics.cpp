#include "dynsvd/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace dynsvd {

double relative_error(double loss, double min_loss_truth) {
    if (min_loss_truth <= 0.0) {
        if (loss <= 1e-9) return 0.0;  // exact rank-k reconstruction regime
        throw std::invalid_argument("relative_error: non-positive minimum loss");
    }
    if (std::abs(loss - min_loss_truth) <= 1e-9 * min_loss_truth) return 0.0;
    const double r = (loss - min_loss_truth) / min_loss_truth;
    return r < 0.0 ? 0.0 : r;
}

ErrorSeries ErrorSeries::from_losses(const std::vector<double>& losses,
                                     const std::vector<double>& truths) {
    if (losses.size() != truths.size()) {
        throw std::invalid_argument("ErrorSeries: series length mismatch");
    }
    ErrorSeries out;
    out.r.reserve(losses.size());
    double sum = 0.0;
    for (std::size_t i = 0; i < losses.size(); ++i) {
        const double r = relative_error(losses[i], truths[i]);
        out.r.push_back(r);
        out.max_r = std::max(out.max_r, r);
        sum += r;
    }
    out.avg_r = losses.empty() ? 0.0 : sum / static_cast<double>(losses.size());
    return out;
}

double loglog_slope(const std::vector<double>& x, const std::vector<double>& y) {
    if (x.size() != y.size() || x.size() < 2) {
        throw std::invalid_argument("loglog_slope: need matching series of length >= 2");
    }
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        if (x[i] <= 0.0 || y[i] <= 0.0) {
            throw std::invalid_argument("loglog_slope: samples must be positive");
        }
        const double lx = std::log(x[i]);
        const double ly = std::log(y[i]);
        sx += lx;
        sy += ly;
        sxx += lx * lx;
        sxy += lx * ly;
    }
    const double n = static_cast<double>(x.size());
    return (n * sxy - sx * sy) / (n * sxx - sx * sx);
}

}  // namespace dynsvd
