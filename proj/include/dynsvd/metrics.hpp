#pragma once

#include <vector>

namespace dynsvd {

/// (J - L) / L with a clamp to zero when J and L agree to 1e-9 relative.
/// L <= 0 is an error unless J is also at the noise floor (exact rank-k
/// reconstruction), which reports 0.
double relative_error(double loss, double min_loss_truth);

/// Per-slice relative errors plus the two summary statistics.
struct ErrorSeries {
    std::vector<double> r;
    double max_r = 0.0;
    double avg_r = 0.0;

    static ErrorSeries from_losses(const std::vector<double>& losses,
                                   const std::vector<double>& truths);
};

/// Least-squares slope of log(y) against log(x); non-positive samples are an
/// argument error.
double loglog_slope(const std::vector<double>& x, const std::vector<double>& y);

}  // namespace dynsvd
