#pragma once

#include <utility>
#include <vector>

#include "usdecon/types.hpp"

namespace usdecon {

struct ResolutionReport {
    double lobe_width_before = 0.0;
    double lobe_width_after = 0.0;
    double gain = 0.0;
    std::vector<double> per_trace_gains;
    double gain_mean = 0.0;
    double gain_std = 0.0;
};

// Biased autocovariance of the mean-removed sequence, normalized to 1 at
// lag 0. Length 2n-1, lag 0 at index n-1.
std::vector<double> autocovariance(const std::vector<double>& x);

// Width in samples between the first crossings of 10^(drop_db/20) on each
// side of lag 0, linearly interpolated.
double main_lobe_width(const std::vector<double>& acov, double drop_db = -6.0);

double resolution_gain(const RfTrace& before, const ReflectivitySeries& after,
                       double drop_db = -6.0);

ResolutionReport batch_resolution_stats(
    const std::vector<std::pair<RfTrace, ReflectivitySeries>>& pairs, double drop_db = -6.0);

}  // namespace usdecon
