#include "usdecon/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "usdecon/fft.hpp"

namespace usdecon {

std::vector<double> autocovariance(const std::vector<double>& x) {
    const std::size_t n = x.size();
    if (n < 16) throw std::invalid_argument("autocovariance: need at least 16 samples");
    const double mu = mean_of(x);
    std::vector<double> xc(n);
    for (std::size_t i = 0; i < n; ++i) xc[i] = x[i] - mu;
    if (!(energy_of(xc) > 0.0)) throw std::invalid_argument("autocovariance: zero-energy input");

    const std::size_t nfft = next_pow2(2 * n);
    auto X = fft_real(xc, nfft);
    for (auto& v : X) v = cplx{std::norm(v), 0.0};
    const auto r = ifft(X);

    std::vector<double> acov(2 * n - 1);
    const double r0 = r[0].real();
    for (std::size_t k = 0; k < n; ++k) {
        const double v = r[k].real() / r0;
        acov[n - 1 + k] = v;
        acov[n - 1 - k] = v;
    }
    return acov;
}

double main_lobe_width(const std::vector<double>& acov, double drop_db) {
    if (acov.empty() || acov.size() % 2 == 0)
        throw std::invalid_argument("main_lobe_width: expected odd-length autocovariance");
    const std::size_t centre = acov.size() / 2;
    const double level = std::pow(10.0, drop_db / 20.0);
    if (std::abs(acov[centre] - 1.0) > 1e-9)
        throw std::invalid_argument("main_lobe_width: autocovariance not normalized at lag 0");

    auto side_width = [&](int dir) {
        double prev = acov[centre];
        for (std::size_t k = 1; k + centre < acov.size(); ++k) {
            const double cur = acov[centre + dir * static_cast<int>(k)];
            if (cur <= level) {
                // linear interpolation between k-1 and k
                const double frac = (prev - level) / (prev - cur);
                return static_cast<double>(k - 1) + frac;
            }
            prev = cur;
        }
        throw std::runtime_error("main_lobe_width: level never crossed");
    };
    return side_width(+1) + side_width(-1);
}

double resolution_gain(const RfTrace& before, const ReflectivitySeries& after, double drop_db) {
    const double wb = main_lobe_width(autocovariance(before.samples), drop_db);
    const double wa = main_lobe_width(autocovariance(after.samples), drop_db);
    return wb / wa;
}

ResolutionReport batch_resolution_stats(
    const std::vector<std::pair<RfTrace, ReflectivitySeries>>& pairs, double drop_db) {
    if (pairs.size() < 2) throw std::invalid_argument("batch_resolution_stats: need >= 2 pairs");
    ResolutionReport rep;
    double wb_sum = 0.0, wa_sum = 0.0;
    for (const auto& [before, after] : pairs) {
        const double wb = main_lobe_width(autocovariance(before.samples), drop_db);
        const double wa = main_lobe_width(autocovariance(after.samples), drop_db);
        rep.per_trace_gains.push_back(wb / wa);
        wb_sum += wb;
        wa_sum += wa;
    }
    const double n = static_cast<double>(rep.per_trace_gains.size());
    rep.lobe_width_before = wb_sum / n;
    rep.lobe_width_after = wa_sum / n;
    rep.gain = rep.lobe_width_before / rep.lobe_width_after;
    double mean = 0.0;
    for (double g : rep.per_trace_gains) mean += g;
    mean /= n;
    double var = 0.0;
    for (double g : rep.per_trace_gains) var += (g - mean) * (g - mean);
    rep.gain_mean = mean;
    rep.gain_std = std::sqrt(var / (n - 1.0));
    return rep;
}

}  // namespace usdecon
