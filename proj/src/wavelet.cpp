#include "usdecon/wavelet.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "usdecon/wiener.hpp"

namespace usdecon {

namespace {

// Orthonormal Daubechies scaling filters (spectral factorization, minimum
// phase). Sum = sqrt(2), unit energy.
const std::vector<double> kDb10{
    -0.000013264202894521244812, 0.000093588670320069591334, -0.00011646685512928545095,
    -0.00068585669495971162656,  0.0019924052951850561172,   0.0013953517470529011658,
    -0.010733175483330575044,    0.0036065535669561696554,   0.03321267405934100174,
    -0.029457536821875812858,    -0.071394147166397087145,   0.09305736460357235116,
    0.12736934033579326008,      -0.1959462743773770435,     -0.24984642432731537942,
    0.28117234366057746075,      0.68845903945360356574,     0.52720118893172558648,
    0.18817680007769148902,      0.026670057900555553587};

const std::vector<double> kDb16{
    -2.109339630100743097e-8,    2.3087840868575458664e-7,  -7.3636567854512055121e-7,
    -1.0435713423116065015e-6,   0.000011336608661276258588, -0.000013945668988208893452,
    -0.000061035966214109358352, 0.00017478724522533818038,  0.00011424152003872239264,
    -0.00094102174935956758893,  0.00040789698084971283624,  0.0031280233812062688317,
    -0.0036442796214983899322,   -0.0069900145634139166703,  0.01399376885982873103,
    0.010297659640955969412,     -0.036888397691730142334,   -0.0075889743688577376385,
    0.075924236044276315821,     -0.0062397227524748717657,  -0.13238830556381039045,
    0.027340263752716041365,     0.21119069394710428872,     -0.027918208133028276683,
    -0.32706331052791770465,     -0.089751089402489642857,   0.44029025688635690004,
    0.63735633208378889863,      0.43031272284600381374,     0.1650642834888531179,
    0.03490771432367334641,      0.0031892209253477380298};

std::vector<double> wavelet_filter(const std::vector<double>& g) {
    // quadrature mirror: h[n] = (-1)^n g[L-1-n]
    const std::size_t L = g.size();
    std::vector<double> h(L);
    for (std::size_t n = 0; n < L; ++n) {
        h[n] = (n % 2 == 0 ? 1.0 : -1.0) * g[L - 1 - n];
    }
    return h;
}

bool is_pow2(std::size_t n) { return n != 0 && (n & (n - 1)) == 0; }

// One periodic analysis step: x (even length) -> approx, detail.
void analysis_step(const std::vector<double>& x, const std::vector<double>& g,
                   const std::vector<double>& h, std::vector<double>& a, std::vector<double>& d) {
    const std::size_t n = x.size();
    const std::size_t half = n / 2;
    const std::size_t L = g.size();
    a.assign(half, 0.0);
    d.assign(half, 0.0);
    for (std::size_t k = 0; k < half; ++k) {
        double sa = 0.0, sd = 0.0;
        for (std::size_t t = 0; t < L; ++t) {
            const double v = x[(2 * k + t) % n];
            sa += g[t] * v;
            sd += h[t] * v;
        }
        a[k] = sa;
        d[k] = sd;
    }
}

// Transpose of analysis_step.
std::vector<double> synthesis_step(const std::vector<double>& a, const std::vector<double>& d,
                                   const std::vector<double>& g, const std::vector<double>& h) {
    const std::size_t half = a.size();
    const std::size_t n = 2 * half;
    const std::size_t L = g.size();
    std::vector<double> x(n, 0.0);
    for (std::size_t k = 0; k < half; ++k) {
        for (std::size_t t = 0; t < L; ++t) {
            const std::size_t idx = (2 * k + t) % n;
            x[idx] += g[t] * a[k] + h[t] * d[k];
        }
    }
    return x;
}

double median_abs(std::vector<double> v) {
    if (v.empty()) return 0.0;
    for (auto& x : v) x = std::abs(x);
    const std::size_t half = v.size() / 2;
    std::nth_element(v.begin(), v.begin() + static_cast<std::ptrdiff_t>(half), v.end());
    double hi = v[half];
    if (v.size() % 2 == 1) return hi;
    std::nth_element(v.begin(), v.begin() + static_cast<std::ptrdiff_t>(half) - 1,
                     v.begin() + static_cast<std::ptrdiff_t>(half));
    return 0.5 * (hi + v[half - 1]);
}

}  // namespace

const std::vector<double>& scaling_filter(WaveletFamily family) {
    return family == WaveletFamily::DB10 ? kDb10 : kDb16;
}

WaveletDecomposition dwt(const std::vector<double>& x, WaveletFamily family, int levels) {
    if (levels < 1) throw std::invalid_argument("dwt: levels < 1");
    if (!is_pow2(x.size())) throw std::invalid_argument("dwt: length must be a power of two");
    const auto& g = scaling_filter(family);
    if (x.size() < (std::size_t{1} << levels) ||
        (x.size() >> (levels - 1)) < 2) {
        throw std::invalid_argument("dwt: too many levels for this length");
    }
    const auto h = wavelet_filter(g);
    WaveletDecomposition dec;
    dec.family = family;
    dec.levels = levels;
    dec.original_len = x.size();
    std::vector<double> cur = x;
    for (int j = 1; j <= levels; ++j) {
        std::vector<double> a, d;
        analysis_step(cur, g, h, a, d);
        dec.details.push_back(std::move(d));
        cur = std::move(a);
    }
    dec.approx = std::move(cur);
    return dec;
}

std::vector<double> idwt(const WaveletDecomposition& dec) {
    if (dec.levels < 1 || dec.details.size() != static_cast<std::size_t>(dec.levels))
        throw std::invalid_argument("idwt: inconsistent level structure");
    const auto& g = scaling_filter(dec.family);
    const auto h = wavelet_filter(g);
    std::vector<double> cur = dec.approx;
    for (int j = dec.levels; j >= 1; --j) {
        const auto& d = dec.details[static_cast<std::size_t>(j - 1)];
        if (d.size() != cur.size()) throw std::invalid_argument("idwt: corrupted length structure");
        cur = synthesis_step(cur, d, g, h);
    }
    if (cur.size() != dec.original_len) throw std::invalid_argument("idwt: length mismatch");
    return cur;
}

WaveletDecomposition soft_threshold(WaveletDecomposition dec,
                                    const std::vector<double>& thresholds) {
    if (thresholds.size() != dec.details.size())
        throw std::invalid_argument("soft_threshold: one threshold per detail level required");
    for (std::size_t j = 0; j < dec.details.size(); ++j) {
        const double T = thresholds[j];
        if (T < 0.0) throw std::invalid_argument("soft_threshold: negative threshold");
        for (auto& v : dec.details[j]) {
            const double mag = std::abs(v) - T;
            v = mag > 0.0 ? (v < 0.0 ? -mag : mag) : 0.0;
        }
    }
    return dec;
}

ShrinkageGains wiener_gains(const WaveletDecomposition& dec, const NoiseModel& noise) {
    auto gain = [](double w, double s2) {
        const double w2 = w * w;
        const double den = w2 + s2;
        return den > 0.0 ? w2 / den : 0.0;
    };
    ShrinkageGains gains;
    gains.lambda_details.resize(dec.details.size());
    double s2_coarsest = noise.sigma2;
    for (std::size_t j = 0; j < dec.details.size(); ++j) {
        const double s2 = j < noise.sigma2_by_level.size() ? noise.sigma2_by_level[j] : noise.sigma2;
        if (s2 < 0.0) throw std::invalid_argument("wiener_gains: negative variance");
        s2_coarsest = s2;
        auto& lvl = gains.lambda_details[j];
        lvl.reserve(dec.details[j].size());
        for (double w : dec.details[j]) lvl.push_back(gain(w, s2));
    }
    gains.lambda_approx.reserve(dec.approx.size());
    for (double w : dec.approx) gains.lambda_approx.push_back(gain(w, s2_coarsest));
    return gains;
}

WaveletDecomposition apply_gains(WaveletDecomposition dec, const ShrinkageGains& gains) {
    if (gains.lambda_details.size() != dec.details.size() ||
        gains.lambda_approx.size() != dec.approx.size())
        throw std::invalid_argument("apply_gains: shape mismatch");
    for (std::size_t j = 0; j < dec.details.size(); ++j) {
        if (gains.lambda_details[j].size() != dec.details[j].size())
            throw std::invalid_argument("apply_gains: shape mismatch at level " + std::to_string(j + 1));
        for (std::size_t k = 0; k < dec.details[j].size(); ++k)
            dec.details[j][k] *= gains.lambda_details[j][k];
    }
    for (std::size_t k = 0; k < dec.approx.size(); ++k) dec.approx[k] *= gains.lambda_approx[k];
    return dec;
}

NoiseModel mad_noise_by_level(const WaveletDecomposition& dec) {
    NoiseModel noise;
    noise.sigma2_by_level.reserve(dec.details.size());
    for (const auto& d : dec.details) {
        const double sigma = median_abs(d) / 0.6745;
        noise.sigma2_by_level.push_back(sigma * sigma);
    }
    noise.sigma2 = noise.sigma2_by_level.empty() ? 0.0 : noise.sigma2_by_level.front();
    return noise;
}

ReflectivitySeries forward_deconvolve(const RfTrace& trace, const Pulse& pulse,
                                      const WaveletConfig& wcfg, const WienerConfig& wiener_cfg,
                                      DeconvolveLog* log) {
    const NoiseModel trace_noise = estimate_noise_variance(trace);
    ReflectivitySeries x1 = iterative_wiener(trace, pulse, wiener_cfg, trace_noise);

    // reflection-pad to a power of two; periodic filters then see a
    // continuous extension
    const std::size_t n = x1.samples.size();
    const std::size_t npad = [&] {
        std::size_t p = 1;
        while (p < n) p <<= 1;
        return p;
    }();
    std::vector<double> padded(npad, 0.0);
    std::copy(x1.samples.begin(), x1.samples.end(), padded.begin());
    for (std::size_t i = n; i < npad; ++i) {
        const std::size_t mirror = n >= 2 ? n - 2 - std::min(i - n, n - 2) : 0;
        padded[i] = x1.samples[mirror];
    }

    // pass 1: soft thresholding (denoise family), universal threshold with
    // level-wise MAD sigma
    WaveletDecomposition dec1 = dwt(padded, wcfg.denoise_family, wcfg.levels);
    const NoiseModel lvl_noise = mad_noise_by_level(dec1);
    std::vector<double> thresholds(dec1.details.size());
    for (std::size_t j = 0; j < thresholds.size(); ++j) {
        const double nj = static_cast<double>(dec1.details[j].size());
        thresholds[j] = std::sqrt(lvl_noise.sigma2_by_level[j]) * std::sqrt(2.0 * std::log(nj));
    }
    dec1 = soft_threshold(std::move(dec1), thresholds);
    if (log) {
        log->threshold_by_level = thresholds;
        log->sigma_by_level.clear();
        for (double s2 : lvl_noise.sigma2_by_level) log->sigma_by_level.push_back(std::sqrt(s2));
        log->surviving_by_level.clear();
        for (const auto& d : dec1.details) {
            std::size_t alive = 0;
            for (double v : d)
                if (v != 0.0) ++alive;
            log->surviving_by_level.push_back(alive);
        }
    }
    const std::vector<double> denoised = idwt(dec1);

    // pass 2: wavelet-domain Wiener gains (gain family) against the noise
    // that leaked through the threshold
    WaveletDecomposition dec2 = dwt(denoised, wcfg.gain_family, wcfg.levels);
    const NoiseModel leaked = mad_noise_by_level(dec2);
    const ShrinkageGains gains = wiener_gains(dec2, leaked);
    dec2 = apply_gains(std::move(dec2), gains);
    std::vector<double> xt = idwt(dec2);
    xt.resize(n);

    ReflectivitySeries out;
    out.sample_rate_hz = trace.sample_rate_hz;
    out.kind = SeriesKind::wavelet_estimate;
    out.samples = std::move(xt);
    return out;
}

}  // namespace usdecon
