#include "usdecon/wiener.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "usdecon/wavelet.hpp"

namespace usdecon {

namespace {

std::vector<double> smoothed_periodogram(const std::vector<cplx>& X, int smooth_bins) {
    const std::size_t n = X.size();
    std::vector<double> p(n);
    for (std::size_t i = 0; i < n; ++i) p[i] = std::norm(X[i]) / static_cast<double>(n);
    if (smooth_bins <= 1) return p;
    const int half = smooth_bins / 2;
    std::vector<double> out(n, 0.0);
    for (std::size_t i = 0; i < n; ++i) {
        double acc = 0.0;
        for (int k = -half; k <= half; ++k) {
            const std::size_t idx = (i + n + static_cast<std::size_t>(k + static_cast<int>(n))) % n;
            acc += p[idx];
        }
        out[i] = acc / static_cast<double>(2 * half + 1);
    }
    return out;
}

std::vector<double> real_part(const std::vector<cplx>& v, std::size_t n) {
    std::vector<double> out(n);
    for (std::size_t i = 0; i < n; ++i) out[i] = v[i].real();
    return out;
}

std::size_t pick_fft_size(const WienerConfig& cfg, std::size_t trace_len, std::size_t pulse_len) {
    if (cfg.fft_size != 0) {
        if (cfg.fft_size < trace_len) throw std::invalid_argument("WienerConfig: fft_size < trace length");
        return cfg.fft_size;
    }
    return next_pow2(trace_len + pulse_len);
}

}  // namespace

void validate(const WienerConfig& cfg) {
    if (!(cfg.alpha > 0.0)) throw std::invalid_argument("WienerConfig: alpha must be > 0");
    if (cfg.iterations < 1) throw std::invalid_argument("WienerConfig: iterations must be >= 1");
    if (cfg.fft_size != 0 && (cfg.fft_size & (cfg.fft_size - 1)) != 0)
        throw std::invalid_argument("WienerConfig: fft_size must be a power of two");
}

NoiseModel estimate_noise_variance(const RfTrace& trace, int levels) {
    validate(trace);
    if (trace.samples.size() < 64) throw std::invalid_argument("estimate_noise_variance: trace too short");
    if (energy_of(trace.samples) == 0.0) return NoiseModel{};
    const std::size_t npad = next_pow2(trace.samples.size());
    std::vector<double> x(npad, 0.0);
    std::copy(trace.samples.begin(), trace.samples.end(), x.begin());
    const std::size_t n = trace.samples.size();
    for (std::size_t i = n; i < npad; ++i) x[i] = trace.samples[n - 2 - std::min(i - n, n - 2)];
    const WaveletDecomposition dec = dwt(x, WaveletFamily::DB16, levels);
    return mad_noise_by_level(dec);
}

std::vector<cplx> pulse_spectrum(const Pulse& pulse, std::size_t fft_size) {
    if (pulse.samples.size() > fft_size)
        throw std::invalid_argument("pulse_spectrum: pulse longer than fft grid");
    std::vector<cplx> buf(fft_size, cplx{0.0, 0.0});
    const std::size_t m = pulse.samples.size();
    for (std::size_t i = 0; i < m; ++i) {
        // circular shift so the peak sits at index 0
        const std::size_t idx = (i + fft_size - pulse.alignment % fft_size) % fft_size;
        buf[idx] = cplx{pulse.samples[i], 0.0};
    }
    return fft(buf);
}

ReflectivitySeries naive_inverse(const RfTrace& trace, const Pulse& pulse) {
    validate(trace);
    validate(pulse);
    const std::size_t nfft = next_pow2(trace.samples.size() + pulse.samples.size());
    const auto Y = fft_real(trace.samples, nfft);
    const auto H = pulse_spectrum(pulse, nfft);
    double hmax = 0.0;
    for (const auto& h : H) hmax = std::max(hmax, std::abs(h));
    const double floor = 1e-12 * hmax;
    std::vector<cplx> X(nfft);
    for (std::size_t i = 0; i < nfft; ++i) {
        const double mag = std::abs(H[i]);
        const cplx h = mag >= floor ? H[i] : (mag > 0.0 ? H[i] * (floor / mag) : cplx{floor, 0.0});
        X[i] = Y[i] / h;
    }
    ReflectivitySeries out;
    out.sample_rate_hz = trace.sample_rate_hz;
    out.kind = SeriesKind::wiener_estimate;
    out.samples = real_part(ifft(X), trace.samples.size());
    return out;
}

SpectralEstimate wiener_step(const std::vector<cplx>& Y, const std::vector<cplx>& H,
                             const std::vector<double>& Px1, double alpha, double sigma2,
                             double sample_rate_hz) {
    const std::size_t n = Y.size();
    if (H.size() != n || Px1.size() != n)
        throw std::invalid_argument("wiener_step: shape mismatch");
    if (!(alpha > 0.0) || sigma2 < 0.0) throw std::invalid_argument("wiener_step: bad alpha/sigma2");
    SpectralEstimate est;
    est.Y = Y;
    est.H = H;
    est.Px1 = Px1;
    est.G.resize(n);
    est.X1.resize(n);
    est.freq_grid_hz.resize(n);
    for (std::size_t i = 0; i < n; ++i) {
        if (Px1[i] < 0.0) throw std::invalid_argument("wiener_step: negative Px1");
        const double den = std::norm(H[i]) * Px1[i] + alpha * sigma2;
        est.G[i] = den > 0.0 ? std::conj(H[i]) * Px1[i] / den : cplx{0.0, 0.0};
        est.X1[i] = est.G[i] * Y[i];
        est.freq_grid_hz[i] = sample_rate_hz * static_cast<double>(i) / static_cast<double>(n);
    }
    return est;
}

ReflectivitySeries iterative_wiener(const RfTrace& trace, const Pulse& pulse,
                                    const WienerConfig& cfg, const NoiseModel& noise,
                                    IterationLog* log) {
    validate(trace);
    validate(pulse);
    validate(cfg);
    if (pulse.samples.size() >= trace.samples.size())
        throw std::invalid_argument("iterative_wiener: pulse must be shorter than the trace");
    const std::size_t nfft = pick_fft_size(cfg, trace.samples.size(), pulse.samples.size());
    const auto Y = fft_real(trace.samples, nfft);
    const auto H = pulse_spectrum(pulse, nfft);
    const double sigma2 = noise.sigma2;

    // seed: constant-q regularized inverse, q = alpha * sigma2
    std::vector<cplx> X(nfft);
    for (std::size_t i = 0; i < nfft; ++i) {
        const double den = std::norm(H[i]) + cfg.alpha * sigma2;
        X[i] = den > 0.0 ? std::conj(H[i]) * Y[i] / den : cplx{0.0, 0.0};
    }
    if (log) log->residual_energy.clear();
    for (int it = 0; it < cfg.iterations; ++it) {
        const auto Px = smoothed_periodogram(X, cfg.smooth_bins);
        const auto est = wiener_step(Y, H, Px, cfg.alpha, sigma2, trace.sample_rate_hz);
        if (log) {
            double res = 0.0;
            for (std::size_t i = 0; i < nfft; ++i) res += std::norm(Y[i] - est.H[i] * est.X1[i]);
            log->residual_energy.push_back(res / static_cast<double>(nfft));
        }
        X = est.X1;
    }
    ReflectivitySeries out;
    out.sample_rate_hz = trace.sample_rate_hz;
    out.kind = SeriesKind::wiener_estimate;
    out.samples = real_part(ifft(X), trace.samples.size());
    return out;
}

}  // namespace usdecon
