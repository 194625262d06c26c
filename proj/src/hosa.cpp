#include "usdecon/hosa.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>

namespace usdecon {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

double parzen(double u) {
    const double a = std::abs(u);
    if (a >= 1.0) return 0.0;
    if (a <= 0.5) return 1.0 - 6.0 * a * a + 6.0 * a * a * a;
    const double b = 1.0 - a;
    return 2.0 * b * b * b;
}

// 1-D phase unwrap in place.
void unwrap(double* phi, std::size_t n, std::size_t stride) {
    double offset = 0.0;
    double prev = phi[0];
    for (std::size_t i = 1; i < n; ++i) {
        const double raw = phi[i * stride];
        double d = raw + offset - prev;
        while (d > std::numbers::pi) {
            offset -= kTwoPi;
            d -= kTwoPi;
        }
        while (d < -std::numbers::pi) {
            offset += kTwoPi;
            d += kTwoPi;
        }
        phi[i * stride] = raw + offset;
        prev = phi[i * stride];
    }
}

std::size_t shift_index(std::size_t i, std::size_t k, std::size_t n) { return (i + k) % n; }

}  // namespace

double CumulantGrid::at(int m1, int m2) const {
    const int L = max_lag;
    const int side = 2 * L + 1;
    return values[static_cast<std::size_t>((m1 + L) * side + (m2 + L))];
}

double& CumulantGrid::at(int m1, int m2) {
    const int L = max_lag;
    const int side = 2 * L + 1;
    return values[static_cast<std::size_t>((m1 + L) * side + (m2 + L))];
}

double CepstrumSeq::at(int n) const {
    const int K = static_cast<int>(values.size());
    const int i = n + K / 2;
    if (i < 0 || i >= K) throw std::out_of_range("CepstrumSeq: quefrency out of range");
    return values[static_cast<std::size_t>(i)];
}

CumulantGrid estimate_cumulant(const std::vector<RfTrace>& traces, int max_lag,
                               std::size_t segment_len) {
    if (traces.empty()) throw std::invalid_argument("estimate_cumulant: no traces");
    if (max_lag < 0) throw std::invalid_argument("estimate_cumulant: max_lag < 0");
    if (segment_len <= 2 * static_cast<std::size_t>(max_lag))
        throw std::invalid_argument("estimate_cumulant: segment_len must exceed 2*max_lag");
    const int L = max_lag;
    const int side = 2 * L + 1;
    CumulantGrid grid;
    grid.max_lag = L;
    grid.n_averaged = segment_len;
    grid.n_traces = traces.size();
    grid.values.assign(static_cast<std::size_t>(side) * side, 0.0);

    const int M = static_cast<int>(segment_len);
    std::size_t n_segments = 0;
    for (const auto& trace : traces) {
        validate(trace);
        const std::size_t n = trace.samples.size();
        for (std::size_t seg = 0; seg + segment_len <= n; seg += segment_len) {
            const double* y = trace.samples.data() + seg;
            // exploit symmetry: accumulate only m2 >= m1
            for (int m1 = -L; m1 <= L; ++m1) {
                for (int m2 = m1; m2 <= L; ++m2) {
                    const int lo = std::max({0, -m1, -m2});
                    const int hi = M - 1 - std::max({0, m1, m2});
                    double acc = 0.0;
                    for (int k = lo; k <= hi; ++k) acc += y[k] * y[k + m1] * y[k + m2];
                    grid.at(m1, m2) += acc / static_cast<double>(M);
                }
            }
            ++n_segments;
        }
    }
    if (n_segments == 0)
        throw std::invalid_argument("estimate_cumulant: traces shorter than one segment");
    grid.n_segments = n_segments;
    const double scale = 1.0 / static_cast<double>(n_segments);
    for (int m1 = -L; m1 <= L; ++m1)
        for (int m2 = m1; m2 <= L; ++m2) {
            const double v = grid.at(m1, m2) * scale;
            grid.at(m1, m2) = v;
            grid.at(m2, m1) = v;
        }
    return grid;
}

BispectrumGrid bispectrum_of(const CumulantGrid& grid, std::size_t fft_size, bool lag_window) {
    const int L = grid.max_lag;
    const std::size_t K = fft_size;
    if (K < static_cast<std::size_t>(2 * L + 1))
        throw std::invalid_argument("bispectrum_of: fft_size < 2*max_lag+1");
    if (K % 2 != 0) throw std::invalid_argument("bispectrum_of: fft_size must be even");
    std::vector<cplx> buf(K * K, cplx{0.0, 0.0});
    for (int m1 = -L; m1 <= L; ++m1) {
        const double w1 = lag_window ? parzen(static_cast<double>(m1) / (L + 1.0)) : 1.0;
        const std::size_t i1 = static_cast<std::size_t>((m1 + static_cast<int>(K)) % static_cast<int>(K));
        for (int m2 = -L; m2 <= L; ++m2) {
            const double w2 = lag_window ? parzen(static_cast<double>(m2) / (L + 1.0)) : 1.0;
            const std::size_t i2 =
                static_cast<std::size_t>((m2 + static_cast<int>(K)) % static_cast<int>(K));
            buf[i1 * K + i2] = cplx{w1 * w2 * grid.at(m1, m2), 0.0};
        }
    }
    fft_rows(buf, K, -1);
    fft_cols(buf, K, -1);
    BispectrumGrid bisp;
    bisp.size = K;
    bisp.values = std::move(buf);
    return bisp;
}

BicepstrumGrid bicepstrum_of(const BispectrumGrid& bisp, double floor_eps) {
    const std::size_t K = bisp.size;
    if (K == 0 || bisp.values.size() != K * K)
        throw std::invalid_argument("bicepstrum_of: malformed bispectrum grid");
    double maxmag = 0.0;
    for (const auto& v : bisp.values) {
        if (!std::isfinite(v.real()) || !std::isfinite(v.imag()))
            throw std::invalid_argument("bicepstrum_of: non-finite bispectrum");
        maxmag = std::max(maxmag, std::abs(v));
    }
    if (maxmag == 0.0) throw std::invalid_argument("bicepstrum_of: bispectrum identically zero");
    const double floor = floor_eps * maxmag;

    // work on the fftshifted grid so frequency runs contiguously
    const std::size_t h = K / 2;
    std::vector<double> logmag(K * K), phase(K * K);
    for (std::size_t i1 = 0; i1 < K; ++i1) {
        for (std::size_t i2 = 0; i2 < K; ++i2) {
            const cplx v = bisp.values[shift_index(i1, h, K) * K + shift_index(i2, h, K)];
            const double mag = std::abs(v);
            logmag[i1 * K + i2] = std::log(std::max(mag, floor));
            // bins below the floor carry no usable phase; zero it so the
            // unwrapping passes are not driven by noise
            phase[i1 * K + i2] = mag >= floor ? std::arg(v) : 0.0;
        }
    }
    for (std::size_t r = 0; r < K; ++r) unwrap(phase.data() + r * K, K, 1);
    for (std::size_t c = 0; c < K; ++c) unwrap(phase.data() + c, K, K);

    // residual 2*pi jumps along rows after the column pass
    double jump2 = 0.0;
    std::size_t npairs = 0;
    for (std::size_t r = 0; r < K; ++r) {
        for (std::size_t c = 1; c < K; ++c) {
            const double d = phase[r * K + c] - phase[r * K + c - 1];
            const double wrapped = d - kTwoPi * std::round(d / kTwoPi);
            const double res = (d - wrapped) / kTwoPi;
            jump2 += res * res;
            ++npairs;
        }
    }
    const double unwrap_residue = std::sqrt(jump2 / static_cast<double>(npairs));

    // least-squares phase plane a*u + b*v + c, u,v centred coordinates
    double suu = 0.0, sv = 0.0, su_phi = 0.0, sv_phi = 0.0, s_phi = 0.0;
    for (std::size_t i1 = 0; i1 < K; ++i1) {
        const double u = static_cast<double>(i1) - static_cast<double>(h);
        for (std::size_t i2 = 0; i2 < K; ++i2) {
            const double v = static_cast<double>(i2) - static_cast<double>(h);
            const double p = phase[i1 * K + i2];
            suu += u * u;
            sv += v * v;
            su_phi += u * p;
            sv_phi += v * p;
            s_phi += p;
        }
    }
    // quantize the fitted plane to what it can physically encode: integer
    // circular shifts (slope 2*pi/K per bin) and the sign ambiguity (pi);
    // fractional slopes would resample the pulse and break phase oddness
    const double qs = kTwoPi / static_cast<double>(K);
    const double a = qs * std::round((suu > 0.0 ? su_phi / suu : 0.0) / qs);
    const double b = qs * std::round((sv > 0.0 ? sv_phi / sv : 0.0) / qs);
    const double c0 =
        std::numbers::pi * std::round(s_phi / static_cast<double>(K * K) / std::numbers::pi);
    std::vector<cplx> lam(K * K);
    for (std::size_t i1 = 0; i1 < K; ++i1) {
        const double u = static_cast<double>(i1) - static_cast<double>(h);
        for (std::size_t i2 = 0; i2 < K; ++i2) {
            const double v = static_cast<double>(i2) - static_cast<double>(h);
            const double p = phase[i1 * K + i2] - a * u - b * v - c0;
            // shift back to FFT ordering while writing
            lam[shift_index(i1, h, K) * K + shift_index(i2, h, K)] =
                cplx{logmag[i1 * K + i2], p};
        }
    }

    // inverse transform with e^{+j} over f1 and e^{-j} over f2; this axis
    // pairing places the system cepstrum on the anti-diagonal
    fft_cols(lam, K, +1);
    fft_rows(lam, K, -1);
    const double scale = 1.0 / static_cast<double>(K);
    double re2 = 0.0, im2 = 0.0;
    BicepstrumGrid bic;
    bic.size = K;
    bic.values.resize(K * K);
    for (std::size_t i = 0; i < K * K; ++i) {
        const cplx v = lam[i] * scale;
        bic.values[i] = v.real();
        re2 += v.real() * v.real();
        im2 += v.imag() * v.imag();
    }
    bic.unwrap_residue = unwrap_residue;
    bic.imag_residue = re2 > 0.0 ? std::sqrt(im2 / re2) : 0.0;
    bic.quality_ok = bic.imag_residue < 1e-6 && unwrap_residue < 0.1;
    return bic;
}

CepstrumSeq extract_pulse_cepstrum(const BicepstrumGrid& bic) {
    const std::size_t K = bic.size;
    if (K == 0 || bic.values.size() != K * K)
        throw std::invalid_argument("extract_pulse_cepstrum: malformed bicepstrum grid");
    const int half = static_cast<int>(K) / 2;
    CepstrumSeq ceps;
    ceps.values.assign(K, 0.0);
    for (int n = -half; n < half; ++n) {
        if (n == 0) continue;  // gain convention
        const std::size_t i1 = static_cast<std::size_t>((-n + static_cast<int>(K)) % static_cast<int>(K));
        const std::size_t i2 = static_cast<std::size_t>((n + static_cast<int>(K)) % static_cast<int>(K));
        ceps.values[static_cast<std::size_t>(n + half)] = bic.values[i1 * K + i2];
    }
    return ceps;
}

Pulse reconstruct_pulse(const CepstrumSeq& ceps, std::size_t pulse_len, double sample_rate_hz) {
    const std::size_t K = ceps.values.size();
    if (K == 0) throw std::invalid_argument("reconstruct_pulse: empty cepstrum");
    if (pulse_len == 0 || pulse_len > K)
        throw std::invalid_argument("reconstruct_pulse: pulse_len must be in [1, K]");
    const int half = static_cast<int>(K) / 2;
    std::vector<cplx> hhat(K, cplx{0.0, 0.0});
    for (int n = -half; n < half; ++n) {
        const std::size_t idx = static_cast<std::size_t>((n + static_cast<int>(K)) % static_cast<int>(K));
        hhat[idx] = cplx{ceps.values[static_cast<std::size_t>(n + half)], 0.0};
    }
    auto spec = fft(hhat);
    for (auto& v : spec) v = std::exp(v);
    const auto h = ifft(spec);

    std::vector<double> ht(K);
    for (std::size_t i = 0; i < K; ++i) ht[i] = h[i].real();
    double total = energy_of(ht);
    if (!(total > 0.0)) throw std::invalid_argument("reconstruct_pulse: zero-energy result");

    // best circular window of pulse_len samples
    double win = 0.0;
    for (std::size_t i = 0; i < pulse_len; ++i) win += ht[i] * ht[i];
    double best = win;
    std::size_t best_start = 0;
    for (std::size_t s = 1; s < K; ++s) {
        win += ht[(s + pulse_len - 1) % K] * ht[(s + pulse_len - 1) % K];
        win -= ht[s - 1] * ht[s - 1];
        if (win > best) {
            best = win;
            best_start = s;
        }
    }
    if (best < 0.99 * total)
        throw std::runtime_error("reconstruct_pulse: energy criterion unsatisfiable at this pulse_len");

    Pulse p;
    p.sample_rate_hz = sample_rate_hz;
    p.samples.resize(pulse_len);
    for (std::size_t i = 0; i < pulse_len; ++i) p.samples[i] = ht[(best_start + i) % K];
    return normalize_pulse(std::move(p));
}

Pulse estimate_pulse(const std::vector<RfTrace>& traces, const HosaOptions& opts,
                     PulseQuality* quality) {
    if (traces.empty()) throw std::invalid_argument("estimate_pulse: no traces");
    std::vector<RfTrace> ensemble;
    const std::size_t n_use = std::min<std::size_t>(opts.ensemble, traces.size());
    double total_energy = 0.0;
    for (std::size_t i = 0; i < n_use; ++i) {
        ensemble.push_back(remove_mean(traces[i]));
        total_energy += energy_of(ensemble.back().samples);
    }
    if (!(total_energy > 0.0)) throw std::invalid_argument("estimate_pulse: degenerate (all-zero) input");

    const auto cum = estimate_cumulant(ensemble, opts.max_lag, opts.segment_len);
    const auto bisp = bispectrum_of(cum, opts.fft_size, opts.lag_window);
    const auto bic = bicepstrum_of(bisp, opts.floor_eps);
    const auto ceps = extract_pulse_cepstrum(bic);
    Pulse pulse = reconstruct_pulse(ceps, opts.pulse_len, traces.front().sample_rate_hz);
    if (quality) {
        quality->unwrap_residue = bic.unwrap_residue;
        quality->imag_residue = bic.imag_residue;
        quality->ensemble = n_use;
        quality->n_segments = cum.n_segments;
        quality->flagged = !bic.quality_ok;
    }
    return pulse;
}

}  // namespace usdecon
