#include "usdecon/fft.hpp"

#include <fftw3.h>

#include <mutex>
#include <stdexcept>

namespace usdecon {

namespace {

std::mutex planner_mutex;

void execute_dft(const cplx* in, cplx* out, std::size_t n, int fftw_sign) {
    fftw_plan plan;
    {
        std::lock_guard<std::mutex> lock(planner_mutex);
        plan = fftw_plan_dft_1d(static_cast<int>(n),
                                reinterpret_cast<fftw_complex*>(const_cast<cplx*>(in)),
                                reinterpret_cast<fftw_complex*>(out),
                                fftw_sign, FFTW_ESTIMATE | FFTW_PRESERVE_INPUT);
    }
    fftw_execute(plan);
    {
        std::lock_guard<std::mutex> lock(planner_mutex);
        fftw_destroy_plan(plan);
    }
}

}  // namespace

std::vector<cplx> fft(const std::vector<cplx>& in) {
    if (in.empty()) throw std::invalid_argument("fft: empty input");
    std::vector<cplx> out(in.size());
    execute_dft(in.data(), out.data(), in.size(), FFTW_FORWARD);
    return out;
}

std::vector<cplx> ifft(const std::vector<cplx>& in) {
    if (in.empty()) throw std::invalid_argument("ifft: empty input");
    std::vector<cplx> out(in.size());
    execute_dft(in.data(), out.data(), in.size(), FFTW_BACKWARD);
    const double scale = 1.0 / static_cast<double>(in.size());
    for (auto& v : out) v *= scale;
    return out;
}

std::vector<cplx> fft_real(const std::vector<double>& in, std::size_t n) {
    std::vector<cplx> buf(n, cplx{0.0, 0.0});
    const std::size_t m = std::min(n, in.size());
    for (std::size_t i = 0; i < m; ++i) buf[i] = cplx{in[i], 0.0};
    return fft(buf);
}

void fft_rows(std::vector<cplx>& grid, std::size_t n, int sign) {
    if (grid.size() != n * n) throw std::invalid_argument("fft_rows: bad grid size");
    std::vector<cplx> row(n), out(n);
    const int fsign = sign < 0 ? FFTW_FORWARD : FFTW_BACKWARD;
    const double scale = sign < 0 ? 1.0 : 1.0 / static_cast<double>(n);
    for (std::size_t r = 0; r < n; ++r) {
        for (std::size_t c = 0; c < n; ++c) row[c] = grid[r * n + c];
        execute_dft(row.data(), out.data(), n, fsign);
        for (std::size_t c = 0; c < n; ++c) grid[r * n + c] = out[c] * scale;
    }
}

void fft_cols(std::vector<cplx>& grid, std::size_t n, int sign) {
    if (grid.size() != n * n) throw std::invalid_argument("fft_cols: bad grid size");
    std::vector<cplx> col(n), out(n);
    const int fsign = sign < 0 ? FFTW_FORWARD : FFTW_BACKWARD;
    const double scale = sign < 0 ? 1.0 : 1.0 / static_cast<double>(n);
    for (std::size_t c = 0; c < n; ++c) {
        for (std::size_t r = 0; r < n; ++r) col[r] = grid[r * n + c];
        execute_dft(col.data(), out.data(), n, fsign);
        for (std::size_t r = 0; r < n; ++r) grid[r * n + c] = out[r] * scale;
    }
}

std::size_t next_pow2(std::size_t n) {
    std::size_t p = 1;
    while (p < n) p <<= 1;
    return p;
}

}  // namespace usdecon
