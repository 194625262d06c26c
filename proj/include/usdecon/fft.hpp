#pragma once

#include <complex>
#include <cstddef>
#include <vector>

namespace usdecon {

using cplx = std::complex<double>;

// 1-D complex transforms. fft uses the e^{-j} kernel, ifft the e^{+j}
// kernel with 1/N scaling.
std::vector<cplx> fft(const std::vector<cplx>& in);
std::vector<cplx> ifft(const std::vector<cplx>& in);

// Real input zero-padded (or truncated) to n bins.
std::vector<cplx> fft_real(const std::vector<double>& in, std::size_t n);

// In-place transforms of one axis of a row-major n x n grid.
// sign = -1 gives the e^{-j} kernel (unscaled), sign = +1 the e^{+j}
// kernel scaled by 1/n.
void fft_rows(std::vector<cplx>& grid, std::size_t n, int sign);
void fft_cols(std::vector<cplx>& grid, std::size_t n, int sign);

std::size_t next_pow2(std::size_t n);

}  // namespace usdecon
