#pragma once

#include <vector>

#include "evolv/types.hpp"

namespace evolv {

// In-place radix-2 transform: a_k <- sum_j a_j exp(sign * 2 pi i j k / N).
// N must be a power of two. No normalization.
void fft_inplace(std::vector<Complex>& a, int sign);

// Applies fft_inplace along every axis of a row-major array with `m` points per
// axis and `axes` axes (axis 0 varies slowest).
void fft_nd(std::vector<Complex>& data, int m, int axes, int sign, int threads = 1);

bool is_power_of_two(long v);

}  // namespace evolv
