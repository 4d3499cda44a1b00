#include "evolv/fft.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

#include "evolv/sampling.hpp"

namespace evolv {

bool is_power_of_two(long v) { return v > 0 && (v & (v - 1)) == 0; }

void fft_inplace(std::vector<Complex>& a, int sign) {
    const std::size_t n = a.size();
    if (!is_power_of_two(static_cast<long>(n))) throw std::invalid_argument("FFT length must be a power of two");
    for (std::size_t i = 1, j = 0; i < n; ++i) {
        std::size_t bit = n >> 1;
        for (; j & bit; bit >>= 1) j ^= bit;
        j ^= bit;
        if (i < j) std::swap(a[i], a[j]);
    }
    for (std::size_t len = 2; len <= n; len <<= 1) {
        const double ang = sign * 2.0 * std::numbers::pi / static_cast<double>(len);
        for (std::size_t i = 0; i < n; i += len) {
            for (std::size_t k = 0; k < len / 2; ++k) {
                // twiddles computed directly to avoid drift from repeated products
                const Complex w = std::polar(1.0, ang * static_cast<double>(k));
                const Complex u = a[i + k], v = a[i + k + len / 2] * w;
                a[i + k] = u + v;
                a[i + k + len / 2] = u - v;
            }
        }
    }
}

void fft_nd(std::vector<Complex>& data, int m, int axes, int sign, int threads) {
    const std::size_t M = static_cast<std::size_t>(m);
    std::size_t total = 1;
    for (int a = 0; a < axes; ++a) total *= M;
    if (data.size() != total) throw std::invalid_argument("array size does not match the grid");
    for (int axis = 0; axis < axes; ++axis) {
        std::size_t stride = 1;
        for (int a = axis + 1; a < axes; ++a) stride *= M;
        const std::size_t lines = total / M;
        parallel_for(lines, threads, [&](std::size_t line) {
            // line index -> (outer, inner) around the transformed axis
            const std::size_t inner = line % stride, outer = line / stride;
            const std::size_t base = outer * stride * M + inner;
            std::vector<Complex> buf(M);
            for (std::size_t k = 0; k < M; ++k) buf[k] = data[base + k * stride];
            fft_inplace(buf, sign);
            for (std::size_t k = 0; k < M; ++k) data[base + k * stride] = buf[k];
        });
    }
}

}  // namespace evolv
