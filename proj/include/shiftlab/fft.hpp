#pragma once

// Radix-2 FFT on power-of-two sizes. Sign convention: fft_inplace(a, +1)
// computes A[j] = sum_i a[i] exp(+2*pi*i*ij/N), unscaled. The +1 direction
// matches the forward transform used throughout (see grid.hpp).

#include <complex>
#include <cstddef>
#include <memory>
#include <mutex>
#include <numbers>
#include <stdexcept>
#include <vector>

namespace shiftlab {

using cplx = std::complex<double>;

namespace detail {

inline bool is_pow2(std::size_t n) { return n != 0 && (n & (n - 1)) == 0; }

// Process-wide twiddle table w[k] = exp(+2*pi*i*k/base), k < base/2.
// A table built for `base` serves any smaller power of two by stride
// indexing, so only the largest size seen is ever kept.
inline std::shared_ptr<const std::vector<cplx>> twiddles_for(std::size_t n)
{
    static std::mutex mu;
    static std::shared_ptr<const std::vector<cplx>> table;
    static std::size_t base = 0;

    std::lock_guard<std::mutex> lock(mu);
    if (base < n) {
        auto t = std::make_shared<std::vector<cplx>>(n / 2);
        const double step = 2.0 * std::numbers::pi / static_cast<double>(n);
        for (std::size_t k = 0; k < n / 2; ++k)
            (*t)[k] = std::polar(1.0, step * static_cast<double>(k));
        table = std::move(t);
        base = n;
    }
    return table;
}

inline void fft_inplace(std::vector<cplx>& a, int sign)
{
    const std::size_t n = a.size();
    if (n <= 1) return;
    if (!is_pow2(n)) throw std::invalid_argument("fft: size must be a power of two");

    const auto tw = twiddles_for(n);
    const std::size_t base = 2 * tw->size();

    for (std::size_t i = 1, j = 0; i < n; ++i) {
        std::size_t bit = n >> 1;
        for (; j & bit; bit >>= 1) j ^= bit;
        j ^= bit;
        if (i < j) std::swap(a[i], a[j]);
    }

    const auto& w = *tw;
    for (std::size_t len = 2; len <= n; len <<= 1) {
        const std::size_t half = len >> 1;
        const std::size_t stride = base / len;
        for (std::size_t i = 0; i < n; i += len) {
            for (std::size_t k = 0; k < half; ++k) {
                cplx ww = w[k * stride];
                if (sign < 0) ww = std::conj(ww);
                const cplx u = a[i + k];
                const cplx v = a[i + k + half] * ww;
                a[i + k] = u + v;
                a[i + k + half] = u - v;
            }
        }
    }
}

// Kahan-compensated sum; the big grids make naive accumulation visible.
class KahanSum {
public:
    void add(double x)
    {
        const double y = x - c_;
        const double t = s_ + y;
        c_ = (t - s_) - y;
        s_ = t;
    }
    double value() const { return s_; }

private:
    double s_ = 0.0;
    double c_ = 0.0;
};

} // namespace detail
} // namespace shiftlab
