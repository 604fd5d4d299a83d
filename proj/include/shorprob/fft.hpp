#pragma once

#include <bit>
#include <cmath>
#include <complex>
#include <cstddef>
#include <numbers>
#include <span>
#include <stdexcept>
#include <utility>
#include <vector>

namespace shorprob {

using cplx = std::complex<double>;

enum class TransformSign { Forward = -1, Inverse = +1 };

namespace detail {

/// exp(sign * 2 pi i k / size), evaluated directly from k mod size rather
/// than by a recurrence.
inline cplx unit_root(std::size_t k, std::size_t size, TransformSign sign) {
  k %= size;
  const double angle = 2.0 * std::numbers::pi * static_cast<double>(k) / static_cast<double>(size);
  const double s = static_cast<int>(sign) * std::sin(angle);
  return {std::cos(angle), s};
}

}  // namespace detail

/// In-place iterative radix-2 transform, scaled by 1/sqrt(size) so that it
/// is unitary.
inline void fft_inplace(std::span<cplx> data, TransformSign sign) {
  const std::size_t size = data.size();
  if (size == 0 || !std::has_single_bit(size)) {
    throw std::invalid_argument("fft length must be a power of two");
  }
  for (std::size_t i = 1, j = 0; i < size; ++i) {
    std::size_t bit = size >> 1;
    for (; j & bit; bit >>= 1) j ^= bit;
    j ^= bit;
    if (i < j) std::swap(data[i], data[j]);
  }

  std::vector<cplx> twiddle(size / 2);
  for (std::size_t k = 0; k < twiddle.size(); ++k) twiddle[k] = detail::unit_root(k, size, sign);

  for (std::size_t len = 2; len <= size; len <<= 1) {
    const std::size_t half = len / 2;
    const std::size_t stride = size / len;
    for (std::size_t start = 0; start < size; start += len) {
      for (std::size_t k = 0; k < half; ++k) {
        const cplx u = data[start + k];
        const cplx v = data[start + k + half] * twiddle[k * stride];
        data[start + k] = u + v;
        data[start + k + half] = u - v;
      }
    }
  }
  const double norm = 1.0 / std::sqrt(static_cast<double>(size));
  for (auto& x : data) x *= norm;
}

/// O(size^2) unitary DFT, kept as an independent check on fft_inplace.
inline std::vector<cplx> naive_dft(std::span<const cplx> input, TransformSign sign) {
  const std::size_t size = input.size();
  std::vector<cplx> out(size);
  const double norm = 1.0 / std::sqrt(static_cast<double>(size));
  for (std::size_t y = 0; y < size; ++y) {
    cplx acc{0.0, 0.0};
    for (std::size_t x = 0; x < size; ++x) {
      if (input[x] == cplx{}) continue;
      acc += input[x] * detail::unit_root((x * y) % size, size, sign);
    }
    out[y] = acc * norm;
  }
  return out;
}

}  // namespace shorprob
