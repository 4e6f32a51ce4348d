#pragma once

#include <complex>
#include <cstddef>
#include <span>
#include <vector>

namespace beatscope::detail {

enum class FftDirection { Forward, Backward };  // exp(-i...) / exp(+i...), unnormalized

/// Zero-pads (or truncates) `input` to n points and transforms it.
std::vector<std::complex<double>> fft(std::span<const std::complex<double>> input, std::size_t n, FftDirection dir);

/// In-place transform of every line of a row-major rows x cols array along
/// `axis` (0: down columns, 1: along rows).
void fft_axis(std::vector<std::complex<double>>& data, std::size_t rows, std::size_t cols, int axis,
              FftDirection dir);

}  // namespace beatscope::detail
