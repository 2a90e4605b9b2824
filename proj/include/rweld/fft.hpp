#pragma once

#include <complex>
#include <cstddef>
#include <span>

namespace rweld::fft {

using cplx = std::complex<double>;

enum class Direction { forward, backward };

/// Unnormalized in-place 1-D complex transform of length n.
/// forward uses e^{-2 pi i jk/n}, backward e^{+2 pi i jk/n}.
void transform_1d(std::span<cplx> data, Direction dir);

/// Unnormalized in-place 2-D complex transform of an n x n row-major array.
void transform_2d(std::span<cplx> data, std::size_t n, Direction dir);

bool is_power_of_two(std::size_t n) noexcept;

}  // namespace rweld::fft
