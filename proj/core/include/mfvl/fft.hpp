#pragma once

#include <span>
#include <vector>

#include "mfvl/grid.hpp"

namespace mfvl {

enum class FftDirection { forward, backward };

/// In-place unnormalized DFT of a row-major tensor of shape `dims` along the
/// listed `axes`. Forward uses e^{-2 pi i jk/n}; backward uses e^{+...}.
/// Plans are cached and the planner is guarded by a mutex, so concurrent
/// calls are safe.
void fft_axes(std::span<cplx> data, std::span<const int> dims, std::span<const int> axes,
              FftDirection dir);

/// Full forward transform of a field (unnormalized).
void fft_forward(std::span<cplx> data, const GridSpec& grid);
/// Full backward transform including the 1/n^d normalization.
void fft_backward(std::span<cplx> data, const GridSpec& grid);

ComplexField to_complex(const Field& f);
/// Real part; the caller is responsible for checking imaginary residue.
Field real_part(const ComplexField& f);

/// Drop all cached plans (mainly for tests and benchmarks).
void fft_clear_plans();

}  // namespace mfvl
