#pragma once

#include <complex>
#include <vector>

namespace pinnosc {

/// In-place iterative radix-2 FFT; size must be a power of two. The inverse
/// transform includes the 1/N factor. Deterministic bit-for-bit for a given
/// binary, which the reference-grid cache relies on.
void fft(std::vector<std::complex<double>>& a, bool inverse);

bool is_power_of_two(std::size_t n);

}  // namespace pinnosc
