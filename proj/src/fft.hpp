#pragma once

#include <complex>
#include <vector>

namespace seo::detail {

// In-place forward DFT (FFTW sign -1), unnormalised. Thread-safe: plans are
// created once per length under a lock and executed on aligned scratch.
void fft_forward(std::vector<std::complex<double>>& data);

}  // namespace seo::detail
