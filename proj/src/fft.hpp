#pragma once

#include <complex>
#include <vector>

namespace nilconv::detail {

/// Smallest n' >= n whose prime factors are 2, 3, 5, 7.
int nice_fft_size(int n);

/// In-place multidimensional complex DFT (row-major dims). Unnormalized.
/// Plans are created with FFTW_ESTIMATE, so results are reproducible.
void fft_inplace(std::vector<std::complex<double>>& data, const std::vector<int>& dims, bool inverse);

}  // namespace nilconv::detail
