#include "fft.hpp"

#include <fftw3.h>

#include <cstring>
#include <map>
#include <mutex>

#include "nilconv/error.hpp"

namespace nilconv::detail {

namespace {

struct PlanKey {
  std::vector<int> dims;
  bool inverse;
  bool operator<(const PlanKey& o) const { return std::tie(dims, inverse) < std::tie(o.dims, o.inverse); }
};

std::mutex g_plan_mutex;
std::map<PlanKey, fftw_plan>& plans() {
  static std::map<PlanKey, fftw_plan> p;
  return p;
}

}  // namespace

int nice_fft_size(int n) {
  for (int m = std::max(n, 1);; ++m) {
    int r = m;
    for (int p : {2, 3, 5, 7})
      while (r % p == 0) r /= p;
    if (r == 1) return m;
  }
}

void fft_inplace(std::vector<std::complex<double>>& data, const std::vector<int>& dims, bool inverse) {
  std::size_t total = 1;
  for (int d : dims) total *= static_cast<std::size_t>(d);
  require(total == data.size(), "fft: size mismatch");
  fftw_complex* buf = fftw_alloc_complex(total);
  std::memcpy(static_cast<void*>(buf), static_cast<const void*>(data.data()), total * sizeof(fftw_complex));
  fftw_plan plan;
  {
    std::lock_guard<std::mutex> lock(g_plan_mutex);
    auto& cache = plans();
    PlanKey key{dims, inverse};
    auto it = cache.find(key);
    if (it == cache.end()) {
      fftw_complex* scratch = fftw_alloc_complex(total);
      plan = fftw_plan_dft(static_cast<int>(dims.size()), dims.data(), scratch, scratch,
                           inverse ? FFTW_BACKWARD : FFTW_FORWARD, FFTW_ESTIMATE);
      fftw_free(scratch);
      cache.emplace(key, plan);
    } else {
      plan = it->second;
    }
  }
  fftw_execute_dft(plan, buf, buf);
  std::memcpy(static_cast<void*>(data.data()), static_cast<const void*>(buf), total * sizeof(fftw_complex));
  fftw_free(buf);
}

}  // namespace nilconv::detail
