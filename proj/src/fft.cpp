#include "fft.hpp"

#include <fftw3.h>

#include <algorithm>
#include <map>
#include <memory>
#include <mutex>

namespace seo::detail {

namespace {

struct FftwBuffer {
    explicit FftwBuffer(std::size_t n) : ptr(fftw_alloc_complex(n)) {}
    ~FftwBuffer() { fftw_free(ptr); }
    FftwBuffer(const FftwBuffer&) = delete;
    FftwBuffer& operator=(const FftwBuffer&) = delete;
    fftw_complex* ptr;
};

std::mutex plan_mutex;
std::map<std::size_t, fftw_plan> plans;

fftw_plan plan_for(std::size_t n) {
    std::lock_guard lock(plan_mutex);
    auto it = plans.find(n);
    if (it != plans.end()) return it->second;
    // ESTIMATE keeps the chosen algorithm, and hence the bits, reproducible.
    FftwBuffer scratch(n);
    fftw_plan p = fftw_plan_dft_1d(static_cast<int>(n), scratch.ptr, scratch.ptr, FFTW_FORWARD, FFTW_ESTIMATE);
    plans.emplace(n, p);
    return p;
}

}  // namespace

void fft_forward(std::vector<std::complex<double>>& data) {
    const std::size_t n = data.size();
    if (n == 0) return;
    fftw_plan p = plan_for(n);
    FftwBuffer buf(n);
    auto* z = reinterpret_cast<std::complex<double>*>(buf.ptr);
    std::copy(data.begin(), data.end(), z);
    fftw_execute_dft(p, buf.ptr, buf.ptr);
    std::copy(z, z + n, data.begin());
}

}  // namespace seo::detail
