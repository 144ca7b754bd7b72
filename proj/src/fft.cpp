#include "rscat/fft.hpp"

#include <fftw3.h>

#include <map>
#include <mutex>
#include <numbers>
#include <tuple>

namespace rscat {

namespace {

// FFTW planning is not thread-safe; execution with new-array execute is.
class PlanCache {
 public:
  static PlanCache& instance() {
    static PlanCache cache;
    return cache;
  }

  fftw_plan get(const Dims& dims, bool forward) {
    const Key key{dims[0], dims[1], dims[2], forward};
    std::lock_guard lock(mutex_);
    if (auto it = plans_.find(key); it != plans_.end()) return it->second;
    const std::size_t n = dims[0] * dims[1] * dims[2];
    auto* buf = fftw_alloc_complex(n);
    fftw_plan plan = fftw_plan_dft_3d(static_cast<int>(dims[0]), static_cast<int>(dims[1]),
                                      static_cast<int>(dims[2]), buf, buf,
                                      forward ? FFTW_FORWARD : FFTW_BACKWARD,
                                      FFTW_ESTIMATE | FFTW_UNALIGNED);
    fftw_free(buf);
    plans_.emplace(key, plan);
    return plan;
  }

  PlanCache(const PlanCache&) = delete;
  PlanCache& operator=(const PlanCache&) = delete;

 private:
  PlanCache() = default;
  ~PlanCache() {
    for (auto& [key, plan] : plans_) fftw_destroy_plan(plan);
  }

  using Key = std::tuple<std::size_t, std::size_t, std::size_t, bool>;
  std::mutex mutex_;
  std::map<Key, fftw_plan> plans_;
};

}  // namespace

namespace detail {

void dft_inplace(std::vector<Complex>& data, const Dims& dims, bool forward) {
  fftw_plan plan = PlanCache::instance().get(dims, forward);
  auto* ptr = reinterpret_cast<fftw_complex*>(data.data());
  fftw_execute_dft(plan, ptr, ptr);
}

}  // namespace detail

double axis_frequency(std::size_t bin, std::size_t n, double spacing) noexcept {
  const auto signed_bin = bin < n / 2 ? static_cast<double>(bin)
                                      : static_cast<double>(bin) - static_cast<double>(n);
  return 2.0 * std::numbers::pi * signed_bin / (static_cast<double>(n) * spacing);
}

std::vector<Vec3> frequency_lattice(const GridSpec& grid) {
  const auto& d = grid.dims();
  const double h = grid.spacing();
  std::vector<Vec3> out;
  out.reserve(grid.size());
  for (std::size_t i = 0; i < d[0]; ++i) {
    const double xi = axis_frequency(i, d[0], h);
    for (std::size_t j = 0; j < d[1]; ++j) {
      const double eta = axis_frequency(j, d[1], h);
      for (std::size_t l = 0; l < d[2]; ++l) out.push_back({xi, eta, axis_frequency(l, d[2], h)});
    }
  }
  return out;
}

namespace {

ComplexField transform(const ComplexField& in, bool forward) {
  std::vector<Complex> data(in.values().begin(), in.values().end());
  detail::dft_inplace(data, in.grid().dims(), forward);
  const double scale = 1.0 / std::sqrt(static_cast<double>(in.size()));
  for (auto& v : data) v *= scale;
  return ComplexField(in.grid(), std::move(data));
}

}  // namespace

ComplexField fft_forward(const ComplexField& field) { return transform(field, true); }
ComplexField fft_inverse(const ComplexField& spectrum) { return transform(spectrum, false); }

}  // namespace rscat
