#include "mfvl/fft.hpp"

#include <fftw3.h>

#include <map>
#include <mutex>
#include <tuple>

#include "mfvl/errors.hpp"

namespace mfvl {

namespace {

using PlanKey = std::tuple<std::vector<int>, std::vector<int>, int>;

struct PlanCache {
  std::mutex mutex;
  std::map<PlanKey, fftw_plan> plans;

  ~PlanCache() {
    for (auto& [key, plan] : plans) fftw_destroy_plan(plan);
  }
};

PlanCache& cache() {
  static PlanCache c;
  return c;
}

fftw_plan get_plan(std::span<cplx> data, const std::vector<int>& dims, const std::vector<int>& axes,
                   int sign) {
  PlanKey key{dims, axes, sign};
  auto& c = cache();
  std::lock_guard lock(c.mutex);
  if (auto it = c.plans.find(key); it != c.plans.end()) return it->second;

  const int rank = static_cast<int>(dims.size());
  std::vector<std::ptrdiff_t> stride(rank, 1);
  for (int a = rank - 2; a >= 0; --a) stride[a] = stride[a + 1] * dims[a + 1];

  std::vector<bool> transformed(rank, false);
  for (int a : axes) transformed[a] = true;
  std::vector<fftw_iodim64> tdims;
  std::vector<fftw_iodim64> hdims;
  for (int a = 0; a < rank; ++a) {
    fftw_iodim64 io{dims[a], stride[a], stride[a]};
    (transformed[a] ? tdims : hdims).push_back(io);
  }
  auto* ptr = reinterpret_cast<fftw_complex*>(data.data());
  // FFTW_ESTIMATE never touches the arrays while planning.
  fftw_plan plan = fftw_plan_guru64_dft(static_cast<int>(tdims.size()), tdims.data(),
                                        static_cast<int>(hdims.size()), hdims.data(), ptr, ptr, sign,
                                        FFTW_ESTIMATE | FFTW_UNALIGNED);
  if (!plan) throw NumericalError("FFTW failed to create a plan");
  c.plans.emplace(std::move(key), plan);
  return plan;
}

}  // namespace

void fft_axes(std::span<cplx> data, std::span<const int> dims, std::span<const int> axes,
              FftDirection dir) {
  std::size_t total = 1;
  for (int n : dims) {
    require(n >= 1, "fft dimension must be positive");
    total *= static_cast<std::size_t>(n);
  }
  require(data.size() == total, "fft buffer size does not match its shape");
  std::vector<int> d(dims.begin(), dims.end());
  std::vector<int> ax(axes.begin(), axes.end());
  for (int a : ax) require(a >= 0 && a < static_cast<int>(d.size()), "fft axis out of range");
  if (ax.empty() || total == 0) return;
  const int sign = dir == FftDirection::forward ? FFTW_FORWARD : FFTW_BACKWARD;
  fftw_plan plan = get_plan(data, d, ax, sign);
  auto* ptr = reinterpret_cast<fftw_complex*>(data.data());
  fftw_execute_dft(plan, ptr, ptr);
}

void fft_forward(std::span<cplx> data, const GridSpec& grid) {
  std::vector<int> dims(grid.dim(), grid.points());
  std::vector<int> axes(grid.dim());
  for (int a = 0; a < grid.dim(); ++a) axes[a] = a;
  fft_axes(data, dims, axes, FftDirection::forward);
}

void fft_backward(std::span<cplx> data, const GridSpec& grid) {
  std::vector<int> dims(grid.dim(), grid.points());
  std::vector<int> axes(grid.dim());
  for (int a = 0; a < grid.dim(); ++a) axes[a] = a;
  fft_axes(data, dims, axes, FftDirection::backward);
  const double scale = 1.0 / static_cast<double>(grid.size());
  for (auto& z : data) z *= scale;
}

ComplexField to_complex(const Field& f) {
  ComplexField out(f.grid);
  for (std::size_t i = 0; i < f.size(); ++i) out[i] = f[i];
  return out;
}

Field real_part(const ComplexField& f) {
  Field out(f.grid);
  for (std::size_t i = 0; i < f.size(); ++i) out[i] = f[i].real();
  return out;
}

void fft_clear_plans() {
  auto& c = cache();
  std::lock_guard lock(c.mutex);
  for (auto& [key, plan] : c.plans) fftw_destroy_plan(plan);
  c.plans.clear();
}

}  // namespace mfvl
