#include "msdg/linsolve.hpp"

#include <cfloat>
#include <cmath>
#include <limits>
#include <mutex>

#include <complex>
#define LAPACK_COMPLEX_CPP
#include <lapacke.h>

// Keep BLAS sequential so factorizations are bitwise reproducible and sweep
// workers do not oversubscribe the machine.
extern "C" void openblas_set_num_threads(int) __attribute__((weak));

namespace msdg {

namespace {

void ensure_sequential_blas() {
  static std::once_flag flag;
  std::call_once(flag, [] {
    if (openblas_set_num_threads) openblas_set_num_threads(1);
  });
}

}  // namespace

std::string cond_method_label(CondMethod m) {
  return m == CondMethod::dense_2norm ? "dense_2norm" : "onenorm_estimate";
}

CondMethod parse_cond_method(const std::string& label) {
  if (label == "dense_2norm") return CondMethod::dense_2norm;
  if (label == "onenorm_estimate") return CondMethod::onenorm_estimate;
  throw std::invalid_argument("unknown condition method: " + label);
}

SingularMatrixError::SingularMatrixError(int pivot_index,
                                         double pivot_magnitude)
    : std::runtime_error("numerically singular system: pivot " +
                         std::to_string(pivot_index) + " has magnitude " +
                         std::to_string(pivot_magnitude)),
      pivot_index_(pivot_index),
      pivot_magnitude_(pivot_magnitude) {}

struct BandedLU::Impl {
  int n = 0;
  int kl = 0;
  int ku = 0;
  int ldab = 0;
  double anorm = 0.0;
  std::vector<Complex> ab;  // factored band, column major
  std::vector<lapack_int> ipiv;
  bool exact_singular = false;
  bool near_singular = false;
  int suspect = -1;
  double suspect_mag = 0.0;
};

BandedLU::BandedLU(const GlobalSystem& sys) : impl_(std::make_unique<Impl>()) {
  ensure_sequential_blas();
  Impl& im = *impl_;
  im.n = sys.dimension();
  im.kl = sys.lower_bandwidth();
  im.ku = sys.upper_bandwidth();
  im.ldab = 2 * im.kl + im.ku + 1;
  im.anorm = sys.norm1();
  im.ab.assign(static_cast<std::size_t>(im.ldab) * im.n, Complex(0.0));
  im.ipiv.assign(im.n, 0);

  const auto offsets = sys.row_offsets();
  const auto cols = sys.cols();
  const auto vals = sys.values();
  for (int r = 0; r < im.n; ++r)
    for (std::int64_t i = offsets[r]; i < offsets[r + 1]; ++i) {
      const int c = cols[i];
      im.ab[static_cast<std::size_t>(c) * im.ldab + (im.kl + im.ku + r - c)] =
          vals[i];
    }

  const lapack_int info =
      LAPACKE_zgbtrf(LAPACK_COL_MAJOR, im.n, im.n, im.kl, im.ku, im.ab.data(),
                     im.ldab, im.ipiv.data());
  if (info < 0)
    throw std::runtime_error("zgbtrf: illegal argument " +
                             std::to_string(-info));
  if (info > 0) {
    im.exact_singular = true;
    im.near_singular = true;
    im.suspect = static_cast<int>(info) - 1;
    im.suspect_mag = 0.0;
    return;
  }

  // pivot scan: |u_jj| <= n * eps * ||A||_1 counts as numerically singular
  const double tol = im.n * DBL_EPSILON * im.anorm;
  double worst = std::numeric_limits<double>::infinity();
  int worst_at = -1;
  for (int j = 0; j < im.n; ++j) {
    const double mag =
        std::abs(im.ab[static_cast<std::size_t>(j) * im.ldab + im.kl + im.ku]);
    if (mag < worst) {
      worst = mag;
      worst_at = j;
    }
  }
  if (worst <= tol) {
    im.near_singular = true;
    im.suspect = worst_at;
    im.suspect_mag = worst;
  }
}

BandedLU::~BandedLU() = default;
BandedLU::BandedLU(BandedLU&&) noexcept = default;
BandedLU& BandedLU::operator=(BandedLU&&) noexcept = default;

int BandedLU::dimension() const { return impl_->n; }
double BandedLU::norm1() const { return impl_->anorm; }
bool BandedLU::exactly_singular() const { return impl_->exact_singular; }
bool BandedLU::near_singular() const { return impl_->near_singular; }
int BandedLU::suspect_pivot() const { return impl_->suspect; }
double BandedLU::suspect_pivot_magnitude() const {
  return impl_->suspect_mag;
}

std::vector<Complex> BandedLU::solve(std::span<const Complex> rhs) const {
  const Impl& im = *impl_;
  if (im.exact_singular)
    throw SingularMatrixError(im.suspect, im.suspect_mag);
  if (static_cast<int>(rhs.size()) != im.n)
    throw std::invalid_argument("rhs length does not match dimension");
  std::vector<Complex> x(rhs.begin(), rhs.end());
  const lapack_int info = LAPACKE_zgbtrs(
      LAPACK_COL_MAJOR, 'N', im.n, im.kl, im.ku, 1,
      const_cast<Complex*>(im.ab.data()), im.ldab,
      const_cast<lapack_int*>(im.ipiv.data()), x.data(), im.n);
  if (info != 0)
    throw std::runtime_error("zgbtrs failed: " + std::to_string(info));
  return x;
}

double BandedLU::condition_onenorm() const {
  const Impl& im = *impl_;
  if (im.exact_singular) return std::numeric_limits<double>::infinity();
  double rcond = 0.0;
  const lapack_int info = LAPACKE_zgbcon(
      LAPACK_COL_MAJOR, '1', im.n, im.kl, im.ku,
      const_cast<Complex*>(im.ab.data()), im.ldab,
      const_cast<lapack_int*>(im.ipiv.data()), im.anorm, &rcond);
  if (info != 0)
    throw std::runtime_error("zgbcon failed: " + std::to_string(info));
  if (rcond == 0.0) return std::numeric_limits<double>::infinity();
  return 1.0 / rcond;
}

std::vector<Complex> solve(const GlobalSystem& sys) {
  BandedLU lu(sys);
  if (lu.near_singular())
    throw SingularMatrixError(lu.suspect_pivot(),
                              lu.suspect_pivot_magnitude());
  return lu.solve(sys.rhs());
}

namespace {

ConditionReport dense_2norm_condition(const GlobalSystem& sys) {
  ensure_sequential_blas();
  const int n = sys.dimension();
  if (n > 4000)
    throw std::invalid_argument(
        "dense_2norm condition is limited to dimension <= 4000");
  std::vector<Complex> dense(static_cast<std::size_t>(n) * n, Complex(0.0));
  const auto offsets = sys.row_offsets();
  const auto cols = sys.cols();
  const auto vals = sys.values();
  for (int r = 0; r < n; ++r)
    for (std::int64_t i = offsets[r]; i < offsets[r + 1]; ++i)
      dense[static_cast<std::size_t>(cols[i]) * n + r] = vals[i];

  std::vector<double> sigma(n, 0.0);
  lapack_int info =
      LAPACKE_zgesdd(LAPACK_COL_MAJOR, 'N', n, n, dense.data(), n,
                     sigma.data(), nullptr, 1, nullptr, 1);
  if (info != 0) {
    // divide-and-conquer occasionally fails to converge; retry with the
    // QR-based driver
    std::fill(dense.begin(), dense.end(), Complex(0.0));
    for (int r = 0; r < n; ++r)
      for (std::int64_t i = offsets[r]; i < offsets[r + 1]; ++i)
        dense[static_cast<std::size_t>(cols[i]) * n + r] = vals[i];
    std::vector<double> superb(std::max(1, n - 1));
    info = LAPACKE_zgesvd(LAPACK_COL_MAJOR, 'N', 'N', n, n, dense.data(), n,
                          sigma.data(), nullptr, 1, nullptr, 1,
                          superb.data());
    if (info != 0)
      throw std::runtime_error("SVD failed: " + std::to_string(info));
  }

  ConditionReport report;
  report.method = CondMethod::dense_2norm;
  report.dimension = n;
  if (sigma[n - 1] == 0.0) {
    report.value = std::numeric_limits<double>::infinity();
    report.singular = true;
  } else {
    report.value = sigma[0] / sigma[n - 1];
  }
  return report;
}

}  // namespace

ConditionReport condition_estimate(const GlobalSystem& sys,
                                   CondMethod method) {
  if (method == CondMethod::dense_2norm) return dense_2norm_condition(sys);
  BandedLU lu(sys);
  ConditionReport report;
  report.method = CondMethod::onenorm_estimate;
  report.dimension = sys.dimension();
  report.value = lu.condition_onenorm();
  report.singular = !std::isfinite(report.value);
  return report;
}

}  // namespace msdg
