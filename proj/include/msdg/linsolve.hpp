#ifndef MSDG_LINSOLVE_HPP
#define MSDG_LINSOLVE_HPP

#include <memory>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "msdg/assembly.hpp"

namespace msdg {

enum class CondMethod { dense_2norm, onenorm_estimate };

std::string cond_method_label(CondMethod m);
CondMethod parse_cond_method(const std::string& label);

struct ConditionReport {
  double value = 0.0;  ///< >= 1; +inf when the factorization is singular
  CondMethod method = CondMethod::onenorm_estimate;
  int dimension = 0;
  bool singular = false;
};

/// Thrown when a factorization meets a zero or sub-tolerance pivot.
class SingularMatrixError : public std::runtime_error {
public:
  SingularMatrixError(int pivot_index, double pivot_magnitude);
  int pivot_index() const { return pivot_index_; }
  double pivot_magnitude() const { return pivot_magnitude_; }

private:
  int pivot_index_;
  double pivot_magnitude_;
};

/// LU factorization with partial pivoting in banded storage.  The pivot
/// tolerance |u_ii| <= dimension * machine_eps * norm1(A) classifies the
/// factorization as near-singular; an exactly zero pivot as singular.
class BandedLU {
public:
  explicit BandedLU(const GlobalSystem& sys);
  ~BandedLU();
  BandedLU(BandedLU&&) noexcept;
  BandedLU& operator=(BandedLU&&) noexcept;
  BandedLU(const BandedLU&) = delete;
  BandedLU& operator=(const BandedLU&) = delete;

  int dimension() const;
  double norm1() const;  ///< 1-norm of the original matrix

  bool exactly_singular() const;
  bool near_singular() const;          ///< includes exactly singular
  int suspect_pivot() const;           ///< 0-based index, -1 if none
  double suspect_pivot_magnitude() const;

  /// Back-substitution; throws SingularMatrixError when exactly singular.
  std::vector<Complex> solve(std::span<const Complex> rhs) const;

  /// norm1(A) * estimate(norm1(A^-1)) from the factors; +inf if singular.
  double condition_onenorm() const;

private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

/// Direct solve of the assembled system.  Throws SingularMatrixError on a
/// zero or sub-tolerance pivot; resonance cases surface here instead of
/// returning garbage silently.
std::vector<Complex> solve(const GlobalSystem& sys);

/// Condition number of the system matrix.  dense_2norm runs a full SVD and
/// is limited to dimension <= 4000; onenorm_estimate works at any size.
ConditionReport condition_estimate(const GlobalSystem& sys, CondMethod method);

}  // namespace msdg

#endif
