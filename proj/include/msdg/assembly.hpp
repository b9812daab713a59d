#ifndef MSDG_ASSEMBLY_HPP
#define MSDG_ASSEMBLY_HPP

#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "msdg/basis.hpp"
#include "msdg/coefficient.hpp"
#include "msdg/mesh.hpp"
#include "msdg/trace.hpp"

namespace msdg {

/// Everything needed to discretize one problem instance.
struct SolveConfig {
  MeshPartition mesh;
  SpaceKind space;
  double eps = 1.0;
  CoefficientField f;
  TraceParams traces;

  double quad_ppw = 10.0;          ///< quadrature points per wavelength
  int quad_extra = 0;              ///< extra nodes per element (desk checks)
  double incoming_amplitude = 1.0; ///< scales the boundary-data constants
};

enum class Var { u = 0, q = 1 };

/// Global unknown ordering: element by element, u-coefficients first, then
/// q-coefficients.  Rows follow the same layout (first weak equation on the
/// u slots, second on the q slots).
class DofLayout {
public:
  DofLayout(int n_elements, int local_dim)
      : n_elements_(n_elements), dim_(local_dim) {}

  int n_elements() const { return n_elements_; }
  int local_dim() const { return dim_; }
  int size() const { return 2 * dim_ * n_elements_; }

  /// Global index of coefficient m (0-based) of variable var on element j
  /// (1-based).
  int index(int j, Var var, int m) const {
    return 2 * dim_ * (j - 1) + static_cast<int>(var) * dim_ + m;
  }

private:
  int n_elements_;
  int dim_;
};

struct Triplet {
  int row;
  int col;
  Complex value;
};

/// Square sparse complex system A x = rhs in compressed-row form.
/// Entries with equal (row, col) are summed; exact zeros are dropped.
class GlobalSystem {
public:
  GlobalSystem(int dimension, std::vector<Triplet> entries,
               std::vector<Complex> rhs,
               std::optional<DofLayout> layout = std::nullopt);

  int dimension() const { return n_; }
  std::span<const std::int64_t> row_offsets() const { return row_offsets_; }
  std::span<const int> cols() const { return cols_; }
  std::span<const Complex> values() const { return values_; }
  const std::vector<Complex>& rhs() const { return rhs_; }
  const std::optional<DofLayout>& layout() const { return layout_; }

  /// A(i, j), zero if not stored.
  Complex entry(int row, int col) const;

  std::int64_t nonzeros() const {
    return static_cast<std::int64_t>(values_.size());
  }
  int lower_bandwidth() const { return kl_; }  ///< max over entries of i - j
  int upper_bandwidth() const { return ku_; }  ///< max over entries of j - i

  /// Induced 1-norm (max absolute column sum).
  double norm1() const;

private:
  int n_;
  std::vector<std::int64_t> row_offsets_;
  std::vector<int> cols_;
  std::vector<Complex> values_;
  std::vector<Complex> rhs_;
  std::optional<DofLayout> layout_;
  int kl_ = 0;
  int ku_ = 0;
};

struct MatrixStats {
  int dimension;
  std::int64_t nonzeros;
  int bandwidth;  ///< max |i - j| over stored entries
};

MatrixStats matrix_stats(const GlobalSystem& sys);

/// Discretize the mixed-form problem: for each element the two weak
/// equations tested against every local basis member, with penalty traces at
/// interior interfaces and the impedance traces at the two boundary points.
/// The additive boundary-trace constants go to the right-hand side.
GlobalSystem assemble_global(const SolveConfig& cfg);

}  // namespace msdg

#endif
