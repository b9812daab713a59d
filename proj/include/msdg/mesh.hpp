#ifndef MSDG_MESH_HPP
#define MSDG_MESH_HPP

#include <vector>

namespace msdg {

/// 1D partition a = x_{1/2} < x_{3/2} < ... < x_{N+1/2} = b.
///
/// Element j (1-based, j = 1..N) is the open interval
/// (x_{j-1/2}, x_{j+1/2}).  Immutable after construction.
class MeshPartition {
public:
  /// N equally spaced elements on [a, b].  Requires a < b, n_elements >= 1.
  static MeshPartition uniform(double a, double b, int n_elements);

  /// General partition from strictly increasing breakpoints (>= 2 entries).
  explicit MeshPartition(std::vector<double> breakpoints);

  double a() const { return breakpoints_.front(); }
  double b() const { return breakpoints_.back(); }
  int num_elements() const { return static_cast<int>(breakpoints_.size()) - 1; }

  /// Largest element width h = max_j (x_{j+1/2} - x_{j-1/2}).
  double h() const;

  double left(int j) const;      ///< x_{j-1/2}
  double right(int j) const;     ///< x_{j+1/2}
  double width(int j) const;
  double midpoint(int j) const;  ///< x_j = (x_{j-1/2} + x_{j+1/2}) / 2

  /// Element whose closure contains x, using the left-limit convention at
  /// interior breakpoints (x_{j+1/2} maps to element j).  Requires x in [a,b].
  int element_containing(double x) const;

  const std::vector<double>& breakpoints() const { return breakpoints_; }

private:
  std::vector<double> breakpoints_;
  void check_index(int j) const;
};

}  // namespace msdg

#endif
