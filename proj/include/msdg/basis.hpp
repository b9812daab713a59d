#ifndef MSDG_BASIS_HPP
#define MSDG_BASIS_HPP

#include <complex>
#include <string>
#include <vector>

#include "msdg/coefficient.hpp"
#include "msdg/mesh.hpp"

namespace msdg {

using Complex = std::complex<double>;

enum class SpaceFamily {
  exponential_poly,   ///< E^p: e^{+-i k (x-x_j)} plus centered monomials
  exponential_pairs,  ///< T^{2p-1}: e^{+-i m k (x-x_j)}, m = 1..p
  polynomial,         ///< P^k: Legendre polynomials up to degree k
};

/// Local approximation space selector: family plus order (p for the
/// exponential families, polynomial degree k for P^k).
struct SpaceKind {
  SpaceFamily family = SpaceFamily::exponential_poly;
  int order = 1;

  /// Local dimension: E^1 -> 2, E^p -> p+1 (p >= 2), T^{2p-1} -> 2p,
  /// P^k -> k+1.
  int local_dim() const;

  /// Labels as used on the command line and in CSV output: E1, E2, E3,
  /// T1, T3, T5, P3, ...  T labels carry 2p-1.
  std::string label() const;
  static SpaceKind parse(const std::string& label);

  bool operator==(const SpaceKind&) const = default;
};

/// Local wave number k_j = sqrt(f(x_j)) / eps.  Rejects f(x_j) <= 0 and
/// eps <= 0.
double wave_number(const CoefficientField& f, double x_j, double eps);

/// Basis of one element: evaluates the local functions and their first
/// derivatives.  Exponential members are e^{i s k (x - x_j)}; monomial
/// members of E^p are ((x - x_j) / half_width)^n so that coarse and fine
/// elements are equally well conditioned.  Immutable value type.
class ElementBasis {
public:
  ElementBasis(SpaceKind kind, double wave_number, double center,
               double half_width);

  const SpaceKind& kind() const { return kind_; }
  int dim() const { return dim_; }
  double wave_number() const { return k_; }
  double center() const { return center_; }
  double half_width() const { return half_width_; }

  /// Value of member m (0-based, m < dim) at x.
  Complex eval(int m, double x) const;
  /// First derivative of member m at x.
  Complex deriv(int m, double x) const;

private:
  SpaceKind kind_;
  double k_;
  double center_;
  double half_width_;
  int dim_;
  void check_member(int m) const;
};

/// Basis for element j of the mesh, with k_j from f at the element midpoint.
ElementBasis make_element_basis(SpaceKind kind, const CoefficientField& f,
                                const MeshPartition& mesh, int j, double eps);

/// Nodes and positive weights; weights sum to the covered interval length.
struct QuadratureRule {
  std::vector<double> nodes;
  std::vector<double> weights;
  int size() const { return static_cast<int>(nodes.size()); }
};

/// Gauss-Legendre rule with n nodes on [-1, 1].  Rules are cached; the
/// returned reference stays valid for the program lifetime.
const QuadratureRule& gauss_legendre(int n);

/// Node count for oscillation-aware integration on one element:
/// max(2*dim + 2, ceil(ppw * p * k * width / (2pi))) + extra.
int quad_node_count(const SpaceKind& kind, double wave_number, double width,
                    double points_per_wavelength = 10.0, int extra = 0);

/// Gauss-Legendre rule mapped to the element of the given basis.
QuadratureRule element_rule(const ElementBasis& basis,
                            double points_per_wavelength = 10.0,
                            int extra = 0);

}  // namespace msdg

#endif
