#ifndef MSDG_SOLUTION_HPP
#define MSDG_SOLUTION_HPP

#include <cstdint>
#include <filesystem>
#include <functional>
#include <vector>

#include "msdg/assembly.hpp"
#include "msdg/basis.hpp"
#include "msdg/mesh.hpp"

namespace msdg {

struct PointValues {
  Complex u;
  Complex q;
};

/// Discrete solution (u_h, q_h): mesh, per-element bases and the global
/// coefficient vector in DofLayout order.  Immutable after construction.
class DGSolution {
public:
  DGSolution(MeshPartition mesh, SpaceKind space,
             std::vector<ElementBasis> bases, std::vector<Complex> coeffs,
             double quad_ppw = 10.0, int quad_extra = 0);

  const MeshPartition& mesh() const { return mesh_; }
  const SpaceKind& space() const { return space_; }
  const std::vector<ElementBasis>& bases() const { return bases_; }
  const std::vector<Complex>& coeffs() const { return coeffs_; }
  const DofLayout& layout() const { return layout_; }
  double quad_ppw() const { return quad_ppw_; }
  int quad_extra() const { return quad_extra_; }

  /// Point evaluation with the left-limit convention at interior
  /// breakpoints.  Requires x in [a, b].
  PointValues eval(double x) const;

private:
  MeshPartition mesh_;
  SpaceKind space_;
  std::vector<ElementBasis> bases_;
  std::vector<Complex> coeffs_;
  DofLayout layout_;
  double quad_ppw_;
  int quad_extra_;
};

/// Wraps solver output as a DGSolution for the given configuration.
DGSolution make_solution(const SolveConfig& cfg, std::vector<Complex> coeffs);

/// Exact-solution pair (u, q) used as an error oracle.
struct WaveOracle {
  std::function<Complex(double)> u;
  std::function<Complex(double)> q;
};

/// Constant-coefficient exact solution u(x) = e^{i sqrt(f0) (x-a)/eps},
/// q = i sqrt(f0) u.  Satisfies the mixed system and both boundary
/// conditions identically.
WaveOracle exact_plane_wave(double f0, double eps, double a);

/// L2 norm of u_h - exact_u over the domain, integrated element by element
/// with the solution's oscillation-aware rule at doubled node count.
double l2_error(const DGSolution& sol,
                const std::function<Complex(double)>& exact_u);

struct L2Errors {
  double u;
  double q;
};

/// u- and q-errors in one pass over the quadrature nodes.
L2Errors l2_errors(const DGSolution& sol, const WaveOracle& oracle);

struct ReferenceMeta {
  std::uint32_t version = 1;
  std::string f_name;
  double eps = 0.0;
  std::int64_t n_ref = 0;
  SpaceKind space;
  double alpha = 0.0;
  double beta = 0.0;
  double gamma = 0.5;
  double a = 0.0;
  double b = 1.0;
};

/// Fine-mesh reference computed with the alternating-flux method on
/// piecewise cubics; stands in for the unavailable exact solution of
/// variable-coefficient cases.
struct ReferenceSolution {
  ReferenceMeta meta;
  DGSolution fine;

  WaveOracle oracle() const;
};

/// Minimum fine-mesh resolution: 20 elements per wavelength.
std::int64_t min_reference_elements(const CoefficientField& f, double eps,
                                    double a, double b);

/// Runs the assembly/solve path with P^3 and alpha = beta = 0 on a uniform
/// n_ref-element mesh.  Rejects n_ref below min_reference_elements.
/// quad_extra perturbs the per-element node count (regeneration checks).
ReferenceSolution generate_reference(const CoefficientField& f, double eps,
                                     std::int64_t n_ref, double a, double b,
                                     double gamma = 0.5, int quad_extra = 0);

/// Binary cache: magic, version, metadata, then the coefficients as
/// little-endian (real, imag) float64 pairs.  Round trips bit-exactly.
void save_reference(const ReferenceSolution& ref,
                    const std::filesystem::path& path);

/// Loads and validates a cache file; malformed or truncated files are
/// rejected, as is any version mismatch.
ReferenceSolution load_reference(const std::filesystem::path& path);

/// Loads a reference and checks it against the query; throws when the cache
/// was generated for different data.
ReferenceSolution load_reference_checked(const std::filesystem::path& path,
                                         const std::string& f_name, double eps,
                                         double a, double b);

}  // namespace msdg

#endif
