#include "msdg/solution.hpp"

#include <bit>
#include <cmath>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <numbers>
#include <stdexcept>

#include "msdg/linsolve.hpp"

namespace msdg {

DGSolution::DGSolution(MeshPartition mesh, SpaceKind space,
                       std::vector<ElementBasis> bases,
                       std::vector<Complex> coeffs, double quad_ppw,
                       int quad_extra)
    : mesh_(std::move(mesh)),
      space_(space),
      bases_(std::move(bases)),
      coeffs_(std::move(coeffs)),
      layout_(mesh_.num_elements(), space.local_dim()),
      quad_ppw_(quad_ppw),
      quad_extra_(quad_extra) {
  if (static_cast<int>(bases_.size()) != mesh_.num_elements())
    throw std::invalid_argument("one basis per element required");
  if (static_cast<int>(coeffs_.size()) != layout_.size())
    throw std::invalid_argument("coefficient vector has wrong length");
}

PointValues DGSolution::eval(double x) const {
  const int j = mesh_.element_containing(x);
  const ElementBasis& basis = bases_[j - 1];
  Complex u = 0.0, q = 0.0;
  for (int m = 0; m < basis.dim(); ++m) {
    const Complex phi = basis.eval(m, x);
    u += coeffs_[layout_.index(j, Var::u, m)] * phi;
    q += coeffs_[layout_.index(j, Var::q, m)] * phi;
  }
  return {u, q};
}

DGSolution make_solution(const SolveConfig& cfg, std::vector<Complex> coeffs) {
  std::vector<ElementBasis> bases;
  bases.reserve(cfg.mesh.num_elements());
  for (int j = 1; j <= cfg.mesh.num_elements(); ++j)
    bases.push_back(make_element_basis(cfg.space, cfg.f, cfg.mesh, j, cfg.eps));
  return DGSolution(cfg.mesh, cfg.space, std::move(bases), std::move(coeffs),
                    cfg.quad_ppw, cfg.quad_extra);
}

WaveOracle exact_plane_wave(double f0, double eps, double a) {
  if (!(f0 > 0.0) || !(eps > 0.0))
    throw std::domain_error("plane wave requires f0 > 0 and eps > 0");
  const double root = std::sqrt(f0);
  const double k = root / eps;
  return {[k, a](double x) {
            return std::exp(Complex(0.0, k * (x - a)));
          },
          [k, a, root](double x) {
            return Complex(0.0, root) * std::exp(Complex(0.0, k * (x - a)));
          }};
}

namespace {

// Per-element quadrature at doubled node count: the integrand involves the
// oscillatory exact solution, so the solve-time rule gets a safety margin.
L2Errors accumulate_errors(const DGSolution& sol,
                           const std::function<Complex(double)>& exact_u,
                           const std::function<Complex(double)>* exact_q) {
  const MeshPartition& mesh = sol.mesh();
  const DofLayout& layout = sol.layout();
  double acc_u = 0.0, acc_q = 0.0;
  for (int j = 1; j <= mesh.num_elements(); ++j) {
    const ElementBasis& basis = sol.bases()[j - 1];
    const int n = 2 * quad_node_count(basis.kind(), basis.wave_number(),
                                      mesh.width(j), sol.quad_ppw(),
                                      sol.quad_extra());
    const QuadratureRule& ref = gauss_legendre(n);
    const double hw = basis.half_width();
    for (int qn = 0; qn < n; ++qn) {
      const double x = basis.center() + hw * ref.nodes[qn];
      const double w = hw * ref.weights[qn];
      Complex uh = 0.0, qh = 0.0;
      for (int m = 0; m < basis.dim(); ++m) {
        const Complex phi = basis.eval(m, x);
        uh += sol.coeffs()[layout.index(j, Var::u, m)] * phi;
        qh += sol.coeffs()[layout.index(j, Var::q, m)] * phi;
      }
      acc_u += w * std::norm(uh - exact_u(x));
      if (exact_q) acc_q += w * std::norm(qh - (*exact_q)(x));
    }
  }
  return {std::sqrt(acc_u), std::sqrt(acc_q)};
}

}  // namespace

double l2_error(const DGSolution& sol,
                const std::function<Complex(double)>& exact_u) {
  return accumulate_errors(sol, exact_u, nullptr).u;
}

L2Errors l2_errors(const DGSolution& sol, const WaveOracle& oracle) {
  return accumulate_errors(sol, oracle.u, &oracle.q);
}

WaveOracle ReferenceSolution::oracle() const {
  const DGSolution* sol = &fine;
  return {[sol](double x) { return sol->eval(x).u; },
          [sol](double x) { return sol->eval(x).q; }};
}

std::int64_t min_reference_elements(const CoefficientField& f, double eps,
                                    double a, double b) {
  const double fmax = f.sampled_max(a, b);
  return static_cast<std::int64_t>(
      std::ceil(20.0 * (b - a) * std::sqrt(fmax) /
                (2.0 * std::numbers::pi * eps)));
}

ReferenceSolution generate_reference(const CoefficientField& f, double eps,
                                     std::int64_t n_ref, double a, double b,
                                     double gamma, int quad_extra) {
  if (n_ref < min_reference_elements(f, eps, a, b))
    throw std::invalid_argument(
        "reference mesh too coarse for cubic resolution (needs >= 20 "
        "elements per wavelength)");
  SolveConfig cfg{MeshPartition::uniform(a, b, static_cast<int>(n_ref)),
                  SpaceKind{SpaceFamily::polynomial, 3},
                  eps,
                  f,
                  TraceParams{0.0, 0.0, gamma},
                  10.0,
                  quad_extra,
                  1.0};
  GlobalSystem sys = assemble_global(cfg);
  std::vector<Complex> coeffs = solve(sys);
  ReferenceMeta meta;
  meta.f_name = f.name;
  meta.eps = eps;
  meta.n_ref = n_ref;
  meta.space = cfg.space;
  meta.alpha = 0.0;
  meta.beta = 0.0;
  meta.gamma = gamma;
  meta.a = a;
  meta.b = b;
  return {meta, make_solution(cfg, std::move(coeffs))};
}

namespace {

constexpr char kMagic[8] = {'M', 'S', 'D', 'G', 'R', 'E', 'F', '1'};

void put_u32(std::string& out, std::uint32_t v) {
  for (int i = 0; i < 4; ++i) out.push_back(char((v >> (8 * i)) & 0xff));
}

void put_i64(std::string& out, std::int64_t v) {
  const auto u = static_cast<std::uint64_t>(v);
  for (int i = 0; i < 8; ++i) out.push_back(char((u >> (8 * i)) & 0xff));
}

void put_f64(std::string& out, double v) {
  put_i64(out, static_cast<std::int64_t>(std::bit_cast<std::uint64_t>(v)));
}

class Reader {
public:
  explicit Reader(std::string data) : data_(std::move(data)) {}

  std::uint32_t u32() {
    need(4);
    std::uint32_t v = 0;
    for (int i = 0; i < 4; ++i)
      v |= std::uint32_t(static_cast<unsigned char>(data_[pos_ + i]))
           << (8 * i);
    pos_ += 4;
    return v;
  }

  std::int64_t i64() {
    need(8);
    std::uint64_t v = 0;
    for (int i = 0; i < 8; ++i)
      v |= std::uint64_t(static_cast<unsigned char>(data_[pos_ + i]))
           << (8 * i);
    pos_ += 8;
    return static_cast<std::int64_t>(v);
  }

  double f64() { return std::bit_cast<double>(static_cast<std::uint64_t>(i64())); }

  std::string bytes(std::size_t n) {
    need(n);
    std::string s = data_.substr(pos_, n);
    pos_ += n;
    return s;
  }

  std::size_t remaining() const { return data_.size() - pos_; }

private:
  std::string data_;
  std::size_t pos_ = 0;
  void need(std::size_t n) const {
    if (data_.size() - pos_ < n)
      throw std::runtime_error("reference cache truncated");
  }
};

}  // namespace

void save_reference(const ReferenceSolution& ref,
                    const std::filesystem::path& path) {
  if (ref.meta.space.family != SpaceFamily::polynomial)
    throw std::invalid_argument(
        "reference caches hold polynomial-space solutions");
  std::string out;
  out.reserve(64 + ref.fine.coeffs().size() * 16);
  out.append(kMagic, sizeof kMagic);
  put_u32(out, ref.meta.version);
  put_u32(out, static_cast<std::uint32_t>(ref.meta.f_name.size()));
  out.append(ref.meta.f_name);
  put_f64(out, ref.meta.eps);
  put_i64(out, ref.meta.n_ref);
  put_u32(out, static_cast<std::uint32_t>(ref.meta.space.family));
  put_u32(out, static_cast<std::uint32_t>(ref.meta.space.order));
  put_f64(out, ref.meta.alpha);
  put_f64(out, ref.meta.beta);
  put_f64(out, ref.meta.gamma);
  put_f64(out, ref.meta.a);
  put_f64(out, ref.meta.b);
  put_i64(out, static_cast<std::int64_t>(ref.fine.coeffs().size()));
  for (const Complex& c : ref.fine.coeffs()) {
    put_f64(out, c.real());
    put_f64(out, c.imag());
  }

  const std::filesystem::path tmp = path.string() + ".tmp";
  {
    std::ofstream f(tmp, std::ios::binary | std::ios::trunc);
    if (!f) throw std::runtime_error("cannot write " + tmp.string());
    f.write(out.data(), static_cast<std::streamsize>(out.size()));
    if (!f) throw std::runtime_error("short write to " + tmp.string());
  }
  std::filesystem::rename(tmp, path);
}

ReferenceSolution load_reference(const std::filesystem::path& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw std::runtime_error("cannot open " + path.string());
  std::string data((std::istreambuf_iterator<char>(f)),
                   std::istreambuf_iterator<char>());
  Reader r(std::move(data));

  if (r.bytes(sizeof kMagic) != std::string(kMagic, sizeof kMagic))
    throw std::runtime_error("not a reference cache: " + path.string());
  ReferenceMeta meta;
  meta.version = r.u32();
  if (meta.version != 1)
    throw std::runtime_error("unsupported reference cache version");
  meta.f_name = r.bytes(r.u32());
  meta.eps = r.f64();
  meta.n_ref = r.i64();
  meta.space.family = static_cast<SpaceFamily>(r.u32());
  meta.space.order = static_cast<int>(r.u32());
  meta.alpha = r.f64();
  meta.beta = r.f64();
  meta.gamma = r.f64();
  meta.a = r.f64();
  meta.b = r.f64();
  const std::int64_t count = r.i64();

  if (meta.space.family != SpaceFamily::polynomial)
    throw std::runtime_error("reference cache must hold a polynomial space");
  if (meta.n_ref < 1 || !(meta.a < meta.b) || !(meta.eps > 0.0))
    throw std::runtime_error("reference cache metadata is inconsistent");
  const std::int64_t expected =
      2 * static_cast<std::int64_t>(meta.space.local_dim()) * meta.n_ref;
  if (count != expected)
    throw std::runtime_error("reference cache payload length mismatch");
  if (r.remaining() != static_cast<std::size_t>(count) * 16)
    throw std::runtime_error("reference cache payload length mismatch");

  std::vector<Complex> coeffs(static_cast<std::size_t>(count));
  for (auto& c : coeffs) {
    const double re = r.f64();
    const double im = r.f64();
    c = Complex(re, im);
  }

  MeshPartition mesh =
      MeshPartition::uniform(meta.a, meta.b, static_cast<int>(meta.n_ref));
  // Polynomial bases never use the wave number, so it is not stored.
  std::vector<ElementBasis> bases;
  bases.reserve(meta.n_ref);
  for (int j = 1; j <= mesh.num_elements(); ++j)
    bases.emplace_back(meta.space, 0.0, mesh.midpoint(j), 0.5 * mesh.width(j));
  return {meta, DGSolution(std::move(mesh), meta.space, std::move(bases),
                           std::move(coeffs))};
}

ReferenceSolution load_reference_checked(const std::filesystem::path& path,
                                         const std::string& f_name, double eps,
                                         double a, double b) {
  ReferenceSolution ref = load_reference(path);
  if (ref.meta.f_name != f_name || ref.meta.eps != eps || ref.meta.a != a ||
      ref.meta.b != b)
    throw std::runtime_error("reference cache does not match the query: " +
                             path.string());
  return ref;
}

}  // namespace msdg
