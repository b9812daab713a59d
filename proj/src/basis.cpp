#include "msdg/basis.hpp"

#include <cmath>
#include <map>
#include <memory>
#include <mutex>
#include <numbers>
#include <stdexcept>

namespace msdg {

int SpaceKind::local_dim() const {
  switch (family) {
    case SpaceFamily::exponential_poly:
      return order == 1 ? 2 : order + 1;
    case SpaceFamily::exponential_pairs:
      return 2 * order;
    case SpaceFamily::polynomial:
      return order + 1;
  }
  throw std::logic_error("unreachable");
}

std::string SpaceKind::label() const {
  switch (family) {
    case SpaceFamily::exponential_poly:
      return "E" + std::to_string(order);
    case SpaceFamily::exponential_pairs:
      return "T" + std::to_string(2 * order - 1);
    case SpaceFamily::polynomial:
      return "P" + std::to_string(order);
  }
  throw std::logic_error("unreachable");
}

SpaceKind SpaceKind::parse(const std::string& label) {
  if (label.size() < 2)
    throw std::invalid_argument("bad space label: " + label);
  int num = 0;
  try {
    std::size_t pos = 0;
    num = std::stoi(label.substr(1), &pos);
    if (pos + 1 != label.size()) throw std::invalid_argument("");
  } catch (const std::exception&) {
    throw std::invalid_argument("bad space label: " + label);
  }
  if (num < 1) throw std::invalid_argument("bad space label: " + label);
  switch (label[0]) {
    case 'E':
      return {SpaceFamily::exponential_poly, num};
    case 'T':
      if (num % 2 == 0)
        throw std::invalid_argument("T spaces have odd labels: " + label);
      return {SpaceFamily::exponential_pairs, (num + 1) / 2};
    case 'P':
      return {SpaceFamily::polynomial, num};
    default:
      throw std::invalid_argument("bad space label: " + label);
  }
}

double wave_number(const CoefficientField& f, double x_j, double eps) {
  if (!(eps > 0.0)) throw std::domain_error("wave number requires eps > 0");
  const double fx = f(x_j);
  if (!(fx > 0.0))
    throw std::domain_error("wave number requires f > 0 at the midpoint");
  return std::sqrt(fx) / eps;
}

ElementBasis::ElementBasis(SpaceKind kind, double wave_number, double center,
                           double half_width)
    : kind_(kind),
      k_(wave_number),
      center_(center),
      half_width_(half_width),
      dim_(kind.local_dim()) {
  if (!(half_width > 0.0))
    throw std::invalid_argument("element half width must be positive");
  if (kind.family != SpaceFamily::polynomial && !(wave_number >= 0.0))
    throw std::invalid_argument("wave number must be nonnegative");
}

void ElementBasis::check_member(int m) const {
  if (m < 0 || m >= dim_)
    throw std::out_of_range("basis member index out of range");
}

namespace {

// P_n(x) and P_n'(x) via the standard recurrences; the derivative uses
// P'_{n+1} = (2n+1) P_n + P'_{n-1}, stable at the interval ends.
void legendre(int n, double x, double& value, double& deriv) {
  double p0 = 1.0, d0 = 0.0;
  if (n == 0) {
    value = p0;
    deriv = d0;
    return;
  }
  double p1 = x, d1 = 1.0;
  for (int m = 1; m < n; ++m) {
    const double p2 = ((2 * m + 1) * x * p1 - m * p0) / (m + 1);
    const double d2 = (2 * m + 1) * p1 + d0;
    p0 = p1;
    d0 = d1;
    p1 = p2;
    d1 = d2;
  }
  value = p1;
  deriv = d1;
}

// Signed mode multiplier of member m in a T-family basis:
// m = 0,1,2,3,... -> +1, -1, +2, -2, ...
int pair_mode(int m) { return (m % 2 == 0 ? 1 : -1) * (m / 2 + 1); }

}  // namespace

Complex ElementBasis::eval(int m, double x) const {
  check_member(m);
  const double t = x - center_;
  const Complex i(0.0, 1.0);
  switch (kind_.family) {
    case SpaceFamily::exponential_poly: {
      if (m == 0) return std::exp(i * (k_ * t));
      if (m == 1) return std::exp(-i * (k_ * t));
      return Complex(std::pow(t / half_width_, m - 2), 0.0);
    }
    case SpaceFamily::exponential_pairs:
      return std::exp(i * (pair_mode(m) * k_ * t));
    case SpaceFamily::polynomial: {
      double v, d;
      legendre(m, t / half_width_, v, d);
      return Complex(v, 0.0);
    }
  }
  throw std::logic_error("unreachable");
}

Complex ElementBasis::deriv(int m, double x) const {
  check_member(m);
  const double t = x - center_;
  const Complex i(0.0, 1.0);
  switch (kind_.family) {
    case SpaceFamily::exponential_poly: {
      if (m == 0) return i * k_ * std::exp(i * (k_ * t));
      if (m == 1) return -i * k_ * std::exp(-i * (k_ * t));
      if (m == 2) return Complex(0.0, 0.0);
      const double xi = t / half_width_;
      return Complex((m - 2) * std::pow(xi, m - 3) / half_width_, 0.0);
    }
    case SpaceFamily::exponential_pairs: {
      const double sk = pair_mode(m) * k_;
      return i * sk * std::exp(i * (sk * t));
    }
    case SpaceFamily::polynomial: {
      double v, d;
      legendre(m, t / half_width_, v, d);
      return Complex(d / half_width_, 0.0);
    }
  }
  throw std::logic_error("unreachable");
}

ElementBasis make_element_basis(SpaceKind kind, const CoefficientField& f,
                                const MeshPartition& mesh, int j, double eps) {
  const double xj = mesh.midpoint(j);
  return ElementBasis(kind, wave_number(f, xj, eps), xj, 0.5 * mesh.width(j));
}

namespace {

QuadratureRule compute_gauss_legendre(int n) {
  QuadratureRule rule;
  rule.nodes.resize(n);
  rule.weights.resize(n);
  // Newton iteration from the Tricomi initial guess; the rule is symmetric,
  // so only the first half is computed.
  for (int i = 0; i < (n + 1) / 2; ++i) {
    double x = std::cos(std::numbers::pi * (i + 0.75) / (n + 0.5));
    double dp = 0.0;
    for (int iter = 0; iter < 100; ++iter) {
      double p0 = 1.0, p1 = x;
      for (int m = 1; m < n; ++m) {
        const double p2 = ((2 * m + 1) * x * p1 - m * p0) / (m + 1);
        p0 = p1;
        p1 = p2;
      }
      dp = n * (x * p1 - p0) / (x * x - 1.0);
      const double dx = p1 / dp;
      x -= dx;
      if (std::abs(dx) < 1e-15) break;
    }
    // one clean-up step for the weight at the converged node
    double p0 = 1.0, p1 = x;
    for (int m = 1; m < n; ++m) {
      const double p2 = ((2 * m + 1) * x * p1 - m * p0) / (m + 1);
      p0 = p1;
      p1 = p2;
    }
    dp = n * (x * p1 - p0) / (x * x - 1.0);
    const double w = 2.0 / ((1.0 - x * x) * dp * dp);
    rule.nodes[i] = -x;  // ascending order
    rule.nodes[n - 1 - i] = x;
    rule.weights[i] = w;
    rule.weights[n - 1 - i] = w;
  }
  if (n % 2 == 1) {
    rule.nodes[n / 2] = 0.0;
  }
  return rule;
}

}  // namespace

const QuadratureRule& gauss_legendre(int n) {
  if (n < 1) throw std::invalid_argument("quadrature needs >= 1 node");
  static std::mutex mutex;
  static std::map<int, std::unique_ptr<QuadratureRule>> cache;
  std::lock_guard<std::mutex> lock(mutex);
  auto& slot = cache[n];
  if (!slot)
    slot = std::make_unique<QuadratureRule>(compute_gauss_legendre(n));
  return *slot;
}

int quad_node_count(const SpaceKind& kind, double wave_number, double width,
                    double points_per_wavelength, int extra) {
  const int floor_count = 2 * kind.local_dim() + 2;
  const double oscillation = points_per_wavelength * kind.order * wave_number *
                             width / (2.0 * std::numbers::pi);
  const int n = std::max(floor_count, static_cast<int>(std::ceil(oscillation)));
  return n + extra;
}

QuadratureRule element_rule(const ElementBasis& basis,
                            double points_per_wavelength, int extra) {
  const double hw = basis.half_width();
  const int n = quad_node_count(basis.kind(), basis.wave_number(), 2.0 * hw,
                                points_per_wavelength, extra);
  const QuadratureRule& ref = gauss_legendre(n);
  QuadratureRule mapped;
  mapped.nodes.resize(n);
  mapped.weights.resize(n);
  for (int i = 0; i < n; ++i) {
    mapped.nodes[i] = basis.center() + hw * ref.nodes[i];
    mapped.weights[i] = hw * ref.weights[i];
  }
  return mapped;
}

}  // namespace msdg
