#ifndef MSDG_TRACE_HPP
#define MSDG_TRACE_HPP

#include <cmath>
#include <complex>
#include <stdexcept>

namespace msdg {

/// Penalty parameters of the numerical traces.  alpha penalizes the jump of
/// u, beta the jump of q; gamma in (0,1) weights the boundary traces.
/// alpha = beta = 0 gives the alternating (MD-LDG) fluxes.
struct TraceParams {
  double alpha = 0.0;
  double beta = 0.0;
  double gamma = 0.5;

  void validate() const {
    if (alpha < 0.0 || beta < 0.0)
      throw std::invalid_argument("trace penalties must be nonnegative");
    if (!(gamma > 0.0 && gamma < 1.0))
      throw std::invalid_argument("boundary weight gamma must lie in (0,1)");
  }
};

struct TraceValues {
  std::complex<double> u_hat;
  std::complex<double> q_hat;
};

/// Jump [v] = v^- - v^+ across an interface.
inline std::complex<double> jump(std::complex<double> v_minus,
                                 std::complex<double> v_plus) {
  return v_minus - v_plus;
}

/// Traces at an interior interface:
///   u_hat = u^- - i beta [q],   q_hat = q^+ + i alpha [u].
inline TraceValues interior_trace(std::complex<double> u_minus,
                                  std::complex<double> u_plus,
                                  std::complex<double> q_minus,
                                  std::complex<double> q_plus,
                                  const TraceParams& params) {
  const std::complex<double> i(0.0, 1.0);
  return {u_minus - i * params.beta * jump(q_minus, q_plus),
          q_plus + i * params.alpha * jump(u_minus, u_plus)};
}

/// Traces at x = a.  They satisfy q_hat + i sqrt(f_a) u_hat = 2 i sqrt(f_a)
/// for every (u_a, q_a), matching the incoming-wave boundary condition.
inline TraceValues boundary_trace_left(std::complex<double> u_a,
                                       std::complex<double> q_a, double f_a,
                                       double gamma) {
  if (!(f_a > 0.0))
    throw std::domain_error("boundary trace requires f(a) > 0");
  const std::complex<double> i(0.0, 1.0);
  const double s = std::sqrt(f_a);
  return {(1.0 - gamma) * u_a + i * (gamma / s) * q_a + 2.0 * gamma,
          gamma * q_a - i * (1.0 - gamma) * s * u_a +
              2.0 * i * (1.0 - gamma) * s};
}

/// Traces at x = b.  They satisfy q_hat - i sqrt(f_b) u_hat = 0, the
/// outgoing-wave condition.
inline TraceValues boundary_trace_right(std::complex<double> u_b,
                                        std::complex<double> q_b, double f_b,
                                        double gamma) {
  if (!(f_b > 0.0))
    throw std::domain_error("boundary trace requires f(b) > 0");
  const std::complex<double> i(0.0, 1.0);
  const double s = std::sqrt(f_b);
  return {(1.0 - gamma) * u_b - i * (gamma / s) * q_b,
          gamma * q_b + i * (1.0 - gamma) * s * u_b};
}

}  // namespace msdg

#endif
