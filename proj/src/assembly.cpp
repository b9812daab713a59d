#include "msdg/assembly.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

namespace msdg {

GlobalSystem::GlobalSystem(int dimension, std::vector<Triplet> entries,
                           std::vector<Complex> rhs,
                           std::optional<DofLayout> layout)
    : n_(dimension), rhs_(std::move(rhs)), layout_(layout) {
  if (n_ < 1) throw std::invalid_argument("system dimension must be >= 1");
  if (static_cast<int>(rhs_.size()) != n_)
    throw std::invalid_argument("rhs length does not match dimension");
  for (const Triplet& t : entries)
    if (t.row < 0 || t.row >= n_ || t.col < 0 || t.col >= n_)
      throw std::out_of_range("triplet outside the matrix");

  // bucket by row, then sort and merge within each row
  std::vector<std::int64_t> counts(static_cast<std::size_t>(n_) + 1, 0);
  for (const Triplet& t : entries) ++counts[t.row + 1];
  std::partial_sum(counts.begin(), counts.end(), counts.begin());
  std::vector<std::int32_t> bucket_col(entries.size());
  std::vector<Complex> bucket_val(entries.size());
  {
    std::vector<std::int64_t> cursor(counts.begin(), counts.end() - 1);
    for (const Triplet& t : entries) {
      const std::int64_t at = cursor[t.row]++;
      bucket_col[at] = t.col;
      bucket_val[at] = t.value;
    }
  }
  entries.clear();
  entries.shrink_to_fit();

  row_offsets_.assign(static_cast<std::size_t>(n_) + 1, 0);
  std::vector<std::int64_t> order;
  for (int r = 0; r < n_; ++r) {
    const std::int64_t lo = counts[r], hi = counts[r + 1];
    order.resize(hi - lo);
    std::iota(order.begin(), order.end(), lo);
    std::sort(order.begin(), order.end(), [&](std::int64_t a, std::int64_t b) {
      return bucket_col[a] < bucket_col[b];
    });
    for (std::size_t i = 0; i < order.size();) {
      const int col = bucket_col[order[i]];
      Complex sum = 0.0;
      while (i < order.size() && bucket_col[order[i]] == col)
        sum += bucket_val[order[i++]];
      if (sum != 0.0) {
        cols_.push_back(col);
        values_.push_back(sum);
        kl_ = std::max(kl_, r - col);
        ku_ = std::max(ku_, col - r);
      }
    }
    row_offsets_[r + 1] = static_cast<std::int64_t>(cols_.size());
  }
}

Complex GlobalSystem::entry(int row, int col) const {
  if (row < 0 || row >= n_ || col < 0 || col >= n_)
    throw std::out_of_range("entry outside the matrix");
  const auto first = cols_.begin() + row_offsets_[row];
  const auto last = cols_.begin() + row_offsets_[row + 1];
  const auto it = std::lower_bound(first, last, col);
  if (it == last || *it != col) return 0.0;
  return values_[it - cols_.begin()];
}

double GlobalSystem::norm1() const {
  std::vector<double> colsum(n_, 0.0);
  for (int r = 0; r < n_; ++r)
    for (std::int64_t i = row_offsets_[r]; i < row_offsets_[r + 1]; ++i)
      colsum[cols_[i]] += std::abs(values_[i]);
  return colsum.empty() ? 0.0
                        : *std::max_element(colsum.begin(), colsum.end());
}

MatrixStats matrix_stats(const GlobalSystem& sys) {
  return {sys.dimension(), sys.nonzeros(),
          std::max(sys.lower_bandwidth(), sys.upper_bandwidth())};
}

namespace {

// Affine decomposition of one trace component:
//   hat = u_minus * c_um + u_plus * c_up + q_minus * c_qm + q_plus * c_qp
//       + constant.
// Obtained by probing the trace functions with unit inputs, so the assembly
// consumes exactly the flux definitions from trace.hpp.
struct AffineTrace {
  Complex u_minus, u_plus, q_minus, q_plus;
  Complex constant;
};

struct InterfaceTraces {
  AffineTrace u_hat, q_hat;
};

InterfaceTraces probe_interior(const TraceParams& p) {
  const TraceValues c0 = interior_trace(0, 0, 0, 0, p);
  const TraceValues um = interior_trace(1, 0, 0, 0, p);
  const TraceValues up = interior_trace(0, 1, 0, 0, p);
  const TraceValues qm = interior_trace(0, 0, 1, 0, p);
  const TraceValues qp = interior_trace(0, 0, 0, 1, p);
  return {{um.u_hat - c0.u_hat, up.u_hat - c0.u_hat, qm.u_hat - c0.u_hat,
           qp.u_hat - c0.u_hat, c0.u_hat},
          {um.q_hat - c0.q_hat, up.q_hat - c0.q_hat, qm.q_hat - c0.q_hat,
           qp.q_hat - c0.q_hat, c0.q_hat}};
}

// At x = a only the right limit exists; its couplings live in the plus
// slots.  At x = b only the left limit exists (minus slots).
InterfaceTraces probe_left(double f_a, double gamma) {
  const TraceValues c0 = boundary_trace_left(0, 0, f_a, gamma);
  const TraceValues cu = boundary_trace_left(1, 0, f_a, gamma);
  const TraceValues cq = boundary_trace_left(0, 1, f_a, gamma);
  return {{0, cu.u_hat - c0.u_hat, 0, cq.u_hat - c0.u_hat, c0.u_hat},
          {0, cu.q_hat - c0.q_hat, 0, cq.q_hat - c0.q_hat, c0.q_hat}};
}

InterfaceTraces probe_right(double f_b, double gamma) {
  const TraceValues c0 = boundary_trace_right(0, 0, f_b, gamma);
  const TraceValues cu = boundary_trace_right(1, 0, f_b, gamma);
  const TraceValues cq = boundary_trace_right(0, 1, f_b, gamma);
  return {{cu.u_hat - c0.u_hat, 0, cq.u_hat - c0.u_hat, 0, c0.u_hat},
          {cu.q_hat - c0.q_hat, 0, cq.q_hat - c0.q_hat, 0, c0.q_hat}};
}

struct LocalElement {
  ElementBasis basis;
  std::vector<Complex> mass;       // M[m][n] = int phi_n conj(phi_m)
  std::vector<Complex> grad_test;  // D[m][n] = int phi_n conj(phi_m')
  std::vector<Complex> weighted;   // F[m][n] = int f phi_n conj(phi_m)
  std::vector<Complex> at_left;    // phi_n at the left endpoint
  std::vector<Complex> at_right;   // phi_n at the right endpoint
};

LocalElement integrate_element(const SolveConfig& cfg, int j) {
  LocalElement el{make_element_basis(cfg.space, cfg.f, cfg.mesh, j, cfg.eps),
                  {}, {}, {}, {}, {}};
  const int d = el.basis.dim();
  const QuadratureRule rule =
      element_rule(el.basis, cfg.quad_ppw, cfg.quad_extra);
  const int nq = rule.size();

  std::vector<Complex> vals(static_cast<std::size_t>(d) * nq);
  std::vector<Complex> ders(static_cast<std::size_t>(d) * nq);
  std::vector<double> fvals(nq);
  for (int q = 0; q < nq; ++q) {
    const double x = rule.nodes[q];
    fvals[q] = cfg.f(x);
    if (!(fvals[q] > 0.0))
      throw std::domain_error("coefficient f must stay positive on [a,b]");
    for (int m = 0; m < d; ++m) {
      vals[m * nq + q] = el.basis.eval(m, x);
      ders[m * nq + q] = el.basis.deriv(m, x);
    }
  }

  el.mass.assign(static_cast<std::size_t>(d) * d, 0.0);
  el.grad_test.assign(static_cast<std::size_t>(d) * d, 0.0);
  el.weighted.assign(static_cast<std::size_t>(d) * d, 0.0);
  for (int m = 0; m < d; ++m)
    for (int n = 0; n < d; ++n) {
      Complex acc_m = 0.0, acc_d = 0.0, acc_f = 0.0;
      for (int q = 0; q < nq; ++q) {
        const Complex trial = vals[n * nq + q];
        acc_m += rule.weights[q] * trial * std::conj(vals[m * nq + q]);
        acc_d += rule.weights[q] * trial * std::conj(ders[m * nq + q]);
        acc_f += rule.weights[q] * fvals[q] * trial *
                 std::conj(vals[m * nq + q]);
      }
      el.mass[m * d + n] = acc_m;
      el.grad_test[m * d + n] = acc_d;
      el.weighted[m * d + n] = acc_f;
    }

  el.at_left.resize(d);
  el.at_right.resize(d);
  for (int n = 0; n < d; ++n) {
    el.at_left[n] = el.basis.eval(n, cfg.mesh.left(j));
    el.at_right[n] = el.basis.eval(n, cfg.mesh.right(j));
  }
  return el;
}

}  // namespace

GlobalSystem assemble_global(const SolveConfig& cfg) {
  cfg.traces.validate();
  if (!(cfg.eps > 0.0)) throw std::domain_error("eps must be positive");
  const int n_el = cfg.mesh.num_elements();
  const int d = cfg.space.local_dim();
  const DofLayout layout(n_el, d);
  const double eps = cfg.eps;
  const double f_a = cfg.f(cfg.mesh.a());
  const double f_b = cfg.f(cfg.mesh.b());
  if (!(f_a > 0.0) || !(f_b > 0.0))
    throw std::domain_error("coefficient f must be positive at the boundary");

  const InterfaceTraces interior = probe_interior(cfg.traces);
  const InterfaceTraces left_bdry = probe_left(f_a, cfg.traces.gamma);
  const InterfaceTraces right_bdry = probe_right(f_b, cfg.traces.gamma);

  std::vector<Triplet> trips;
  trips.reserve(static_cast<std::size_t>(n_el) * d * d * 10);
  std::vector<Complex> rhs(layout.size(), 0.0);

  auto push = [&trips](int row, int col, Complex v) {
    if (v != 0.0) trips.push_back({row, col, v});
  };

  // row += scale * hat(...), where the minus-side trial lives on element
  // j_minus with endpoint values minus_vals, and the plus side on j_plus
  // with plus_vals.  Either side may be absent (element index 0).
  auto add_hat = [&](int row, Complex scale, const AffineTrace& hat,
                     int j_minus, const std::vector<Complex>& minus_vals,
                     int j_plus, const std::vector<Complex>& plus_vals) {
    if (j_minus > 0)
      for (int n = 0; n < d; ++n) {
        push(row, layout.index(j_minus, Var::u, n),
             scale * hat.u_minus * minus_vals[n]);
        push(row, layout.index(j_minus, Var::q, n),
             scale * hat.q_minus * minus_vals[n]);
      }
    if (j_plus > 0)
      for (int n = 0; n < d; ++n) {
        push(row, layout.index(j_plus, Var::u, n),
             scale * hat.u_plus * plus_vals[n]);
        push(row, layout.index(j_plus, Var::q, n),
             scale * hat.q_plus * plus_vals[n]);
      }
  };

  LocalElement current = integrate_element(cfg, 1);
  for (int j = 1; j <= n_el; ++j) {
    for (int m = 0; m < d; ++m) {
      const int row_a = layout.index(j, Var::u, m);  // first weak equation
      const int row_b = layout.index(j, Var::q, m);  // second weak equation
      for (int n = 0; n < d; ++n) {
        push(row_a, layout.index(j, Var::q, n), current.mass[m * d + n]);
        push(row_a, layout.index(j, Var::u, n),
             eps * current.grad_test[m * d + n]);
        push(row_b, layout.index(j, Var::q, n),
             eps * current.grad_test[m * d + n]);
        push(row_b, layout.index(j, Var::u, n),
             -current.weighted[m * d + n]);
      }
    }

    if (j == 1) {
      // +eps * hat(a) * conj(test(a^+)) on element 1 rows; the additive
      // constants go to the right-hand side with flipped sign
      for (int m = 0; m < d; ++m) {
        const int row_a = layout.index(1, Var::u, m);
        const int row_b = layout.index(1, Var::q, m);
        const Complex test = std::conj(current.at_left[m]);
        add_hat(row_a, eps * test, left_bdry.u_hat, 0, current.at_left, 1,
                current.at_left);
        add_hat(row_b, eps * test, left_bdry.q_hat, 0, current.at_left, 1,
                current.at_left);
        rhs[row_a] -= eps * test * left_bdry.u_hat.constant *
                      cfg.incoming_amplitude;
        rhs[row_b] -= eps * test * left_bdry.q_hat.constant *
                      cfg.incoming_amplitude;
      }
    }

    if (j == n_el) {
      // -eps * hat(b) * conj(test(b^-)) on element N rows
      for (int m = 0; m < d; ++m) {
        const int row_a = layout.index(n_el, Var::u, m);
        const int row_b = layout.index(n_el, Var::q, m);
        const Complex test = std::conj(current.at_right[m]);
        add_hat(row_a, -eps * test, right_bdry.u_hat, n_el, current.at_right,
                0, current.at_right);
        add_hat(row_b, -eps * test, right_bdry.q_hat, n_el, current.at_right,
                0, current.at_right);
        rhs[row_a] += eps * test * right_bdry.u_hat.constant *
                      cfg.incoming_amplitude;
        rhs[row_b] += eps * test * right_bdry.q_hat.constant *
                      cfg.incoming_amplitude;
      }
    } else {
      // interface x_{j+1/2}: tested from both sides, trial values from both
      // sides; minus limits come from element j, plus limits from j+1
      LocalElement next = integrate_element(cfg, j + 1);
      for (int m = 0; m < d; ++m) {
        const Complex test_minus = std::conj(current.at_right[m]);
        add_hat(layout.index(j, Var::u, m), -eps * test_minus, interior.u_hat,
                j, current.at_right, j + 1, next.at_left);
        add_hat(layout.index(j, Var::q, m), -eps * test_minus, interior.q_hat,
                j, current.at_right, j + 1, next.at_left);

        const Complex test_plus = std::conj(next.at_left[m]);
        add_hat(layout.index(j + 1, Var::u, m), eps * test_plus,
                interior.u_hat, j, current.at_right, j + 1, next.at_left);
        add_hat(layout.index(j + 1, Var::q, m), eps * test_plus,
                interior.q_hat, j, current.at_right, j + 1, next.at_left);
      }
      current = std::move(next);
    }
  }

  return GlobalSystem(layout.size(), std::move(trips), std::move(rhs), layout);
}

}  // namespace msdg
