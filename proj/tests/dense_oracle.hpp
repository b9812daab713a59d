// Independent dense construction of the two-element E1 system with constant
// coefficient, written directly from the weak form with closed-form
// exponential integrals.  Deliberately shares no code with the library
// assembly path; it is the oracle the sparse assembly is checked against.
#ifndef MSDG_TESTS_DENSE_ORACLE_HPP
#define MSDG_TESTS_DENSE_ORACLE_HPP

#include <cmath>
#include <complex>
#include <stdexcept>
#include <vector>

namespace oracle {

using Complex = std::complex<double>;

struct DenseSystem {
  int n = 0;
  std::vector<Complex> a;  // row-major n x n
  std::vector<Complex> rhs;
  Complex& at(int r, int c) { return a[r * n + c]; }
  Complex at(int r, int c) const { return a[r * n + c]; }
};

// Two uniform elements on [0,1], local basis {e^{ikt}, e^{-ikt}} with
// t = x - x_j, k = sqrt(f0)/eps.  Unknown order: u1_0 u1_1 q1_0 q1_1 then
// element 2; rows are the first weak equation (two test members) and the
// second, per element.
inline DenseSystem two_element_e1_system(double f0, double eps, double alpha,
                                         double beta, double gamma) {
  const double h = 0.5;
  const double k = std::sqrt(f0) / eps;
  const Complex i(0.0, 1.0);
  const double root = std::sqrt(f0);

  // moment E(d) = int_{-h/2}^{h/2} e^{i d k t} dt
  auto moment = [&](int d) -> Complex {
    if (d == 0) return h;
    return 2.0 * std::sin(d * k * h / 2.0) / (d * k);
  };
  const int sign[2] = {+1, -1};

  Complex mass[2][2], dtest[2][2];
  for (int m = 0; m < 2; ++m)
    for (int n = 0; n < 2; ++n) {
      mass[m][n] = moment(sign[n] - sign[m]);
      dtest[m][n] = -i * double(sign[m]) * k * moment(sign[n] - sign[m]);
    }
  Complex at_r[2], at_l[2];  // endpoint values, same for both elements
  for (int n = 0; n < 2; ++n) {
    at_r[n] = std::exp(i * double(sign[n]) * k * h / 2.0);
    at_l[n] = std::exp(-i * double(sign[n]) * k * h / 2.0);
  }

  DenseSystem sys;
  sys.n = 8;
  sys.a.assign(64, Complex(0.0));
  sys.rhs.assign(8, Complex(0.0));
  auto u1 = [](int n) { return 0 + n; };
  auto q1 = [](int n) { return 2 + n; };
  auto u2 = [](int n) { return 4 + n; };
  auto q2 = [](int n) { return 6 + n; };

  for (int m = 0; m < 2; ++m) {
    const int rowA1 = 0 + m, rowB1 = 2 + m, rowA2 = 4 + m, rowB2 = 6 + m;
    const Complex tl = std::conj(at_l[m]);  // test at element left end
    const Complex tr = std::conj(at_r[m]);  // test at element right end

    for (int n = 0; n < 2; ++n) {
      // volume integrals, element 1
      sys.at(rowA1, q1(n)) += mass[m][n];
      sys.at(rowA1, u1(n)) += eps * dtest[m][n];
      sys.at(rowB1, q1(n)) += eps * dtest[m][n];
      sys.at(rowB1, u1(n)) += -f0 * mass[m][n];
      // volume integrals, element 2
      sys.at(rowA2, q2(n)) += mass[m][n];
      sys.at(rowA2, u2(n)) += eps * dtest[m][n];
      sys.at(rowB2, q2(n)) += eps * dtest[m][n];
      sys.at(rowB2, u2(n)) += -f0 * mass[m][n];

      // interface x = 1/2:
      //   u_hat = u1(R) - i beta (q1(R) - q2(L)),
      //   q_hat = q2(L) + i alpha (u1(R) - u2(L))
      // element 1 rows carry -eps * hat * conj(test(R)); element 2 rows
      // carry +eps * hat * conj(test(L))
      sys.at(rowA1, u1(n)) += -eps * tr * at_r[n];
      sys.at(rowA1, q1(n)) += -eps * tr * (-i * beta) * at_r[n];
      sys.at(rowA1, q2(n)) += -eps * tr * (i * beta) * at_l[n];
      sys.at(rowB1, q2(n)) += -eps * tr * at_l[n];
      sys.at(rowB1, u1(n)) += -eps * tr * (i * alpha) * at_r[n];
      sys.at(rowB1, u2(n)) += -eps * tr * (-i * alpha) * at_l[n];

      sys.at(rowA2, u1(n)) += eps * tl * at_r[n];
      sys.at(rowA2, q1(n)) += eps * tl * (-i * beta) * at_r[n];
      sys.at(rowA2, q2(n)) += eps * tl * (i * beta) * at_l[n];
      sys.at(rowB2, q2(n)) += eps * tl * at_l[n];
      sys.at(rowB2, u1(n)) += eps * tl * (i * alpha) * at_r[n];
      sys.at(rowB2, u2(n)) += eps * tl * (-i * alpha) * at_l[n];

      // boundary x = 0:
      //   u_hat = (1-gamma) u1(L) + i gamma/root q1(L) + 2 gamma
      //   q_hat = gamma q1(L) - i (1-gamma) root u1(L) + 2i(1-gamma) root
      sys.at(rowA1, u1(n)) += eps * tl * (1.0 - gamma) * at_l[n];
      sys.at(rowA1, q1(n)) += eps * tl * (i * gamma / root) * at_l[n];
      sys.at(rowB1, q1(n)) += eps * tl * gamma * at_l[n];
      sys.at(rowB1, u1(n)) += eps * tl * (-i * (1.0 - gamma) * root) * at_l[n];

      // boundary x = 1:
      //   u_hat = (1-gamma) u2(R) - i gamma/root q2(R)
      //   q_hat = gamma q2(R) + i (1-gamma) root u2(R)
      sys.at(rowA2, u2(n)) += -eps * tr * (1.0 - gamma) * at_r[n];
      sys.at(rowA2, q2(n)) += -eps * tr * (-i * gamma / root) * at_r[n];
      sys.at(rowB2, q2(n)) += -eps * tr * gamma * at_r[n];
      sys.at(rowB2, u2(n)) += -eps * tr * (i * (1.0 - gamma) * root) * at_r[n];
    }

    // boundary constants moved to the right-hand side
    sys.rhs[rowA1] += -eps * tl * 2.0 * gamma;
    sys.rhs[rowB1] += -eps * tl * 2.0 * i * (1.0 - gamma) * root;
  }
  return sys;
}

// Textbook Gaussian elimination with partial pivoting on a dense system.
inline std::vector<Complex> gauss_solve(DenseSystem sys) {
  const int n = sys.n;
  std::vector<Complex> x = sys.rhs;
  for (int col = 0; col < n; ++col) {
    int pivot = col;
    for (int r = col + 1; r < n; ++r)
      if (std::abs(sys.at(r, col)) > std::abs(sys.at(pivot, col))) pivot = r;
    if (std::abs(sys.at(pivot, col)) == 0.0)
      throw std::runtime_error("oracle system is singular");
    if (pivot != col) {
      for (int c = 0; c < n; ++c)
        std::swap(sys.at(pivot, c), sys.at(col, c));
      std::swap(x[pivot], x[col]);
    }
    for (int r = col + 1; r < n; ++r) {
      const Complex factor = sys.at(r, col) / sys.at(col, col);
      for (int c = col; c < n; ++c) sys.at(r, c) -= factor * sys.at(col, c);
      x[r] -= factor * x[col];
    }
  }
  for (int r = n - 1; r >= 0; --r) {
    for (int c = r + 1; c < n; ++c) x[r] -= sys.at(r, c) * x[c];
    x[r] /= sys.at(r, r);
  }
  return x;
}

}  // namespace oracle

#endif
