#include "msdg/coefficient.hpp"

#include <cmath>
#include <stdexcept>

namespace msdg {

CoefficientField CoefficientField::make_constant(double value,
                                                 std::string name) {
  CoefficientField f;
  f.name = std::move(name);
  f.fn = [value](double) { return value; };
  f.constant = value;
  return f;
}

CoefficientField CoefficientField::const10() {
  return make_constant(10.0, "const10");
}

CoefficientField CoefficientField::sin_plus_2() {
  CoefficientField f;
  f.name = "sinp2";
  f.fn = [](double x) { return std::sin(x) + 2.0; };
  return f;
}

CoefficientField CoefficientField::from_case(const std::string& case_name) {
  if (case_name == "const10") return const10();
  if (case_name == "sinp2") return sin_plus_2();
  throw std::invalid_argument("unknown coefficient case: " + case_name);
}

double CoefficientField::sampled_max(double a, double b, int samples) const {
  if (constant) return *constant;
  double m = fn(a);
  for (int i = 1; i < samples; ++i) {
    const double x = a + (b - a) * i / (samples - 1);
    m = std::max(m, fn(x));
  }
  return m;
}

}  // namespace msdg
