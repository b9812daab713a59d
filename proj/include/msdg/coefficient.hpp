#ifndef MSDG_COEFFICIENT_HPP
#define MSDG_COEFFICIENT_HPP

#include <functional>
#include <optional>
#include <string>

namespace msdg {

/// Named coefficient f(x).  The name identifies the field in experiment
/// records and reference-cache metadata; two fields with the same name are
/// assumed to be the same function.
struct CoefficientField {
  std::string name;
  std::function<double(double)> fn;
  std::optional<double> constant;  ///< set when f is known constant

  double operator()(double x) const { return fn(x); }

  static CoefficientField make_constant(double value, std::string name);
  static CoefficientField const10();      ///< f(x) = 10, name "const10"
  static CoefficientField sin_plus_2();   ///< f(x) = sin x + 2, name "sinp2"

  /// Lookup by case name ("const10" or "sinp2"); throws on unknown names.
  static CoefficientField from_case(const std::string& case_name);

  /// Sampled maximum of f over [a, b] (used for quadrature/reference sizing).
  double sampled_max(double a, double b, int samples = 2001) const;
};

}  // namespace msdg

#endif
