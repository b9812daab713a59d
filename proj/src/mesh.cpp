#include "msdg/mesh.hpp"

#include <algorithm>
#include <stdexcept>

namespace msdg {

MeshPartition MeshPartition::uniform(double a, double b, int n_elements) {
  if (!(a < b))
    throw std::invalid_argument("uniform partition requires a < b");
  if (n_elements < 1)
    throw std::invalid_argument("uniform partition requires N >= 1");
  std::vector<double> pts(static_cast<std::size_t>(n_elements) + 1);
  const double w = (b - a) / n_elements;
  for (int i = 0; i <= n_elements; ++i) pts[i] = a + i * w;
  pts.front() = a;
  pts.back() = b;  // endpoints exact regardless of rounding in a + i*w
  return MeshPartition(std::move(pts));
}

MeshPartition::MeshPartition(std::vector<double> breakpoints)
    : breakpoints_(std::move(breakpoints)) {
  if (breakpoints_.size() < 2)
    throw std::invalid_argument("partition needs at least two breakpoints");
  for (std::size_t i = 1; i < breakpoints_.size(); ++i)
    if (!(breakpoints_[i - 1] < breakpoints_[i]))
      throw std::invalid_argument("breakpoints must be strictly increasing");
}

double MeshPartition::h() const {
  double hmax = 0.0;
  for (std::size_t i = 1; i < breakpoints_.size(); ++i)
    hmax = std::max(hmax, breakpoints_[i] - breakpoints_[i - 1]);
  return hmax;
}

void MeshPartition::check_index(int j) const {
  if (j < 1 || j > num_elements())
    throw std::out_of_range("element index out of range");
}

double MeshPartition::left(int j) const {
  check_index(j);
  return breakpoints_[j - 1];
}

double MeshPartition::right(int j) const {
  check_index(j);
  return breakpoints_[j];
}

double MeshPartition::width(int j) const { return right(j) - left(j); }

double MeshPartition::midpoint(int j) const {
  return 0.5 * (left(j) + right(j));
}

int MeshPartition::element_containing(double x) const {
  if (x < a() || x > b())
    throw std::out_of_range("point outside the computational domain");
  auto it = std::lower_bound(breakpoints_.begin(), breakpoints_.end(), x);
  int j = static_cast<int>(it - breakpoints_.begin());
  if (j < 1) j = 1;  // x == a has only a right limit
  return j;
}

}  // namespace msdg
