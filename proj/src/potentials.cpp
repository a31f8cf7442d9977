#include <cmath>

#include "capdrum/capacity.hpp"
#include "capdrum/errors.hpp"

namespace capdrum {

Vec PotentialField::cell_center(std::int64_t flat) const {
  Vec p = Vec::zeros(dim);
  for (int a = 0; a < dim; ++a) {
    std::int64_t i = flat % dims[a];
    flat /= dims[a];
    p.x[a] = origin.x[a] + (double(i) + 0.5) * h;
  }
  return p;
}

double ball_potential(double r, double x_dist, int n) {
  if (n < 3) throw InvalidDimension("ball potential needs n >= 3");
  if (!(r > 0)) throw InvalidParameter("ball radius must be positive");
  if (x_dist < 0) throw InvalidParameter("distance must be nonnegative");
  if (x_dist <= r) return 1.0;
  return std::pow(r / x_dist, n - 2);
}

double layer_potential(double r1, double r2, double y_dist, int n) {
  if (n < 3) throw InvalidDimension("layer potential needs n >= 3");
  if (!(0 < r1 && r1 < r2))
    throw InvalidParameter("layer radii must satisfy 0 < r1 < r2");
  if (y_dist < 0) throw InvalidParameter("distance must be nonnegative");
  double y = y_dist;
  if (y <= r1) {
    return (r2 * r2 - r1 * r1) / (2.0 * (n - 2));
  }
  if (y <= r2) {
    return -y * y / (2.0 * n) + r2 * r2 / (2.0 * (n - 2)) -
           std::pow(r1, n) / (double(n) * (n - 2) * std::pow(y, n - 2));
  }
  return (std::pow(r2, n) - std::pow(r1, n)) /
         (double(n) * (n - 2) * std::pow(y, n - 2));
}

}  // namespace capdrum
