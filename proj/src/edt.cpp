#include "edt.hpp"

namespace capdrum::detail {

namespace {

// 1D pass over a strided line of length m.
void edt_line(double* f, std::int64_t stride, int m, std::vector<int>& v,
              std::vector<double>& z, std::vector<double>& scratch) {
  v.assign(m, 0);
  z.assign(m + 1, 0.0);
  scratch.assign(m, 0.0);
  for (int q = 0; q < m; ++q) scratch[q] = f[q * stride];

  int k = 0;
  v[0] = 0;
  z[0] = -kEdtInf;
  z[1] = kEdtInf;
  for (int q = 1; q < m; ++q) {
    if (scratch[q] == kEdtInf) continue;
    if (scratch[v[k]] == kEdtInf) {
      // no finite parabola yet
      k = 0;
      v[0] = q;
      z[0] = -kEdtInf;
      z[1] = kEdtInf;
      continue;
    }
    double s;
    while (true) {
      int p = v[k];
      s = ((scratch[q] + double(q) * q) - (scratch[p] + double(p) * p)) /
          (2.0 * (q - p));
      if (s <= z[k]) {
        --k;
      } else {
        break;
      }
    }
    ++k;
    v[k] = q;
    z[k] = s;
    z[k + 1] = kEdtInf;
  }

  if (scratch[v[0]] == kEdtInf) return;  // whole line empty

  k = 0;
  for (int q = 0; q < m; ++q) {
    while (z[k + 1] < q) ++k;
    double d = double(q) - v[k];
    f[q * stride] = d * d + scratch[v[k]];
  }
}

}  // namespace

void edt_squared(std::vector<double>& f, const std::array<int, 4>& dims,
                 int dim) {
  std::vector<int> v;
  std::vector<double> z, scratch;

  std::array<std::int64_t, 4> stride{1, 1, 1, 1};
  for (int a = 1; a < dim; ++a) stride[a] = stride[a - 1] * dims[a - 1];
  std::int64_t total = stride[dim - 1] * dims[dim - 1];

  for (int axis = 0; axis < dim; ++axis) {
    int m = dims[axis];
    std::int64_t st = stride[axis];
    // iterate over all lines along `axis`
    std::int64_t lines = total / m;
    for (std::int64_t l = 0; l < lines; ++l) {
      // decompose l into the non-axis coordinates to find the line start
      std::int64_t rem = l, start = 0;
      for (int a = 0; a < dim; ++a) {
        if (a == axis) continue;
        std::int64_t c = rem % dims[a];
        rem /= dims[a];
        start += c * stride[a];
      }
      edt_line(f.data() + start, st, m, v, z, scratch);
    }
  }
}

}  // namespace capdrum::detail
