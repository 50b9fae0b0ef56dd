#include "mcg/edt.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>
#include <vector>

namespace mcg {

namespace {

constexpr double kInf = 1e20;

// 1-D squared distance transform (lower envelope of parabolas).
void dt1d(const double* f, int n, double* d, int* v, double* z) {
  int k = 0;
  v[0] = 0;
  z[0] = -kInf;
  z[1] = kInf;
  for (int q = 1; q < n; ++q) {
    double s;
    while (true) {
      s = ((f[q] + double(q) * q) - (f[v[k]] + double(v[k]) * v[k])) /
          (2.0 * q - 2.0 * v[k]);
      if (k > 0 && s <= z[k]) {
        --k;
      } else {
        break;
      }
    }
    ++k;
    v[k] = q;
    z[k] = s;
    z[k + 1] = kInf;
  }
  k = 0;
  for (int q = 0; q < n; ++q) {
    while (z[k + 1] < q) ++k;
    double dq = q - v[k];
    d[q] = dq * dq + f[v[k]];
  }
}

}  // namespace

std::vector<float> distance_field_m(int nx, int ny, int nz, double res,
                                    const std::vector<std::uint8_t>& source) {
  std::size_t total = static_cast<std::size_t>(nx) * ny * nz;
  if (source.size() != total) {
    throw std::invalid_argument("distance_field_m: mask size mismatch");
  }
  std::vector<double> d2(total);
  for (std::size_t i = 0; i < total; ++i) d2[i] = source[i] ? 0.0 : kInf;

  int nmax = std::max({nx, ny, nz});
  std::vector<double> f(nmax), d(nmax), z(nmax + 1);
  std::vector<int> v(nmax);
  auto idx = [&](int x, int y, int zc) {
    return (static_cast<std::size_t>(zc) * ny + y) * nx + x;
  };

  for (int zc = 0; zc < nz; ++zc) {  // along x
    for (int y = 0; y < ny; ++y) {
      for (int x = 0; x < nx; ++x) f[x] = d2[idx(x, y, zc)];
      dt1d(f.data(), nx, d.data(), v.data(), z.data());
      for (int x = 0; x < nx; ++x) d2[idx(x, y, zc)] = d[x];
    }
  }
  for (int zc = 0; zc < nz; ++zc) {  // along y
    for (int x = 0; x < nx; ++x) {
      for (int y = 0; y < ny; ++y) f[y] = d2[idx(x, y, zc)];
      dt1d(f.data(), ny, d.data(), v.data(), z.data());
      for (int y = 0; y < ny; ++y) d2[idx(x, y, zc)] = d[y];
    }
  }
  for (int y = 0; y < ny; ++y) {  // along z
    for (int x = 0; x < nx; ++x) {
      for (int zc = 0; zc < nz; ++zc) f[zc] = d2[idx(x, y, zc)];
      dt1d(f.data(), nz, d.data(), v.data(), z.data());
      for (int zc = 0; zc < nz; ++zc) d2[idx(x, y, zc)] = d[zc];
    }
  }

  std::vector<float> out(total);
  for (std::size_t i = 0; i < total; ++i) {
    out[i] = d2[i] >= kInf * 0.5
                 ? std::numeric_limits<float>::infinity()
                 : static_cast<float>(std::sqrt(d2[i]) * res);
  }
  return out;
}

}  // namespace mcg
