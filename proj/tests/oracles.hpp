// Independent reference implementations used only by tests: dense Gaussian
// elimination, 1-D quadrature, and the periodic Q1 Laplacian stencil. These
// stay deliberately naive so they cannot share bugs with the library path.
#pragma once

#include <cmath>
#include <functional>
#include <stdexcept>
#include <vector>

namespace oracles {

// Dense Gaussian elimination with partial pivoting.
inline std::vector<double> dense_solve(std::vector<std::vector<double>> a,
                                       std::vector<double> b) {
  const int n = static_cast<int>(b.size());
  for (int k = 0; k < n; ++k) {
    int piv = k;
    for (int i = k + 1; i < n; ++i)
      if (std::abs(a[i][k]) > std::abs(a[piv][k])) piv = i;
    if (a[piv][k] == 0.0) throw std::runtime_error("oracle: singular matrix");
    std::swap(a[k], a[piv]);
    std::swap(b[k], b[piv]);
    for (int i = k + 1; i < n; ++i) {
      const double f = a[i][k] / a[k][k];
      for (int j = k; j < n; ++j) a[i][j] -= f * a[k][j];
      b[i] -= f * b[k];
    }
  }
  std::vector<double> x(n, 0.0);
  for (int i = n - 1; i >= 0; --i) {
    double s = b[i];
    for (int j = i + 1; j < n; ++j) s -= a[i][j] * x[j];
    x[i] = s / a[i][i];
  }
  return x;
}

// Composite Simpson quadrature over [a, b].
inline double simpson(const std::function<double(double)>& f, double a, double b,
                      int intervals) {
  if (intervals % 2 != 0) ++intervals;
  const double h = (b - a) / intervals;
  double s = f(a) + f(b);
  for (int i = 1; i < intervals; ++i)
    s += f(a + i * h) * (i % 2 == 1 ? 4.0 : 2.0);
  return s * h / 3.0;
}

// Harmonic mean of a positive 1-periodic profile, 1 / int(1/a).
inline double harmonic_mean(const std::function<double(double)>& a,
                            int intervals = 200001) {
  return 1.0 / simpson([&](double y) { return 1.0 / a(y); }, 0.0, 1.0, intervals);
}

inline double arithmetic_mean(const std::function<double(double)>& a,
                              int intervals = 200001) {
  return simpson(a, 0.0, 1.0, intervals);
}

// Periodic Q1 Laplacian 9-point stencil entry between nodes (di, dj) apart
// (wrapped): 8/3 center, -1/3 otherwise within the 3x3 neighborhood.
inline double q1_laplace_stencil(int di, int dj) {
  if (di == 0 && dj == 0) return 8.0 / 3.0;
  if (std::abs(di) <= 1 && std::abs(dj) <= 1) return -1.0 / 3.0;
  return 0.0;
}

}  // namespace oracles
