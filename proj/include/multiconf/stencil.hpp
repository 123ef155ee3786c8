#pragma once

#include <cmath>
#include <vector>

#include "errors.hpp"

namespace multiconf {

// Fornberg's recursion: weights of the derivative of order `deriv` at x0
// using samples at the points xs.
inline std::vector<double> fd_weights(double x0, const std::vector<double>& xs, int deriv) {
  const int n = static_cast<int>(xs.size());
  if (deriv >= n) throw DomainError("fd_weights: not enough points");
  std::vector<std::vector<double>> c(n, std::vector<double>(deriv + 1, 0.0));
  double c1 = 1.0;
  double c4 = xs[0] - x0;
  c[0][0] = 1.0;
  for (int i = 1; i < n; ++i) {
    int mn = std::min(i, deriv);
    double c2 = 1.0;
    double c5 = c4;
    c4 = xs[i] - x0;
    for (int j = 0; j < i; ++j) {
      double c3 = xs[i] - xs[j];
      c2 *= c3;
      if (j == i - 1) {
        for (int k = mn; k >= 1; --k) c[i][k] = c1 * (k * c[i - 1][k - 1] - c5 * c[i - 1][k]) / c2;
        c[i][0] = -c1 * c5 * c[i - 1][0] / c2;
      }
      for (int k = mn; k >= 1; --k) c[j][k] = (c4 * c[j][k] - k * c[j][k - 1]) / c3;
      c[j][0] = c4 * c[j][0] / c3;
    }
    c1 = c2;
  }
  std::vector<double> w(n);
  for (int i = 0; i < n; ++i) w[i] = c[i][deriv];
  return w;
}

// Integer offsets (relative to node i) and weights in index units for a
// derivative of the given order on an axis with n nodes.  Central stencils
// when `wrap` (periodic or reflected axes) or when they fit; otherwise the
// window is shifted inside [0, n).
struct Stencil1D {
  std::vector<int> offsets;
  std::vector<double> weights;
};

inline Stencil1D make_stencil(int i, int n, int order, int deriv, bool wrap) {
  const int half = order / 2;
  int width = deriv == 1 ? order + 1 : order + 1;
  int lo = -half;
  if (!wrap) {
    if (i + lo < 0 || i + lo + width - 1 > n - 1) {
      width = deriv == 1 ? order + 1 : order + 2;
      lo = std::max(-i, -half);
      if (i + lo + width - 1 > n - 1) lo = n - 1 - i - (width - 1);
      if (i + lo < 0) throw DomainError("stencil wider than axis");
    }
  }
  std::vector<double> xs(width);
  for (int k = 0; k < width; ++k) xs[k] = lo + k;
  auto w = fd_weights(0.0, xs, deriv);
  if (lo == -half && width == order + 1) {
    // exact (anti)symmetry, so constants and even/odd data difference cleanly
    for (int k = 1; k <= half; ++k) {
      double a = 0.5 * (w[half + k] + (deriv == 1 ? -w[half - k] : w[half - k]));
      w[half + k] = a;
      w[half - k] = deriv == 1 ? -a : a;
    }
    double sum = 0.0;
    for (int k = 1; k <= half; ++k) sum += w[half + k] + w[half - k];
    w[half] = -sum;
  } else {
    double sum = 0.0;
    for (int k = 1; k < width; ++k) sum += w[k];
    w[0] = -sum;
  }
  Stencil1D s;
  for (int k = 0; k < width; ++k) {
    if (w[k] == 0.0) continue;
    s.offsets.push_back(lo + k);
    s.weights.push_back(w[k]);
  }
  return s;
}

}  // namespace multiconf
