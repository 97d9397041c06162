#pragma once

// Reference computations written independently of the library: long double,
// direct formulas, no shared helpers.

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <filesystem>
#include <fstream>
#include <random>
#include <sstream>
#include <string>
#include <vector>

namespace oracle {

// x_k from the variation-of-constants sum, every product recomputed from scratch.
inline long double closed_form_direct(const std::vector<double>& beta, const std::vector<double>& z, double x0,
                                      std::size_t k) {
  long double head = x0;
  for (std::size_t l = 0; l < k; ++l) head *= beta[l];
  long double sum = 0.0L;
  for (std::size_t j = 0; j < k; ++j) {
    long double w = 1.0L - static_cast<long double>(beta[j]);
    for (std::size_t l = j + 1; l < k; ++l) w *= beta[l];
    sum += w * z[j];
  }
  return head + sum;
}

// Forward recursion in extended precision.
inline std::vector<long double> forward_basic(const std::vector<double>& beta, const std::vector<double>& z,
                                              double x0) {
  std::vector<long double> x{x0};
  for (std::size_t k = 0; k < beta.size(); ++k) {
    const long double b = beta[k];
    x.push_back(b * x.back() + (1.0L - b) * z[k]);
  }
  return x;
}

// Largest singular value of [[a, b], [c, d]] from the eigenvalues of A^T A.
inline double spectral_norm_2x2(double a, double b, double c, double d) {
  const double p = a * a + b * b + c * c + d * d;
  const double det = a * d - b * c;
  const double disc = std::sqrt(std::max(0.0, p * p - 4.0 * det * det));
  return std::sqrt((p + disc) / 2.0);
}

// Solves (I - A) x = b by Cramer's rule.
inline std::array<double, 2> affine_fixed_point_2x2(double a, double b, double c, double d, double b1, double b2) {
  const double m11 = 1 - a, m12 = -b, m21 = -c, m22 = 1 - d;
  const double det = m11 * m22 - m12 * m21;
  return {(b1 * m22 - m12 * b2) / det, (m11 * b2 - m21 * b1) / det};
}

// One scalar step of x' = a f + b x + g T + (phi + d r) u, with
// g = 1 + (1 - b) e - a - b - d.
inline long double generalized_scalar(long double a, long double b, long double d, long double e, long double fx,
                                      long double x, long double tx, long double phi, long double r, long double u) {
  const long double g = 1.0L + (1.0L - b) * e - a - b - d;
  return a * fx + b * x + g * tx + (phi + d * r) * u;
}

inline std::string slurp(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

inline std::size_t count_lines(const std::string& s) {
  std::size_t n = 0;
  for (char c : s) n += c == '\n';
  return n;
}

}  // namespace oracle
