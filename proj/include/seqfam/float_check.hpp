#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstdint>
#include <numbers>
#include <string>
#include <vector>

#include "json.hpp"
#include "seqfam/exact.hpp"
#include "seqfam/families.hpp"

namespace seqfam {

struct FloatCompareResult {
  std::string family;
  std::int64_t n = 0;
  std::int64_t m = 0;
  ExactScalar exact;
  std::complex<double> float_product;
  double relative_error = 0.0;
  /// |Im(product)| / max(1, |exact|); zero for real root sets.
  double imaginary_residual = 0.0;
};

/// prod_{l=1..n} (m + x_{n,l}) in double precision, factors taken in
/// increasing l, compared against the exact X_{n,m}.
inline FloatCompareResult float_product(const FamilySpec& family, std::int64_t n, std::int64_t m,
                                        const ExactScalar& exact) {
  const FloatRoots roots = roots_float(family, n);
  std::complex<double> product(1.0, 0.0);
  const double shift = static_cast<double>(m);
  for (double r : roots.values) {
    const std::complex<double> factor = roots.imaginary ? std::complex<double>(shift, r) : std::complex<double>(shift + r, 0.0);
    product *= factor;
  }
  FloatCompareResult out;
  out.family = family.descriptor();
  out.n = n;
  out.m = m;
  out.exact = exact;
  out.float_product = product;
  const double e = exact.to_double();
  const double scale = std::max(1.0, std::fabs(e));
  out.relative_error = std::fabs(product.real() - e) / scale;
  out.imaginary_residual = std::fabs(product.imag()) / scale;
  return out;
}

inline FloatCompareResult float_product(const FamilySpec& family, std::int64_t n, std::int64_t m) {
  return float_product(family, n, m, X(family, n, m));
}

/// sum_{l=1..n} cos(l pi / (n+1)); zero up to rounding.
inline double chebyshev_zero_sum(std::int64_t n) {
  if (n < 1) throw ContractError("chebyshev_zero_sum: n must be >= 1");
  double sum = 0.0;
  for (std::int64_t l = 1; l <= n; ++l) sum += chebyshev_cos(l, n);
  return sum;
}

/// F_n as prod_{l=1}^{floor((n-1)/2)} (3 + 2 cos(2 l pi / n)).
inline double fibonacci_real_product(std::int64_t n) {
  if (n < 1) throw ContractError("fibonacci_real_product: n must be >= 1");
  double product = 1.0;
  for (std::int64_t l = 1; l <= (n - 1) / 2; ++l)
    product *= 3.0 + 2.0 * std::cos(2.0 * std::numbers::pi * static_cast<double>(l) / static_cast<double>(n));
  return product;
}

/// F_n as prod_{l=1}^{n-1} (1 - 2i cos(l pi / n)); the imaginary part of
/// the result should vanish.
inline std::complex<double> fibonacci_complex_product(std::int64_t n) {
  if (n < 1) throw ContractError("fibonacci_complex_product: n must be >= 1");
  std::complex<double> product(1.0, 0.0);
  for (std::int64_t l = 1; l <= n - 1; ++l) product *= std::complex<double>(1.0, -2.0 * chebyshev_cos(l, n - 1));
  return product;
}

/// P_n as 2^{floor(n/2)} prod_{l=1}^{floor((n-1)/2)} (3 + cos(2 l pi / n)).
inline double pell_real_product(std::int64_t n) {
  if (n < 1) throw ContractError("pell_real_product: n must be >= 1");
  double product = std::ldexp(1.0, static_cast<int>(n / 2));
  for (std::int64_t l = 1; l <= (n - 1) / 2; ++l)
    product *= 3.0 + std::cos(2.0 * std::numbers::pi * static_cast<double>(l) / static_cast<double>(n));
  return product;
}

struct FloatReport {
  std::string family;
  IntRange n_range;
  IntRange m_range;
  double tolerance = 1e-9;
  std::vector<FloatCompareResult> results;
  double max_relative_error = 0.0;
  double max_imaginary_residual = 0.0;
  std::size_t failures = 0;

  bool ok() const { return failures == 0; }
};

/// A point fails when either the relative error or the imaginary residual
/// reaches `tolerance`.
inline FloatReport float_sweep(const FamilySpec& family, IntRange n_range, IntRange m_range, double tolerance = 1e-9) {
  FloatReport report{family.descriptor(), n_range, m_range, tolerance, {}, 0.0, 0.0, 0};
  FamilyEvaluator eval(family);
  for (std::int64_t n = std::max<std::int64_t>(1, n_range.lo); n <= n_range.hi; ++n) {
    for (std::int64_t m = m_range.lo; m <= m_range.hi; ++m) {
      auto r = float_product(family, n, m, eval.X(n, m));
      report.max_relative_error = std::max(report.max_relative_error, r.relative_error);
      report.max_imaginary_residual = std::max(report.max_imaginary_residual, r.imaginary_residual);
      if (!(r.relative_error < tolerance) || !(r.imaginary_residual < tolerance)) ++report.failures;
      report.results.push_back(std::move(r));
    }
  }
  return report;
}

inline nlohmann::ordered_json to_json(const FloatCompareResult& r) {
  return {{"family", r.family},
          {"params", {{"n", r.n}, {"m", r.m}}},
          {"exact", r.exact.str()},
          {"float_real", r.float_product.real()},
          {"float_imag", r.float_product.imag()},
          {"relative_error", r.relative_error},
          {"imaginary_residual", r.imaginary_residual}};
}

/// Failing points only, unless `all_points` is set.
inline nlohmann::ordered_json to_json(const FloatReport& r, bool all_points = false) {
  nlohmann::ordered_json j;
  j["family"] = r.family;
  j["grid"] = {{"n", {r.n_range.lo, r.n_range.hi}}, {"m", {r.m_range.lo, r.m_range.hi}}};
  j["tolerance"] = r.tolerance;
  j["total"] = r.results.size();
  j["max_relative_error"] = r.max_relative_error;
  j["max_imaginary_residual"] = r.max_imaginary_residual;
  j["failures"] = nlohmann::ordered_json::array();
  j["points"] = nlohmann::ordered_json::array();
  for (const auto& p : r.results) {
    const bool bad = !(p.relative_error < r.tolerance) || !(p.imaginary_residual < r.tolerance);
    if (bad) j["failures"].push_back(to_json(p));
    if (all_points) j["points"].push_back(to_json(p));
  }
  if (!all_points) j.erase("points");
  j["pass"] = r.ok();
  return j;
}

}  // namespace seqfam
