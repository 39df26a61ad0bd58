#pragma once

#include <cmath>
#include <cstdint>
#include <deque>
#include <functional>
#include <numbers>
#include <optional>
#include <string>
#include <unordered_map>
#include <utility>
#include <variant>
#include <vector>

#include "seqfam/exact.hpp"

namespace seqfam {

/// Inclusive integer interval [lo, hi].
struct IntRange {
  std::int64_t lo = 0;
  std::int64_t hi = 0;

  std::int64_t size() const { return hi < lo ? 0 : hi - lo + 1; }
  bool contains(std::int64_t v) const { return lo <= v && v <= hi; }
  friend bool operator==(const IntRange&, const IntRange&) = default;
};

/// x_{n,l} = c for every l.
struct PowerFamily {
  ExactScalar c;
};

/// x_{n,l} = l.
struct PochhammerFamily {};

/// x_{n,l} = -2 sqrt(q) cos(l pi / (n+1)); X_{n,m} = L_{n+1}^{(m,q)}.
struct LucasFamily {
  std::int64_t q = -1;
};

using RootRule = std::function<ExactScalar(std::int64_t n, std::int64_t l)>;

/// Arbitrary exact root set, evaluated as the literal product.
struct ExplicitRootsFamily {
  std::string name;
  RootRule root;
};

/**
 * Selects one family {x_{n,l}} and, through X(), the sequences
 * X_{n,m} = prod_{l=1..n} (m + x_{n,l}) it generates.
 *
 * Values are immutable and cheap to copy; the generalized Fibonacci family
 * is lucas(-1).
 */
class FamilySpec {
 public:
  using Variant = std::variant<PowerFamily, PochhammerFamily, LucasFamily, ExplicitRootsFamily>;

  static FamilySpec power(ExactScalar c = 0) { return FamilySpec(PowerFamily{std::move(c)}); }
  static FamilySpec pochhammer() { return FamilySpec(PochhammerFamily{}); }
  static FamilySpec lucas(std::int64_t q) {
    if (q == 0) throw ContractError("Lucas family requires q != 0");
    return FamilySpec(LucasFamily{q});
  }
  static FamilySpec fibonacci() { return lucas(-1); }
  static FamilySpec explicit_roots(std::string name, RootRule rule) {
    if (!rule) throw ContractError("explicit-roots family requires a root rule");
    return FamilySpec(ExplicitRootsFamily{std::move(name), std::move(rule)});
  }

  const Variant& variant() const { return v_; }

  template <class T>
  const T* get_if() const {
    return std::get_if<T>(&v_);
  }

  std::optional<std::int64_t> lucas_q() const {
    if (auto* l = get_if<LucasFamily>()) return l->q;
    return std::nullopt;
  }

  /// Stable textual descriptor, also accepted by the CLI family selector.
  std::string descriptor() const {
    return std::visit(
        [](const auto& f) -> std::string {
          using T = std::decay_t<decltype(f)>;
          if constexpr (std::is_same_v<T, PowerFamily>) return "power:" + f.c.str();
          else if constexpr (std::is_same_v<T, PochhammerFamily>) return "pochhammer";
          else if constexpr (std::is_same_v<T, LucasFamily>) return "lucas:" + std::to_string(f.q);
          else return "roots:" + f.name;
        },
        v_);
  }

 private:
  explicit FamilySpec(Variant v) : v_(std::move(v)) {}
  Variant v_;
};

/// L_k^{(p,q)}: L_0 = 0, L_1 = 1, L_k = p L_{k-1} - q L_{k-2}.
inline ExactScalar lucas_term(std::int64_t k, std::int64_t p, std::int64_t q) {
  if (k < 0) throw ContractError("lucas_term: k must be non-negative");
  mpz_class prev(0), cur(1);
  if (k == 0) return prev;
  const mpz_class pp(static_cast<long>(p)), qq(static_cast<long>(q));
  for (std::int64_t i = 1; i < k; ++i) {
    mpz_class next = pp * cur - qq * prev;
    prev = std::move(cur);
    cur = std::move(next);
  }
  return cur;
}

/**
 * X_{n,m} for any integer m. Lucas-type families use the three-term
 * recursion in n rather than the irrational product. n = 0 yields the empty
 * product 1.
 */
inline ExactScalar X(const FamilySpec& family, std::int64_t n, std::int64_t m) {
  if (n < 0) throw ContractError("X: n must be non-negative");
  return std::visit(
      [&](const auto& f) -> ExactScalar {
        using T = std::decay_t<decltype(f)>;
        if constexpr (std::is_same_v<T, PowerFamily>) {
          return pow(ExactScalar(m) + f.c, n);
        } else if constexpr (std::is_same_v<T, PochhammerFamily>) {
          return pochhammer(m + 1, n);
        } else if constexpr (std::is_same_v<T, LucasFamily>) {
          return lucas_term(n + 1, m, f.q);
        } else {
          ExactScalar product(1);
          const ExactScalar shift(m);
          for (std::int64_t l = 1; l <= n; ++l) product *= shift + f.root(n, l);
          return product;
        }
      },
      family.variant());
}

/// Sum of the root set, sum_{l=1..n} x_{n,l}.
inline ExactScalar script_X(const FamilySpec& family, std::int64_t n) {
  if (n < 1) throw ContractError("script_X: n must be >= 1");
  return std::visit(
      [&](const auto& f) -> ExactScalar {
        using T = std::decay_t<decltype(f)>;
        if constexpr (std::is_same_v<T, PowerFamily>) {
          return ExactScalar(n) * f.c;
        } else if constexpr (std::is_same_v<T, PochhammerFamily>) {
          return ExactScalar(n * (n + 1) / 2);
        } else if constexpr (std::is_same_v<T, LucasFamily>) {
          // scaled zeros of U_n are symmetric about the origin
          return ExactScalar(0);
        } else {
          ExactScalar sum;
          for (std::int64_t l = 1; l <= n; ++l) sum += f.root(n, l);
          return sum;
        }
      },
      family.variant());
}

/// sum_{l=0}^{floor(n/2)} C(n-l, l) m^{n-2l}, equal to F_{n+1}^{(m)}.
inline ExactScalar fibonacci_polynomial(std::int64_t n, std::int64_t m) {
  if (n < 0) throw ContractError("fibonacci_polynomial: n must be non-negative");
  ExactScalar sum;
  const ExactScalar base(m);
  for (std::int64_t l = 0; 2 * l <= n; ++l) sum += binomial(n - l, l) * pow(base, n - 2 * l);
  return sum;
}

/**
 * Memoizing evaluator for one family. Not synchronized: give each worker
 * its own instance. Returned references stay valid for the evaluator's
 * lifetime.
 */
class FamilyEvaluator {
 public:
  explicit FamilyEvaluator(FamilySpec family) : family_(std::move(family)), lucas_q_(family_.lucas_q()) {}

  const FamilySpec& family() const { return family_; }

  const ExactScalar& X(std::int64_t n, std::int64_t m) {
    if (n < 0) throw ContractError("X: n must be non-negative");
    if (lucas_q_) return lucas_column(m, n + 1);
    auto key = std::make_pair(n, m);
    auto it = cache_.find(key);
    if (it == cache_.end()) it = cache_.emplace(key, seqfam::X(family_, n, m)).first;
    return it->second;
  }

  const ExactScalar& script_X(std::int64_t n) {
    auto it = script_cache_.find(n);
    if (it == script_cache_.end()) it = script_cache_.emplace(n, seqfam::script_X(family_, n)).first;
    return it->second;
  }

 private:
  struct PairHash {
    std::size_t operator()(const std::pair<std::int64_t, std::int64_t>& p) const noexcept {
      return std::hash<std::int64_t>{}(p.first * 1000003 ^ p.second);
    }
  };

  const ExactScalar& lucas_column(std::int64_t m, std::int64_t k) {
    auto& col = columns_[m];
    if (col.empty()) {
      col.emplace_back(0);
      col.emplace_back(1);
    }
    const ExactScalar p(m), q(*lucas_q_);
    while (static_cast<std::int64_t>(col.size()) <= k) {
      const std::size_t s = col.size();
      col.push_back(p * col[s - 1] - q * col[s - 2]);
    }
    return col[static_cast<std::size_t>(k)];
  }

  FamilySpec family_;
  std::optional<std::int64_t> lucas_q_;
  std::unordered_map<std::int64_t, std::deque<ExactScalar>> columns_;
  std::unordered_map<std::pair<std::int64_t, std::int64_t>, ExactScalar, PairHash> cache_;
  std::unordered_map<std::int64_t, ExactScalar> script_cache_;
};

/// A rectangle of X_{n,m} values, rows indexed by n and columns by m.
struct SequenceWindow {
  FamilySpec family;
  IntRange n_range;
  IntRange m_range;
  std::vector<std::vector<ExactScalar>> values;

  const ExactScalar& at(std::int64_t n, std::int64_t m) const {
    if (!n_range.contains(n) || !m_range.contains(m)) throw std::out_of_range("SequenceWindow: cell outside window");
    return values[static_cast<std::size_t>(n - n_range.lo)][static_cast<std::size_t>(m - m_range.lo)];
  }
};

inline SequenceWindow table(const FamilySpec& family, IntRange n_range, IntRange m_range) {
  if (n_range.size() == 0 || m_range.size() == 0) throw ContractError("table: ranges must be non-empty");
  if (n_range.lo < 0) throw ContractError("table: n must be non-negative");
  SequenceWindow w{family, n_range, m_range, {}};
  FamilyEvaluator eval(family);
  w.values.reserve(static_cast<std::size_t>(n_range.size()));
  for (std::int64_t n = n_range.lo; n <= n_range.hi; ++n) {
    auto& row = w.values.emplace_back();
    row.reserve(static_cast<std::size_t>(m_range.size()));
    for (std::int64_t m = m_range.lo; m <= m_range.hi; ++m) row.push_back(eval.X(n, m));
  }
  return w;
}

/// cos(l pi / (n+1)) computed as sin((n+1-2l) pi / (2(n+1))), which is exactly
/// zero at the midpoint and exactly odd under l -> n+1-l.
inline double chebyshev_cos(std::int64_t l, std::int64_t n) {
  const double num = static_cast<double>(n + 1 - 2 * l);
  const double den = 2.0 * static_cast<double>(n + 1);
  return std::sin(std::numbers::pi * num / den);
}

/// Floating-point roots. For Lucas(q) with q < 0 the roots are purely
/// imaginary; `values` then holds their imaginary parts.
struct FloatRoots {
  std::vector<double> values;
  bool imaginary = false;
};

inline FloatRoots roots_float(const FamilySpec& family, std::int64_t n) {
  if (n < 1) throw ContractError("roots_float: n must be >= 1");
  FloatRoots out;
  out.values.reserve(static_cast<std::size_t>(n));
  std::visit(
      [&](const auto& f) {
        using T = std::decay_t<decltype(f)>;
        for (std::int64_t l = 1; l <= n; ++l) {
          if constexpr (std::is_same_v<T, PowerFamily>) {
            out.values.push_back(f.c.to_double());
          } else if constexpr (std::is_same_v<T, PochhammerFamily>) {
            out.values.push_back(static_cast<double>(l));
          } else if constexpr (std::is_same_v<T, LucasFamily>) {
            const double scale = 2.0 * std::sqrt(static_cast<double>(f.q < 0 ? -f.q : f.q));
            out.values.push_back(-scale * chebyshev_cos(l, n));
            out.imaginary = f.q < 0;
          } else {
            out.values.push_back(f.root(n, l).to_double());
          }
        }
      },
      family.variant());
  return out;
}

}  // namespace seqfam
