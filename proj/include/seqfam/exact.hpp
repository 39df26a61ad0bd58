#pragma once

#include <gmpxx.h>

#include <compare>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <string_view>

namespace seqfam {

/// Thrown when a caller violates an operation's precondition.
class ContractError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/**
 * Exact scalar: an arbitrary-precision integer or rational.
 *
 * Stored as a canonical GMP rational (lowest terms, positive denominator),
 * so an integer is simply a rational with denominator 1 and compares equal
 * to the corresponding integer regardless of how it was produced.
 */
class ExactScalar {
 public:
  enum class Kind { integer, rational };

  ExactScalar() = default;
  ExactScalar(int v) : v_(static_cast<long>(v)) {}
  ExactScalar(long v) : v_(v) {}
  ExactScalar(long long v) : v_(static_cast<long>(v)) {}
  ExactScalar(const mpz_class& z) : v_(z) {}
  explicit ExactScalar(const mpq_class& q) : v_(q) { v_.canonicalize(); }

  static ExactScalar fraction(const mpz_class& num, const mpz_class& den) {
    if (den == 0) throw std::domain_error("ExactScalar: zero denominator");
    return ExactScalar(mpq_class(num, den));
  }

  /// Parses "123", "-7", "1/2" or "-3/4".
  static ExactScalar parse(std::string_view text) {
    std::string s(text);
    auto slash = s.find('/');
    mpz_class num, den(1);
    auto parse_int = [&](const std::string& part, mpz_class& out) {
      std::string digits = part;
      if (!digits.empty() && digits.front() == '+') digits.erase(0, 1);
      if (digits.empty() || out.set_str(digits, 10) != 0)
        throw std::invalid_argument("not an exact number: '" + s + "'");
    };
    if (slash == std::string::npos) {
      parse_int(s, num);
    } else {
      parse_int(s.substr(0, slash), num);
      parse_int(s.substr(slash + 1), den);
      if (den == 0) throw std::invalid_argument("zero denominator in '" + s + "'");
    }
    return fraction(num, den);
  }

  Kind kind() const { return is_integer() ? Kind::integer : Kind::rational; }
  bool is_integer() const { return v_.get_den() == 1; }
  bool is_zero() const { return sgn(v_) == 0; }
  int sign() const { return sgn(v_); }

  const mpz_class& numerator() const { return v_.get_num(); }
  const mpz_class& denominator() const { return v_.get_den(); }
  const mpq_class& value() const { return v_; }

  mpz_class to_integer() const {
    if (!is_integer()) throw std::domain_error("ExactScalar " + str() + " is not an integer");
    return v_.get_num();
  }
  double to_double() const { return v_.get_d(); }

  /// Decimal rendering: "p" for integers, "p/q" otherwise.
  std::string str() const {
    if (is_integer()) return v_.get_num().get_str();
    return v_.get_num().get_str() + "/" + v_.get_den().get_str();
  }

  ExactScalar& operator+=(const ExactScalar& o) {
    v_ += o.v_;
    return *this;
  }
  ExactScalar& operator-=(const ExactScalar& o) {
    v_ -= o.v_;
    return *this;
  }
  ExactScalar& operator*=(const ExactScalar& o) {
    v_ *= o.v_;
    return *this;
  }
  ExactScalar& operator/=(const ExactScalar& o) {
    if (o.is_zero()) throw std::domain_error("ExactScalar: division by zero");
    v_ /= o.v_;
    return *this;
  }

  friend ExactScalar operator+(ExactScalar a, const ExactScalar& b) { return a += b; }
  friend ExactScalar operator-(ExactScalar a, const ExactScalar& b) { return a -= b; }
  friend ExactScalar operator*(ExactScalar a, const ExactScalar& b) { return a *= b; }
  friend ExactScalar operator/(ExactScalar a, const ExactScalar& b) { return a /= b; }
  friend ExactScalar operator-(const ExactScalar& a) { return ExactScalar(mpq_class(-a.v_)); }

  friend bool operator==(const ExactScalar& a, const ExactScalar& b) { return a.v_ == b.v_; }
  friend std::strong_ordering operator<=>(const ExactScalar& a, const ExactScalar& b) {
    int c = cmp(a.v_, b.v_);
    return c < 0 ? std::strong_ordering::less
                 : (c > 0 ? std::strong_ordering::greater : std::strong_ordering::equal);
  }

 private:
  mpq_class v_;
};

/// Integer power; the exponent is a machine integer and may be negative for
/// nonzero bases. 0^0 is 1.
inline ExactScalar pow(const ExactScalar& base, std::int64_t exponent) {
  if (exponent < 0) {
    if (base.is_zero()) throw std::domain_error("ExactScalar: 0 raised to a negative power");
    return ExactScalar(1) / pow(base, -exponent);
  }
  mpz_class num, den;
  mpz_pow_ui(num.get_mpz_t(), base.numerator().get_mpz_t(), static_cast<unsigned long>(exponent));
  mpz_pow_ui(den.get_mpz_t(), base.denominator().get_mpz_t(), static_cast<unsigned long>(exponent));
  return ExactScalar::fraction(num, den);
}

inline ExactScalar sign_power(std::int64_t exponent) {
  return (exponent % 2 == 0) ? ExactScalar(1) : ExactScalar(-1);
}

inline ExactScalar factorial(std::int64_t n) {
  if (n < 0) throw ContractError("factorial: n must be non-negative");
  mpz_class r;
  mpz_fac_ui(r.get_mpz_t(), static_cast<unsigned long>(n));
  return r;
}

/// C(a, k) for a >= 0; zero when k lies outside [0, a].
inline ExactScalar binomial(std::int64_t a, std::int64_t k) {
  if (a < 0) throw ContractError("binomial: a must be non-negative");
  if (k < 0 || k > a) return 0;
  mpz_class r;
  mpz_bin_uiui(r.get_mpz_t(), static_cast<unsigned long>(a), static_cast<unsigned long>(k));
  return r;
}

/// Rising factorial (a)_n = a (a+1) ... (a+n-1); (a)_0 = 1.
inline ExactScalar pochhammer(std::int64_t a, std::int64_t n) {
  if (n < 0) throw ContractError("pochhammer: n must be non-negative");
  mpz_class r(1);
  for (std::int64_t i = 0; i < n; ++i) r *= static_cast<long>(a + i);
  return r;
}

/// m!/(m-n)! as the product m (m-1) ... (m-n+1).
inline ExactScalar falling_factorial(std::int64_t m, std::int64_t n) {
  if (n < 0 || m < n) throw ContractError("falling_factorial: requires m >= n >= 0");
  mpz_class r(1);
  for (std::int64_t i = 0; i < n; ++i) r *= static_cast<long>(m - i);
  return r;
}

/// (-1)^n n! n(n+1)/2, the closed form of gould_sum(n).
inline ExactScalar gould_closed_form(std::int64_t n) {
  return sign_power(n) * factorial(n) * ExactScalar(n * (n + 1) / 2);
}

/**
 * Sum_{l=1}^{n} (-1)^l C(n,l) l^{n+1}.
 *
 * Checked against gould_closed_form on every call; a mismatch means the
 * arithmetic layer is broken and raises std::logic_error.
 */
inline ExactScalar gould_sum(std::int64_t n) {
  if (n < 1) throw ContractError("gould_sum: n must be >= 1");
  ExactScalar sum;
  for (std::int64_t l = 1; l <= n; ++l)
    sum += sign_power(l) * binomial(n, l) * pow(ExactScalar(l), n + 1);
  if (sum != gould_closed_form(n))
    throw std::logic_error("gould_sum(" + std::to_string(n) + ") disagrees with closed form");
  return sum;
}

}  // namespace seqfam
