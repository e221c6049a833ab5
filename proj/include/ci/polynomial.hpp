#pragma once

#include <string>
#include <vector>

#include "ci/scalar.hpp"

namespace ci {

// Dense univariate polynomial over Scalar, low order first, trailing
// zeros trimmed.  Small degrees only (regulator expansions, cyclotomic
// moduli), so no fancy arithmetic.
class Poly {
 public:
  Poly() = default;
  explicit Poly(Scalar c) {
    if (!c.is_zero()) c_.push_back(std::move(c));
  }
  static Poly x(int power = 1) {
    Poly p;
    p.c_.assign(power + 1, Scalar(0));
    p.c_.back() = Scalar(1);
    return p;
  }
  static Poly from_coeffs(std::vector<Scalar> c) {
    Poly p;
    p.c_ = std::move(c);
    p.trim();
    return p;
  }

  bool is_zero() const { return c_.empty(); }
  int degree() const { return static_cast<int>(c_.size()) - 1; }
  const Scalar& operator[](std::size_t k) const { return c_[k]; }
  const std::vector<Scalar>& coeffs() const { return c_; }

  Scalar at_zero() const { return c_.empty() ? Scalar(0) : c_[0]; }
  Scalar lead() const { return c_.empty() ? Scalar(0) : c_.back(); }

  // lowest index with nonzero coefficient (0 for the zero polynomial)
  int valuation() const {
    for (std::size_t k = 0; k < c_.size(); ++k)
      if (!c_[k].is_zero()) return static_cast<int>(k);
    return 0;
  }

  Poly shifted_down(int k) const;  // divide by x^k (requires valuation >= k)

  Poly operator+(const Poly& o) const;
  Poly operator-(const Poly& o) const;
  Poly operator*(const Poly& o) const;
  Poly operator-() const;
  bool operator==(const Poly& o) const { return c_ == o.c_; }

  // Exact Euclidean division; throws on zero divisor.
  static void divmod(const Poly& a, const Poly& b, Poly& q, Poly& r);
  Poly operator%(const Poly& o) const;
  Poly operator/(const Poly& o) const;  // exact quotient of divmod

  Scalar eval(const Scalar& x) const;
  std::complex<double> eval(std::complex<double> x) const;

  Poly monic() const;

  std::string str(const std::string& var) const;

 private:
  void trim() {
    while (!c_.empty() && c_.back().is_zero()) c_.pop_back();
  }
  std::vector<Scalar> c_;
};

Poly gcd(const Poly& a, const Poly& b);

// Rational function num/den over Scalar, normalized: gcd cancelled, den
// monic.  The coefficient field for regulator-dependent linear systems.
class RatFn {
 public:
  RatFn() : num_(), den_(Poly(Scalar(1))) {}
  RatFn(Poly num, Poly den);
  explicit RatFn(Scalar c) : num_(Poly(std::move(c))), den_(Poly(Scalar(1))) {}

  static RatFn zero() { return RatFn(); }
  static RatFn one() { return RatFn(Scalar(1)); }

  const Poly& num() const { return num_; }
  const Poly& den() const { return den_; }
  bool is_zero() const { return num_.is_zero(); }

  RatFn operator+(const RatFn& o) const;
  RatFn operator-(const RatFn& o) const;
  RatFn operator*(const RatFn& o) const;
  RatFn operator/(const RatFn& o) const;
  RatFn operator-() const;
  bool operator==(const RatFn& o) const { return num_ == o.num_ && den_ == o.den_; }

  // The exact limit x -> 0; empty when the entry diverges.
  std::optional<Scalar> limit_at_zero() const;

  std::string str(const std::string& var) const;

 private:
  Poly num_, den_;
};

}  // namespace ci
