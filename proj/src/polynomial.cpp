#include "ci/polynomial.hpp"

#include <optional>

namespace ci {

Poly Poly::shifted_down(int k) const {
  if (is_zero()) return Poly();
  if (valuation() < k) throw NumericError("polynomial not divisible by x^k");
  return from_coeffs(std::vector<Scalar>(c_.begin() + k, c_.end()));
}

Poly Poly::operator+(const Poly& o) const {
  std::vector<Scalar> out(std::max(c_.size(), o.c_.size()), Scalar(0));
  for (std::size_t k = 0; k < c_.size(); ++k) out[k] += c_[k];
  for (std::size_t k = 0; k < o.c_.size(); ++k) out[k] += o.c_[k];
  return from_coeffs(std::move(out));
}

Poly Poly::operator-() const {
  std::vector<Scalar> out = c_;
  for (auto& c : out) c = -c;
  return from_coeffs(std::move(out));
}

Poly Poly::operator-(const Poly& o) const { return *this + (-o); }

Poly Poly::operator*(const Poly& o) const {
  if (is_zero() || o.is_zero()) return Poly();
  std::vector<Scalar> out(c_.size() + o.c_.size() - 1, Scalar(0));
  for (std::size_t a = 0; a < c_.size(); ++a)
    for (std::size_t b = 0; b < o.c_.size(); ++b) out[a + b] += c_[a] * o.c_[b];
  return from_coeffs(std::move(out));
}

void Poly::divmod(const Poly& a, const Poly& b, Poly& q, Poly& r) {
  if (b.is_zero()) throw NumericError("polynomial division by zero");
  std::vector<Scalar> rem = a.c_;
  std::vector<Scalar> quot;
  int db = b.degree();
  while (static_cast<int>(rem.size()) - 1 >= db) {
    while (!rem.empty() && rem.back().is_zero()) rem.pop_back();
    if (static_cast<int>(rem.size()) - 1 < db) break;
    int shift = static_cast<int>(rem.size()) - 1 - db;
    Scalar f = rem.back() / b.lead();
    if (static_cast<int>(quot.size()) < shift + 1) quot.resize(shift + 1, Scalar(0));
    quot[shift] += f;
    for (int k = 0; k <= db; ++k) rem[shift + k] -= f * b[k];
    rem.pop_back();
  }
  q = from_coeffs(std::move(quot));
  r = from_coeffs(std::move(rem));
}

Poly Poly::operator%(const Poly& o) const {
  Poly q, r;
  divmod(*this, o, q, r);
  return r;
}

Poly Poly::operator/(const Poly& o) const {
  Poly q, r;
  divmod(*this, o, q, r);
  return q;
}

Scalar Poly::eval(const Scalar& x) const {
  Scalar v(0);
  for (auto it = c_.rbegin(); it != c_.rend(); ++it) v = v * x + *it;
  return v;
}

std::complex<double> Poly::eval(std::complex<double> x) const {
  std::complex<double> v = 0.0;
  for (auto it = c_.rbegin(); it != c_.rend(); ++it) v = v * x + it->to_complex();
  return v;
}

Poly Poly::monic() const {
  if (is_zero()) return *this;
  Scalar inv = Scalar(1) / lead();
  std::vector<Scalar> out = c_;
  for (auto& c : out) c *= inv;
  return from_coeffs(std::move(out));
}

std::string Poly::str(const std::string& var) const {
  if (is_zero()) return "0";
  std::string s;
  for (std::size_t k = 0; k < c_.size(); ++k) {
    if (c_[k].is_zero()) continue;
    if (!s.empty()) s += " + ";
    if (k == 0) {
      s += c_[k].str();
    } else {
      if (!c_[k].is_one()) s += c_[k].str() + "*";
      s += var;
      if (k > 1) s += "^" + std::to_string(k);
    }
  }
  return s;
}

Poly gcd(const Poly& a, const Poly& b) {
  Poly x = a, y = b;
  while (!y.is_zero()) {
    Poly r = x % y;
    x = y;
    y = r;
  }
  return x.monic();
}

RatFn::RatFn(Poly num, Poly den) : num_(std::move(num)), den_(std::move(den)) {
  if (den_.is_zero()) throw NumericError("rational function with zero denominator");
  if (num_.is_zero()) {
    den_ = Poly(Scalar(1));
    return;
  }
  Poly g = gcd(num_, den_);
  if (g.degree() > 0) {
    num_ = num_ / g;
    den_ = den_ / g;
  }
  Scalar lead = den_.lead();
  if (!lead.is_one()) {
    Scalar inv = Scalar(1) / lead;
    num_ = num_ * Poly(inv);
    den_ = den_ * Poly(inv);
  }
}

RatFn RatFn::operator+(const RatFn& o) const {
  return RatFn(num_ * o.den_ + o.num_ * den_, den_ * o.den_);
}
RatFn RatFn::operator-(const RatFn& o) const {
  return RatFn(num_ * o.den_ - o.num_ * den_, den_ * o.den_);
}
RatFn RatFn::operator*(const RatFn& o) const {
  return RatFn(num_ * o.num_, den_ * o.den_);
}
RatFn RatFn::operator/(const RatFn& o) const {
  if (o.is_zero()) throw NumericError("rational function division by zero");
  return RatFn(num_ * o.den_, den_ * o.num_);
}
RatFn RatFn::operator-() const { return RatFn(-num_, den_); }

std::optional<Scalar> RatFn::limit_at_zero() const {
  if (is_zero()) return Scalar(0);
  int vn = num_.valuation(), vd = den_.valuation();
  if (vn < vd) return std::nullopt;  // divergent
  Poly n = num_.shifted_down(vd), d = den_.shifted_down(vd);
  return n.at_zero() / d.at_zero();
}

std::string RatFn::str(const std::string& var) const {
  if (den_ == Poly(Scalar(1))) return num_.str(var);
  return "(" + num_.str(var) + ") / (" + den_.str(var) + ")";
}

}  // namespace ci
