#pragma once

#include <gmpxx.h>

#include <complex>
#include <string>

#include "ci/error.hpp"

namespace ci {

using Rational = mpq_class;

// Exact Gaussian rational: re + im*i with arbitrary-precision rational
// parts.  All symbolic derivations run on this type; floating point only
// appears in the numeric oracle and the mode-sum limit checks.
class Scalar {
 public:
  Scalar() : re_(0), im_(0) {}
  Scalar(long n) : re_(n), im_(0) {}  // NOLINT: implicit by design
  Scalar(long num, long den) : re_(Rational(num, den)), im_(0) { re_.canonicalize(); }
  explicit Scalar(Rational re) : re_(std::move(re)), im_(0) {}
  Scalar(Rational re, Rational im) : re_(std::move(re)), im_(std::move(im)) {}

  static Scalar i() { return Scalar(Rational(0), Rational(1)); }

  const Rational& re() const { return re_; }
  const Rational& im() const { return im_; }

  bool is_zero() const { return re_ == 0 && im_ == 0; }
  bool is_one() const { return re_ == 1 && im_ == 0; }
  bool is_real() const { return im_ == 0; }
  bool is_imaginary() const { return re_ == 0 && im_ != 0; }

  Scalar operator-() const { return Scalar(-re_, -im_); }
  Scalar conj() const { return Scalar(re_, -im_); }

  Scalar operator+(const Scalar& o) const { return Scalar(re_ + o.re_, im_ + o.im_); }
  Scalar operator-(const Scalar& o) const { return Scalar(re_ - o.re_, im_ - o.im_); }
  Scalar operator*(const Scalar& o) const {
    return Scalar(re_ * o.re_ - im_ * o.im_, re_ * o.im_ + im_ * o.re_);
  }
  Scalar operator/(const Scalar& o) const {
    if (o.is_zero()) throw NumericError("scalar division by zero");
    Rational n = o.re_ * o.re_ + o.im_ * o.im_;
    return Scalar((re_ * o.re_ + im_ * o.im_) / n, (im_ * o.re_ - re_ * o.im_) / n);
  }

  Scalar& operator+=(const Scalar& o) { re_ += o.re_; im_ += o.im_; return *this; }
  Scalar& operator-=(const Scalar& o) { re_ -= o.re_; im_ -= o.im_; return *this; }
  Scalar& operator*=(const Scalar& o) { *this = *this * o; return *this; }
  Scalar& operator/=(const Scalar& o) { *this = *this / o; return *this; }

  bool operator==(const Scalar& o) const { return re_ == o.re_ && im_ == o.im_; }
  bool operator!=(const Scalar& o) const { return !(*this == o); }

  // Total order (re, im lexicographic); used for deterministic term maps,
  // not for any numeric meaning.
  int compare(const Scalar& o) const {
    int c = cmp(re_, o.re_);
    if (c != 0) return c;
    return cmp(im_, o.im_);
  }
  bool operator<(const Scalar& o) const { return compare(o) < 0; }

  Scalar pow(long e) const {
    if (e < 0) return Scalar(1) / pow(-e);
    Scalar r(1), b = *this;
    while (e > 0) {
      if (e & 1) r *= b;
      b *= b;
      e >>= 1;
    }
    return r;
  }

  std::complex<double> to_complex() const {
    return {re_.get_d(), im_.get_d()};
  }

  // "0", "3/2", "i", "-1/2*i", "(1+3/2*i)" -- re-parseable by the
  // expression grammar.
  std::string str() const {
    auto rat = [](const Rational& q) { return q.get_str(); };
    if (is_zero()) return "0";
    if (im_ == 0) return rat(re_);
    std::string imag;
    if (im_ == 1) imag = "i";
    else if (im_ == -1) imag = "-i";
    else imag = rat(im_) + "*i";
    if (re_ == 0) return imag;
    std::string s = "(" + rat(re_);
    if (imag[0] == '-') s += "-" + imag.substr(1);
    else s += "+" + imag;
    return s + ")";
  }

 private:
  Rational re_, im_;
};

inline Scalar operator*(long a, const Scalar& b) { return Scalar(a) * b; }

}  // namespace ci
