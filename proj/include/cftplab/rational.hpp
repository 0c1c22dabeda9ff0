#pragma once

#include <cstdint>
#include <numeric>
#include <stdexcept>
#include <string>

namespace cftplab {

// Exact fraction over 64-bit integers, used on the exact code paths
// (enumeration weights, closed-form conditionals with rational parameters).
// Intermediates go through __int128; anything that would overflow 64 bits
// after reduction throws instead of silently losing exactness.
class Rat {
 public:
  Rat() : num_(0), den_(1) {}
  Rat(std::int64_t n) : num_(n), den_(1) {}
  Rat(std::int64_t n, std::int64_t d) {
    if (d == 0) throw std::domain_error("Rat: zero denominator");
    reduce_from(n, d);
  }

  std::int64_t num() const { return num_; }
  std::int64_t den() const { return den_; }

  double to_double() const { return static_cast<double>(num_) / static_cast<double>(den_); }

  Rat operator-() const { return Rat(-num_, den_); }

  friend Rat operator+(const Rat& a, const Rat& b) {
    __int128 n = (__int128)a.num_ * b.den_ + (__int128)b.num_ * a.den_;
    __int128 d = (__int128)a.den_ * b.den_;
    return from128(n, d);
  }
  friend Rat operator-(const Rat& a, const Rat& b) { return a + (-b); }
  friend Rat operator*(const Rat& a, const Rat& b) {
    __int128 n = (__int128)a.num_ * b.num_;
    __int128 d = (__int128)a.den_ * b.den_;
    return from128(n, d);
  }
  friend Rat operator/(const Rat& a, const Rat& b) {
    if (b.num_ == 0) throw std::domain_error("Rat: division by zero");
    __int128 n = (__int128)a.num_ * b.den_;
    __int128 d = (__int128)a.den_ * b.num_;
    return from128(n, d);
  }

  Rat& operator+=(const Rat& o) { return *this = *this + o; }
  Rat& operator-=(const Rat& o) { return *this = *this - o; }
  Rat& operator*=(const Rat& o) { return *this = *this * o; }
  Rat& operator/=(const Rat& o) { return *this = *this / o; }

  friend bool operator==(const Rat& a, const Rat& b) {
    return a.num_ == b.num_ && a.den_ == b.den_;
  }
  friend bool operator!=(const Rat& a, const Rat& b) { return !(a == b); }
  friend bool operator<(const Rat& a, const Rat& b) {
    return (__int128)a.num_ * b.den_ < (__int128)b.num_ * a.den_;
  }
  friend bool operator<=(const Rat& a, const Rat& b) { return a < b || a == b; }
  friend bool operator>(const Rat& a, const Rat& b) { return b < a; }
  friend bool operator>=(const Rat& a, const Rat& b) { return b <= a; }

  // Integer power; exponent may be negative for nonzero base.
  Rat pow(long e) const {
    if (e < 0) {
      if (num_ == 0) throw std::domain_error("Rat: 0 to negative power");
      return Rat(den_, num_).pow(-e);
    }
    Rat r(1);
    Rat b = *this;
    while (e > 0) {
      if (e & 1) r *= b;
      b *= b;
      e >>= 1;
    }
    return r;
  }

  Rat abs() const { return num_ < 0 ? -*this : *this; }

  std::string str() const {
    if (den_ == 1) return std::to_string(num_);
    return std::to_string(num_) + "/" + std::to_string(den_);
  }

 private:
  static Rat from128(__int128 n, __int128 d) {
    if (d == 0) throw std::domain_error("Rat: zero denominator");
    if (d < 0) { n = -n; d = -d; }
    __int128 g = gcd128(n < 0 ? -n : n, d);
    if (g > 1) { n /= g; d /= g; }
    Rat r;
    r.num_ = narrow(n);
    r.den_ = narrow(d);
    return r;
  }

  void reduce_from(std::int64_t n, std::int64_t d) {
    Rat r = from128(n, d);
    num_ = r.num_;
    den_ = r.den_;
  }

  static __int128 gcd128(__int128 a, __int128 b) {
    while (b != 0) {
      __int128 t = a % b;
      a = b;
      b = t;
    }
    return a == 0 ? 1 : a;
  }

  static std::int64_t narrow(__int128 v) {
    if (v > INT64_MAX || v < INT64_MIN) throw std::overflow_error("Rat: 64-bit overflow");
    return static_cast<std::int64_t>(v);
  }

  std::int64_t num_;
  std::int64_t den_;  // > 0, gcd(num, den) == 1
};

}  // namespace cftplab
