#pragma once

#include <cstdint>
#include <ostream>
#include <stdexcept>
#include <string>

#include <boost/multiprecision/cpp_int.hpp>

namespace dsec {

// Residue mod a runtime prime. The modulus is process-wide and must be set
// before any value is created.
class Fp {
 public:
  Fp() = default;
  Fp(long long v) {  // NOLINT: implicit from integer literals
    long long p = modulus();
    v %= p;
    if (v < 0) v += p;
    v_ = static_cast<std::uint32_t>(v);
  }

  static std::uint32_t& modulus() {
    static std::uint32_t p = 32003;
    return p;
  }
  static void set_modulus(std::uint32_t p) {
    if (p < 2) throw std::invalid_argument("modulus must be a prime >= 2");
    for (std::uint32_t q = 2; q * q <= p; ++q)
      if (p % q == 0) throw std::invalid_argument("modulus " + std::to_string(p) + " is not prime");
    modulus() = p;
  }

  std::uint32_t value() const { return v_; }

  Fp operator+(Fp o) const {
    std::uint32_t s = v_ + o.v_;
    if (s >= modulus()) s -= modulus();
    return raw(s);
  }
  Fp operator-(Fp o) const { return raw(v_ >= o.v_ ? v_ - o.v_ : v_ + modulus() - o.v_); }
  Fp operator-() const { return raw(v_ == 0 ? 0 : modulus() - v_); }
  Fp operator*(Fp o) const {
    return raw(static_cast<std::uint32_t>(std::uint64_t(v_) * o.v_ % modulus()));
  }
  Fp operator/(Fp o) const { return *this * o.inv(); }
  Fp& operator+=(Fp o) { return *this = *this + o; }
  Fp& operator-=(Fp o) { return *this = *this - o; }
  Fp& operator*=(Fp o) { return *this = *this * o; }
  bool operator==(Fp o) const { return v_ == o.v_; }
  bool operator!=(Fp o) const { return v_ != o.v_; }

  Fp inv() const {
    if (v_ == 0) throw std::domain_error("division by zero in F_p");
    std::uint64_t r = 1, b = v_, e = modulus() - 2;
    while (e) {
      if (e & 1) r = r * b % modulus();
      b = b * b % modulus();
      e >>= 1;
    }
    return raw(static_cast<std::uint32_t>(r));
  }

 private:
  static Fp raw(std::uint32_t v) {
    Fp x;
    x.v_ = v;
    return x;
  }
  std::uint32_t v_ = 0;
};

inline std::ostream& operator<<(std::ostream& os, Fp x) { return os << x.value(); }

using Q = boost::multiprecision::cpp_rational;

template <class K>
struct FieldTraits;

template <>
struct FieldTraits<Fp> {
  static std::string name() { return "fp:" + std::to_string(Fp::modulus()); }
  static Fp from_ratio(long long num, long long den) {
    if (den == 0) throw std::invalid_argument("zero denominator");
    return Fp(num) / Fp(den);
  }
  static std::string str(Fp x) { return std::to_string(x.value()); }
};

template <>
struct FieldTraits<Q> {
  static std::string name() { return "q"; }
  static Q from_ratio(long long num, long long den) {
    if (den == 0) throw std::invalid_argument("zero denominator");
    return Q(num) / Q(den);
  }
  static std::string str(const Q& x) { return x.str(); }
};

// "3", "-2", "5/7"
template <class K>
K parse_scalar(const std::string& s) {
  auto slash = s.find('/');
  try {
    if (slash == std::string::npos) return FieldTraits<K>::from_ratio(std::stoll(s), 1);
    return FieldTraits<K>::from_ratio(std::stoll(s.substr(0, slash)), std::stoll(s.substr(slash + 1)));
  } catch (const std::logic_error&) {
    throw std::invalid_argument("bad scalar '" + s + "'");
  }
}

}  // namespace dsec
