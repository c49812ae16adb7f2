#include "gkd45/rational.hpp"

#include <charconv>
#include <numeric>
#include <stdexcept>

namespace gkd45 {

namespace {

using i128 = __int128;

std::int64_t checked64(i128 v, const char* what) {
  if (v > INT64_MAX || v < INT64_MIN) throw std::overflow_error(what);
  return static_cast<std::int64_t>(v);
}

i128 gcd128(i128 a, i128 b) {
  if (a < 0) a = -a;
  if (b < 0) b = -b;
  while (b != 0) {
    i128 t = a % b;
    a = b;
    b = t;
  }
  return a;
}

}  // namespace

Rat::Rat(std::int64_t n) : num_(n), den_(1) {}

Rat::Rat(std::int64_t n, std::int64_t d) {
  if (d == 0) throw std::domain_error("rational with zero denominator");
  if (d < 0) {
    n = -n;
    d = -d;
  }
  std::int64_t g = std::gcd(n, d);
  if (g > 1) {
    n /= g;
    d /= g;
  }
  num_ = n;
  den_ = d;
}

const Rat& Rat::zero() {
  static const Rat v(0);
  return v;
}

const Rat& Rat::one() {
  static const Rat v(1);
  return v;
}

Rat Rat::operator+(const Rat& o) const {
  i128 n = i128(num_) * o.den_ + i128(o.num_) * den_;
  i128 d = i128(den_) * o.den_;
  i128 g = gcd128(n, d);
  if (g > 1) {
    n /= g;
    d /= g;
  }
  Rat r;
  r.num_ = checked64(n, "rational addition overflow");
  r.den_ = checked64(d, "rational addition overflow");
  return r;
}

Rat Rat::operator-(const Rat& o) const { return *this + (-o); }

Rat Rat::operator*(const Rat& o) const {
  i128 n = i128(num_) * o.num_;
  i128 d = i128(den_) * o.den_;
  i128 g = gcd128(n, d);
  if (g > 1) {
    n /= g;
    d /= g;
  }
  Rat r;
  r.num_ = checked64(n, "rational multiplication overflow");
  r.den_ = checked64(d, "rational multiplication overflow");
  return r;
}

Rat Rat::operator/(const Rat& o) const {
  if (o.num_ == 0) throw std::domain_error("rational division by zero");
  i128 n = i128(num_) * o.den_;
  i128 d = i128(den_) * o.num_;
  if (d < 0) {
    n = -n;
    d = -d;
  }
  i128 g = gcd128(n, d);
  if (g > 1) {
    n /= g;
    d /= g;
  }
  Rat r;
  r.num_ = checked64(n, "rational division overflow");
  r.den_ = checked64(d, "rational division overflow");
  return r;
}

Rat Rat::operator-() const {
  Rat r;
  r.num_ = -num_;
  r.den_ = den_;
  return r;
}

std::strong_ordering Rat::operator<=>(const Rat& o) const {
  i128 l = i128(num_) * o.den_;
  i128 r = i128(o.num_) * den_;
  if (l < r) return std::strong_ordering::less;
  if (l > r) return std::strong_ordering::greater;
  return std::strong_ordering::equal;
}

std::string Rat::str() const {
  if (den_ == 1) return std::to_string(num_);
  return std::to_string(num_) + "/" + std::to_string(den_);
}

Rat Rat::parse(std::string_view text) {
  auto parse_int = [](std::string_view s) -> std::int64_t {
    std::int64_t v = 0;
    const char* first = s.data();
    const char* last = s.data() + s.size();
    auto [ptr, ec] = std::from_chars(first, last, v);
    if (ec != std::errc() || ptr != last)
      throw std::invalid_argument("malformed rational: '" + std::string(s) + "'");
    return v;
  };
  if (text.empty()) throw std::invalid_argument("malformed rational: empty string");
  auto slash = text.find('/');
  if (slash == std::string_view::npos) return Rat(parse_int(text));
  std::int64_t n = parse_int(text.substr(0, slash));
  std::int64_t d = parse_int(text.substr(slash + 1));
  if (d == 0) throw std::invalid_argument("malformed rational: zero denominator");
  return Rat(n, d);
}

}  // namespace gkd45
