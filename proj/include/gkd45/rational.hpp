#ifndef GKD45_RATIONAL_HPP
#define GKD45_RATIONAL_HPP

#include <compare>
#include <cstdint>
#include <string>
#include <string_view>

namespace gkd45 {

// Exact rational arithmetic. Invariants: den > 0, gcd(|num|, den) == 1.
// Intermediate products run through 128-bit integers; results that do not
// fit in 64 bits after reduction raise std::overflow_error.
class Rat {
 public:
  constexpr Rat() : num_(0), den_(1) {}
  Rat(std::int64_t n);                    // n/1
  Rat(std::int64_t n, std::int64_t d);    // normalized, d != 0

  static const Rat& zero();
  static const Rat& one();

  std::int64_t num() const { return num_; }
  std::int64_t den() const { return den_; }

  bool is_zero() const { return num_ == 0; }
  bool is_one() const { return num_ == 1 && den_ == 1; }
  // True when the value lies in the unit interval [0, 1].
  bool in_unit() const { return num_ >= 0 && num_ <= den_; }

  Rat operator+(const Rat& o) const;
  Rat operator-(const Rat& o) const;
  Rat operator*(const Rat& o) const;
  Rat operator/(const Rat& o) const;  // o != 0
  Rat operator-() const;

  bool operator==(const Rat& o) const { return num_ == o.num_ && den_ == o.den_; }
  std::strong_ordering operator<=>(const Rat& o) const;

  // "0", "1", or "a/b" in lowest terms.
  std::string str() const;

  // Accepts "a/b" and bare integers; value is normalized. Throws
  // std::invalid_argument on malformed text.
  static Rat parse(std::string_view text);

 private:
  std::int64_t num_;
  std::int64_t den_;
};

inline const Rat& min(const Rat& a, const Rat& b) { return b < a ? b : a; }
inline const Rat& max(const Rat& a, const Rat& b) { return a < b ? b : a; }

}  // namespace gkd45

#endif
