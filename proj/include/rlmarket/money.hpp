#pragma once

#include <cmath>
#include <compare>
#include <cstdint>

namespace rlmarket {

// Cash amounts in fixed point (1e-9 currency units). Settlement transfers and
// per-step flows are exact integers, so cash conservation holds to the unit.
class Money {
public:
  static constexpr std::int64_t kUnitsPerPound = 1'000'000'000;

  constexpr Money() = default;

  static constexpr Money from_units(std::int64_t units) {
    Money m;
    m.units_ = units;
    return m;
  }
  static Money from_double(double pounds) {
    return from_units(std::llround(pounds * static_cast<double>(kUnitsPerPound)));
  }

  constexpr std::int64_t units() const { return units_; }
  constexpr double to_double() const {
    return static_cast<double>(units_) / static_cast<double>(kUnitsPerPound);
  }

  constexpr Money& operator+=(Money o) {
    units_ += o.units_;
    return *this;
  }
  constexpr Money& operator-=(Money o) {
    units_ -= o.units_;
    return *this;
  }
  friend constexpr Money operator+(Money a, Money b) { return a += b; }
  friend constexpr Money operator-(Money a, Money b) { return a -= b; }
  friend constexpr Money operator-(Money a) { return from_units(-a.units_); }
  friend constexpr auto operator<=>(Money, Money) = default;

  // Rounded product, e.g. rate * balance or fee * notional.
  Money scaled(double factor) const {
    return from_units(std::llround(static_cast<double>(units_) * factor));
  }

private:
  std::int64_t units_ = 0;
};

// Value of `quantity` shares at a tick-quantized price.
inline Money notional(double price, std::int64_t quantity) {
  return Money::from_double(price * static_cast<double>(quantity));
}

}  // namespace rlmarket
