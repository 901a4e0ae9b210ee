#pragma once

#include <cstdint>
#include <map>
#include <numeric>
#include <string>

namespace chainforge {

/// Exact non-negative rational with 64-bit parts; used to check attenuation
/// conservation without floating-point error. Throws on overflow.
class Rational {
 public:
  constexpr Rational() = default;
  Rational(std::int64_t num, std::int64_t den);

  std::int64_t num() const noexcept { return num_; }
  std::int64_t den() const noexcept { return den_; }
  double value() const noexcept { return static_cast<double>(num_) / static_cast<double>(den_); }
  bool is_integer() const noexcept { return den_ == 1; }

  Rational& operator+=(const Rational& o);
  friend Rational operator+(Rational a, const Rational& b) { return a += b; }
  friend bool operator==(const Rational&, const Rational&) = default;
  std::string to_string() const;

 private:
  std::int64_t num_ = 0;
  std::int64_t den_ = 1;
};

/// Sum of unit fractions 1/n stored as a count per denominator, so sums of
/// attenuated weights stay exact no matter how many users contribute.
class UnitFractionSum {
 public:
  void add(std::uint32_t denominator, std::uint64_t count = 1);
  UnitFractionSum& operator+=(const UnitFractionSum& o);

  /// Floating-point value, summed in increasing denominator order.
  double value() const noexcept;
  std::uint64_t terms() const noexcept;
  const std::map<std::uint32_t, std::uint64_t>& counts() const noexcept { return counts_; }
  bool empty() const noexcept { return counts_.empty(); }

  friend bool operator==(const UnitFractionSum&, const UnitFractionSum&) = default;

 private:
  std::map<std::uint32_t, std::uint64_t> counts_;
};

}  // namespace chainforge
