#pragma once

#include <compare>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>

namespace sgforge {

/// Fixed-point decimal with six fractional digits.
///
/// Guard constants, variable values and thresholds are all stored this way so
/// that `==` and `!=` comparisons are exact and reproducible.
class Decimal {
public:
    static constexpr int kFractionDigits = 6;
    static constexpr std::int64_t kScale = 1'000'000;
    /// Largest accepted magnitude in whole units; keeps doubled values in range.
    static constexpr std::int64_t kMaxWhole = 1'000'000'000'000;

    constexpr Decimal() = default;

    static constexpr Decimal from_units(std::int64_t units) {
        Decimal d;
        d.units_ = units;
        return d;
    }
    static constexpr Decimal from_int(std::int64_t whole) { return from_units(whole * kScale); }
    /// Rounds to the nearest representable value (ties away from zero).
    static Decimal from_double(double value);

    /// Parses `-?digits(.digits)?`. Returns nullopt on malformed text, on more
    /// than six fractional digits, or on magnitude above kMaxWhole.
    static std::optional<Decimal> parse(std::string_view text);

    constexpr std::int64_t units() const { return units_; }
    double to_double() const { return static_cast<double>(units_) / kScale; }

    /// Shortest exact rendering: "15", "-3.5", "0.000001".
    std::string to_string() const;

    friend constexpr auto operator<=>(Decimal, Decimal) = default;
    friend constexpr bool operator==(Decimal, Decimal) = default;

    friend constexpr Decimal operator+(Decimal a, Decimal b) { return from_units(a.units_ + b.units_); }
    friend constexpr Decimal operator-(Decimal a, Decimal b) { return from_units(a.units_ - b.units_); }
    Decimal& operator+=(Decimal o) {
        units_ += o.units_;
        return *this;
    }

private:
    std::int64_t units_ = 0;
};

/// Closed interval [lo, hi].
struct Interval {
    Decimal lo;
    Decimal hi;

    bool valid() const { return lo <= hi; }
    bool contains(Decimal v) const { return lo <= v && v <= hi; }
    friend bool operator==(const Interval&, const Interval&) = default;
};

}  // namespace sgforge
