#include "sgforge/decimal.hpp"

#include <cmath>
#include <cstdlib>

namespace sgforge {

Decimal Decimal::from_double(double value) {
    return from_units(static_cast<std::int64_t>(std::llround(value * kScale)));
}

std::optional<Decimal> Decimal::parse(std::string_view text) {
    std::size_t i = 0;
    bool negative = false;
    if (i < text.size() && (text[i] == '-' || text[i] == '+')) {
        negative = text[i] == '-';
        ++i;
    }
    std::int64_t whole = 0;
    std::size_t whole_digits = 0;
    while (i < text.size() && text[i] >= '0' && text[i] <= '9') {
        whole = whole * 10 + (text[i] - '0');
        if (whole > kMaxWhole) return std::nullopt;
        ++i;
        ++whole_digits;
    }
    if (whole_digits == 0) return std::nullopt;
    std::int64_t frac = 0;
    if (i < text.size() && text[i] == '.') {
        ++i;
        int frac_digits = 0;
        while (i < text.size() && text[i] >= '0' && text[i] <= '9') {
            if (++frac_digits > kFractionDigits) return std::nullopt;
            frac = frac * 10 + (text[i] - '0');
            ++i;
        }
        if (frac_digits == 0) return std::nullopt;
        for (int k = frac_digits; k < kFractionDigits; ++k) frac *= 10;
    }
    if (i != text.size()) return std::nullopt;
    const std::int64_t units = whole * kScale + frac;
    return from_units(negative ? -units : units);
}

std::string Decimal::to_string() const {
    const bool negative = units_ < 0;
    const std::uint64_t mag = negative ? static_cast<std::uint64_t>(-(units_ + 1)) + 1
                                       : static_cast<std::uint64_t>(units_);
    std::string out = negative ? "-" : "";
    out += std::to_string(mag / kScale);
    std::uint64_t frac = mag % kScale;
    if (frac != 0) {
        std::string digits = std::to_string(frac);
        digits.insert(0, kFractionDigits - digits.size(), '0');
        while (digits.back() == '0') digits.pop_back();
        out += '.';
        out += digits;
    }
    return out;
}

}  // namespace sgforge
