#pragma once

#include <cstdint>
#include <cstdio>
#include <string>

#include <boost/rational.hpp>

#include "cantor/errors.hpp"

namespace cantor {

// Compare with Rational(n), not a bare integer: Boost 1.74's mixed-type == recurses
// forever under C++20 rewritten comparison operators.
using Rational = boost::rational<std::int64_t>;

inline Rational unit_fraction(std::uint64_t den) {
    return Rational(1, static_cast<std::int64_t>(den));
}

inline Rational ratio(std::uint64_t num, std::uint64_t den) {
    return Rational(static_cast<std::int64_t>(num), static_cast<std::int64_t>(den));
}

inline double to_double(const Rational& r) {
    return static_cast<double>(r.numerator()) / static_cast<double>(r.denominator());
}

// Decimal rendering with 12 significant digits.
inline std::string to_decimal(const Rational& r) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.12g", to_double(r));
    return buf;
}

inline std::string to_string(const Rational& r) {
    if (r.denominator() == 1) return std::to_string(r.numerator());
    return std::to_string(r.numerator()) + "/" + std::to_string(r.denominator());
}

/// Parses "p/q", an integer, or a finite decimal such as "0.015625" exactly.
inline Rational parse_rational(const std::string& text) {
    auto fail = [&] { throw InvalidInput("not a rational number: '" + text + "'"); };
    if (text.empty()) fail();
    try {
        if (auto slash = text.find('/'); slash != std::string::npos) {
            std::size_t used = 0;
            const auto num = std::stoll(text.substr(0, slash), &used);
            if (used != slash) fail();
            const auto den_text = text.substr(slash + 1);
            const auto den = std::stoll(den_text, &used);
            if (used != den_text.size() || den == 0) fail();
            return Rational(num, den);
        }
        std::size_t pos = 0;
        bool negative = false;
        if (text[pos] == '-' || text[pos] == '+') negative = text[pos++] == '-';
        std::int64_t num = 0;
        std::int64_t den = 1;
        bool seen_dot = false;
        bool seen_digit = false;
        for (; pos < text.size(); ++pos) {
            const char c = text[pos];
            if (c == '.' && !seen_dot) {
                seen_dot = true;
                continue;
            }
            if (c < '0' || c > '9') fail();
            if (num > (INT64_MAX / 10) || den > (INT64_MAX / 10)) fail();
            seen_digit = true;
            num = num * 10 + (c - '0');
            if (seen_dot) den *= 10;
        }
        if (!seen_digit) fail();
        return Rational(negative ? -num : num, den);
    } catch (const std::logic_error&) {
        fail();
    }
    return {};
}

} // namespace cantor
