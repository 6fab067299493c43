#pragma once

#include <charconv>
#include <cmath>
#include <numbers>
#include <stdexcept>
#include <string>
#include <string_view>

namespace spinq {

namespace detail {

inline double parse_number(std::string_view s, std::string_view whole) {
    double v = 0.0;
    const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc{} || ptr != s.data() + s.size())
        throw std::invalid_argument("cannot parse angle '" + std::string(whole) + "'");
    return v;
}

} // namespace detail

/**
 * Parses "pi/2", "3pi/4", "3*pi/4", "-pi", "2pi/3", "pi" or plain radians ("1.5708").
 */
inline double parse_angle(std::string_view text) {
    std::string s;
    for (char c : text)
        if (c != ' ') s.push_back(c);
    if (s.empty()) throw std::invalid_argument("empty angle");

    const auto pi_pos = s.find("pi");
    if (pi_pos == std::string::npos) return detail::parse_number(s, text);

    std::string_view coeff{s.data(), pi_pos};
    std::string_view rest{s.data() + pi_pos + 2, s.size() - pi_pos - 2};
    if (!coeff.empty() && coeff.back() == '*') coeff.remove_suffix(1);

    double k = 1.0;
    if (coeff == "-") k = -1.0;
    else if (coeff == "+") k = 1.0;
    else if (!coeff.empty()) k = detail::parse_number(coeff.front() == '+' ? coeff.substr(1) : coeff, text);

    double den = 1.0;
    if (!rest.empty()) {
        if (rest.front() != '/') throw std::invalid_argument("cannot parse angle '" + std::string(text) + "'");
        den = detail::parse_number(rest.substr(1), text);
        if (den == 0.0) throw std::invalid_argument("angle denominator is zero");
    }
    const double v = k * std::numbers::pi / den;
    if (!std::isfinite(v)) throw std::invalid_argument("angle is not finite");
    return v;
}

} // namespace spinq
