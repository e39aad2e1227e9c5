#include "railq/rational.hpp"

#include <algorithm>
#include <cctype>
#include <cstdlib>
#include <stdexcept>

namespace railq {

namespace {

std::int64_t parse_int(std::string_view digits, std::string_view whole) {
    if (digits.empty()) {
        throw std::invalid_argument("malformed rational: '" + std::string(whole) + "'");
    }
    std::int64_t value = 0;
    for (char c : digits) {
        if (!std::isdigit(static_cast<unsigned char>(c))) {
            throw std::invalid_argument("malformed rational: '" + std::string(whole) + "'");
        }
        value = value * 10 + (c - '0');
    }
    return value;
}

} // namespace

Rational parse_rational(std::string_view text) {
    std::string_view body = text;
    while (!body.empty() && std::isspace(static_cast<unsigned char>(body.front()))) body.remove_prefix(1);
    while (!body.empty() && std::isspace(static_cast<unsigned char>(body.back()))) body.remove_suffix(1);

    bool negative = false;
    if (!body.empty() && (body.front() == '-' || body.front() == '+')) {
        negative = body.front() == '-';
        body.remove_prefix(1);
    }

    Rational value;
    if (auto slash = body.find('/'); slash != std::string_view::npos) {
        const auto num = parse_int(body.substr(0, slash), text);
        const auto den = parse_int(body.substr(slash + 1), text);
        if (den == 0) throw std::invalid_argument("zero denominator: '" + std::string(text) + "'");
        value = Rational(num, den);
    } else if (auto dot = body.find('.'); dot != std::string_view::npos) {
        const auto int_part = body.substr(0, dot);
        const auto frac_part = body.substr(dot + 1);
        const auto whole = int_part.empty() ? 0 : parse_int(int_part, text);
        std::int64_t scale = 1;
        for (std::size_t i = 0; i < frac_part.size(); ++i) scale *= 10;
        const auto frac = frac_part.empty() ? 0 : parse_int(frac_part, text);
        value = Rational(whole * scale + frac, scale);
    } else {
        value = Rational(parse_int(body, text));
    }
    return negative ? -value : value;
}

std::string format_rational(const Rational& value) {
    auto den = value.denominator();
    int twos = 0;
    int fives = 0;
    while (den % 2 == 0) { den /= 2; ++twos; }
    while (den % 5 == 0) { den /= 5; ++fives; }
    if (den != 1) {
        return std::to_string(value.numerator()) + "/" + std::to_string(value.denominator());
    }
    if (value.denominator() == 1) return std::to_string(value.numerator());
    return format_decimal(value, std::max(twos, fives));
}

std::string format_decimal(const Rational& value, int digits) {
    std::int64_t scale = 1;
    for (int i = 0; i < digits; ++i) scale *= 10;
    const bool negative = value < 0;
    const Rational magnitude = negative ? -value : value;
    // round half away from zero
    const Rational scaled = magnitude * scale + Rational(1, 2);
    const std::int64_t units = scaled.numerator() / scaled.denominator();

    std::string out = std::to_string(units / scale);
    if (digits > 0) {
        std::string frac = std::to_string(units % scale);
        out += "." + std::string(static_cast<std::size_t>(digits) - frac.size(), '0') + frac;
    }
    if (negative && units != 0) out.insert(out.begin(), '-');
    return out;
}

} // namespace railq
