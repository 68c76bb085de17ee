#include <ldf/rational.hpp>

#include <ldf/errors.hpp>

#include <charconv>
#include <cmath>
#include <string>

namespace ldf {

namespace {

using boost::multiprecision::cpp_int;

cpp_int pow10(unsigned exponent) {
    cpp_int result = 1;
    for (unsigned k = 0; k < exponent; ++k) result *= 10;
    return result;
}

Rational parse_decimal(std::string_view text) {
    const std::string original(text);
    bool negative = false;
    if (!text.empty() && (text.front() == '-' || text.front() == '+')) {
        negative = text.front() == '-';
        text.remove_prefix(1);
    }

    long exponent = 0;
    if (auto e = text.find_first_of("eE"); e != std::string_view::npos) {
        const auto exp_text = text.substr(e + 1);
        auto [ptr, ec] = std::from_chars(exp_text.data(), exp_text.data() + exp_text.size(), exponent);
        if (ec != std::errc{} || ptr != exp_text.data() + exp_text.size()) {
            throw DomainError("malformed exponent in number '" + original + "'");
        }
        text = text.substr(0, e);
    }

    std::string digits;
    long fraction_digits = 0;
    bool seen_point = false;
    for (char c : text) {
        if (c == '.') {
            if (seen_point) throw DomainError("malformed number '" + original + "'");
            seen_point = true;
        } else if (c >= '0' && c <= '9') {
            digits.push_back(c);
            if (seen_point) ++fraction_digits;
        } else {
            throw DomainError("malformed number '" + original + "'");
        }
    }
    if (digits.empty()) throw DomainError("malformed number '" + original + "'");

    // cpp_int reads a leading zero as an octal prefix
    const auto first = digits.find_first_not_of('0');
    cpp_int mantissa(first == std::string::npos ? std::string("0") : digits.substr(first));
    if (negative) mantissa = -mantissa;
    const long scale = exponent - fraction_digits;
    if (scale >= 0) return Rational(mantissa * pow10(static_cast<unsigned>(scale)));
    return Rational(mantissa, pow10(static_cast<unsigned>(-scale)));
}

}  // namespace

Rational parse_rational(std::string_view text) {
    while (!text.empty() && text.front() == ' ') text.remove_prefix(1);
    while (!text.empty() && text.back() == ' ') text.remove_suffix(1);
    if (text.empty()) throw DomainError("empty rational literal");

    if (auto slash = text.find('/'); slash != std::string_view::npos) {
        const Rational num = parse_decimal(text.substr(0, slash));
        const Rational den = parse_decimal(text.substr(slash + 1));
        if (den == 0) throw DomainError("zero denominator in '" + std::string(text) + "'");
        return num / den;
    }
    return parse_decimal(text);
}

Rational rational_from_double(double value) {
    if (!std::isfinite(value)) throw DomainError("non-finite value has no rational form");
    char buffer[64];
    auto [ptr, ec] = std::to_chars(buffer, buffer + sizeof(buffer), value);
    if (ec != std::errc{}) throw DomainError("cannot format value");
    return parse_decimal(std::string_view(buffer, static_cast<std::size_t>(ptr - buffer)));
}

std::string to_string(const Rational& value) {
    return value.str();
}

}  // namespace ldf
