#ifndef MARKOVTREE_SCALAR_HPP
#define MARKOVTREE_SCALAR_HPP

#include <boost/multiprecision/cpp_int.hpp>

#include <charconv>
#include <cmath>
#include <concepts>
#include <string>
#include <string_view>
#include <system_error>

#include "error.hpp"

namespace markovtree {

using Integer = boost::multiprecision::cpp_int;
using Rational = boost::multiprecision::cpp_rational;

// Float row-sum / invariance tolerance used throughout for binary64 data.
inline constexpr double kFloatTolerance = 1e-12;

template <typename T>
struct scalar_traits;

template <>
struct scalar_traits<double> {
    static constexpr bool exact = false;
    static constexpr const char* name = "float";
};

template <>
struct scalar_traits<Rational> {
    static constexpr bool exact = true;
    static constexpr const char* name = "exact";
};

// The two arithmetic modes. A matrix is uniformly one of them; mixing is a
// compile error because every container is parameterised on its scalar.
template <typename T>
concept Scalar = std::same_as<T, double> || std::same_as<T, Rational>;

template <Scalar T>
inline constexpr bool is_exact_v = scalar_traits<T>::exact;

inline double to_double(double x) { return x; }
inline double to_double(const Rational& x) { return x.convert_to<double>(); }
inline double to_double(const Integer& x) { return x.convert_to<double>(); }

inline double abs_value(double x) { return std::fabs(x); }
inline Rational abs_value(const Rational& x) { return boost::multiprecision::abs(x); }

inline bool is_zero(double x) { return x == 0.0; }
inline bool is_zero(const Rational& x) { return x.is_zero(); }

// Shortest round-trip decimal.
inline std::string to_string(double x) {
    char buf[64];
    auto res = std::to_chars(buf, buf + sizeof(buf), x);
    return std::string(buf, res.ptr);
}

// "p/q", or "p" for integers.
inline std::string to_string(const Rational& x) { return x.str(); }
inline std::string to_string(const Integer& x) { return x.str(); }

namespace detail {

inline bool all_digits(std::string_view s) {
    if (s.empty()) return false;
    for (char c : s)
        if (c < '0' || c > '9') return false;
    return true;
}

// cpp_int's string constructor reads a leading 0 as an octal prefix.
inline Integer decimal_integer(std::string_view digits) {
    std::size_t first = digits.find_first_not_of('0');
    if (first == std::string_view::npos) return Integer(0);
    return Integer(std::string(digits.substr(first)));
}

// Decimal literal ([+-]digits[.digits][e[+-]digits]) to an exact fraction.
inline bool parse_decimal_exact(std::string_view s, Rational& out) {
    bool negative = false;
    if (!s.empty() && (s.front() == '+' || s.front() == '-')) {
        negative = s.front() == '-';
        s.remove_prefix(1);
    }
    std::string_view mantissa = s;
    long exponent = 0;
    if (auto e = s.find_first_of("eE"); e != std::string_view::npos) {
        mantissa = s.substr(0, e);
        std::string_view ex = s.substr(e + 1);
        bool eneg = false;
        if (!ex.empty() && (ex.front() == '+' || ex.front() == '-')) {
            eneg = ex.front() == '-';
            ex.remove_prefix(1);
        }
        if (!all_digits(ex) || ex.size() > 6) return false;
        exponent = std::stol(std::string(ex));
        if (eneg) exponent = -exponent;
    }
    std::string digits;
    if (auto dot = mantissa.find('.'); dot != std::string_view::npos) {
        std::string_view ip = mantissa.substr(0, dot);
        std::string_view fp = mantissa.substr(dot + 1);
        if (ip.empty() && fp.empty()) return false;
        if (!ip.empty() && !all_digits(ip)) return false;
        if (!fp.empty() && !all_digits(fp)) return false;
        digits = std::string(ip) + std::string(fp);
        exponent -= static_cast<long>(fp.size());
    } else {
        if (!all_digits(mantissa)) return false;
        digits = std::string(mantissa);
    }
    Integer num = decimal_integer(digits);
    Integer scale = boost::multiprecision::pow(Integer(10), static_cast<unsigned>(std::labs(exponent)));
    out = exponent >= 0 ? Rational(num * scale) : Rational(num, scale);
    if (negative) out = -out;
    return true;
}

inline bool parse_fraction(std::string_view s, Integer& p, Integer& q) {
    auto slash = s.find('/');
    if (slash == std::string_view::npos) return false;
    std::string_view ps = s.substr(0, slash);
    std::string_view qs = s.substr(slash + 1);
    bool negative = false;
    if (!ps.empty() && (ps.front() == '+' || ps.front() == '-')) {
        negative = ps.front() == '-';
        ps.remove_prefix(1);
    }
    if (!all_digits(ps) || !all_digits(qs)) return false;
    p = decimal_integer(ps);
    q = decimal_integer(qs);
    if (negative) p = -p;
    return true;
}

} // namespace detail

inline bool is_fraction_literal(std::string_view s) {
    return s.find('/') != std::string_view::npos;
}

// Parses "p/q" or a decimal literal. Throws InvalidArgument on malformed
// text or a zero denominator.
template <Scalar T>
T parse_scalar(std::string_view text);

template <>
inline Rational parse_scalar<Rational>(std::string_view text) {
    Integer p, q;
    if (detail::parse_fraction(text, p, q)) {
        if (q.is_zero()) throw InvalidArgument("zero denominator in '" + std::string(text) + "'");
        return Rational(p, q);
    }
    Rational r;
    if (detail::parse_decimal_exact(text, r)) return r;
    throw InvalidArgument("not a number: '" + std::string(text) + "'");
}

template <>
inline double parse_scalar<double>(std::string_view text) {
    if (is_fraction_literal(text)) return to_double(parse_scalar<Rational>(text));
    std::string_view s = text;
    if (!s.empty() && s.front() == '+') s.remove_prefix(1);
    double value = 0.0;
    auto res = std::from_chars(s.data(), s.data() + s.size(), value);
    if (res.ec != std::errc{} || res.ptr != s.data() + s.size() || s.empty())
        throw InvalidArgument("not a number: '" + std::string(text) + "'");
    return value;
}

// Exact value of the shortest decimal that round-trips x, so 0.1 maps to
// 1/10 rather than the binary64 expansion.
inline Rational rational_from_double(double x) {
    if (!std::isfinite(x)) throw InvalidArgument("non-finite value " + to_string(x));
    return parse_scalar<Rational>(to_string(x));
}

} // namespace markovtree

#endif // MARKOVTREE_SCALAR_HPP
