#pragma once

#include <boost/multiprecision/cpp_int.hpp>

#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>

namespace odar {

// Exact signed rational scalar. Every time, distance and parameter in the
// system is one of these; there is no floating point on any decision path.
// boost keeps the value normalized (lowest terms, positive denominator).
using Rational = boost::multiprecision::cpp_rational;
using BigInt = boost::multiprecision::cpp_int;

inline Rational rat(long long num, long long den = 1) {
    if (den == 0) throw std::invalid_argument("rational with zero denominator");
    return Rational(BigInt(num), BigInt(den));
}

// Canonical text form: "n" when integral, "p/q" otherwise.
inline std::string to_string(const Rational& r) {
    std::ostringstream os;
    os << numerator(r);
    if (denominator(r) != 1) os << '/' << denominator(r);
    return os.str();
}

// Accepts "p/q", "p" and optional leading sign. Whitespace is not tolerated:
// these strings appear inside machine-written JSON and golden files.
inline std::optional<Rational> parse_rational(const std::string& s) {
    if (s.empty()) return std::nullopt;
    auto slash = s.find('/');
    try {
        if (slash == std::string::npos) return Rational(BigInt(s));
        std::string num = s.substr(0, slash);
        std::string den = s.substr(slash + 1);
        if (num.empty() || den.empty()) return std::nullopt;
        BigInt d(den);
        if (d <= 0) return std::nullopt;
        return Rational(BigInt(num), d);
    } catch (const std::exception&) {
        return std::nullopt;
    }
}

inline Rational parse_rational_or_throw(const std::string& s) {
    auto r = parse_rational(s);
    if (!r) throw std::invalid_argument("bad rational literal: '" + s + "'");
    return *r;
}

// Six-digit decimal rendering for reports. Labeled approximate by callers;
// never used in a comparison.
inline std::string approx(const Rational& r, int digits = 6) {
    BigInt scale = 1;
    for (int i = 0; i < digits; ++i) scale *= 10;
    BigInt scaled = numerator(r) * scale;
    BigInt q = scaled / denominator(r);
    BigInt rem = scaled % denominator(r);
    // round half away from zero
    if (2 * abs(rem) >= denominator(r)) q += (scaled < 0 ? -1 : 1);
    bool neg = q < 0;
    std::string body = BigInt(abs(q)).str();
    if ((int)body.size() <= digits) body.insert(0, digits + 1 - body.size(), '0');
    body.insert(body.size() - digits, ".");
    return (neg ? "-" : "") + body;
}

inline Rational rat_abs(const Rational& r) { return r < 0 ? Rational(-r) : r; }

inline Rational rat_min(const Rational& a, const Rational& b) { return a < b ? a : b; }
inline Rational rat_max(const Rational& a, const Rational& b) { return a < b ? b : a; }

}  // namespace odar
