#pragma once

#include <cmath>
#include <cstdint>
#include <sstream>
#include <stdexcept>
#include <string>
#include <string_view>

#include <gmpxx.h>

namespace pnk {

/// Exact arbitrary-precision rational. Always kept in canonical (reduced) form.
using Rational = mpq_class;

inline Rational make_rational(long num, unsigned long den) {
    Rational q(num, den);
    q.canonicalize();
    return q;
}

/// Parses "a/b", "a" or a decimal literal such as "0.8" into an exact rational.
inline Rational parse_rational(std::string_view text) {
    if (text.empty()) throw std::invalid_argument("empty rational literal");
    std::string s(text);
    auto dot = s.find('.');
    auto slash = s.find('/');
    if (dot != std::string::npos && slash != std::string::npos)
        throw std::invalid_argument("malformed rational literal '" + s + "'");
    auto all_digits = [](std::string_view v) {
        if (v.empty()) return false;
        for (char c : v)
            if (c < '0' || c > '9') return false;
        return true;
    };
    Rational q;
    if (dot != std::string::npos) {
        std::string whole = s.substr(0, dot), frac = s.substr(dot + 1);
        if (whole.empty()) whole = "0";
        if (!all_digits(whole) || !all_digits(frac))
            throw std::invalid_argument("malformed decimal literal '" + s + "'");
        mpz_class num(whole + frac, 10);
        mpz_class den;
        mpz_ui_pow_ui(den.get_mpz_t(), 10, frac.size());
        q = Rational(num, den);
    } else if (slash != std::string::npos) {
        std::string a = s.substr(0, slash), b = s.substr(slash + 1);
        if (!all_digits(a) || !all_digits(b))
            throw std::invalid_argument("malformed rational literal '" + s + "'");
        mpz_class den(b, 10);
        if (den == 0) throw std::invalid_argument("zero denominator in '" + s + "'");
        q = Rational(mpz_class(a, 10), den);
    } else {
        if (!all_digits(s)) throw std::invalid_argument("malformed rational literal '" + s + "'");
        q = Rational(mpz_class(s, 10));
    }
    q.canonicalize();
    return q;
}

inline std::string to_string(const Rational& q) { return q.get_str(); }

/// Per-scalar arithmetic policy. Computations are templated on the scalar so a
/// session runs either fully exact or fully in binary floating point.
template <class S>
struct scalar_traits;

template <>
struct scalar_traits<Rational> {
    static constexpr bool exact = true;
    static constexpr const char* name = "exact";
    static Rational from_rational(const Rational& q) { return q; }
    static Rational zero() { return Rational(0); }
    static Rational one() { return Rational(1); }
    static bool is_zero(const Rational& x) { return sgn(x) == 0; }
    static bool near(const Rational& a, const Rational& b, double) { return a == b; }
    static Rational abs(const Rational& x) { return ::abs(x); }
    static double to_double(const Rational& x) { return x.get_d(); }
    static std::string str(const Rational& x) { return x.get_str(); }
};

template <>
struct scalar_traits<double> {
    static constexpr bool exact = false;
    static constexpr const char* name = "float";
    static double from_rational(const Rational& q) { return q.get_d(); }
    static double zero() { return 0.0; }
    static double one() { return 1.0; }
    static bool is_zero(double x) { return x == 0.0; }
    static bool near(double a, double b, double tol) { return std::fabs(a - b) <= tol; }
    static double abs(double x) { return std::fabs(x); }
    static double to_double(double x) { return x; }
    static std::string str(double x) {
        std::ostringstream os;
        os.precision(12);
        os << x;
        return os.str();
    }
};

/// Absolute tolerance for float comparisons against golden rationals.
inline constexpr double kDefaultTolerance = 1e-9;

}  // namespace pnk
