#ifndef SPEEDROUTE_RATIONAL_HPP
#define SPEEDROUTE_RATIONAL_HPP

#include <charconv>
#include <cstdint>
#include <numeric>
#include <stdexcept>
#include <string>

namespace speedroute {

/// Exact rational number over 64-bit integers. Used for all times so that
/// oracle comparisons are exact equality, never tolerance-based.
class Rational {
public:
    constexpr Rational() : num_(0), den_(1) {}
    constexpr Rational(long long n) : num_(n), den_(1) {}
    Rational(long long n, long long d) : num_(n), den_(d) { normalize(); }

    long long num() const { return num_; }
    long long den() const { return den_; }

    bool is_integer() const { return den_ == 1; }
    bool is_negative() const { return num_ < 0; }
    bool is_zero() const { return num_ == 0; }

    double to_double() const { return static_cast<double>(num_) / static_cast<double>(den_); }

    std::string str() const {
        if (den_ == 1) return std::to_string(num_);
        return std::to_string(num_) + "/" + std::to_string(den_);
    }

    friend Rational operator+(const Rational& a, const Rational& b) {
        long long g = std::gcd(a.den_, b.den_);
        long long lhs = a.num_ * (b.den_ / g);
        long long rhs = b.num_ * (a.den_ / g);
        return Rational(lhs + rhs, a.den_ / g * b.den_);
    }
    friend Rational operator-(const Rational& a, const Rational& b) { return a + Rational(-b.num_, b.den_); }
    friend Rational operator*(const Rational& a, const Rational& b) {
        // cross-reduce before multiplying to keep intermediates small
        long long g1 = std::gcd(std::abs(a.num_), b.den_);
        long long g2 = std::gcd(std::abs(b.num_), a.den_);
        return Rational((a.num_ / g1) * (b.num_ / g2), (a.den_ / g2) * (b.den_ / g1));
    }
    friend Rational operator/(const Rational& a, const Rational& b) {
        if (b.num_ == 0) throw std::domain_error("rational division by zero");
        return a * Rational(b.den_, b.num_);
    }
    Rational& operator+=(const Rational& o) { *this = *this + o; return *this; }
    Rational& operator-=(const Rational& o) { *this = *this - o; return *this; }
    Rational& operator*=(const Rational& o) { *this = *this * o; return *this; }

    friend bool operator==(const Rational& a, const Rational& b) {
        return a.num_ == b.num_ && a.den_ == b.den_;
    }
    friend bool operator!=(const Rational& a, const Rational& b) { return !(a == b); }
    friend bool operator<(const Rational& a, const Rational& b) {
        return static_cast<__int128>(a.num_) * b.den_ < static_cast<__int128>(b.num_) * a.den_;
    }
    friend bool operator>(const Rational& a, const Rational& b) { return b < a; }
    friend bool operator<=(const Rational& a, const Rational& b) { return !(b < a); }
    friend bool operator>=(const Rational& a, const Rational& b) { return !(a < b); }

    /// Remainder in [0, period) for non-negative values.
    Rational mod(const Rational& period) const {
        if (period.num_ <= 0) throw std::domain_error("mod by non-positive period");
        Rational q = *this / period;
        long long whole = q.num_ / q.den_; // truncation; values are non-negative here
        Rational r = *this - period * Rational(whole);
        if (r.is_negative()) r += period;
        return r;
    }

    long long floor() const {
        long long q = num_ / den_;
        if (num_ < 0 && num_ % den_ != 0) --q;
        return q;
    }

    /// Parses "7", "-3/4", "2.5", "1e-3", "1.5e2".
    static Rational parse(const std::string& text);

private:
    void normalize() {
        if (den_ == 0) throw std::domain_error("rational with zero denominator");
        if (den_ < 0) { num_ = -num_; den_ = -den_; }
        long long g = std::gcd(std::abs(num_), den_);
        if (g > 1) { num_ /= g; den_ /= g; }
    }

    long long num_;
    long long den_;
};

inline Rational Rational::parse(const std::string& text) {
    auto bad = [&]() -> Rational { throw std::invalid_argument("cannot parse rational: '" + text + "'"); };
    if (text.empty()) return bad();
    auto slash = text.find('/');
    if (slash != std::string::npos) {
        long long n = 0, d = 0;
        auto r1 = std::from_chars(text.data(), text.data() + slash, n);
        auto r2 = std::from_chars(text.data() + slash + 1, text.data() + text.size(), d);
        if (r1.ec != std::errc() || r2.ec != std::errc() || r1.ptr != text.data() + slash ||
            r2.ptr != text.data() + text.size())
            return bad();
        return Rational(n, d);
    }
    // decimal / scientific form
    std::size_t pos = 0;
    bool neg = false;
    if (text[pos] == '+' || text[pos] == '-') { neg = text[pos] == '-'; ++pos; }
    long long mantissa = 0;
    long long frac_digits = 0;
    bool any_digit = false;
    for (; pos < text.size() && text[pos] >= '0' && text[pos] <= '9'; ++pos) {
        mantissa = mantissa * 10 + (text[pos] - '0');
        any_digit = true;
    }
    if (pos < text.size() && text[pos] == '.') {
        ++pos;
        for (; pos < text.size() && text[pos] >= '0' && text[pos] <= '9'; ++pos) {
            mantissa = mantissa * 10 + (text[pos] - '0');
            ++frac_digits;
            any_digit = true;
        }
    }
    long long exponent = 0;
    if (pos < text.size() && (text[pos] == 'e' || text[pos] == 'E')) {
        ++pos;
        auto r = std::from_chars(text.data() + pos, text.data() + text.size(), exponent);
        if (r.ec != std::errc() || r.ptr != text.data() + text.size()) return bad();
        pos = text.size();
    }
    if (!any_digit || pos != text.size()) return bad();
    long long e = exponent - frac_digits;
    Rational value(neg ? -mantissa : mantissa);
    Rational ten(10);
    for (long long i = 0; i < e; ++i) value *= ten;
    for (long long i = 0; i < -e; ++i) value = value / ten;
    return value;
}

/// Exact conversion of a double through its shortest round-trip decimal form.
inline Rational rational_from_double(double d) {
    char buf[64];
    auto res = std::to_chars(buf, buf + sizeof(buf), d);
    return Rational::parse(std::string(buf, res.ptr));
}

} // namespace speedroute

#endif
