#pragma once

#include <cmath>
#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include <gmpxx.h>

namespace fracmetric {

using Rational = mpq_class;

/// Parses "p/q", an integer, or a finite decimal ("0.35", "-1.5e0" is not
/// accepted). Decimals are read exactly as p / 10^d, never through binary
/// floating point.
inline Rational parse_rational(std::string_view text) {
    std::string s(text);
    while (!s.empty() && (s.back() == ' ' || s.back() == '\t')) s.pop_back();
    size_t start = s.find_first_not_of(" \t");
    if (start == std::string::npos) throw std::invalid_argument("empty rational");
    s = s.substr(start);

    auto all_digits = [](std::string_view d) {
        if (d.empty()) return false;
        for (char c : d)
            if (c < '0' || c > '9') return false;
        return true;
    };

    bool negative = false;
    std::string_view body(s);
    if (body.front() == '-' || body.front() == '+') {
        negative = body.front() == '-';
        body.remove_prefix(1);
    }

    Rational out;
    if (auto slash = body.find('/'); slash != std::string_view::npos) {
        auto num = body.substr(0, slash);
        auto den = body.substr(slash + 1);
        if (!all_digits(num) || !all_digits(den))
            throw std::invalid_argument("malformed rational '" + s + "'");
        mpz_class d(std::string(den), 10);
        if (d == 0) throw std::invalid_argument("zero denominator in '" + s + "'");
        out = Rational(mpz_class(std::string(num), 10), d);
    } else if (auto dot = body.find('.'); dot != std::string_view::npos) {
        auto ip = body.substr(0, dot);
        auto fp = body.substr(dot + 1);
        if ((!ip.empty() && !all_digits(ip)) || (!fp.empty() && !all_digits(fp)) ||
            (ip.empty() && fp.empty()))
            throw std::invalid_argument("malformed decimal '" + s + "'");
        mpz_class scale;
        mpz_ui_pow_ui(scale.get_mpz_t(), 10, fp.size());
        mpz_class num(std::string(ip.empty() ? "0" : ip) + std::string(fp), 10);
        out = Rational(num, scale);
    } else {
        if (!all_digits(body)) throw std::invalid_argument("malformed rational '" + s + "'");
        out = Rational(mpz_class(std::string(body), 10));
    }
    out.canonicalize();
    if (negative) out = -out;
    return out;
}

inline std::string to_string(const Rational& q) { return q.get_str(); }

/// Six significant digits, for human-facing reports only.
inline std::string to_decimal(const Rational& q) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.6g", q.get_d());
    return buf;
}

/// Best rational approximation of x with denominator at most max_den
/// (continued-fraction convergents and semiconvergents).
inline Rational approximate(double x, std::int64_t max_den = 1'000'000) {
    if (!std::isfinite(x)) throw std::invalid_argument("non-finite value");
    bool negative = x < 0;
    x = std::fabs(x);
    std::int64_t p0 = 0, q0 = 1, p1 = 1, q1 = 0;
    double r = x;
    for (int iter = 0; iter < 64; ++iter) {
        double a_d = std::floor(r);
        if (a_d > 1e15) break;
        auto a = static_cast<std::int64_t>(a_d);
        std::int64_t q2 = q0 + a * q1;
        if (q2 > max_den) {
            std::int64_t t = (max_den - q0) / q1;
            std::int64_t ps = p0 + t * p1, qs = q0 + t * q1;
            double e1 = std::fabs(x - static_cast<double>(p1) / static_cast<double>(q1));
            double e2 = std::fabs(x - static_cast<double>(ps) / static_cast<double>(qs));
            if (t > 0 && e2 < e1) {
                p1 = ps;
                q1 = qs;
            }
            break;
        }
        std::int64_t p2 = p0 + a * p1;
        p0 = p1;
        q0 = q1;
        p1 = p2;
        q1 = q2;
        double frac = r - a_d;
        if (frac < 1e-15) break;
        r = 1.0 / frac;
    }
    Rational out(mpz_class(std::to_string(p1), 10), mpz_class(std::to_string(q1), 10));
    out.canonicalize();
    return negative ? Rational(-out) : out;
}

/// Ratios alpha_1..alpha_k, each an exact rational strictly inside (0,1).
class PolyRatio {
public:
    PolyRatio() = default;
    explicit PolyRatio(std::vector<Rational> values) : values_(std::move(values)) {
        for (auto& a : values_) {
            a.canonicalize();
            if (a <= 0 || a >= 1)
                throw std::invalid_argument("ratio " + a.get_str() + " is not in (0,1)");
        }
    }

    /// Comma-separated list of rationals or decimals.
    static PolyRatio parse(std::string_view text) {
        std::vector<Rational> vals;
        size_t pos = 0;
        while (pos <= text.size()) {
            size_t comma = text.find(',', pos);
            if (comma == std::string_view::npos) comma = text.size();
            vals.push_back(parse_rational(text.substr(pos, comma - pos)));
            pos = comma + 1;
        }
        return PolyRatio(std::move(vals));
    }

    size_t size() const { return values_.size(); }
    const Rational& operator[](size_t letter) const { return values_.at(letter - 1); }
    const std::vector<Rational>& values() const { return values_; }

    Rational min() const {
        Rational m = values_.at(0);
        for (const auto& a : values_)
            if (a < m) m = a;
        return m;
    }

    std::vector<double> as_doubles() const {
        std::vector<double> out;
        out.reserve(values_.size());
        for (const auto& a : values_) out.push_back(a.get_d());
        return out;
    }

    std::string str() const {
        std::string s;
        for (size_t i = 0; i < values_.size(); ++i) {
            if (i) s += ',';
            s += values_[i].get_str();
        }
        return s;
    }

private:
    std::vector<Rational> values_;
};

} // namespace fracmetric
