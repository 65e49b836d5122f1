/*
 * Copyright 2026 the flowcell authors
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *  http://www.apache.org/licenses/LICENSE-2.0
 *
 *  Unless required by applicable law or agreed to in writing, software
 *  distributed under the License is distributed on an "AS IS" BASIS,
 *  WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 *  See the License for the specific language governing permissions and
 *  limitations under the License.
 */
#pragma once

#include <cstdint>
#include <compare>
#include <numeric>
#include <stdexcept>
#include <string>

namespace flowcell {

/// Exact rational on __int128.  Good enough for the piecewise-linear
/// synthetic backend; throws on overflow instead of silently wrapping.
class Rat {
public:
    using I = __int128;

    Rat() : num_(0), den_(1) {}
    Rat(long long n) : num_(n), den_(1) {}
    Rat(long long n, long long d) : num_(n), den_(d) { normalize(); }

    static Rat make(I n, I d) {
        Rat r;
        r.num_ = n;
        r.den_ = d;
        r.normalize();
        return r;
    }

    I num() const { return num_; }
    I den() const { return den_; }

    bool is_zero() const { return num_ == 0; }
    int sign() const { return num_ == 0 ? 0 : (num_ < 0 ? -1 : 1); }

    friend Rat operator+(const Rat& a, const Rat& b) {
        return make(checked_add(checked_mul(a.num_, b.den_), checked_mul(b.num_, a.den_)),
                    checked_mul(a.den_, b.den_));
    }
    friend Rat operator-(const Rat& a, const Rat& b) {
        return make(checked_sub(checked_mul(a.num_, b.den_), checked_mul(b.num_, a.den_)),
                    checked_mul(a.den_, b.den_));
    }
    friend Rat operator*(const Rat& a, const Rat& b) {
        return make(checked_mul(a.num_, b.num_), checked_mul(a.den_, b.den_));
    }
    friend Rat operator/(const Rat& a, const Rat& b) {
        if (b.num_ == 0) throw std::domain_error("Rat: division by zero");
        return make(checked_mul(a.num_, b.den_), checked_mul(a.den_, b.num_));
    }
    Rat operator-() const { return make(-num_, den_); }

    friend bool operator==(const Rat& a, const Rat& b) {
        return a.num_ == b.num_ && a.den_ == b.den_;
    }
    friend std::strong_ordering operator<=>(const Rat& a, const Rat& b) {
        I l = checked_mul(a.num_, b.den_);
        I r = checked_mul(b.num_, a.den_);
        if (l < r) return std::strong_ordering::less;
        if (l > r) return std::strong_ordering::greater;
        return std::strong_ordering::equal;
    }

    double to_double() const { return (double)num_ / (double)den_; }

    std::string str() const {
        std::string s = i128_str(num_);
        if (den_ != 1) s += "/" + i128_str(den_);
        return s;
    }

    /// Parses "p", "-p", "p/q" or a plain decimal like "0.5".
    static Rat parse(const std::string& s);

private:
    I num_, den_;

    void normalize() {
        if (den_ == 0) throw std::domain_error("Rat: zero denominator");
        if (den_ < 0) { num_ = -num_; den_ = -den_; }
        I g = gcd128(num_ < 0 ? -num_ : num_, den_);
        if (g > 1) { num_ /= g; den_ /= g; }
    }

    static I gcd128(I a, I b) {
        while (b != 0) { I t = a % b; a = b; b = t; }
        return a < 0 ? -a : a;
    }

    static I checked_mul(I a, I b) {
        if (a == 0 || b == 0) return 0;
        I r = a * b;
        if (r / b != a) throw std::overflow_error("Rat: overflow in *");
        return r;
    }
    static I checked_add(I a, I b) {
        I r = a + b;
        if ((b > 0 && r < a) || (b < 0 && r > a)) throw std::overflow_error("Rat: overflow in +");
        return r;
    }
    static I checked_sub(I a, I b) { return checked_add(a, -b); }

    static std::string i128_str(I v) {
        if (v == 0) return "0";
        bool neg = v < 0;
        unsigned __int128 u = neg ? (unsigned __int128)(-v) : (unsigned __int128)v;
        std::string out;
        while (u > 0) { out.push_back(char('0' + (int)(u % 10))); u /= 10; }
        if (neg) out.push_back('-');
        return std::string(out.rbegin(), out.rend());
    }
};

inline Rat Rat::parse(const std::string& s) {
    auto slash = s.find('/');
    auto parse_int = [](const std::string& t) -> I {
        if (t.empty()) throw std::invalid_argument("Rat: empty integer");
        I v = 0;
        bool neg = false;
        size_t i = 0;
        if (t[0] == '-') { neg = true; i = 1; }
        else if (t[0] == '+') { i = 1; }
        if (i >= t.size()) throw std::invalid_argument("Rat: bad integer '" + t + "'");
        for (; i < t.size(); ++i) {
            if (t[i] < '0' || t[i] > '9') throw std::invalid_argument("Rat: bad integer '" + t + "'");
            v = v * 10 + (t[i] - '0');
        }
        return neg ? -v : v;
    };
    if (slash != std::string::npos)
        return make(parse_int(s.substr(0, slash)), parse_int(s.substr(slash + 1)));
    auto dot = s.find('.');
    if (dot == std::string::npos) return make(parse_int(s), 1);
    std::string head = s.substr(0, dot), frac = s.substr(dot + 1);
    I den = 1;
    for (size_t i = 0; i < frac.size(); ++i) den *= 10;
    I whole = parse_int(head.empty() || head == "-" ? head + "0" : head);
    I fnum = frac.empty() ? 0 : parse_int(frac);
    bool neg = !head.empty() && head[0] == '-';
    I num = whole * den + (neg ? -fnum : fnum);
    return make(num, den);
}

}  // namespace flowcell
