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
#include "flowcell/expr.hpp"

#include <cctype>
#include <cmath>
#include <stdexcept>

namespace flowcell {

Expr::Ptr Expr::num(double v) {
    auto e = std::make_shared<Expr>();
    e->kind = Kind::Num;
    e->value = v;
    return e;
}

Expr::Ptr Expr::varref(const std::string& name) {
    auto e = std::make_shared<Expr>();
    e->kind = Kind::Var;
    e->var = name;
    return e;
}

Expr::Ptr Expr::mk(Kind k, Ptr a, Ptr b) {
    auto e = std::make_shared<Expr>();
    e->kind = k;
    e->a = std::move(a);
    e->b = std::move(b);
    return e;
}

double Expr::eval(double x, double y, double t) const {
    switch (kind) {
        case Kind::Num: return value;
        case Kind::Var:
            if (var == "x") return x;
            if (var == "y") return y;
            if (var == "t") return t;
            throw std::runtime_error("expr: unknown variable " + var);
        case Kind::Add: return a->eval(x, y, t) + b->eval(x, y, t);
        case Kind::Sub: return a->eval(x, y, t) - b->eval(x, y, t);
        case Kind::Mul: return a->eval(x, y, t) * b->eval(x, y, t);
        case Kind::Div: return a->eval(x, y, t) / b->eval(x, y, t);
        case Kind::Pow: return std::pow(a->eval(x, y, t), b->eval(x, y, t));
        case Kind::Neg: return -a->eval(x, y, t);
        case Kind::Exp: return std::exp(a->eval(x, y, t));
        case Kind::Sqrt: return std::sqrt(a->eval(x, y, t));
        case Kind::Bump: {
            double u = a->eval(x, y, t);
            return u > 0.0 ? std::exp(-1.0 / u) : 0.0;
        }
    }
    return 0.0;
}

Expr::Ptr Expr::diff(const std::string& name) const {
    auto self = [this]() {
        auto e = std::make_shared<Expr>(*this);
        return Ptr(e);
    };
    switch (kind) {
        case Kind::Num: return num(0.0);
        case Kind::Var: return num(var == name ? 1.0 : 0.0);
        case Kind::Add: return mk(Kind::Add, a->diff(name), b->diff(name));
        case Kind::Sub: return mk(Kind::Sub, a->diff(name), b->diff(name));
        case Kind::Mul:
            return mk(Kind::Add, mk(Kind::Mul, a->diff(name), b),
                      mk(Kind::Mul, a, b->diff(name)));
        case Kind::Div:
            return mk(Kind::Div,
                      mk(Kind::Sub, mk(Kind::Mul, a->diff(name), b),
                         mk(Kind::Mul, a, b->diff(name))),
                      mk(Kind::Mul, b, b));
        case Kind::Pow: {
            if (b->kind == Kind::Num) {
                // d(a^c) = c a^(c-1) a'
                return mk(Kind::Mul,
                          mk(Kind::Mul, num(b->value),
                             mk(Kind::Pow, a, num(b->value - 1.0))),
                          a->diff(name));
            }
            // General a^b = exp(b ln a): not needed by the fixture formats.
            throw std::runtime_error("expr: d/d" + name + " of a^b needs numeric exponent");
        }
        case Kind::Neg: return mk(Kind::Neg, a->diff(name));
        case Kind::Exp: return mk(Kind::Mul, self(), a->diff(name));
        case Kind::Sqrt:
            return mk(Kind::Div, a->diff(name), mk(Kind::Mul, num(2.0), self()));
        case Kind::Bump:
            // bump'(u) = bump(u)/u^2 for u>0, 0 otherwise; bump(u)/u^2 with
            // bump evaluating to 0 for u<=0 gives the right value everywhere.
            return mk(Kind::Mul,
                      mk(Kind::Div, self(), mk(Kind::Mul, a, a)),
                      a->diff(name));
    }
    return num(0.0);
}

Expr::Ptr Expr::subst_xy(Ptr fx, Ptr fy) const {
    switch (kind) {
        case Kind::Num: return num(value);
        case Kind::Var:
            if (var == "x") return fx;
            if (var == "y") return fy;
            return varref(var);
        default: {
            auto e = std::make_shared<Expr>();
            e->kind = kind;
            e->value = value;
            e->var = var;
            if (a) e->a = a->subst_xy(fx, fy);
            if (b) e->b = b->subst_xy(fx, fy);
            return e;
        }
    }
}

std::string Expr::str() const {
    switch (kind) {
        case Kind::Num: {
            char buf[64];
            snprintf(buf, sizeof buf, "%.17g", value);
            return buf;
        }
        case Kind::Var: return var;
        case Kind::Add: return "(" + a->str() + "+" + b->str() + ")";
        case Kind::Sub: return "(" + a->str() + "-" + b->str() + ")";
        case Kind::Mul: return "(" + a->str() + "*" + b->str() + ")";
        case Kind::Div: return "(" + a->str() + "/" + b->str() + ")";
        case Kind::Pow: return "(" + a->str() + "^" + b->str() + ")";
        case Kind::Neg: return "(-" + a->str() + ")";
        case Kind::Exp: return "exp(" + a->str() + ")";
        case Kind::Sqrt: return "sqrt(" + a->str() + ")";
        case Kind::Bump: return "bump(" + a->str() + ")";
    }
    return "?";
}

namespace {

struct ExprParser {
    const std::string& s;
    size_t pos = 0;

    explicit ExprParser(const std::string& text) : s(text) {}

    [[noreturn]] void fail(const std::string& msg) {
        throw std::runtime_error("expr parse error at " + std::to_string(pos) + ": " + msg);
    }

    void skip_ws() {
        while (pos < s.size() && std::isspace((unsigned char)s[pos])) ++pos;
    }

    bool eat(char c) {
        skip_ws();
        if (pos < s.size() && s[pos] == c) { ++pos; return true; }
        return false;
    }

    Expr::Ptr parse_expr() {
        auto lhs = parse_term();
        for (;;) {
            skip_ws();
            if (eat('+')) lhs = Expr::mk(Expr::Kind::Add, lhs, parse_term());
            else if (eat('-')) lhs = Expr::mk(Expr::Kind::Sub, lhs, parse_term());
            else return lhs;
        }
    }

    Expr::Ptr parse_term() {
        auto lhs = parse_factor();
        for (;;) {
            skip_ws();
            if (eat('*')) lhs = Expr::mk(Expr::Kind::Mul, lhs, parse_factor());
            else if (eat('/')) lhs = Expr::mk(Expr::Kind::Div, lhs, parse_factor());
            else return lhs;
        }
    }

    Expr::Ptr parse_factor() {
        skip_ws();
        if (eat('-')) return Expr::mk(Expr::Kind::Neg, parse_factor());
        auto base = parse_atom();
        skip_ws();
        if (eat('^')) return Expr::mk(Expr::Kind::Pow, base, parse_factor());
        return base;
    }

    Expr::Ptr parse_atom() {
        skip_ws();
        if (pos >= s.size()) fail("unexpected end of input");
        char c = s[pos];
        if (c == '(') {
            ++pos;
            auto e = parse_expr();
            if (!eat(')')) fail("expected ')'");
            return e;
        }
        if (std::isdigit((unsigned char)c) || c == '.') {
            size_t start = pos;
            while (pos < s.size() &&
                   (std::isdigit((unsigned char)s[pos]) || s[pos] == '.' ||
                    s[pos] == 'e' || s[pos] == 'E' ||
                    ((s[pos] == '+' || s[pos] == '-') && pos > start &&
                     (s[pos - 1] == 'e' || s[pos - 1] == 'E'))))
                ++pos;
            return Expr::num(std::stod(s.substr(start, pos - start)));
        }
        if (std::isalpha((unsigned char)c)) {
            size_t start = pos;
            while (pos < s.size() && (std::isalnum((unsigned char)s[pos]) || s[pos] == '_')) ++pos;
            std::string name = s.substr(start, pos - start);
            skip_ws();
            if (pos < s.size() && s[pos] == '(') {
                ++pos;
                auto arg = parse_expr();
                if (!eat(')')) fail("expected ')' after " + name);
                if (name == "exp") return Expr::mk(Expr::Kind::Exp, arg);
                if (name == "sqrt") return Expr::mk(Expr::Kind::Sqrt, arg);
                if (name == "bump") return Expr::mk(Expr::Kind::Bump, arg);
                fail("unknown function '" + name + "'");
            }
            return Expr::varref(name);
        }
        fail(std::string("unexpected character '") + c + "'");
    }
};

}  // namespace

Expr::Ptr Expr::parse(const std::string& text) {
    ExprParser p(text);
    auto e = p.parse_expr();
    p.skip_ws();
    if (p.pos != text.size()) p.fail("trailing input");
    return e;
}

}  // namespace flowcell
