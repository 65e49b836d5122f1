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
#include "flowcell/logic.hpp"

#include <algorithm>
#include <cctype>
#include <random>
#include <sstream>
#include <stdexcept>

namespace flowcell {

// ---------------------------------------------------------------------------
// Terms

TermPtr Term::var(const std::string& name) {
    auto t = std::make_shared<Term>();
    t->kind = Kind::Var;
    t->name = name;
    return t;
}

TermPtr Term::constant(const std::string& name) {
    auto t = std::make_shared<Term>();
    t->kind = Kind::Const;
    t->name = name;
    return t;
}

TermPtr Term::app(Fn fn, TermPtr arg) {
    auto t = std::make_shared<Term>();
    t->kind = Kind::App;
    t->fn = fn;
    t->arg = std::move(arg);
    return t;
}

TermPtr Term::iterate(Fn fn, int m, TermPtr t) {
    for (int i = 0; i < m; ++i) t = app(fn, t);
    return t;
}

bool term_eq(const TermPtr& a, const TermPtr& b) {
    if (a == b) return true;
    if (!a || !b) return false;
    if (a->kind != b->kind) return false;
    switch (a->kind) {
        case Term::Kind::Var:
        case Term::Kind::Const: return a->name == b->name;
        case Term::Kind::App: return a->fn == b->fn && term_eq(a->arg, b->arg);
    }
    return false;
}

bool term_contains_var(const TermPtr& t, const std::string& v) {
    if (!t) return false;
    switch (t->kind) {
        case Term::Kind::Var: return t->name == v;
        case Term::Kind::Const: return false;
        case Term::Kind::App: return term_contains_var(t->arg, v);
    }
    return false;
}

bool term_mixed(const TermPtr& t) {
    bool has_f = false, has_b = false;
    for (const Term* p = t.get(); p; p = p->arg.get()) {
        if (p->kind == Term::Kind::App) (p->fn == Fn::F ? has_f : has_b) = true;
    }
    return has_f && has_b;
}

int term_height(const TermPtr& t, const std::string& z) {
    if (!t) return 0;
    switch (t->kind) {
        case Term::Kind::Var: return t->name == z ? 1 : 0;
        case Term::Kind::Const: return 0;
        case Term::Kind::App: {
            int h = term_height(t->arg, z);
            return term_contains_var(t->arg, z) ? h + 1 : 0;
        }
    }
    return 0;
}

std::string print_term(const TermPtr& t) {
    switch (t->kind) {
        case Term::Kind::Var:
        case Term::Kind::Const: return t->name;
        case Term::Kind::App:
            return std::string(1, fn_char(t->fn)) + "(" + print_term(t->arg) + ")";
    }
    return "?";
}

size_t term_hash(const TermPtr& t) {
    if (!t) return 0;
    size_t h = (size_t)t->kind * 1099511628211ull;
    switch (t->kind) {
        case Term::Kind::Var:
        case Term::Kind::Const:
            h ^= std::hash<std::string>()(t->name);
            break;
        case Term::Kind::App:
            h ^= (t->fn == Fn::F ? 0x9e3779b97f4a7c15ull : 0xc2b2ae3d27d4eb4full);
            h ^= term_hash(t->arg) * 31;
            break;
    }
    return h;
}

// ---------------------------------------------------------------------------
// Formula constructors

static FormulaPtr mk(Formula&& f) { return std::make_shared<Formula>(std::move(f)); }

FormulaPtr Formula::unary(const std::string& pred, TermPtr t) {
    Formula f;
    f.kind = Kind::UnaryAtom;
    f.pred = pred;
    f.t1 = std::move(t);
    return mk(std::move(f));
}

FormulaPtr Formula::eq(TermPtr t1, TermPtr t2) {
    Formula f;
    f.kind = Kind::Eq;
    f.t1 = std::move(t1);
    f.t2 = std::move(t2);
    return mk(std::move(f));
}

FormulaPtr Formula::less(const std::string& cell, TermPtr t1, TermPtr t2) {
    Formula f;
    f.kind = Kind::Less;
    f.cell = cell;
    f.t1 = std::move(t1);
    f.t2 = std::move(t2);
    return mk(std::move(f));
}

FormulaPtr Formula::binary(char rel, Fn dir, int m, const std::string& cell,
                           TermPtr t1, TermPtr t2) {
    Formula f;
    f.kind = Kind::BinaryAtom;
    f.rel = rel;
    f.dir = dir;
    f.m = m;
    f.cell = cell;
    f.t1 = std::move(t1);
    f.t2 = std::move(t2);
    return mk(std::move(f));
}

FormulaPtr Formula::mk_not(FormulaPtr a) {
    Formula f;
    f.kind = Kind::Not;
    f.a = std::move(a);
    return mk(std::move(f));
}

FormulaPtr Formula::mk_and(FormulaPtr a, FormulaPtr b) {
    Formula f;
    f.kind = Kind::And;
    f.a = std::move(a);
    f.b = std::move(b);
    return mk(std::move(f));
}

FormulaPtr Formula::mk_or(FormulaPtr a, FormulaPtr b) {
    Formula f;
    f.kind = Kind::Or;
    f.a = std::move(a);
    f.b = std::move(b);
    return mk(std::move(f));
}

FormulaPtr Formula::implies(FormulaPtr a, FormulaPtr b) {
    Formula f;
    f.kind = Kind::Implies;
    f.a = std::move(a);
    f.b = std::move(b);
    return mk(std::move(f));
}

FormulaPtr Formula::exists(const std::string& var, FormulaPtr body) {
    Formula f;
    f.kind = Kind::Exists;
    f.var = var;
    f.a = std::move(body);
    return mk(std::move(f));
}

FormulaPtr Formula::forall(const std::string& var, FormulaPtr body) {
    Formula f;
    f.kind = Kind::Forall;
    f.var = var;
    f.a = std::move(body);
    return mk(std::move(f));
}

FormulaPtr Formula::truth() {
    static FormulaPtr t = eq(Term::constant("s"), Term::constant("s"));
    return t;
}

FormulaPtr Formula::falsity() {
    static FormulaPtr f = mk_not(truth());
    return f;
}

FormulaPtr Formula::conj(const std::vector<FormulaPtr>& fs) {
    FormulaPtr acc;
    for (const auto& f : fs) {
        if (is_truth(f)) continue;
        if (is_falsity(f)) return falsity();
        acc = acc ? mk_and(acc, f) : f;
    }
    return acc ? acc : truth();
}

FormulaPtr Formula::disj(const std::vector<FormulaPtr>& fs) {
    FormulaPtr acc;
    for (const auto& f : fs) {
        if (is_falsity(f)) continue;
        if (is_truth(f)) return truth();
        acc = acc ? mk_or(acc, f) : f;
    }
    return acc ? acc : falsity();
}

// ---------------------------------------------------------------------------
// Formula predicates

bool formula_eq(const FormulaPtr& a, const FormulaPtr& b) {
    if (a == b) return true;
    if (!a || !b || a->kind != b->kind) return false;
    switch (a->kind) {
        case Formula::Kind::UnaryAtom:
            return a->pred == b->pred && term_eq(a->t1, b->t1);
        case Formula::Kind::Eq:
            return term_eq(a->t1, b->t1) && term_eq(a->t2, b->t2);
        case Formula::Kind::Less:
            return a->cell == b->cell && term_eq(a->t1, b->t1) && term_eq(a->t2, b->t2);
        case Formula::Kind::BinaryAtom:
            return a->rel == b->rel && a->dir == b->dir && a->m == b->m &&
                   a->cell == b->cell && term_eq(a->t1, b->t1) && term_eq(a->t2, b->t2);
        case Formula::Kind::Not:
            return formula_eq(a->a, b->a);
        case Formula::Kind::And:
        case Formula::Kind::Or:
        case Formula::Kind::Implies:
            return formula_eq(a->a, b->a) && formula_eq(a->b, b->b);
        case Formula::Kind::Exists:
        case Formula::Kind::Forall:
            return a->var == b->var && formula_eq(a->a, b->a);
    }
    return false;
}

size_t formula_hash(const FormulaPtr& f) {
    if (!f) return 0;
    size_t h = (size_t)f->kind * 0x100000001b3ull;
    h ^= std::hash<std::string>()(f->pred) + std::hash<std::string>()(f->cell);
    h ^= (size_t)f->rel * 131 + (size_t)f->m * 65537 + (f->dir == Fn::F ? 7 : 11);
    if (f->t1) h ^= term_hash(f->t1) * 3;
    if (f->t2) h ^= term_hash(f->t2) * 5;
    if (f->a) h ^= formula_hash(f->a) * 13;
    if (f->b) h ^= formula_hash(f->b) * 17;
    h ^= std::hash<std::string>()(f->var);
    return h;
}

bool is_truth(const FormulaPtr& f) {
    return f->kind == Formula::Kind::Eq && term_eq(f->t1, f->t2);
}

bool is_falsity(const FormulaPtr& f) {
    return f->kind == Formula::Kind::Not && is_truth(f->a);
}

bool is_atom(const FormulaPtr& f) {
    switch (f->kind) {
        case Formula::Kind::UnaryAtom:
        case Formula::Kind::Eq:
        case Formula::Kind::Less:
        case Formula::Kind::BinaryAtom: return true;
        default: return false;
    }
}

bool is_quantifier_free(const FormulaPtr& f) {
    if (f->kind == Formula::Kind::Exists || f->kind == Formula::Kind::Forall) return false;
    if (f->a && !is_quantifier_free(f->a)) return false;
    if (f->b && !is_quantifier_free(f->b)) return false;
    return true;
}

bool formula_contains_free(const FormulaPtr& f, const std::string& v) {
    switch (f->kind) {
        case Formula::Kind::Exists:
        case Formula::Kind::Forall:
            if (f->var == v) return false;
            return formula_contains_free(f->a, v);
        default:
            if (f->t1 && term_contains_var(f->t1, v)) return true;
            if (f->t2 && term_contains_var(f->t2, v)) return true;
            if (f->a && formula_contains_free(f->a, v)) return true;
            if (f->b && formula_contains_free(f->b, v)) return true;
            return false;
    }
}

static void free_vars_term(const TermPtr& t, std::set<std::string>& out,
                           const std::set<std::string>& bound) {
    if (!t) return;
    if (t->kind == Term::Kind::Var) {
        if (!bound.count(t->name)) out.insert(t->name);
    } else if (t->kind == Term::Kind::App) {
        free_vars_term(t->arg, out, bound);
    }
}

static void free_vars_rec(const FormulaPtr& f, std::set<std::string>& out,
                          std::set<std::string>& bound) {
    if (f->kind == Formula::Kind::Exists || f->kind == Formula::Kind::Forall) {
        bool inserted = bound.insert(f->var).second;
        free_vars_rec(f->a, out, bound);
        if (inserted) bound.erase(f->var);
        return;
    }
    free_vars_term(f->t1, out, bound);
    free_vars_term(f->t2, out, bound);
    if (f->a) free_vars_rec(f->a, out, bound);
    if (f->b) free_vars_rec(f->b, out, bound);
}

std::set<std::string> free_vars(const FormulaPtr& f) {
    std::set<std::string> out, bound;
    free_vars_rec(f, out, bound);
    return out;
}

int formula_size(const FormulaPtr& f) {
    if (!f) return 0;
    return 1 + formula_size(f->a) + formula_size(f->b);
}

void collect_atoms(const FormulaPtr& f, std::vector<FormulaPtr>& out) {
    if (is_atom(f)) {
        out.push_back(f);
        return;
    }
    if (f->a) collect_atoms(f->a, out);
    if (f->b) collect_atoms(f->b, out);
}

// ---------------------------------------------------------------------------
// Printer

static int formula_prec(const FormulaPtr& f) {
    switch (f->kind) {
        case Formula::Kind::Implies: return 1;
        case Formula::Kind::Or: return 2;
        case Formula::Kind::And: return 3;
        case Formula::Kind::Not: return 4;
        case Formula::Kind::Exists:
        case Formula::Kind::Forall: return 0;
        default: return 5;
    }
}

static std::string print_rec(const FormulaPtr& f, int parent_prec) {
    std::string out;
    int prec = formula_prec(f);
    switch (f->kind) {
        case Formula::Kind::UnaryAtom:
            out = f->pred + "(" + print_term(f->t1) + ")";
            break;
        case Formula::Kind::Eq:
            out = print_term(f->t1) + " = " + print_term(f->t2);
            break;
        case Formula::Kind::Less:
            out = print_term(f->t1) + " <[" + f->cell + "] " + print_term(f->t2);
            break;
        case Formula::Kind::BinaryAtom: {
            std::string head;
            if (f->rel == 'R') head = "R[" + f->cell + "]";
            else head = std::string(1, f->rel) + "[" + std::string(1, fn_char(f->dir)) + "," +
                        std::to_string(f->m) + "," + f->cell + "]";
            out = head + "(" + print_term(f->t1) + "," + print_term(f->t2) + ")";
            break;
        }
        case Formula::Kind::Not:
            out = "!" + print_rec(f->a, 4);
            break;
        case Formula::Kind::And:
            out = print_rec(f->a, 3) + " & " + print_rec(f->b, 3);
            break;
        case Formula::Kind::Or:
            out = print_rec(f->a, 2) + " | " + print_rec(f->b, 2);
            break;
        case Formula::Kind::Implies:
            // right associative
            out = print_rec(f->a, 2) + " -> " + print_rec(f->b, 1);
            break;
        case Formula::Kind::Exists:
            out = "E" + f->var + ". " + print_rec(f->a, 0);
            break;
        case Formula::Kind::Forall:
            out = "A" + f->var + ". " + print_rec(f->a, 0);
            break;
    }
    // Equality binds like an atom; connectives need parens when tighter
    // context requires it.
    if (prec < parent_prec ||
        (f->kind == Formula::Kind::Implies && parent_prec == 1) ||
        (f->kind == Formula::Kind::Eq && parent_prec > 5))
        return "(" + out + ")";
    if ((f->kind == Formula::Kind::Exists || f->kind == Formula::Kind::Forall) &&
        parent_prec > 0)
        return "(" + out + ")";
    return out;
}

std::string print_formula(const FormulaPtr& f) { return print_rec(f, 0); }

// ---------------------------------------------------------------------------
// Parser

namespace {

struct FormulaParser {
    const std::string& s;
    const Signature& sig;
    size_t pos = 0;

    FormulaParser(const std::string& text, const Signature& sg) : s(text), sig(sg) {}

    [[noreturn]] void fail(const std::string& msg) {
        throw std::runtime_error("parse error at " + std::to_string(pos) + ": " + msg);
    }

    void skip_ws() {
        while (pos < s.size() && std::isspace((unsigned char)s[pos])) ++pos;
    }

    bool peek(char c) {
        skip_ws();
        return pos < s.size() && s[pos] == c;
    }

    bool eat(char c) {
        if (peek(c)) { ++pos; return true; }
        return false;
    }

    void expect(char c) {
        if (!eat(c)) fail(std::string("expected '") + c + "'");
    }

    bool eat_str(const std::string& w) {
        skip_ws();
        if (s.compare(pos, w.size(), w) == 0) { pos += w.size(); return true; }
        return false;
    }

    std::string ident() {
        skip_ws();
        size_t start = pos;
        while (pos < s.size() && (std::isalnum((unsigned char)s[pos]) || s[pos] == '_' ||
                                  s[pos] == '+' || s[pos] == '-' || s[pos] == '\''))
            ++pos;
        if (pos == start) fail("expected identifier");
        return s.substr(start, pos - start);
    }

    std::string bracket_cell() {
        expect('[');
        std::string c = ident();
        expect(']');
        return c;
    }

    int integer() {
        skip_ws();
        size_t start = pos;
        while (pos < s.size() && std::isdigit((unsigned char)s[pos])) ++pos;
        if (pos == start) fail("expected integer");
        return std::stoi(s.substr(start, pos - start));
    }

    // term = VAR | CONST | f(term) | b(term)
    TermPtr parse_term() {
        skip_ws();
        if (pos >= s.size()) fail("expected term");

        // f( / b( : applications (only when immediately followed by '(')
        if ((s[pos] == 'f' || s[pos] == 'b') && pos + 1 < s.size() && s[pos + 1] == '(') {
            Fn fn = s[pos] == 'f' ? Fn::F : Fn::B;
            pos += 2;
            auto t = parse_term();
            expect(')');
            return Term::app(fn, t);
        }
        // bracketed constants
        for (const char* head : {"min", "max", "gamma"}) {
            size_t n = strlen(head);
            if (s.compare(pos, n, head) == 0 && pos + n < s.size() && s[pos + n] == '[') {
                pos += n;
                expect('[');
                std::string inner;
                if (std::string(head) == "gamma") {
                    int j = integer();
                    expect(',');
                    inner = std::to_string(j) + "," + ident();
                } else {
                    inner = ident();
                }
                expect(']');
                std::string name = std::string(head) + "[" + inner + "]";
                if (!sig.has_constant(name)) fail("unknown constant " + name);
                return Term::constant(name);
            }
        }
        if (s.compare(pos, 2, "p[") == 0) {
            pos += 1;
            std::string c = bracket_cell();
            std::string name = "p[" + c + "]";
            if (!sig.has_constant(name)) fail("unknown constant " + name);
            return Term::constant(name);
        }
        if (s.compare(pos, 2, "e[") == 0) {
            pos += 1;
            std::string c = bracket_cell();
            std::string name = "e[" + c + "]";
            if (!sig.has_constant(name)) fail("unknown constant " + name);
            return Term::constant(name);
        }
        // r[g,C] / s[g,C]
        if ((s[pos] == 'r' || s[pos] == 's') && pos + 1 < s.size() && s[pos + 1] == '[') {
            char which = s[pos];
            pos += 2;
            std::string d = ident();
            if (d != "f" && d != "b") fail("expected direction f or b");
            expect(',');
            std::string c = ident();
            expect(']');
            std::string name = std::string(1, which) + "[" + d + "," + c + "]";
            if (!sig.has_constant(name)) fail("unknown constant " + name);
            return Term::constant(name);
        }
        std::string id = ident();
        if (id == "s") return Term::constant("s");
        if (sig.has_constant(id)) return Term::constant(id);
        return Term::var(id);
    }

    FormulaPtr parse_formula() { return parse_implies(); }

    FormulaPtr parse_implies() {
        auto lhs = parse_or();
        skip_ws();
        if (eat_str("->")) return Formula::implies(lhs, parse_implies());
        return lhs;
    }

    FormulaPtr parse_or() {
        auto lhs = parse_and();
        for (;;) {
            skip_ws();
            if (pos < s.size() && s[pos] == '|') { ++pos; lhs = Formula::mk_or(lhs, parse_and()); }
            else return lhs;
        }
    }

    FormulaPtr parse_and() {
        auto lhs = parse_not();
        for (;;) {
            skip_ws();
            if (pos < s.size() && s[pos] == '&') { ++pos; lhs = Formula::mk_and(lhs, parse_not()); }
            else return lhs;
        }
    }

    FormulaPtr parse_not() {
        skip_ws();
        if (eat('!')) return Formula::mk_not(parse_not());
        return parse_atom_or_quant();
    }

    bool quantifier_ahead() {
        // "Ex." style: E or A, then an identifier, then '.'
        skip_ws();
        if (pos >= s.size() || (s[pos] != 'E' && s[pos] != 'A')) return false;
        size_t p = pos + 1;
        size_t idstart = p;
        while (p < s.size() && (std::isalnum((unsigned char)s[p]) || s[p] == '_')) ++p;
        if (p == idstart) return false;
        while (p < s.size() && std::isspace((unsigned char)s[p])) ++p;
        return p < s.size() && s[p] == '.';
    }

    FormulaPtr parse_atom_or_quant() {
        skip_ws();
        if (pos >= s.size()) fail("expected formula");

        if (quantifier_ahead()) {
            bool ex = s[pos] == 'E';
            ++pos;
            std::string v = ident();
            expect('.');
            auto body = parse_formula();  // quantifier body extends maximally right
            return ex ? Formula::exists(v, body) : Formula::forall(v, body);
        }

        if (eat('(')) {
            auto f = parse_formula();
            expect(')');
            return maybe_binary_tail(f);
        }

        // E[C](t)
        if (s.compare(pos, 2, "E[") == 0) {
            ++pos;
            std::string c = bracket_cell();
            std::string pred = "E[" + c + "]";
            if (!sig.has_unary(pred)) fail("unknown predicate " + pred);
            expect('(');
            auto t = parse_term();
            expect(')');
            return Formula::unary(pred, t);
        }
        // R[C](t,t)
        if (s.compare(pos, 2, "R[") == 0) {
            ++pos;
            std::string c = bracket_cell();
            expect('(');
            auto t1 = parse_term();
            expect(',');
            auto t2 = parse_term();
            expect(')');
            return Formula::binary('R', Fn::F, 0, c, t1, t2);
        }
        // S[d,m,C](t,t) / B[d,m,C](t,t)
        if ((s[pos] == 'S' || s[pos] == 'B') && pos + 1 < s.size() && s[pos + 1] == '[') {
            char rel = s[pos];
            pos += 2;
            std::string d = ident();
            if (d != "f" && d != "b") fail("expected direction f or b");
            expect(',');
            int m = integer();
            expect(',');
            std::string c = ident();
            expect(']');
            expect('(');
            auto t1 = parse_term();
            expect(',');
            auto t2 = parse_term();
            expect(')');
            if (m > sig.m_bound)
                fail("S/B index " + std::to_string(m) + " exceeds signature bound " +
                     std::to_string(sig.m_bound));
            return Formula::binary(rel, d == "f" ? Fn::F : Fn::B, m, c, t1, t2);
        }

        // CELL(t) when the name is a declared unary predicate followed by '('
        {
            size_t save = pos;
            skip_ws();
            size_t idstart = pos;
            while (pos < s.size() && (std::isalnum((unsigned char)s[pos]) || s[pos] == '_' ||
                                      s[pos] == '+' || s[pos] == '-' || s[pos] == '\''))
                ++pos;
            std::string name = s.substr(idstart, pos - idstart);
            if (!name.empty() && sig.has_unary(name) && peek('(')) {
                expect('(');
                auto t = parse_term();
                expect(')');
                return Formula::unary(name, t);
            }
            pos = save;
        }

        // otherwise a term-led binary atom: t = t or t <[C] t
        auto t1 = parse_term();
        return maybe_binary_tail_term(t1);
    }

    // after a parenthesised formula, nothing may follow at atom level
    FormulaPtr maybe_binary_tail(FormulaPtr f) { return f; }

    FormulaPtr maybe_binary_tail_term(TermPtr t1) {
        skip_ws();
        if (eat('=')) {
            auto t2 = parse_term();
            return Formula::eq(t1, t2);
        }
        if (eat('<')) {
            std::string c = bracket_cell();
            if (!sig.has_unary(c)) fail("unknown cell " + c + " in ordering");
            auto t2 = parse_term();
            return Formula::less(c, t1, t2);
        }
        fail("expected '=' or '<[' after term");
    }
};

}  // namespace

FormulaPtr parse_formula(const std::string& text, const Signature& sig) {
    FormulaParser p(text, sig);
    auto f = p.parse_formula();
    p.skip_ws();
    if (p.pos != text.size()) p.fail("trailing input");
    return f;
}

TermPtr parse_term(const std::string& text, const Signature& sig) {
    FormulaParser p(text, sig);
    auto t = p.parse_term();
    p.skip_ws();
    if (p.pos != text.size()) p.fail("trailing input");
    return t;
}

// ---------------------------------------------------------------------------
// Heights

Height atom_height(const FormulaPtr& f, const std::string& z) {
    switch (f->kind) {
        case Formula::Kind::UnaryAtom:
            return Height{0, term_height(f->t1, z)};
        case Formula::Kind::Eq:
        case Formula::Kind::Less:
        case Formula::Kind::BinaryAtom: {
            bool in1 = term_contains_var(f->t1, z);
            bool in2 = term_contains_var(f->t2, z);
            int h1 = term_height(f->t1, z), h2 = term_height(f->t2, z);
            if (in1 && in2) return Height{1, std::min(h1, h2)};
            return Height{0, std::max(h1, h2)};
        }
        default:
            throw std::logic_error("atom_height: not an atom");
    }
}

Height formula_height(const FormulaPtr& f, const std::string& z) {
    if (is_atom(f)) return atom_height(f, z);
    Height h{0, 0};
    if (f->a) h = std::max(h, formula_height(f->a, z));
    if (f->b) h = std::max(h, formula_height(f->b, z));
    return h;
}

// ---------------------------------------------------------------------------
// Classification

bool is_order_formula(const FormulaPtr& f) {
    if (f->kind == Formula::Kind::BinaryAtom) return false;  // R/S/B live outside L(Phi)+Gamma
    if (f->kind == Formula::Kind::Exists || f->kind == Formula::Kind::Forall) return false;
    if (f->a && !is_order_formula(f->a)) return false;
    if (f->b && !is_order_formula(f->b)) return false;
    return true;
}

bool is_z_order(const FormulaPtr& f, const std::string& z) {
    if (!is_quantifier_free(f)) return false;
    std::vector<FormulaPtr> atoms;
    collect_atoms(f, atoms);
    for (const auto& a : atoms) {
        bool has_z = (a->t1 && term_contains_var(a->t1, z)) ||
                     (a->t2 && term_contains_var(a->t2, z));
        if (has_z && a->kind == Formula::Kind::BinaryAtom) return false;
    }
    return true;
}

bool is_minimal_z_order(const FormulaPtr& f, const std::string& z) {
    if (!is_z_order(f, z)) return false;
    std::vector<FormulaPtr> atoms;
    collect_atoms(f, atoms);
    for (const auto& a : atoms) {
        for (const auto& t : {a->t1, a->t2}) {
            if (!t) continue;
            // the only subterm containing z may be z itself
            if (term_contains_var(t, z) && !(t->kind == Term::Kind::Var && t->name == z))
                return false;
        }
        if (a->t1 && a->t2 && term_contains_var(a->t1, z) && term_contains_var(a->t2, z))
            return false;
    }
    return true;
}

bool is_g_almost_minimal(const FormulaPtr& f, const std::string& z, Fn g) {
    if (!is_quantifier_free(f)) return false;
    std::vector<FormulaPtr> atoms;
    collect_atoms(f, atoms);
    auto ok_term = [&](const TermPtr& t) {
        if (!term_contains_var(t, z)) return true;
        if (t->kind == Term::Kind::Var) return t->name == z;
        if (t->kind == Term::Kind::App && t->fn == g && t->arg->kind == Term::Kind::Var &&
            t->arg->name == z)
            return true;
        return false;
    };
    for (const auto& a : atoms) {
        // every subterm containing z must be z or g(z); checking the atom
        // terms themselves suffices because subterms of valid terms are valid
        std::function<bool(const TermPtr&)> all_ok = [&](const TermPtr& t) -> bool {
            if (!t || !term_contains_var(t, z)) return true;
            if (!ok_term(t)) return false;
            return true;
        };
        std::function<bool(const TermPtr&)> deep_ok = [&](const TermPtr& t) -> bool {
            if (!t) return true;
            if (term_contains_var(t, z) && !ok_term(t)) return false;
            if (t->kind == Term::Kind::App) return deep_ok(t->arg);
            return true;
        };
        if (a->t1 && !deep_ok(a->t1)) return false;
        if (a->t2 && !deep_ok(a->t2)) return false;
        if (a->t1 && a->t2 && term_contains_var(a->t1, z) && term_contains_var(a->t2, z))
            return false;
    }
    return true;
}

FormulaClass classify(const FormulaPtr& f, const std::string& z, std::optional<Fn> g) {
    if (!is_quantifier_free(f)) return FormulaClass::None;
    if (is_minimal_z_order(f, z)) return FormulaClass::MinimalZOrder;
    if (g && is_g_almost_minimal(f, z, *g)) return FormulaClass::GAlmostMinimal;
    if (is_z_order(f, z)) {
        return is_order_formula(f) ? FormulaClass::Order : FormulaClass::ZOrder;
    }
    if (is_order_formula(f)) return FormulaClass::Order;
    return FormulaClass::None;
}

// ---------------------------------------------------------------------------
// Substitution

TermPtr substitute_term(const TermPtr& t, const std::string& z, const TermPtr& repl) {
    switch (t->kind) {
        case Term::Kind::Var: return t->name == z ? repl : t;
        case Term::Kind::Const: return t;
        case Term::Kind::App: {
            auto arg = substitute_term(t->arg, z, repl);
            return arg == t->arg ? t : Term::app(t->fn, arg);
        }
    }
    return t;
}

static std::string fresh_var(const std::string& base, const std::set<std::string>& taken) {
    std::string v = base;
    int i = 0;
    while (taken.count(v)) v = base + "_" + std::to_string(++i);
    return v;
}

FormulaPtr substitute(const FormulaPtr& f, const std::string& z, const TermPtr& t) {
    switch (f->kind) {
        case Formula::Kind::Exists:
        case Formula::Kind::Forall: {
            if (f->var == z) return f;
            if (term_contains_var(t, f->var) && formula_contains_free(f->a, z)) {
                // rename the bound variable to avoid capture
                auto taken = free_vars(f->a);
                for (const auto& v : free_vars(f)) taken.insert(v);
                if (t->kind == Term::Kind::Var) taken.insert(t->name);
                std::set<std::string> tvars;
                free_vars_term(t, tvars, {});
                for (auto& v : tvars) taken.insert(v);
                std::string nv = fresh_var(f->var, taken);
                auto renamed = substitute(f->a, f->var, Term::var(nv));
                auto body = substitute(renamed, z, t);
                return f->kind == Formula::Kind::Exists ? Formula::exists(nv, body)
                                                        : Formula::forall(nv, body);
            }
            auto body = substitute(f->a, z, t);
            if (body == f->a) return f;
            return f->kind == Formula::Kind::Exists ? Formula::exists(f->var, body)
                                                    : Formula::forall(f->var, body);
        }
        default: {
            auto g = std::make_shared<Formula>(*f);
            bool changed = false;
            if (f->t1) {
                g->t1 = substitute_term(f->t1, z, t);
                changed |= g->t1 != f->t1;
            }
            if (f->t2) {
                g->t2 = substitute_term(f->t2, z, t);
                changed |= g->t2 != f->t2;
            }
            if (f->a) {
                g->a = substitute(f->a, z, t);
                changed |= g->a != f->a;
            }
            if (f->b) {
                g->b = substitute(f->b, z, t);
                changed |= g->b != f->b;
            }
            return changed ? FormulaPtr(g) : f;
        }
    }
}

// ---------------------------------------------------------------------------
// Order-type data

std::vector<TermPtr> enumerate_g_terms(const FlowConfiguration& config, Fn g, int k) {
    Signature sig = make_signature(config, std::max(config.n_phi, 1));
    std::vector<TermPtr> out;
    auto push_unique = [&](const TermPtr& t) {
        for (const auto& u : out)
            if (term_eq(u, t)) return;
        out.push_back(t);
    };
    for (int j = 0; j <= k; ++j)
        for (const auto& c : sig.constants) {
            // skip the aliases; their resolved spellings are already present
            if (sig.aliases.count(c)) continue;
            push_unique(Term::iterate(g, j, Term::constant(c)));
        }
    return out;
}

bool order_type_consistent(const std::vector<std::vector<char>>& rel) {
    size_t n = rel.size();
    // union '=' classes
    std::vector<size_t> parent(n);
    for (size_t i = 0; i < n; ++i) parent[i] = i;
    std::function<size_t(size_t)> find = [&](size_t x) {
        while (parent[x] != x) x = parent[x] = parent[parent[x]];
        return x;
    };
    for (size_t i = 0; i < n; ++i)
        for (size_t j = i + 1; j < n; ++j)
            if (rel[i][j] == '=') parent[find(i)] = find(j);
    // '<' edges between classes must be acyclic and never within a class;
    // '!' must never join a class
    std::vector<std::vector<size_t>> adj(n);
    for (size_t i = 0; i < n; ++i)
        for (size_t j = i + 1; j < n; ++j) {
            size_t a = find(i), bb = find(j);
            if (rel[i][j] == '<') {
                if (a == bb) return false;
                adj[a].push_back(bb);
            } else if (rel[i][j] == '>') {
                if (a == bb) return false;
                adj[bb].push_back(a);
            } else if (rel[i][j] == '!') {
                if (a == bb) return false;
            }
        }
    // cycle detection
    std::vector<int> state(n, 0);
    std::function<bool(size_t)> dfs = [&](size_t u) -> bool {
        state[u] = 1;
        for (size_t v : adj[u]) {
            if (state[v] == 1) return false;
            if (state[v] == 0 && !dfs(v)) return false;
        }
        state[u] = 2;
        return true;
    };
    for (size_t i = 0; i < n; ++i)
        if (find(i) == i && state[i] == 0 && !dfs(i)) return false;
    return true;
}

FormulaPtr OrderTypeFormula::to_formula(const FlowConfiguration& config) const {
    std::vector<FormulaPtr> parts;
    const std::string& oc = cell.order_cell();
    auto closure = [&](const TermPtr& t) {
        std::vector<FormulaPtr> ors;
        ors.push_back(Formula::unary(cell.name(), t));
        ors.push_back(Formula::eq(t, Term::constant(config.min_const(oc))));
        ors.push_back(Formula::eq(t, Term::constant(config.max_const(oc))));
        return Formula::disj(ors);
    };
    size_t n = elements.size();
    if (y0_in_closure) parts.push_back(closure(elements[n - 2]));
    if (y1_in_closure) parts.push_back(closure(elements[n - 1]));
    for (size_t i = 0; i < n; ++i)
        for (size_t j = i + 1; j < n; ++j) {
            switch (relation[i][j]) {
                case '<': parts.push_back(Formula::less(oc, elements[i], elements[j])); break;
                case '>': parts.push_back(Formula::less(oc, elements[j], elements[i])); break;
                case '=': parts.push_back(Formula::eq(elements[i], elements[j])); break;
                case '!': parts.push_back(Formula::mk_not(Formula::eq(elements[i], elements[j]))); break;
            }
        }
    return Formula::conj(parts);
}

std::vector<OrderTypeFormula> enumerate_order_types(const FlowConfiguration& config,
                                                    const Phi1Ref& cell, Fn g, int k,
                                                    size_t max_elems) {
    auto terms = enumerate_g_terms(config, g, k);
    if (terms.size() > max_elems) terms.resize(max_elems);
    terms.push_back(Term::var("y0"));
    terms.push_back(Term::var("y1"));
    size_t n = terms.size();

    // enumerate ordered set partitions by assigning each element a "level";
    // levels must form an initial segment 0..L
    std::vector<OrderTypeFormula> out;
    std::vector<int> level(n, 0);
    std::function<void(size_t, int)> rec = [&](size_t i, int maxl) {
        if (i == n) {
            // normalize: levels used must be 0..maxl (true by construction)
            OrderTypeFormula o;
            o.cell = cell;
            o.elements = terms;
            o.relation.assign(n, std::vector<char>(n, 0));
            for (size_t a = 0; a < n; ++a)
                for (size_t b = a + 1; b < n; ++b)
                    o.relation[a][b] = level[a] == level[b] ? '=' : (level[a] < level[b] ? '<' : '>');
            out.push_back(std::move(o));
            return;
        }
        for (int l = 0; l <= maxl + 1; ++l) {
            level[i] = l;
            rec(i + 1, std::max(maxl, l));
        }
    };
    rec(0, -1);
    return out;
}

// ---------------------------------------------------------------------------
// Random formulas

FormulaPtr random_formula(const Signature& sig, RandomFormulaParams params) {
    std::mt19937_64 rng(params.seed);
    const auto& cfg = *sig.config;

    std::vector<std::string> vars;
    for (int i = 0; i < std::max(1, params.num_free_vars); ++i)
        vars.push_back("x" + std::to_string(i));

    auto pick = [&](size_t n) { return (size_t)(rng() % std::max<size_t>(1, n)); };

    std::function<TermPtr(int)> rand_term = [&](int depth) -> TermPtr {
        int roll = (int)(rng() % 10);
        if (depth <= 0 || roll < 4) {
            if (roll % 2 == 0 || sig.constants.empty())
                return Term::var(vars[pick(vars.size())]);
            return Term::constant(sig.constants[pick(sig.constants.size())]);
        }
        return Term::app(rng() % 2 ? Fn::F : Fn::B, rand_term(depth - 1));
    };

    std::vector<std::string> phi0 = cfg.phi0();
    auto phi1 = cfg.phi1();

    std::function<FormulaPtr(int, int)> rand_f = [&](int depth, int quants) -> FormulaPtr {
        int roll = (int)(rng() % 100);
        if (depth <= 0 || roll < 35) {
            // atom
            int kind = (int)(rng() % (params.allow_rsb && !phi1.empty() ? 4 : 3));
            switch (kind) {
                case 0: {
                    if (sig.unary_predicates.empty()) return Formula::truth();
                    const auto& p = sig.unary_predicates[pick(sig.unary_predicates.size())];
                    return Formula::unary(p, rand_term(depth));
                }
                case 1:
                    return Formula::eq(rand_term(depth), rand_term(depth));
                case 2: {
                    if (phi0.empty()) return Formula::eq(rand_term(depth), rand_term(depth));
                    return Formula::less(phi0[pick(phi0.size())], rand_term(depth),
                                         rand_term(depth));
                }
                default: {
                    const auto& c = phi1[pick(phi1.size())];
                    int r = (int)(rng() % 3);
                    char rel = r == 0 ? 'R' : (r == 1 ? 'S' : 'B');
                    int m = rel == 'R' ? 0 : 1 + (int)(rng() % std::max(1, sig.m_bound));
                    return Formula::binary(rel, rng() % 2 ? Fn::F : Fn::B, m, c,
                                           rand_term(depth - 1), rand_term(depth - 1));
                }
            }
        }
        if (roll < 45) return Formula::mk_not(rand_f(depth - 1, quants));
        if (roll < 60) return Formula::mk_and(rand_f(depth - 1, quants), rand_f(depth - 1, quants));
        if (roll < 75) return Formula::mk_or(rand_f(depth - 1, quants), rand_f(depth - 1, quants));
        if (roll < 85) return Formula::implies(rand_f(depth - 1, quants), rand_f(depth - 1, quants));
        if (quants > 0 && !params.quantifier_free) {
            std::string v = "q" + std::to_string(params.max_quantifiers - quants);
            vars.push_back(v);
            auto body = rand_f(depth - 1, quants - 1);
            vars.pop_back();
            return rng() % 2 ? Formula::exists(v, body) : Formula::forall(v, body);
        }
        return Formula::mk_and(rand_f(depth - 1, quants), rand_f(depth - 1, quants));
    };

    return rand_f(params.max_depth, params.quantifier_free ? 0 : params.max_quantifiers);
}

}  // namespace flowcell
