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
#include <functional>
#include <memory>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "flowcell/config.hpp"

namespace flowcell {

// ---------------------------------------------------------------------------
// Terms

struct Term;
using TermPtr = std::shared_ptr<const Term>;

struct Term {
    enum class Kind { Var, Const, App };

    Kind kind;
    std::string name;  // variable or constant spelling
    Fn fn = Fn::F;     // App
    TermPtr arg;       // App

    static TermPtr var(const std::string& name);
    static TermPtr constant(const std::string& name);
    static TermPtr app(Fn fn, TermPtr arg);
    /// g^m applied to t (m nested applications).
    static TermPtr iterate(Fn fn, int m, TermPtr t);
};

bool term_eq(const TermPtr& a, const TermPtr& b);
bool term_contains_var(const TermPtr& t, const std::string& v);
bool term_mixed(const TermPtr& t);
int term_height(const TermPtr& t, const std::string& z);  // h_z
std::string print_term(const TermPtr& t);
size_t term_hash(const TermPtr& t);

// ---------------------------------------------------------------------------
// Formulas

struct Formula {
    enum class Kind {
        UnaryAtom,   // pred(term); pred is a cell name or "E[C]"
        Eq,          // t1 = t2
        Less,        // t1 <[C] t2
        BinaryAtom,  // R[C] / S[g,m,C] / B[g,m,C] applied to (t1, t2)
        Not, And, Or, Implies,
        Exists, Forall
    };

    Kind kind;

    std::string pred;   // UnaryAtom
    std::string cell;   // Less / BinaryAtom
    char rel = 0;       // BinaryAtom: 'R' | 'S' | 'B'
    Fn dir = Fn::F;     // BinaryAtom S/B
    int m = 0;          // BinaryAtom S/B
    TermPtr t1, t2;

    FormulaPtr a, b;    // connectives
    std::string var;    // quantifiers

    static FormulaPtr unary(const std::string& pred, TermPtr t);
    static FormulaPtr eq(TermPtr t1, TermPtr t2);
    static FormulaPtr less(const std::string& cell, TermPtr t1, TermPtr t2);
    static FormulaPtr binary(char rel, Fn dir, int m, const std::string& cell,
                             TermPtr t1, TermPtr t2);
    static FormulaPtr mk_not(FormulaPtr a);
    static FormulaPtr mk_and(FormulaPtr a, FormulaPtr b);
    static FormulaPtr mk_or(FormulaPtr a, FormulaPtr b);
    static FormulaPtr implies(FormulaPtr a, FormulaPtr b);
    static FormulaPtr exists(const std::string& var, FormulaPtr body);
    static FormulaPtr forall(const std::string& var, FormulaPtr body);

    static FormulaPtr truth();    // s = s
    static FormulaPtr falsity();  // !(s = s)

    static FormulaPtr conj(const std::vector<FormulaPtr>& fs);  // truth() if empty
    static FormulaPtr disj(const std::vector<FormulaPtr>& fs);  // falsity() if empty
};

bool formula_eq(const FormulaPtr& a, const FormulaPtr& b);
size_t formula_hash(const FormulaPtr& f);
bool is_truth(const FormulaPtr& f);
bool is_falsity(const FormulaPtr& f);
bool is_atom(const FormulaPtr& f);
bool is_quantifier_free(const FormulaPtr& f);
bool formula_contains_free(const FormulaPtr& f, const std::string& v);
std::set<std::string> free_vars(const FormulaPtr& f);
int formula_size(const FormulaPtr& f);
void collect_atoms(const FormulaPtr& f, std::vector<FormulaPtr>& out);

// ---------------------------------------------------------------------------
// Printer / parser

std::string print_formula(const FormulaPtr& f);
FormulaPtr parse_formula(const std::string& text, const Signature& sig);
TermPtr parse_term(const std::string& text, const Signature& sig);

// ---------------------------------------------------------------------------
// Heights (lexicographic complexity of a variable's occurrences)

struct Height {
    int a = 0, b = 0;
    bool operator==(const Height&) const = default;
    bool operator<(const Height& o) const {
        return a != o.a ? a < o.a : b < o.b;
    }
    bool operator<=(const Height& o) const { return *this == o || *this < o; }
};

Height formula_height(const FormulaPtr& f, const std::string& z);
Height atom_height(const FormulaPtr& atom, const std::string& z);

// ---------------------------------------------------------------------------
// Normal-form classification

enum class FormulaClass { Order, ZOrder, MinimalZOrder, GAlmostMinimal, None };

/// With g unset, reports the strongest of {order, z_order, minimal_z_order};
/// with g set, additionally recognizes g-almost-minimal.
FormulaClass classify(const FormulaPtr& f, const std::string& z, std::optional<Fn> g = {});

bool is_order_formula(const FormulaPtr& f);
bool is_z_order(const FormulaPtr& f, const std::string& z);
bool is_minimal_z_order(const FormulaPtr& f, const std::string& z);
bool is_g_almost_minimal(const FormulaPtr& f, const std::string& z, Fn g);

// ---------------------------------------------------------------------------
// Substitution

TermPtr substitute_term(const TermPtr& t, const std::string& z, const TermPtr& repl);
/// Capture-avoiding substitution of free z by t.
FormulaPtr substitute(const FormulaPtr& f, const std::string& z, const TermPtr& t);

// ---------------------------------------------------------------------------
// Order-type data: G^k term sets and the order-type formulas over them

struct OrderTypeFormula {
    Phi1Ref cell;
    std::vector<TermPtr> elements;       // G^k followed by y0, y1 as variables
    // relation[i][j] for i<j: '<', '>', '=' (resolved total order type)
    std::vector<std::vector<char>> relation;
    bool y0_in_closure = true, y1_in_closure = true;

    FormulaPtr to_formula(const FlowConfiguration& config) const;
};

/// G^k: the terms g^j c for 0 <= j <= k over all constants, deduplicated.
std::vector<TermPtr> enumerate_g_terms(const FlowConfiguration& config, Fn g, int k);

/// O^k over a given Phi_1 cell for the first `max_elems` G^k terms
/// (enumeration grows as an ordered-set-partition count).
std::vector<OrderTypeFormula> enumerate_order_types(const FlowConfiguration& config,
                                                    const Phi1Ref& cell, Fn g, int k,
                                                    size_t max_elems = 3);

/// Checks an order-type candidate given as pairwise relations in
/// {'<','>','=','!'} for consistency (no cycles; '=' a congruence).
bool order_type_consistent(const std::vector<std::vector<char>>& rel);

// ---------------------------------------------------------------------------
// Random formulas (for round-trip and pipeline property tests)

struct RandomFormulaParams {
    uint64_t seed = 1;
    int max_depth = 6;
    int max_quantifiers = 2;
    int num_free_vars = 2;
    bool allow_rsb = true;
    bool quantifier_free = false;
};

FormulaPtr random_formula(const Signature& sig, RandomFormulaParams params);

}  // namespace flowcell
