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
#include "flowcell/config.hpp"

#include <algorithm>
#include <set>
#include <stdexcept>

#include "flowcell/logic.hpp"
#include "json.hpp"

namespace flowcell {

using nlohmann::json;

// ---------------------------------------------------------------------------
// FlowConfiguration

bool FlowConfiguration::is_open(const std::string& c) const {
    return std::find(open_cells.begin(), open_cells.end(), c) != open_cells.end();
}
bool FlowConfiguration::is_tan(const std::string& c) const {
    return std::find(tan_cells.begin(), tan_cells.end(), c) != tan_cells.end();
}
bool FlowConfiguration::is_trans(const std::string& c) const {
    return std::find(trans_cells.begin(), trans_cells.end(), c) != trans_cells.end();
}
bool FlowConfiguration::is_single(const std::string& c) const {
    return std::find(single_cells.begin(), single_cells.end(), c) != single_cells.end();
}

CellKind FlowConfiguration::kind_of(const std::string& c) const {
    if (is_open(c)) return CellKind::Open;
    if (is_tan(c)) return CellKind::Tan;
    if (is_trans(c)) return CellKind::Trans;
    if (is_single(c)) return CellKind::Single;
    throw std::runtime_error("unknown cell: " + c);
}

std::vector<std::string> FlowConfiguration::phi0() const {
    std::vector<std::string> out = open_cells;
    out.insert(out.end(), tan_cells.begin(), tan_cells.end());
    out.insert(out.end(), trans_cells.begin(), trans_cells.end());
    return out;
}

std::vector<std::string> FlowConfiguration::phi1() const {
    std::vector<std::string> out = trans_cells;
    for (const auto& c : open_cells) out.push_back("E[" + c + "]");
    return out;
}

const std::string& FlowConfiguration::adj(const std::string& cell, Fn g) const {
    const auto& m = g == Fn::F ? fwd_map : back_map;
    auto it = m.find(cell);
    if (it == m.end())
        throw std::runtime_error("cell " + cell + " has no " +
                                 std::string(1, fn_char(g)) + "-adjacency");
    return it->second;
}

std::string FlowConfiguration::min_const(const std::string& cell) const {
    auto it = min_map.find(cell);
    if (it == min_map.end() || it->second == "inf") return "s";
    return "p[" + it->second + "]";
}

std::string FlowConfiguration::max_const(const std::string& cell) const {
    auto it = max_map.find(cell);
    if (it == max_map.end() || it->second == "inf") return "s";
    return "p[" + it->second + "]";
}

void FlowConfiguration::validate() const {
    std::set<std::string> seen;
    auto check_disjoint = [&](const std::vector<std::string>& cells, const char* which) {
        for (const auto& c : cells) {
            if (c.empty()) throw std::runtime_error(std::string(which) + ": empty cell name");
            if (!seen.insert(c).second)
                throw std::runtime_error("cell sets not disjoint: '" + c + "' repeated");
        }
    };
    check_disjoint(open_cells, "open");
    check_disjoint(tan_cells, "tan");
    check_disjoint(trans_cells, "trans");
    check_disjoint(single_cells, "single");

    for (const auto& c : trans_cells)
        for (Fn g : {Fn::F, Fn::B}) {
            const auto& m = g == Fn::F ? fwd_map : back_map;
            auto it = m.find(c);
            if (it == m.end())
                throw std::runtime_error("trans cell " + c + " missing " +
                                         std::string(1, fn_char(g)) + " adjacency");
            // the order-isomorphism axioms speak of E of the target
            if (!is_open(it->second))
                throw std::runtime_error("trans cell " + c + " must map to an open cell, got " +
                                         it->second);
        }
    for (const auto& c : single_cells)
        for (Fn g : {Fn::F, Fn::B}) {
            const auto& m = g == Fn::F ? fwd_map : back_map;
            auto it = m.find(c);
            if (it == m.end())
                throw std::runtime_error("single cell " + c + " missing " +
                                         std::string(1, fn_char(g)) + " adjacency");
            if (!is_open(it->second) && !is_tan(it->second))
                throw std::runtime_error("single cell " + c + " must map to open or tan, got " +
                                         it->second);
        }
    for (const auto& [k, v] : fwd_map)
        if (!is_trans(k) && !is_single(k))
            throw std::runtime_error("fwd map key must be trans or single: " + k);
    for (const auto& [k, v] : back_map)
        if (!is_trans(k) && !is_single(k))
            throw std::runtime_error("back map key must be trans or single: " + k);
    for (const auto& [k, v] : min_map) {
        if (!is_open(k) && !is_tan(k) && !is_trans(k))
            throw std::runtime_error("min map key must be a 1- or 2-cell: " + k);
        if (v != "inf" && !is_single(v))
            throw std::runtime_error("min(" + k + ") must be a single cell or inf, got " + v);
    }
    for (const auto& [k, v] : max_map) {
        if (!is_open(k) && !is_tan(k) && !is_trans(k))
            throw std::runtime_error("max map key must be a 1- or 2-cell: " + k);
        if (v != "inf" && !is_single(v))
            throw std::runtime_error("max(" + k + ") must be a single cell or inf, got " + v);
    }
    if (n_phi < 1) throw std::runtime_error("n_phi must be >= 1");
    if (nu < 0) throw std::runtime_error("nu must be >= 0");
}

FlowConfiguration FlowConfiguration::from_json(const std::string& text) {
    json j = json::parse(text);
    FlowConfiguration c;
    auto arr = [&](const char* key) {
        std::vector<std::string> out;
        if (j.contains(key))
            for (const auto& v : j.at(key)) out.push_back(v.get<std::string>());
        return out;
    };
    c.open_cells = arr("open");
    c.tan_cells = arr("tan");
    c.trans_cells = arr("trans");
    c.single_cells = arr("single");
    auto omap = [&](const char* key) {
        std::map<std::string, std::string> out;
        if (j.contains(key))
            for (auto it = j.at(key).begin(); it != j.at(key).end(); ++it)
                out[it.key()] = it.value().get<std::string>();
        return out;
    };
    c.fwd_map = omap("fwd");
    c.back_map = omap("back");
    c.min_map = omap("min");
    c.max_map = omap("max");
    c.n_phi = j.value("n_phi", 1);
    c.nu = j.value("nu", 0);
    c.dulac = j.contains("nu");
    c.validate();
    return c;
}

std::string FlowConfiguration::to_json() const {
    json j;
    j["open"] = open_cells;
    j["tan"] = tan_cells;
    j["trans"] = trans_cells;
    j["single"] = single_cells;
    j["fwd"] = fwd_map;
    j["back"] = back_map;
    j["min"] = min_map;
    j["max"] = max_map;
    j["n_phi"] = n_phi;
    if (dulac) j["nu"] = nu;
    return j.dump(2);
}

std::optional<Phi1Ref> parse_phi1(const FlowConfiguration& config, const std::string& name) {
    if (config.is_trans(name)) return Phi1Ref{false, name};
    if (name.size() > 3 && name.substr(0, 2) == "E[" && name.back() == ']') {
        std::string inner = name.substr(2, name.size() - 3);
        if (config.is_open(inner)) return Phi1Ref{true, inner};
    }
    if (config.is_open(name)) return Phi1Ref{true, name};  // accept the bare open-cell name
    return std::nullopt;
}

// ---------------------------------------------------------------------------
// Signature

bool Signature::has_constant(const std::string& name) const {
    return std::find(constants.begin(), constants.end(), name) != constants.end();
}
bool Signature::has_unary(const std::string& name) const {
    return std::find(unary_predicates.begin(), unary_predicates.end(), name) !=
           unary_predicates.end();
}
std::string Signature::resolve_const(const std::string& name) const {
    auto it = aliases.find(name);
    return it == aliases.end() ? name : it->second;
}

std::string Signature::to_json() const {
    json j;
    j["unary_predicates"] = unary_predicates;
    json bins = json::array();
    for (const auto& b : binary_predicates) bins.push_back(b.name);
    j["binary_predicates"] = bins;
    j["constants"] = constants;
    j["function_symbols"] = function_symbols;
    j["m_bound"] = m_bound;
    j["aliases"] = aliases;
    return j.dump(2);
}

Signature make_signature(const FlowConfiguration& config, int m_bound) {
    config.validate();
    if (m_bound < config.n_phi)
        throw std::runtime_error("m_bound must be at least n_phi");

    Signature sig;
    sig.config = &config;
    sig.m_bound = m_bound;

    // clause (i): cell predicates and orderings
    for (const auto& c : config.phi0()) {
        sig.unary_predicates.push_back(c);
        sig.binary_predicates.push_back({"<[" + c + "]", c, '<', Fn::F, 0});
    }
    // clause (ii): E_C and e_C
    for (const auto& c : config.open_cells) sig.unary_predicates.push_back("E[" + c + "]");
    for (const auto& c : config.tan_cells) sig.constants.push_back("e[" + c + "]");
    // clause (iii): s and the singles
    sig.constants.insert(sig.constants.begin(), "s");
    for (const auto& c : config.single_cells) sig.constants.push_back("p[" + c + "]");
    // clause (iv): function symbols
    sig.function_symbols = {"f", "b"};
    // clause (v): r/s constants per transverse cell
    for (const auto& c : config.trans_cells)
        for (Fn g : {Fn::F, Fn::B}) {
            sig.constants.push_back(std::string("r[") + fn_char(g) + "," + c + "]");
            sig.constants.push_back(std::string("s[") + fn_char(g) + "," + c + "]");
        }
    // Dulac clauses: R/S/B predicates and the gamma constants
    if (config.dulac) {
        for (const auto& c : config.phi1()) {
            sig.binary_predicates.push_back({"R[" + c + "]", c, 'R', Fn::F, 0});
            for (Fn g : {Fn::F, Fn::B})
                for (int m = 1; m <= m_bound; ++m) {
                    sig.binary_predicates.push_back(
                        {std::string("S[") + fn_char(g) + "," + std::to_string(m) + "," + c + "]",
                         c, 'S', g, m});
                    sig.binary_predicates.push_back(
                        {std::string("B[") + fn_char(g) + "," + std::to_string(m) + "," + c + "]",
                         c, 'B', g, m});
                }
        }
        for (const auto& c : config.phi1())
            for (int j = 1; j <= config.nu; ++j)
                sig.constants.push_back("gamma[" + std::to_string(j) + "," + c + "]");
    }
    // min/max aliases resolve to a single's constant or s
    for (const auto& c : config.phi0()) {
        sig.aliases["min[" + c + "]"] = config.min_const(c);
        sig.aliases["max[" + c + "]"] = config.max_const(c);
        sig.constants.push_back("min[" + c + "]");
        sig.constants.push_back("max[" + c + "]");
    }
    return sig;
}

// ---------------------------------------------------------------------------
// Axioms

namespace {

TermPtr V(const std::string& n) { return Term::var(n); }
TermPtr K(const std::string& n) { return Term::constant(n); }
TermPtr ap(Fn g, TermPtr t) { return Term::app(g, std::move(t)); }

FormulaPtr U(const std::string& p, TermPtr t) { return Formula::unary(p, std::move(t)); }
FormulaPtr EQ(TermPtr a, TermPtr b) { return Formula::eq(std::move(a), std::move(b)); }
FormulaPtr LT(const std::string& c, TermPtr a, TermPtr b) {
    return Formula::less(c, std::move(a), std::move(b));
}
FormulaPtr LE(const std::string& c, TermPtr a, TermPtr b) {
    return Formula::mk_or(Formula::less(c, a, b), Formula::eq(a, b));
}
FormulaPtr NOT(FormulaPtr f) { return Formula::mk_not(std::move(f)); }
FormulaPtr AND(std::vector<FormulaPtr> fs) { return Formula::conj(fs); }
FormulaPtr OR(std::vector<FormulaPtr> fs) { return Formula::disj(fs); }
FormulaPtr IMP(FormulaPtr a, FormulaPtr b) { return Formula::implies(std::move(a), std::move(b)); }
FormulaPtr EX(const std::string& v, FormulaPtr f) { return Formula::exists(v, std::move(f)); }
FormulaPtr ALL(const std::string& v, FormulaPtr f) { return Formula::forall(v, std::move(f)); }

FormulaPtr close(FormulaPtr f) {
    auto fv = free_vars(f);
    for (auto it = fv.rbegin(); it != fv.rend(); ++it) f = Formula::forall(*it, f);
    return f;
}

struct AxiomBuilder {
    const FlowConfiguration& cfg;
    std::vector<TaggedAxiom> out;

    void emit(const std::string& tag, const std::string& detail, FormulaPtr f) {
        out.push_back({tag, detail, close(std::move(f))});
    }

    std::string minc(const std::string& c) { return cfg.min_const(c); }
    std::string maxc(const std::string& c) { return cfg.max_const(c); }

    // phi^g_C(x, y): y is the E_C-neighbor of x on the g side.
    FormulaPtr phi_nbr(const std::string& C, Fn g, TermPtr x, TermPtr y) {
        std::string E = "E[" + C + "]";
        TermPtr lo = g == Fn::F ? x : y;
        TermPtr hi = g == Fn::F ? y : x;
        return AND({U(C, x), NOT(U(E, x)), U(E, y), LT(C, lo, hi),
                    NOT(EX("zn", AND({U(E, V("zn")), LT(C, lo, V("zn")), LT(C, V("zn"), hi)})))});
    }

    // C_y(x): x lies on the fiber of y in E_C.
    FormulaPtr in_fiber(const std::string& C, TermPtr x, TermPtr y) {
        return OR({phi_nbr(C, Fn::F, x, y), phi_nbr(C, Fn::B, x, y), EQ(x, y)});
    }

    void dlo_axioms(const std::string& tag, const std::string& cell_detail,
                    const std::string& order_cell, const FormulaPtr& domx,
                    const FormulaPtr& domy, const FormulaPtr& domz, const FormulaPtr& domw) {
        const std::string& c = order_cell;
        auto x = V("x"), y = V("y"), z = V("z"), w = V("w");
        emit(tag, cell_detail + " irreflexive", IMP(domx, NOT(LT(c, x, x))));
        emit(tag, cell_detail + " transitive",
             IMP(AND({domx, domy, domz, LT(c, x, y), LT(c, y, z)}), LT(c, x, z)));
        emit(tag, cell_detail + " linear",
             IMP(AND({domx, domy}), OR({LT(c, x, y), EQ(x, y), LT(c, y, x)})));
        emit(tag, cell_detail + " dense",
             IMP(AND({domx, domy, LT(c, x, y)}),
                 EX("w", AND({domw, LT(c, x, V("w")), LT(c, V("w"), y)}))));
        emit(tag, cell_detail + " no endpoints",
             IMP(domx, AND({EX("w", AND({domw, LT(c, V("w"), x)})),
                            EX("w", AND({domw, LT(c, x, V("w"))}))})));
    }

    void build(bool dulac, int m_bound, int n_bound);
};

void AxiomBuilder::build(bool dulac, int m_bound, int n_bound) {
    auto x = V("x"), y = V("y"), z = V("z");
    auto phi0 = cfg.phi0();

    // (F1) the universe is partitioned into cells, singles and s
    {
        std::vector<FormulaPtr> parts;
        for (size_t i = 0; i < cfg.single_cells.size(); ++i)
            for (size_t j = i + 1; j < cfg.single_cells.size(); ++j)
                parts.push_back(NOT(EQ(K("p[" + cfg.single_cells[i] + "]"),
                                       K("p[" + cfg.single_cells[j] + "]"))));
        for (const auto& c : cfg.single_cells)
            for (const auto& C : phi0) parts.push_back(NOT(U(C, K("p[" + c + "]"))));
        if (!parts.empty()) emit("F1", "a", AND(parts));

        std::vector<FormulaPtr> partb;
        for (const auto& c : cfg.single_cells) partb.push_back(NOT(EQ(K("p[" + c + "]"), K("s"))));
        for (const auto& C : phi0) partb.push_back(NOT(U(C, K("s"))));
        emit("F1", "b", AND(partb));

        std::vector<FormulaPtr> partc;
        partc.push_back(EQ(x, K("s")));
        for (const auto& c : cfg.single_cells) partc.push_back(EQ(x, K("p[" + c + "]")));
        for (const auto& C : phi0) {
            std::vector<FormulaPtr> inner{U(C, x)};
            for (const auto& D : phi0)
                if (D != C) inner.push_back(NOT(U(D, x)));
            partc.push_back(AND(inner));
        }
        emit("F1", "c", OR(partc));
    }

    // (F2) each <_C is a dense linear order on C, bracketed by min/max
    for (const auto& C : phi0) {
        dlo_axioms("F2", C, C, U(C, x), U(C, y), U(C, z), U(C, V("w")));
        emit("F2", C + " bracket",
             IMP(U(C, x), AND({LT(C, x, K(maxc(C))), LT(C, K(minc(C)), x)})));
    }

    // (F3)
    {
        std::vector<FormulaPtr> parts;
        for (const auto& C : cfg.tan_cells) parts.push_back(U(C, K("e[" + C + "]")));
        if (!parts.empty()) emit("F3", "e in cell", AND(parts));
        for (const auto& C : cfg.open_cells)
            emit("F3", C, IMP(U("E[" + C + "]", x), U(C, x)));
    }

    // (F4) E_C densely ordered
    for (const auto& C : cfg.open_cells) {
        std::string E = "E[" + C + "]";
        dlo_axioms("F4", E, C, U(E, x), U(E, y), U(E, z), U(E, V("w")));
    }

    // (F5)
    for (Fn g : {Fn::F, Fn::B}) {
        Fn h = opposite(g);
        std::string gd(1, fn_char(g));
        emit("F5", gd + " a",
             AND({EQ(ap(g, K("s")), K("s")), IMP(NOT(EQ(x, K("s"))), NOT(EQ(ap(g, x), x)))}));
        {
            std::vector<FormulaPtr> parts;
            for (const auto& c : cfg.single_cells) {
                auto pc = K("p[" + c + "]");
                parts.push_back(IMP(NOT(EQ(ap(g, pc), K("s"))), EQ(ap(h, ap(g, pc)), pc)));
            }
            if (!parts.empty()) emit("F5", gd + " b", AND(parts));
        }
        for (const auto& C : cfg.open_cells)
            emit("F5", gd + " c " + C, IMP(U(C, ap(g, x)), U("E[" + C + "]", ap(g, x))));
        for (const auto& C : cfg.tan_cells)
            emit("F5", gd + " c " + C, IMP(U(C, ap(g, x)), EQ(ap(g, x), K("e[" + C + "]"))));
        for (const auto& C : cfg.tan_cells) {
            auto e = K("e[" + C + "]");
            // on the g side of e the image is the g endpoint; strictly before
            // e on the g side the image is e itself
            FormulaPtr on_side = g == Fn::F ? LE(C, e, x) : LE(C, x, e);
            FormulaPtr before = g == Fn::F ? LT(C, x, e) : LT(C, e, x);
            emit("F5", gd + " d " + C,
                 IMP(AND({U(C, x), on_side}), EQ(ap(g, x), ap(g, e))));
            emit("F5", gd + " e " + C, IMP(AND({U(C, x), before}), EQ(ap(g, x), e)));
        }
    }

    // (F6) injectivity on E_C
    for (const auto& C : cfg.open_cells)
        for (Fn g : {Fn::F, Fn::B}) {
            std::string E = "E[" + C + "]";
            emit("F6", C + " " + fn_char(g),
                 IMP(AND({U(E, x), U(E, y), EQ(ap(g, x), ap(g, y))}),
                     OR({EQ(ap(g, x), K("s")), EQ(x, y)})));
        }

    // (F7) singles progress into their adjacent cells
    for (const auto& c : cfg.single_cells)
        for (Fn g : {Fn::F, Fn::B}) {
            const auto& tgt = cfg.adj(c, g);
            auto pc = K("p[" + c + "]");
            if (cfg.is_tan(tgt))
                emit("F7", c + " " + fn_char(g), EQ(ap(g, pc), K("e[" + tgt + "]")));
            else
                emit("F7", c + " " + fn_char(g), U("E[" + tgt + "]", ap(g, pc)));
        }

    // (F8) g maps each transverse cell order-isomorphically into E of its target
    for (const auto& C : cfg.trans_cells)
        for (Fn g : {Fn::F, Fn::B}) {
            const auto& tgt = cfg.adj(C, g);
            std::string E = "E[" + tgt + "]";
            emit("F8", C + " " + fn_char(g) + " total", IMP(U(C, x), U(E, ap(g, x))));
            emit("F8", C + " " + fn_char(g) + " increasing",
                 IMP(AND({U(C, x), U(C, y), LT(C, x, y)}), LT(tgt, ap(g, x), ap(g, y))));
            emit("F8", C + " " + fn_char(g) + " interval",
                 IMP(AND({U(C, x), U(C, y), U(E, z), LT(tgt, ap(g, x), z), LT(tgt, z, ap(g, y))}),
                     EX("w", AND({U(C, V("w")), EQ(ap(g, V("w")), z)}))));
        }

    // (F9) images of E-points land on adjacent transverse cells or singles
    for (const auto& C : cfg.open_cells)
        for (Fn g : {Fn::F, Fn::B}) {
            Fn h = opposite(g);
            std::vector<FormulaPtr> parts{EQ(ap(g, x), K("s"))};
            for (const auto& D : cfg.trans_cells)
                if (cfg.adj(D, h) == C) parts.push_back(U(D, ap(g, x)));
            for (const auto& d : cfg.single_cells)
                if (cfg.adj(d, h) == C) parts.push_back(EQ(ap(g, x), K("p[" + d + "]")));
            emit("F9", C + " " + fn_char(g), IMP(U("E[" + C + "]", x), OR(parts)));
        }

    // (F10) fiber neighbors exist, exclusively on one side, and in numbers
    for (const auto& C : cfg.open_cells) {
        std::string E = "E[" + C + "]";
        emit("F10", C + " exists",
             IMP(AND({U(C, x), NOT(U(E, x))}),
                 EX("y", OR({phi_nbr(C, Fn::F, x, V("y")), phi_nbr(C, Fn::B, x, V("y"))}))));
        emit("F10", C + " f excludes b",
             IMP(EX("y", phi_nbr(C, Fn::F, x, V("y"))),
                 NOT(EX("y", phi_nbr(C, Fn::B, x, V("y"))))));
        emit("F10", C + " b excludes f",
             IMP(EX("y", phi_nbr(C, Fn::B, x, V("y"))),
                 NOT(EX("y", phi_nbr(C, Fn::F, x, V("y"))))));
        // finite fragment of the infinity scheme: at least two on each side
        for (Fn g : {Fn::F, Fn::B})
            emit("F10", C + std::string(" many ") + fn_char(g),
                 IMP(U(E, y),
                     EX("u", EX("v", AND({NOT(EQ(V("u"), V("v"))), phi_nbr(C, g, V("u"), y),
                                          phi_nbr(C, g, V("v"), y)})))));
    }

    // (F11) each fiber is densely linearly ordered and order-convex
    for (const auto& C : cfg.open_cells) {
        std::string E = "E[" + C + "]";
        auto fib = [&](TermPtr t) { return in_fiber(C, t, y); };
        emit("F11", C + " linear",
             IMP(AND({U(E, y), fib(x), fib(z)}), OR({LT(C, x, z), EQ(x, z), LT(C, z, x)})));
        emit("F11", C + " dense",
             IMP(AND({U(E, y), fib(x), fib(z), LT(C, x, z)}),
                 EX("w", AND({fib(V("w")), LT(C, x, V("w")), LT(C, V("w"), z)}))));
        emit("F11", C + " convex",
             IMP(AND({U(E, y), fib(x), fib(z), LT(C, x, V("w")), LT(C, V("w"), z)}),
                 fib(V("w"))));
    }

    // (F12) the progression maps realize the fiber neighbor relation
    for (const auto& C : cfg.open_cells)
        for (Fn g : {Fn::F, Fn::B}) {
            Fn h = opposite(g);
            std::string E = "E[" + C + "]";
            emit("F12", C + " " + fn_char(g) + " a",
                 IMP(AND({U(C, x), NOT(U(E, x)), EX("y", phi_nbr(C, g, x, V("y")))}),
                     ALL("z", IMP(phi_nbr(C, g, x, V("z")), EQ(ap(g, x), V("z"))))));
            emit("F12", C + " " + fn_char(g) + " b",
                 IMP(AND({U(C, x), NOT(U(E, x)), EX("y", phi_nbr(C, h, x, V("y")))}),
                     ALL("z", IMP(phi_nbr(C, h, x, V("z")), EQ(ap(g, x), ap(g, V("z")))))));
        }

    // (F13) r/s constants demarcate the h-preimage interval inside E
    for (const auto& C : cfg.trans_cells)
        for (Fn g : {Fn::F, Fn::B}) {
            Fn h = opposite(g);
            const auto& tgt = cfg.adj(C, g);
            std::string E = "E[" + tgt + "]";
            std::string gd(1, fn_char(g));
            auto r = K(std::string("r[") + fn_char(g) + "," + C + "]");
            auto sc = K(std::string("s[") + fn_char(g) + "," + C + "]");
            emit("F13", C + " " + gd + " a",
                 OR({U(E, r), EQ(r, K(minc(tgt))), EQ(r, K(maxc(tgt)))}));
            emit("F13", C + " " + gd + " b",
                 OR({U(E, sc), EQ(sc, K(minc(tgt))), EQ(sc, K(maxc(tgt)))}));
            emit("F13", C + " " + gd + " c", NOT(LT(tgt, sc, r)));
            emit("F13", C + " " + gd + " d",
                 IMP(U(E, x),
                     Formula::mk_and(IMP(U(C, ap(h, x)), AND({LT(tgt, r, x), LT(tgt, x, sc)})),
                                     IMP(AND({LT(tgt, r, x), LT(tgt, x, sc)}), U(C, ap(h, x))))));
        }

    // (F14) no shorter hidden periods inside E_C / transverse cells
    {
        auto emit_f14 = [&](const std::string& pred, const std::string& detail) {
            for (Fn g : {Fn::F, Fn::B})
                for (int n = 2; n <= n_bound; ++n)
                    for (int m = 1; m < n; ++m)
                        emit("F14", detail + " " + fn_char(g) + " m" + std::to_string(m) + " n" +
                                        std::to_string(n),
                             IMP(AND({U(pred, x), U(pred, Term::iterate(g, m, x)),
                                      EQ(Term::iterate(g, n, x), x)}),
                                 EQ(Term::iterate(g, m, x), x)));
        };
        for (const auto& C : cfg.open_cells) emit_f14("E[" + C + "]", "E " + C);
        for (const auto& D : cfg.trans_cells) emit_f14(D, D);
    }

    // (F15) every period divides into the global bound N_Phi
    for (Fn g : {Fn::F, Fn::B})
        for (int m = 1; m <= n_bound; ++m)
            emit("F15", std::string(1, fn_char(g)) + " m" + std::to_string(m),
                 IMP(EQ(Term::iterate(g, m, x), x), EQ(Term::iterate(g, cfg.n_phi, x), x)));

    if (!dulac) return;

    // ---------------- Dulac axioms ----------------
    auto phi1 = cfg.phi1();
    auto pred_of = [&](const std::string& c1) { return c1; };
    auto order_of = [&](const std::string& c1) {
        if (c1.substr(0, 2) == "E[") return c1.substr(2, c1.size() - 3);
        return c1;
    };
    auto closure_of = [&](const std::string& c1, TermPtr t) {
        std::string oc = order_of(c1);
        return OR({U(pred_of(c1), t), EQ(t, K(minc(oc))), EQ(t, K(maxc(oc)))});
    };
    auto fix_of = [&](const std::string& c1, TermPtr t) {
        return AND({U(pred_of(c1), t), EQ(Term::iterate(Fn::F, cfg.n_phi, t), t)});
    };
    auto fixbd_of = [&](const std::string& c1, TermPtr t) {
        std::string oc = order_of(c1);
        return AND(
            {fix_of(c1, t),
             ALL("u", ALL("v", IMP(AND({LT(oc, V("u"), t), LT(oc, t, V("v"))}),
                                   EX("w", AND({LT(oc, V("u"), V("w")), LT(oc, V("w"), V("v")),
                                                NOT(fix_of(c1, V("w")))})))))});
    };

    struct GSpec {
        char rel;
        Fn dir;
        int m;
        std::string detail;
    };
    for (const auto& c1 : phi1) {
        std::string oc = order_of(c1);
        std::vector<GSpec> gs{{'R', Fn::F, cfg.n_phi, "R"}};
        for (Fn g : {Fn::F, Fn::B})
            for (int m = 1; m <= m_bound; ++m)
                gs.push_back({'S', g, m, std::string("S") + fn_char(g) + std::to_string(m)});
        for (Fn g : {Fn::F, Fn::B})
            for (int m = 1; m <= m_bound; ++m)
                gs.push_back({'B', g, m, std::string("B") + fn_char(g) + std::to_string(m)});

        auto atomG = [&](const GSpec& G, TermPtr a, TermPtr b) {
            if (G.rel == 'R') return Formula::binary('R', Fn::F, 0, c1, a, b);
            return Formula::binary(G.rel, G.dir, G.m, c1, a, b);
        };
        auto diag_body = [&](const GSpec& G, TermPtr t) {
            if (G.rel == 'R') return fix_of(c1, t);
            auto it = Term::iterate(G.dir, G.m, t);
            return AND({U(pred_of(c1), t),
                        G.rel == 'S' ? LT(oc, it, t) : LT(oc, t, it)});
        };
        auto between_body = [&](const GSpec& G, TermPtr zz) {
            if (G.rel == 'R') return fix_of(c1, zz);
            auto it = Term::iterate(G.dir, G.m, zz);
            return G.rel == 'S' ? LT(oc, it, zz) : LT(oc, zz, it);
        };

        // (D1)
        for (const auto& G : gs) {
            emit("D1", c1 + " " + G.detail + " a",
                 IMP(atomG(G, x, y), AND({closure_of(c1, x), closure_of(c1, y)})));
            emit("D1", c1 + " " + G.detail + " b",
                 IMP(atomG(G, x, y),
                     OR({LE(oc, x, y),
                         AND({EQ(x, K(minc(oc))), EQ(y, K(maxc(oc)))})})));
        }
        // (D2) R
        {
            GSpec R{'R', Fn::F, cfg.n_phi, "R"};
            emit("D2", c1 + " a",
                 Formula::mk_and(
                     IMP(atomG(R, x, y),
                         OR({EX("z", AND({LT(oc, x, V("z")), LT(oc, V("z"), y), fix_of(c1, V("z"))})),
                             AND({EQ(x, y), fix_of(c1, x)})})),
                     IMP(EX("z", AND({LT(oc, x, V("z")), LT(oc, V("z"), y), fix_of(c1, V("z"))})),
                         atomG(R, x, y))));
            emit("D2", c1 + " b",
                 Formula::mk_and(IMP(atomG(R, x, x), fix_of(c1, x)),
                                 IMP(fix_of(c1, x), atomG(R, x, x))));
        }
        // (D3) S/B
        for (const auto& G : gs) {
            if (G.rel == 'R') continue;
            emit("D3", c1 + " " + G.detail + " offdiag",
                 Formula::mk_and(
                     IMP(atomG(G, x, y),
                         OR({EX("z", AND({LT(oc, x, V("z")), LT(oc, V("z"), y),
                                          between_body(G, V("z"))})),
                             AND({EQ(x, y), diag_body(G, x)})})),
                     IMP(EX("z", AND({LT(oc, x, V("z")), LT(oc, V("z"), y), between_body(G, V("z"))})),
                         atomG(G, x, y))));
            emit("D3", c1 + " " + G.detail + " diag",
                 Formula::mk_and(IMP(atomG(G, x, x), diag_body(G, x)),
                                 IMP(diag_body(G, x), atomG(G, x, x))));
        }
        // (D4)
        for (const auto& G : gs) {
            auto hyp_dom = ALL("z", IMP(AND({LT(oc, x, V("z")), LT(oc, V("z"), y)}),
                                        closure_of(c1, Term::iterate(G.dir, G.m, V("z")))));
            auto hyp_nobd = NOT(EX("z", AND({LT(oc, x, V("z")), LT(oc, V("z"), y),
                                             fixbd_of(c1, V("z"))})));
            emit("D4", c1 + " " + G.detail,
                 IMP(AND({atomG(G, x, y), hyp_dom, hyp_nobd}),
                     ALL("z", IMP(AND({LT(oc, x, V("z")), LT(oc, V("z"), y)}),
                                  atomG(G, V("z"), V("z"))))));
        }
        // (D5)
        for (int j = 1; j <= cfg.nu; ++j) {
            auto gj = K("gamma[" + std::to_string(j) + "," + c1 + "]");
            emit("D5", c1 + " a j" + std::to_string(j),
                 AND({closure_of(c1, gj), IMP(U(pred_of(c1), gj), fix_of(c1, gj))}));
            if (j < cfg.nu) {
                auto gj1 = K("gamma[" + std::to_string(j + 1) + "," + c1 + "]");
                emit("D5", c1 + " b j" + std::to_string(j),
                     AND({NOT(LT(oc, gj1, gj)),
                          IMP(EQ(gj, gj1), EQ(gj, K(maxc(oc))))}));
            }
        }
        // (D6)
        {
            std::vector<FormulaPtr> parts;
            for (int j = 1; j <= cfg.nu; ++j) {
                auto gj = K("gamma[" + std::to_string(j) + "," + c1 + "]");
                parts.push_back(AND({EQ(x, gj), U(pred_of(c1), gj)}));
            }
            emit("D6", c1,
                 Formula::mk_and(IMP(AND({U(pred_of(c1), x), fixbd_of(c1, x)}), OR(parts)),
                                 IMP(OR(parts), AND({U(pred_of(c1), x), fixbd_of(c1, x)}))));
        }
    }
}

}  // namespace

std::vector<TaggedAxiom> generate_axioms(const FlowConfiguration& config, bool dulac,
                                         int m_bound, int n_bound) {
    config.validate();
    AxiomBuilder b{config, {}};
    b.build(dulac, m_bound, n_bound);
    return std::move(b.out);
}

FormulaPtr build_cycle_formula(const FlowConfiguration& config, CycleFormulaKind kind,
                               const Phi1Ref& c) {
    auto found = false;
    for (const auto& name : config.phi1())
        if (name == c.name()) found = true;
    if (!found) throw std::runtime_error(c.name() + " is not a Phi_1 member");

    const std::string pred = c.name();
    const std::string oc = c.order_cell();
    auto x = Term::var("x"), y = Term::var("y");

    auto fix = [&](TermPtr t) {
        return Formula::mk_and(Formula::unary(pred, t),
                               Formula::eq(Term::iterate(Fn::F, config.n_phi, t), t));
    };
    auto le = [&](TermPtr a, TermPtr b) {
        return Formula::mk_or(Formula::less(oc, a, b), Formula::eq(a, b));
    };
    auto fix_pair = [&](TermPtr a, TermPtr b) {
        auto zz = Term::var("z");
        auto between = Formula::mk_or(
            Formula::mk_and(le(a, zz), le(zz, b)),
            Formula::mk_and(le(b, zz), le(zz, a)));
        return Formula::exists("z", Formula::mk_and(between, fix(zz)));
    };

    switch (kind) {
        case CycleFormulaKind::Fix: return fix(x);
        case CycleFormulaKind::FixPair: return fix_pair(x, y);
        case CycleFormulaKind::FixBd: {
            auto u = Term::var("y"), v = Term::var("z");
            auto w = Term::var("w");
            auto inner = Formula::exists(
                "w", Formula::conj({Formula::less(oc, u, w), Formula::less(oc, w, v),
                                    Formula::mk_not(fix(w))}));
            return Formula::mk_and(
                fix(x), Formula::forall(
                            "y", Formula::forall(
                                     "z", Formula::implies(
                                              Formula::mk_and(Formula::less(oc, u, x),
                                                              Formula::less(oc, x, v)),
                                              inner))));
        }
        case CycleFormulaKind::Lim:
            return Formula::mk_and(
                fix(x),
                Formula::exists("y", Formula::conj({Formula::unary(pred, y),
                                                    Formula::mk_not(Formula::eq(y, x)),
                                                    Formula::mk_not(fix_pair(x, y))})));
    }
    throw std::logic_error("unreachable");
}

}  // namespace flowcell
