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

#include <map>
#include <memory>
#include <optional>
#include <string>
#include <vector>

namespace flowcell {

struct Formula;
using FormulaPtr = std::shared_ptr<const Formula>;

enum class Fn { F, B };
inline Fn opposite(Fn g) { return g == Fn::F ? Fn::B : Fn::F; }
inline char fn_char(Fn g) { return g == Fn::F ? 'f' : 'b'; }

enum class CellKind { Open, Tan, Trans, Single };

/// The finite combinatorial data generating a flow language and theory:
/// four disjoint cell sets, the forward/backward adjacency of the 1- and
/// 0-dimensional cells, order endpoints, and the iteration bound.
class FlowConfiguration {
public:
    std::vector<std::string> open_cells, tan_cells, trans_cells, single_cells;
    // trans/single -> open/tan
    std::map<std::string, std::string> fwd_map, back_map;
    // open/tan/trans -> single or "inf"
    std::map<std::string, std::string> min_map, max_map;
    int n_phi = 1;
    int nu = 0;        // Dulac bound; 0 means plain flow configuration
    bool dulac = false;

    static FlowConfiguration from_json(const std::string& json_text);
    std::string to_json() const;

    /// Throws std::runtime_error naming the first violated clause.
    void validate() const;

    bool is_open(const std::string& c) const;
    bool is_tan(const std::string& c) const;
    bool is_trans(const std::string& c) const;
    bool is_single(const std::string& c) const;
    CellKind kind_of(const std::string& c) const;

    /// Phi_0 = open + tan + trans (the cells carrying an ordering).
    std::vector<std::string> phi0() const;
    /// Phi_1 names: trans cells plus "E[C]" for each open C.
    std::vector<std::string> phi1() const;

    const std::string& adj(const std::string& cell, Fn g) const;  // a^f / a^b
    /// min/max as constant names: "p[c]" for a single c, "s" for infinity.
    std::string min_const(const std::string& cell) const;
    std::string max_const(const std::string& cell) const;
};

/// A Phi_1 member: either a transverse cell or the E-set of an open cell.
struct Phi1Ref {
    bool is_E = false;
    std::string cell;  // the trans cell, or the open cell under E

    std::string name() const { return is_E ? "E[" + cell + "]" : cell; }
    /// The cell whose ordering < is used for comparisons on this member.
    const std::string& order_cell() const { return cell; }
    bool operator==(const Phi1Ref&) const = default;
    bool operator<(const Phi1Ref& o) const {
        return std::tie(is_E, cell) < std::tie(o.is_E, o.cell);
    }
};

struct Signature {
    struct BinaryPred {
        std::string name;   // printed form, e.g. "<[Q1]", "R[X+]", "S[f,2,X+]"
        std::string cell;
        char rel = 0;       // '<', 'R', 'S', 'B'
        Fn dir = Fn::F;
        int m = 0;
    };

    std::vector<std::string> unary_predicates;   // cells, then E[C]
    std::vector<BinaryPred> binary_predicates;
    std::vector<std::string> constants;          // grammar spellings
    std::vector<std::string> function_symbols;   // "f", "b"
    int m_bound = 0;

    // alias -> canonical constant (min[C]/max[C] to p[..] or s)
    std::map<std::string, std::string> aliases;

    const FlowConfiguration* config = nullptr;

    bool has_constant(const std::string& name) const;
    bool has_unary(const std::string& name) const;
    std::string resolve_const(const std::string& name) const;
    std::string to_json() const;
};

Signature make_signature(const FlowConfiguration& config, int m_bound);

/// A generated axiom, tagged with its scheme for test selection.
struct TaggedAxiom {
    std::string tag;     // "F1".."F15", "D1".."D6"
    std::string detail;  // instantiation note, e.g. cell / m / g
    FormulaPtr sentence;
};

std::vector<TaggedAxiom> generate_axioms(const FlowConfiguration& config, bool dulac,
                                         int m_bound, int n_bound);

enum class CycleFormulaKind { Fix, FixPair, FixBd, Lim };

FormulaPtr build_cycle_formula(const FlowConfiguration& config, CycleFormulaKind kind,
                               const Phi1Ref& c);

std::optional<Phi1Ref> parse_phi1(const FlowConfiguration& config, const std::string& name);

}  // namespace flowcell
