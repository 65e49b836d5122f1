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

#include <memory>
#include <string>

namespace flowcell {

/// Scalar expression in named variables (x, y for fields; t for curves).
/// Supported operators: + - * / ^, exp, sqrt, and bump(t) = exp(-1/t) for
/// t > 0 and 0 otherwise (the standard smooth cutoff; needed to express
/// compactly supported perturbations of a field).
class Expr {
public:
    enum class Kind { Num, Var, Add, Sub, Mul, Div, Pow, Neg, Exp, Sqrt, Bump };

    using Ptr = std::shared_ptr<const Expr>;

    Kind kind;
    double value = 0.0;     // Num
    std::string var;        // Var
    Ptr a, b;

    static Ptr num(double v);
    static Ptr varref(const std::string& name);
    static Ptr mk(Kind k, Ptr a, Ptr b = nullptr);

    double eval(double x, double y, double t = 0.0) const;

    /// Symbolic partial derivative; `name` is the variable to differentiate by.
    Ptr diff(const std::string& name) const;

    /// Substitutes expressions for variables x and y.
    Ptr subst_xy(Ptr fx, Ptr fy) const;

    std::string str() const;

    /// Parses the expression grammar; throws std::runtime_error with a
    /// position on failure.
    static Ptr parse(const std::string& text);
};

}  // namespace flowcell
