#pragma once

#include <memory>
#include <string>
#include <vector>

#include "gtf/errors.hpp"
#include "gtf/linalg.hpp"

namespace gtf {

// Scalar expressions over chart coordinates. The grammar covers
// +, -, *, /, ^ with integer exponents, sin, cos, exp, sqrt, numeric
// literals and the variables x, y, z (dim <= 3) or x1..xn.
class ExprNode;
using Expr = std::shared_ptr<const ExprNode>;

class ExprNode {
public:
    enum class Kind { Const, Var, Add, Sub, Mul, Div, Neg, Pow, Sin, Cos, Exp, Sqrt };

    Kind kind;
    double value = 0.0;   // Const
    int var = 0;          // Var
    int exponent = 0;     // Pow
    Expr a, b;

    double eval(const double* x) const;
    bool is_polynomial() const;

    // Exact derivative with respect to variable `var`; defined for every
    // node kind (sqrt' uses 1/(2 sqrt)).
    Expr derivative(int var) const;

    std::string pretty() const;
    static bool equal(const Expr& lhs, const Expr& rhs);
};

Expr make_const(double v);
Expr make_var(int index);

// Parses an expression for an n-dimensional chart. `line` and `col_offset`
// locate syntax errors inside a larger document.
Expr parse_expression(const std::string& text, int dim, int line = 1, int col_offset = 0);

// Variable name for dimension n: "x"/"y"/"z" when n <= 3, else "x1".."xn".
std::string var_name(int index, int dim);

} // namespace gtf
