#include "gtf/expr.hpp"

#include <cctype>
#include <cmath>
#include <cstdio>
#include <cstdlib>

namespace gtf {

namespace {

Expr node(ExprNode::Kind k, Expr a = nullptr, Expr b = nullptr) {
    auto n = std::make_shared<ExprNode>();
    n->kind = k;
    n->a = std::move(a);
    n->b = std::move(b);
    return n;
}

bool is_const(const Expr& e, double v) {
    return e->kind == ExprNode::Kind::Const && e->value == v;
}

Expr add(Expr a, Expr b) {
    if (is_const(a, 0.0)) return b;
    if (is_const(b, 0.0)) return a;
    return node(ExprNode::Kind::Add, a, b);
}

Expr sub(Expr a, Expr b) {
    if (is_const(b, 0.0)) return a;
    return node(ExprNode::Kind::Sub, a, b);
}

Expr mul(Expr a, Expr b) {
    if (is_const(a, 0.0) || is_const(b, 0.0)) return make_const(0.0);
    if (is_const(a, 1.0)) return b;
    if (is_const(b, 1.0)) return a;
    return node(ExprNode::Kind::Mul, a, b);
}

Expr divide(Expr a, Expr b) {
    if (is_const(a, 0.0)) return make_const(0.0);
    if (is_const(b, 1.0)) return a;
    return node(ExprNode::Kind::Div, a, b);
}

Expr neg(Expr a) { return node(ExprNode::Kind::Neg, a); }

Expr pow_int(Expr a, int k) {
    auto n = std::make_shared<ExprNode>();
    n->kind = ExprNode::Kind::Pow;
    n->a = a;
    n->exponent = k;
    return n;
}

} // namespace

Expr make_const(double v) {
    auto n = std::make_shared<ExprNode>();
    n->kind = ExprNode::Kind::Const;
    n->value = v;
    return n;
}

Expr make_var(int index) {
    auto n = std::make_shared<ExprNode>();
    n->kind = ExprNode::Kind::Var;
    n->var = index;
    return n;
}

double ExprNode::eval(const double* x) const {
    switch (kind) {
        case Kind::Const: return value;
        case Kind::Var: return x[var];
        case Kind::Add: return a->eval(x) + b->eval(x);
        case Kind::Sub: return a->eval(x) - b->eval(x);
        case Kind::Mul: return a->eval(x) * b->eval(x);
        case Kind::Div: return a->eval(x) / b->eval(x);
        case Kind::Neg: return -a->eval(x);
        case Kind::Pow: {
            double base = a->eval(x);
            int k = exponent;
            bool inv = k < 0;
            if (inv) k = -k;
            double r = 1.0;
            double p = base;
            while (k > 0) {
                if (k & 1) r *= p;
                p *= p;
                k >>= 1;
            }
            return inv ? 1.0 / r : r;
        }
        case Kind::Sin: return std::sin(a->eval(x));
        case Kind::Cos: return std::cos(a->eval(x));
        case Kind::Exp: return std::exp(a->eval(x));
        case Kind::Sqrt: return std::sqrt(a->eval(x));
    }
    return 0.0;
}

bool ExprNode::is_polynomial() const {
    switch (kind) {
        case Kind::Const:
        case Kind::Var: return true;
        case Kind::Add:
        case Kind::Sub:
        case Kind::Mul: return a->is_polynomial() && b->is_polynomial();
        case Kind::Div: return a->is_polynomial() && b->kind == Kind::Const;
        case Kind::Neg: return a->is_polynomial();
        case Kind::Pow: return exponent >= 0 && a->is_polynomial();
        default: return false;
    }
}

Expr ExprNode::derivative(int v) const {
    switch (kind) {
        case Kind::Const: return make_const(0.0);
        case Kind::Var: return make_const(var == v ? 1.0 : 0.0);
        case Kind::Add: return add(a->derivative(v), b->derivative(v));
        case Kind::Sub: return sub(a->derivative(v), b->derivative(v));
        case Kind::Mul:
            return add(mul(a->derivative(v), b), mul(a, b->derivative(v)));
        case Kind::Div:
            return divide(sub(mul(a->derivative(v), b), mul(a, b->derivative(v))),
                          pow_int(b, 2));
        case Kind::Neg: return neg(a->derivative(v));
        case Kind::Pow: {
            if (exponent == 0) return make_const(0.0);
            Expr self = pow_int(a, exponent - 1);
            return mul(mul(make_const(exponent), self), a->derivative(v));
        }
        case Kind::Sin: return mul(node(Kind::Cos, a), a->derivative(v));
        case Kind::Cos: return neg(mul(node(Kind::Sin, a), a->derivative(v)));
        case Kind::Exp: return mul(node(Kind::Exp, a), a->derivative(v));
        case Kind::Sqrt:
            return divide(a->derivative(v),
                          mul(make_const(2.0), node(Kind::Sqrt, a)));
    }
    return make_const(0.0);
}

namespace {

std::string fmt_double(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

} // namespace

std::string var_name(int index, int dim) {
    if (dim <= 3) {
        static const char* names[3] = {"x", "y", "z"};
        return names[index];
    }
    return "x" + std::to_string(index + 1);
}

std::string ExprNode::pretty() const {
    switch (kind) {
        case Kind::Const: return fmt_double(value);
        // Printed names assume dim <= 3 charts use x/y/z; higher dimensions
        // always print the indexed form, which reparses identically.
        case Kind::Var: return var <= 2 ? std::string(1, "xyz"[var]) : "x" + std::to_string(var + 1);
        case Kind::Add: return "(" + a->pretty() + " + " + b->pretty() + ")";
        case Kind::Sub: return "(" + a->pretty() + " - " + b->pretty() + ")";
        case Kind::Mul: return "(" + a->pretty() + " * " + b->pretty() + ")";
        case Kind::Div: return "(" + a->pretty() + " / " + b->pretty() + ")";
        case Kind::Neg: return "(-" + a->pretty() + ")";
        case Kind::Pow: return "(" + a->pretty() + "^" + std::to_string(exponent) + ")";
        case Kind::Sin: return "sin(" + a->pretty() + ")";
        case Kind::Cos: return "cos(" + a->pretty() + ")";
        case Kind::Exp: return "exp(" + a->pretty() + ")";
        case Kind::Sqrt: return "sqrt(" + a->pretty() + ")";
    }
    return "";
}

bool ExprNode::equal(const Expr& lhs, const Expr& rhs) {
    if (lhs->kind != rhs->kind) return false;
    switch (lhs->kind) {
        case Kind::Const: return lhs->value == rhs->value;
        case Kind::Var: return lhs->var == rhs->var;
        case Kind::Pow:
            return lhs->exponent == rhs->exponent && equal(lhs->a, rhs->a);
        case Kind::Neg:
        case Kind::Sin:
        case Kind::Cos:
        case Kind::Exp:
        case Kind::Sqrt: return equal(lhs->a, rhs->a);
        default: return equal(lhs->a, rhs->a) && equal(lhs->b, rhs->b);
    }
}

namespace {

class Parser {
public:
    Parser(const std::string& text, int dim, int line, int col_offset)
        : text_(text), dim_(dim), line_(line), col_offset_(col_offset) {}

    Expr parse() {
        Expr e = expression();
        skip_space();
        if (pos_ != text_.size()) fail("unexpected trailing input");
        return e;
    }

private:
    const std::string& text_;
    int dim_;
    int line_;
    int col_offset_;
    size_t pos_ = 0;

    [[noreturn]] void fail(const std::string& msg) {
        throw ParseError(msg, line_, col_offset_ + static_cast<int>(pos_) + 1);
    }

    void skip_space() {
        while (pos_ < text_.size() && std::isspace(static_cast<unsigned char>(text_[pos_])))
            ++pos_;
    }

    char peek() {
        skip_space();
        return pos_ < text_.size() ? text_[pos_] : '\0';
    }

    bool consume(char c) {
        if (peek() == c) {
            ++pos_;
            return true;
        }
        return false;
    }

    Expr expression() {
        Expr e = term();
        while (true) {
            char c = peek();
            if (c == '+') {
                ++pos_;
                e = node(ExprNode::Kind::Add, e, term());
            } else if (c == '-') {
                ++pos_;
                e = node(ExprNode::Kind::Sub, e, term());
            } else {
                return e;
            }
        }
    }

    Expr term() {
        Expr e = unary();
        while (true) {
            char c = peek();
            if (c == '*') {
                ++pos_;
                e = node(ExprNode::Kind::Mul, e, unary());
            } else if (c == '/') {
                ++pos_;
                e = node(ExprNode::Kind::Div, e, unary());
            } else {
                return e;
            }
        }
    }

    Expr unary() {
        if (consume('-')) return node(ExprNode::Kind::Neg, unary());
        return power();
    }

    Expr power() {
        Expr base = atom();
        if (consume('^')) {
            skip_space();
            bool negative = consume('-');
            skip_space();
            if (pos_ >= text_.size() || !std::isdigit(static_cast<unsigned char>(text_[pos_])))
                fail("expected integer exponent after '^'");
            int k = 0;
            while (pos_ < text_.size() && std::isdigit(static_cast<unsigned char>(text_[pos_])))
                k = k * 10 + (text_[pos_++] - '0');
            return pow_int(base, negative ? -k : k);
        }
        return base;
    }

    Expr atom() {
        char c = peek();
        if (c == '(') {
            ++pos_;
            Expr e = expression();
            if (!consume(')')) fail("expected ')'");
            return e;
        }
        if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') return number();
        if (std::isalpha(static_cast<unsigned char>(c))) return identifier();
        if (c == '\0') fail("unexpected end of expression");
        fail(std::string("unexpected character '") + c + "'");
    }

    Expr number() {
        skip_space();
        size_t start = pos_;
        while (pos_ < text_.size()) {
            char c = text_[pos_];
            if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') {
                ++pos_;
            } else if ((c == 'e' || c == 'E') && pos_ > start) {
                size_t next = pos_ + 1;
                if (next < text_.size() && (text_[next] == '+' || text_[next] == '-')) ++next;
                if (next < text_.size() && std::isdigit(static_cast<unsigned char>(text_[next]))) {
                    pos_ = next + 1;
                    while (pos_ < text_.size() &&
                           std::isdigit(static_cast<unsigned char>(text_[pos_])))
                        ++pos_;
                } else {
                    break;
                }
            } else {
                break;
            }
        }
        return make_const(std::strtod(text_.substr(start, pos_ - start).c_str(), nullptr));
    }

    Expr identifier() {
        skip_space();
        size_t start = pos_;
        while (pos_ < text_.size() &&
               (std::isalnum(static_cast<unsigned char>(text_[pos_])) || text_[pos_] == '_'))
            ++pos_;
        std::string name = text_.substr(start, pos_ - start);
        if (name == "sin" || name == "cos" || name == "exp" || name == "sqrt") {
            if (!consume('(')) fail("expected '(' after function name");
            Expr arg = expression();
            if (!consume(')')) fail("expected ')'");
            if (name == "sin") return node(ExprNode::Kind::Sin, arg);
            if (name == "cos") return node(ExprNode::Kind::Cos, arg);
            if (name == "exp") return node(ExprNode::Kind::Exp, arg);
            return node(ExprNode::Kind::Sqrt, arg);
        }
        if (name == "pi") return make_const(M_PI);
        if (dim_ <= 3) {
            if (name == "x") return make_var(0);
            if (name == "y" && dim_ >= 2) return make_var(1);
            if (name == "z" && dim_ >= 3) return make_var(2);
        }
        if (name.size() >= 2 && name[0] == 'x') {
            bool digits = true;
            for (size_t i = 1; i < name.size(); ++i)
                if (!std::isdigit(static_cast<unsigned char>(name[i]))) digits = false;
            if (digits) {
                int idx = std::atoi(name.c_str() + 1);
                if (idx >= 1 && idx <= dim_) return make_var(idx - 1);
            }
        }
        pos_ = start;
        fail("unknown identifier '" + name + "'");
    }
};

} // namespace

Expr parse_expression(const std::string& text, int dim, int line, int col_offset) {
    return Parser(text, dim, line, col_offset).parse();
}

} // namespace gtf
