#ifndef NLDISP_EXPR_HPP
#define NLDISP_EXPR_HPP

#include <memory>
#include <set>
#include <span>
#include <string>
#include <utility>
#include <vector>

namespace nldisp {

/// Immutable arithmetic expression over (t, x) and named parameters.
///
/// Grammar (infix, standard precedence): ^ binds tighter than unary minus,
/// which binds tighter than * /, which bind tighter than + -. All operators
/// are left-associative except ^, which is right-associative. Functions:
/// sin, cos, exp, tanh, abs, min, max. Constant: pi.
class Expr {
public:
    enum class Kind { number, variable, negate, binary, call1, call2 };
    enum class Fn1 { sin, cos, exp, tanh, abs };
    enum class Fn2 { min, max };

    Kind kind;
    double number = 0.0;   // Kind::number
    std::string name;      // Kind::variable
    char op = 0;           // Kind::binary: + - * / ^
    Fn1 fn1 = Fn1::sin;
    Fn2 fn2 = Fn2::min;
    std::shared_ptr<const Expr> lhs, rhs;  // negate/call1 use lhs only
};

using ExprPtr = std::shared_ptr<const Expr>;

/// Name -> value bindings for evaluation. Lookups are linear; contexts are
/// small (t, x, T, p plus a handful of parameters).
class EvalContext {
public:
    EvalContext() = default;
    void bind(std::string name, double value);
    void rebind(const std::string& name, double value);  // updates in place, binds if absent
    const double* find(std::string_view name) const;
    std::span<const std::pair<std::string, double>> entries() const { return vars_; }

private:
    std::vector<std::pair<std::string, double>> vars_;
};

ExprPtr parse(std::string_view text);
double eval(const Expr& e, const EvalContext& ctx);
std::set<std::string> free_vars(const Expr& e);
std::string to_string(const Expr& e);

}  // namespace nldisp

#endif
