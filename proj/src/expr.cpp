#include "nldisp/expr.hpp"

#include <array>
#include <cctype>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <cstring>

#include "nldisp/errors.hpp"

namespace nldisp {

void EvalContext::bind(std::string name, double value) {
    vars_.emplace_back(std::move(name), value);
}

void EvalContext::rebind(const std::string& name, double value) {
    for (auto& [n, v] : vars_) {
        if (n == name) {
            v = value;
            return;
        }
    }
    vars_.emplace_back(name, value);
}

const double* EvalContext::find(std::string_view name) const {
    for (const auto& [n, v] : vars_) {
        if (n == name) return &v;
    }
    return nullptr;
}

namespace {

ExprPtr make_number(double v) {
    auto e = std::make_shared<Expr>();
    e->kind = Expr::Kind::number;
    e->number = v;
    return e;
}

ExprPtr make_variable(std::string name) {
    auto e = std::make_shared<Expr>();
    e->kind = Expr::Kind::variable;
    e->name = std::move(name);
    return e;
}

ExprPtr make_negate(ExprPtr a) {
    auto e = std::make_shared<Expr>();
    e->kind = Expr::Kind::negate;
    e->lhs = std::move(a);
    return e;
}

ExprPtr make_binary(char op, ExprPtr a, ExprPtr b) {
    auto e = std::make_shared<Expr>();
    e->kind = Expr::Kind::binary;
    e->op = op;
    e->lhs = std::move(a);
    e->rhs = std::move(b);
    return e;
}

ExprPtr make_call1(Expr::Fn1 f, ExprPtr a) {
    auto e = std::make_shared<Expr>();
    e->kind = Expr::Kind::call1;
    e->fn1 = f;
    e->lhs = std::move(a);
    return e;
}

ExprPtr make_call2(Expr::Fn2 f, ExprPtr a, ExprPtr b) {
    auto e = std::make_shared<Expr>();
    e->kind = Expr::Kind::call2;
    e->fn2 = f;
    e->lhs = std::move(a);
    e->rhs = std::move(b);
    return e;
}

class Parser {
public:
    explicit Parser(std::string_view s) : s_(s) {}

    ExprPtr run() {
        if (s_.find_first_not_of(" \t\r\n") == std::string_view::npos)
            throw SyntaxError("empty expression", 0);
        ExprPtr e = parse_sum();
        skip_ws();
        if (pos_ != s_.size()) throw SyntaxError("unexpected trailing input", pos_);
        return e;
    }

private:
    std::string_view s_;
    std::size_t pos_ = 0;

    void skip_ws() {
        while (pos_ < s_.size() && std::isspace(static_cast<unsigned char>(s_[pos_]))) ++pos_;
    }

    bool eat(char c) {
        skip_ws();
        if (pos_ < s_.size() && s_[pos_] == c) {
            ++pos_;
            return true;
        }
        return false;
    }

    char peek() {
        skip_ws();
        return pos_ < s_.size() ? s_[pos_] : '\0';
    }

    ExprPtr parse_sum() {
        ExprPtr e = parse_product();
        for (;;) {
            char c = peek();
            if (c == '+' || c == '-') {
                ++pos_;
                e = make_binary(c, e, parse_product());
            } else {
                return e;
            }
        }
    }

    ExprPtr parse_product() {
        ExprPtr e = parse_unary();
        for (;;) {
            char c = peek();
            if (c == '*' || c == '/') {
                ++pos_;
                e = make_binary(c, e, parse_unary());
            } else {
                return e;
            }
        }
    }

    // '^' binds tighter than unary minus: -x^2 parses as -(x^2).
    ExprPtr parse_unary() {
        if (eat('-')) return make_negate(parse_unary());
        return parse_power();
    }

    ExprPtr parse_power() {
        ExprPtr base = parse_primary();
        if (eat('^')) return make_binary('^', base, parse_unary());  // right-associative
        return base;
    }

    ExprPtr parse_primary() {
        skip_ws();
        if (pos_ >= s_.size()) throw SyntaxError("unexpected end of expression", pos_);
        char c = s_[pos_];
        if (c == '(') {
            ++pos_;
            ExprPtr e = parse_sum();
            if (!eat(')')) throw SyntaxError("expected ')'", pos_);
            return e;
        }
        if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') return parse_number();
        if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') return parse_ident();
        throw SyntaxError(std::string("unexpected character '") + c + "'", pos_);
    }

    ExprPtr parse_number() {
        double value = 0.0;
        const char* begin = s_.data() + pos_;
        const char* end = s_.data() + s_.size();
        auto [ptr, ec] = std::from_chars(begin, end, value);
        if (ec != std::errc()) throw SyntaxError("malformed number", pos_);
        pos_ += static_cast<std::size_t>(ptr - begin);
        return make_number(value);
    }

    ExprPtr parse_ident() {
        std::size_t start = pos_;
        while (pos_ < s_.size() &&
               (std::isalnum(static_cast<unsigned char>(s_[pos_])) || s_[pos_] == '_'))
            ++pos_;
        std::string name(s_.substr(start, pos_ - start));
        if (peek() == '(') {
            ++pos_;  // consume '('
            if (name == "sin" || name == "cos" || name == "exp" || name == "tanh" ||
                name == "abs") {
                Expr::Fn1 f = name == "sin"    ? Expr::Fn1::sin
                              : name == "cos"  ? Expr::Fn1::cos
                              : name == "exp"  ? Expr::Fn1::exp
                              : name == "tanh" ? Expr::Fn1::tanh
                                               : Expr::Fn1::abs;
                ExprPtr a = parse_sum();
                if (!eat(')')) throw SyntaxError("expected ')'", pos_);
                return make_call1(f, std::move(a));
            }
            if (name == "min" || name == "max") {
                Expr::Fn2 f = name == "min" ? Expr::Fn2::min : Expr::Fn2::max;
                ExprPtr a = parse_sum();
                if (!eat(',')) throw SyntaxError("expected ',' between arguments", pos_);
                ExprPtr b = parse_sum();
                if (!eat(')')) throw SyntaxError("expected ')'", pos_);
                return make_call2(f, std::move(a), std::move(b));
            }
            throw UnknownIdentifier(name, start);
        }
        if (name == "pi") return make_number(3.14159265358979323846);
        return make_variable(std::move(name));
    }
};

double eval_node(const Expr& e, const EvalContext& ctx) {
    switch (e.kind) {
        case Expr::Kind::number:
            return e.number;
        case Expr::Kind::variable: {
            const double* v = ctx.find(e.name);
            if (!v) throw UnboundVariable(e.name);
            return *v;
        }
        case Expr::Kind::negate:
            return -eval_node(*e.lhs, ctx);
        case Expr::Kind::binary: {
            double a = eval_node(*e.lhs, ctx);
            double b = eval_node(*e.rhs, ctx);
            double r = 0.0;
            switch (e.op) {
                case '+': r = a + b; break;
                case '-': r = a - b; break;
                case '*': r = a * b; break;
                case '/': r = a / b; break;
                case '^': r = std::pow(a, b); break;
            }
            if (!std::isfinite(r)) throw NonFiniteResult(to_string(e));
            return r;
        }
        case Expr::Kind::call1: {
            double a = eval_node(*e.lhs, ctx);
            double r = 0.0;
            switch (e.fn1) {
                case Expr::Fn1::sin: r = std::sin(a); break;
                case Expr::Fn1::cos: r = std::cos(a); break;
                case Expr::Fn1::exp: r = std::exp(a); break;
                case Expr::Fn1::tanh: r = std::tanh(a); break;
                case Expr::Fn1::abs: r = std::fabs(a); break;
            }
            if (!std::isfinite(r)) throw NonFiniteResult(to_string(e));
            return r;
        }
        case Expr::Kind::call2: {
            double a = eval_node(*e.lhs, ctx);
            double b = eval_node(*e.rhs, ctx);
            return e.fn2 == Expr::Fn2::min ? std::fmin(a, b) : std::fmax(a, b);
        }
    }
    throw Error("corrupt expression node");
}

void collect_vars(const Expr& e, std::set<std::string>& out) {
    switch (e.kind) {
        case Expr::Kind::variable: out.insert(e.name); break;
        case Expr::Kind::number: break;
        default:
            if (e.lhs) collect_vars(*e.lhs, out);
            if (e.rhs) collect_vars(*e.rhs, out);
    }
}

void print_node(const Expr& e, std::string& out) {
    switch (e.kind) {
        case Expr::Kind::number: {
            char buf[32];
            std::snprintf(buf, sizeof buf, "%.17g", e.number);
            out += buf;
            break;
        }
        case Expr::Kind::variable:
            out += e.name;
            break;
        case Expr::Kind::negate:
            out += "(-";
            print_node(*e.lhs, out);
            out += ')';
            break;
        case Expr::Kind::binary:
            out += '(';
            print_node(*e.lhs, out);
            out += ' ';
            out += e.op;
            out += ' ';
            print_node(*e.rhs, out);
            out += ')';
            break;
        case Expr::Kind::call1: {
            const char* n = e.fn1 == Expr::Fn1::sin    ? "sin"
                            : e.fn1 == Expr::Fn1::cos  ? "cos"
                            : e.fn1 == Expr::Fn1::exp  ? "exp"
                            : e.fn1 == Expr::Fn1::tanh ? "tanh"
                                                       : "abs";
            out += n;
            out += '(';
            print_node(*e.lhs, out);
            out += ')';
            break;
        }
        case Expr::Kind::call2:
            out += e.fn2 == Expr::Fn2::min ? "min(" : "max(";
            print_node(*e.lhs, out);
            out += ", ";
            print_node(*e.rhs, out);
            out += ')';
            break;
    }
}

}  // namespace

ExprPtr parse(std::string_view text) { return Parser(text).run(); }

double eval(const Expr& e, const EvalContext& ctx) { return eval_node(e, ctx); }

std::set<std::string> free_vars(const Expr& e) {
    std::set<std::string> out;
    collect_vars(e, out);
    return out;
}

std::string to_string(const Expr& e) {
    std::string out;
    print_node(e, out);
    return out;
}

}  // namespace nldisp
