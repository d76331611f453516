#include <cmath>
#include <random>

#include "doctest.h"
#include "nldisp/errors.hpp"
#include "nldisp/expr.hpp"

using namespace nldisp;

namespace {

double ev(const std::string& text, const EvalContext& ctx = {}) {
    return eval(*parse(text), ctx);
}

EvalContext ctx_of(std::initializer_list<std::pair<const char*, double>> vars) {
    EvalContext ctx;
    for (auto& [n, v] : vars) ctx.bind(n, v);
    return ctx;
}

}  // namespace

TEST_CASE("parse precedence and function evaluation") {
    CHECK(ev("2+3*4") == 14.0);
    CHECK(ev("sin(pi/2)") == doctest::Approx(1.0));
    CHECK(ev("0.5*(1+tanh(x/2))", ctx_of({{"x", 0.0}})) == 0.5);
    CHECK(ev("2^3^2") == 512.0);             // right-associative
    CHECK(ev("-2^2") == -4.0);               // ^ binds tighter than unary minus
    CHECK(ev("2^-1") == 0.5);                // unary minus allowed in the exponent
    CHECK(ev("6/3/2") == 1.0);               // left-associative
    CHECK(ev("min(2, max(3, 1))") == 2.0);
    CHECK(ev("abs(-3.5)") == 3.5);
    CHECK(ev("exp(0)") == 1.0);
}

TEST_CASE("eval with bindings") {
    CHECK(ev("a0 + eps*cos(2*pi*x/p)", ctx_of({{"a0", 2}, {"eps", 0.5}, {"x", 0}, {"p", 1}})) ==
          doctest::Approx(2.5).epsilon(1e-15));
    CHECK(ev("t", ctx_of({{"t", 3}})) == 3.0);
}

TEST_CASE("error paths") {
    CHECK_THROWS_AS(ev("1/x", ctx_of({{"x", 0.0}})), NonFiniteResult);
    CHECK_THROWS_AS(ev("t"), UnboundVariable);
    CHECK_THROWS_AS(parse(""), SyntaxError);
    CHECK_THROWS_AS(parse("2+"), SyntaxError);
    CHECK_THROWS_AS(parse("2+)"), SyntaxError);
    CHECK_THROWS_AS(parse("foo(3)"), UnknownIdentifier);
    CHECK_THROWS_AS(ev("(-8)^0.5"), NonFiniteResult);  // negative base, non-integer exponent
    CHECK_THROWS_AS(ev("exp(1000)"), NonFiniteResult);
    SUBCASE("syntax error reports the byte offset") {
        try {
            parse("1 + @");
            FAIL("expected SyntaxError");
        } catch (const SyntaxError& e) {
            CHECK(e.offset == 4);
        }
    }
}

TEST_CASE("free_vars") {
    CHECK(free_vars(*parse("2+2")).empty());
    CHECK(free_vars(*parse("sin(t)*cos(x)")) == std::set<std::string>{"t", "x"});
    CHECK(free_vars(*parse("a0+t")) == std::set<std::string>{"a0", "t"});
    CHECK(free_vars(*parse("pi")).empty());
}

namespace {

// random expression trees for the round-trip property
ExprPtr random_tree(std::mt19937& rng, int depth) {
    std::uniform_int_distribution<int> pick(0, depth <= 0 ? 1 : 6);
    std::uniform_real_distribution<double> num(-4.0, 4.0);
    switch (pick(rng)) {
        case 0: {
            auto e = parse(std::to_string(num(rng)));
            return e;
        }
        case 1:
            return parse(rng() % 2 ? "t" : "x");
        case 2:
        case 3: {
            const char* ops[] = {"+", "-", "*"};
            auto a = random_tree(rng, depth - 1);
            auto b = random_tree(rng, depth - 1);
            return parse("(" + to_string(*a) + ")" + ops[rng() % 3] + "(" + to_string(*b) + ")");
        }
        case 4: {
            const char* fns[] = {"sin", "cos", "tanh", "abs"};
            return parse(std::string(fns[rng() % 4]) + "(" + to_string(*random_tree(rng, depth - 1)) +
                         ")");
        }
        case 5:
            return parse("min(" + to_string(*random_tree(rng, depth - 1)) + ", " +
                         to_string(*random_tree(rng, depth - 1)) + ")");
        default:
            return parse("-(" + to_string(*random_tree(rng, depth - 1)) + ")");
    }
}

}  // namespace

TEST_CASE("print/parse round-trip is evaluation-exact") {
    std::mt19937 rng(20240811);
    std::uniform_real_distribution<double> val(-3.0, 3.0);
    for (int trial = 0; trial < 300; ++trial) {
        ExprPtr e = random_tree(rng, 4);
        ExprPtr back = parse(to_string(*e));
        EvalContext ctx = ctx_of({{"t", val(rng)}, {"x", val(rng)}});
        double v1, v2;
        try {
            v1 = eval(*e, ctx);
            v2 = eval(*back, ctx);
        } catch (const NonFiniteResult&) {
            continue;
        }
        CHECK(v1 == v2);  // to the last bit
    }
}

TEST_CASE("ramp derivative identity eta' = eta (1 - eta)") {
    ExprPtr eta = parse("0.5*(1+tanh(s/2))");
    std::mt19937 rng(7);
    std::uniform_real_distribution<double> dist(-20.0, 20.0);
    const double h = 1e-6;
    double worst = 0.0;
    for (int i = 0; i < 1000; ++i) {
        double s = dist(rng);
        EvalContext lo = ctx_of({{"s", s - h}});
        EvalContext hi = ctx_of({{"s", s + h}});
        EvalContext mid = ctx_of({{"s", s}});
        double fd = (eval(*eta, hi) - eval(*eta, lo)) / (2.0 * h);
        double v = eval(*eta, mid);
        worst = std::max(worst, std::fabs(fd - v * (1.0 - v)));
    }
    CHECK(worst < 1e-7);
}
