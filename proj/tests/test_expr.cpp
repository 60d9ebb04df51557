#include <atomic>
#include <cmath>
#include <random>
#include <thread>
#include <vector>

#include "doctest.h"
#include "lyapcert/expr.hpp"
#include "support/oracles.hpp"

using lyapcert::Dual;
using lyapcert::EvalError;
using lyapcert::Expression;
using lyapcert::NonDifferentiableError;
using lyapcert::ParseError;

namespace {

double eval(const std::string& src, const std::vector<double>& point) {
    return Expression::parse(src).eval(point);
}

double deriv(const std::string& src, const std::vector<double>& point, int var) {
    return Expression::parse(src).eval_dual(point, var).der;
}

} // namespace

TEST_CASE("parse and evaluate basic sources") {
    CHECK(eval("-2*x1 + x2^2", {1.0, 2.0}) == doctest::Approx(2.0).epsilon(1e-14));
    CHECK(eval("sech(x1)", {0.0}) == doctest::Approx(1.0).epsilon(1e-15));
    CHECK(eval("-4*x1 + x1*sech(x1) + 4*x2", {0.0, 0.0}) == 0.0);
    CHECK(eval("x1^2 - 2*x2", {3.0, 1.0}) == doctest::Approx(7.0).epsilon(1e-14));
    CHECK(eval("cos(x2)", {0.0, 3.14159265358979}) == doctest::Approx(-1.0).epsilon(1e-12));
}

TEST_CASE("tanh(3) against an independent formulation") {
    // (e^6 - 1)/(e^6 + 1) is tanh(3) without going through std::tanh
    const double e6 = std::exp(6.0);
    const double expected = (e6 - 1.0) / (e6 + 1.0);
    CHECK(eval("tanh(3*x1)", {1.0}) == doctest::Approx(expected).epsilon(1e-15));
    CHECK(eval("tanh(3*x1)", {1.0}) == doctest::Approx(0.9950547537).epsilon(1e-9));
}

TEST_CASE("precedence and associativity") {
    // ^ binds tightest and is right-associative; unary minus sits between ^ and *
    CHECK(eval("2^3^2", {}) == doctest::Approx(512.0));
    CHECK(eval("-2^2", {}) == doctest::Approx(-4.0));
    CHECK(eval("-2*x1", {3.0}) == doctest::Approx(-6.0));
    CHECK(eval("2^-1", {}) == doctest::Approx(0.5));
    CHECK(eval("1 - 2 - 3", {}) == doctest::Approx(-4.0));
    CHECK(eval("12/3/2", {}) == doctest::Approx(2.0));
    CHECK(eval("  1+ \t 2 *3 ", {}) == doctest::Approx(7.0)); // whitespace insignificant
}

TEST_CASE("exact derivatives via dual numbers") {
    CHECK(deriv("-2*x1 + x2^2", {5.0, -3.0}, 1) == doctest::Approx(-2.0).epsilon(1e-15));
    CHECK(deriv("sech(x1)", {0.0}, 1) == 0.0);
    CHECK(deriv("x1^2 - 2*x2", {5.0, 5.0}, 2) == doctest::Approx(-2.0).epsilon(1e-15));
    // seeding a variable absent from the expression gives exactly 0
    CHECK(deriv("x2^2 + cos(x2)", {7.0, 2.0}, 1) == 0.0);
    // product rule holds exactly on duals
    const Dual a{3.0, 0.5};
    const Dual b{-2.0, 4.0};
    const Dual ab = a * b;
    CHECK(ab.der == a.val * b.der + a.der * b.val);
}

TEST_CASE("derivatives match central differences per function") {
    struct Domain {
        const char* fn;
        double lo, hi;
    };
    const Domain domains[] = {
        {"sin", -3.0, 3.0},  {"cos", -3.0, 3.0},  {"tan", -1.0, 1.0},
        {"tanh", -3.0, 3.0}, {"sech", -3.0, 3.0}, {"exp", -2.0, 2.0},
        {"ln", 0.1, 5.0},    {"abs", 0.2, 5.0},   {"sqrt", 0.1, 5.0},
    };
    std::mt19937_64 rng(20260810);
    int checked = 0;
    for (const Domain& d : domains) {
        const Expression e = Expression::parse(std::string(d.fn) + "(x1)");
        std::uniform_real_distribution<double> dist(d.lo, d.hi);
        for (int k = 0; k < 700; ++k) {
            const std::vector<double> point{dist(rng)};
            const double exact = e.eval_dual(point, 1).der;
            const double fd = oracles::central_difference(e, point, 1);
            CHECK(exact == doctest::Approx(fd).epsilon(1e-6));
            ++checked;
        }
    }
    // composite random smooth expressions over two variables
    std::uniform_real_distribution<double> coord(-2.0, 2.0);
    while (checked < 10000) {
        const std::string src = oracles::random_smooth_expression(rng, 4, 2);
        const Expression e = Expression::parse(src);
        const std::vector<double> point{coord(rng), coord(rng)};
        for (int var = 1; var <= 2; ++var) {
            const double exact = e.eval_dual(point, var).der;
            const double fd = oracles::central_difference(e, point, var);
            // relative with an absolute floor: fd itself carries ~1e-10 noise
            CHECK(std::fabs(exact - fd) <= 1e-6 * std::max(1.0, std::fabs(fd)));
            ++checked;
        }
    }
    CHECK(checked >= 10000);
}

TEST_CASE("print then re-parse yields the identical tree") {
    const char* sources[] = {
        "-2*x1 + x2^2",
        "x1 - -x2",
        "(-x1)^2",
        "x1^2^3",
        "(x1^2)^3",
        "-(x1 + x2)*sech(x1/2)",
        "1/(1 + exp(-x1))",
        "abs(x2) - sqrt(x1 + 4)",
    };
    for (const char* src : sources) {
        const Expression e = Expression::parse(src);
        const Expression round = Expression::parse(e.str());
        CAPTURE(src);
        CAPTURE(e.str());
        CHECK(e.same_structure(round));
    }

    std::mt19937_64 rng(7);
    for (int k = 0; k < 500; ++k) {
        const std::string src = oracles::random_expression(rng, 5, 3);
        const Expression e = Expression::parse(src);
        const Expression round = Expression::parse(e.str());
        CAPTURE(src);
        CAPTURE(e.str());
        CHECK(e.same_structure(round));
    }
}

TEST_CASE("negative constants round-trip through the printer") {
    const Expression e = Expression::parse("-2");
    CHECK(e.str() == "-2");
    CHECK(Expression::parse(e.str()).same_structure(e));
}

TEST_CASE("errors carry character offsets") {
    CHECK_THROWS_AS((void)Expression::parse(""), ParseError);
    CHECK_THROWS_AS((void)Expression::parse("   "), ParseError);

    try {
        (void)Expression::parse("x1 + foo");
        FAIL("expected ParseError");
    } catch (const ParseError& e) {
        CHECK(e.offset() == 5);
        CHECK(std::string(e.what()).find("unknown identifier") != std::string::npos);
    }

    try {
        (void)Expression::parse("x1 @ 2");
        FAIL("expected ParseError");
    } catch (const ParseError& e) {
        CHECK(e.offset() == 3);
    }

    // arity violations: a comma cannot appear inside a call
    CHECK_THROWS_AS((void)Expression::parse("sin(x1, x2)"), ParseError);
    CHECK_THROWS_AS((void)Expression::parse("sin()"), ParseError);
    CHECK_THROWS_AS((void)Expression::parse("sech"), ParseError);
    CHECK_THROWS_AS((void)Expression::parse("x0"), ParseError);
    CHECK_THROWS_AS((void)Expression::parse("1 + "), ParseError);
    CHECK_THROWS_AS((void)Expression::parse("(1 + 2"), ParseError);

    // dimension guard at parse time
    CHECK_THROWS_AS((void)Expression::parse("x3 + 1", 2), ParseError);
    CHECK_NOTHROW((void)Expression::parse("x3 + 1", 3));
}

TEST_CASE("evaluation domain rules") {
    // non-finite results are reported, never returned
    CHECK_THROWS_AS((void)eval("1/x1", {0.0}), EvalError);
    CHECK_THROWS_AS((void)eval("ln(x1)", {-1.0}), EvalError);
    // real-field power: negative base with fractional exponent is a domain error
    CHECK_THROWS_AS((void)eval("x1^0.5", {-4.0}), EvalError);
    CHECK(eval("x1^3", {-2.0}) == doctest::Approx(-8.0));
    CHECK(eval("x1^-2", {2.0}) == doctest::Approx(0.25));
    // abs is fine to evaluate at 0 but has no derivative there
    CHECK(eval("abs(x1)", {0.0}) == 0.0);
    CHECK_THROWS_AS((void)deriv("abs(x1)", {0.0}, 1), NonDifferentiableError);
    CHECK(deriv("abs(x1)", {-2.0}, 1) == doctest::Approx(-1.0));
    // dimension mismatch
    CHECK_THROWS_AS((void)eval("x2", {1.0}), EvalError);
    // sech decays cleanly for large arguments instead of overflowing
    CHECK(eval("sech(x1)", {710.0}) <= 1e-300);
    CHECK(eval("sech(x1)", {800.0}) == 0.0);
    CHECK(std::fabs(deriv("sech(x1)", {800.0}, 1)) == 0.0);
}

TEST_CASE("expressions are safe to evaluate concurrently") {
    const Expression e = Expression::parse("sin(x1)*tanh(x2) + x1^3 - sech(x2)");
    const std::vector<double> point{0.7, -1.3};
    const double expected = e.eval(point);
    const double dx1 = e.eval_dual(point, 1).der;

    std::vector<std::thread> workers;
    std::atomic<int> mismatches{0};
    for (int t = 0; t < 4; ++t) {
        workers.emplace_back([&] {
            for (int k = 0; k < 20000; ++k) {
                if (e.eval(point) != expected) ++mismatches;
                if (e.eval_dual(point, 1).der != dx1) ++mismatches;
            }
        });
    }
    for (auto& w : workers) w.join();
    CHECK(mismatches.load() == 0);
}

TEST_CASE("fuzz: random token soup errors but never crashes") {
    std::mt19937_64 rng(99);
    const char alphabet[] = "x12 +-*/^()sincostahbqe.l";
    std::uniform_int_distribution<int> len(1, 40);
    std::uniform_int_distribution<int> pick(0, static_cast<int>(sizeof(alphabet)) - 2);
    int parsed = 0;
    for (int k = 0; k < 3000; ++k) {
        std::string src;
        const int m = len(rng);
        for (int i = 0; i < m; ++i) src.push_back(alphabet[pick(rng)]);
        try {
            const Expression e = Expression::parse(src);
            ++parsed; // occasionally the soup is a valid expression
            (void)e.str();
        } catch (const ParseError&) {
            // expected most of the time
        }
    }
    CHECK(parsed >= 0);
    // deep nesting is rejected, not a stack overflow
    std::string deep(5000, '(');
    deep += "x1";
    deep.append(5000, ')');
    CHECK_THROWS_AS((void)Expression::parse(deep), ParseError);
}
