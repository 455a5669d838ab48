#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <gmpxx.h>

#include <map>
#include <set>
#include <string>
#include <vector>

#include "expsieve/constraints.hpp"
#include "expsieve/equation.hpp"

using namespace expsieve;

namespace {

Assignment asg(u64 x, u64 y, u64 z, u64 w) {
    return {{"x", x}, {"y", y}, {"z", z}, {"w", w}};
}

}  // namespace

TEST_CASE("parsing keeps terms and first-appearance variable order") {
    ExpEquation eq = parse_equation("3^x+4^y+5^z=6^w");
    REQUIRE(eq.terms.size() == 4);
    CHECK(eq.terms[0] == Term{1, {{3, "x"}}});
    CHECK(eq.terms[1] == Term{1, {{4, "y"}}});
    CHECK(eq.terms[2] == Term{1, {{5, "z"}}});
    CHECK(eq.terms[3] == Term{-1, {{6, "w"}}});  // right-hand side is negated
    CHECK(eq.variables == std::vector<std::string>{"x", "y", "z", "w"});
}

TEST_CASE("parsing handles coefficients, products, and whitespace") {
    ExpEquation eq = parse_equation(" 2*3^a * 5^b + 7^c = 11^d ");
    REQUIRE(eq.terms.size() == 3);
    CHECK(eq.terms[0] == Term{2, {{3, "a"}, {5, "b"}}});
    CHECK(eq.terms[1] == Term{1, {{7, "c"}}});
    CHECK(eq.terms[2] == Term{-1, {{11, "d"}}});
    CHECK(eq.variables == std::vector<std::string>{"a", "b", "c", "d"});
}

TEST_CASE("render inverts parsing") {
    for (const std::string text :
         {"3^x+4^y+5^z=6^w", "2*3^a*5^b+7^c=11^d", "15^x+16^y+17^z=18^w"}) {
        ExpEquation eq = parse_equation(text);
        CHECK(eq.render() == text);
        CHECK(parse_equation(eq.render()) == eq);
    }
}

TEST_CASE("json round-trip preserves the equation") {
    ExpEquation eq = parse_equation("2*3^a*5^b+7^c=11^d");
    CHECK(ExpEquation::from_json(eq.to_json()) == eq);
}

TEST_CASE("syntax errors carry a position, semantic errors do not") {
    CHECK_THROWS_AS(parse_equation("3^x+4^y"), ParseError);        // no '='
    CHECK_THROWS_AS(parse_equation("3^x+=6^w"), ParseError);       // empty term
    CHECK_THROWS_AS(parse_equation("3^+4^y=6^w"), ParseError);     // missing variable
    CHECK_THROWS_AS(parse_equation("x^3+4^y=6^w"), ParseError);    // base must be numeric
    CHECK_THROWS_AS(parse_equation("1^x+4^y=6^w"), std::invalid_argument);  // base <= 1
    CHECK_THROWS_AS(parse_equation("0*3^x+4^y=6^w"), std::invalid_argument);  // zero coeff
    CHECK_THROWS_AS(parse_equation("3^x=6^w"), std::invalid_argument);  // fewer than 3 terms
}

TEST_CASE("from_terms validates invariants") {
    CHECK_THROWS_AS(ExpEquation::from_terms({{1, {{3, "x"}}}, {-1, {{6, "w"}}}}),
                    std::invalid_argument);
    CHECK_THROWS_AS(
        ExpEquation::from_terms({{1, {{1, "x"}}}, {1, {{4, "y"}}}, {-1, {{6, "w"}}}}),
        std::invalid_argument);
    CHECK_THROWS_AS(
        ExpEquation::from_terms({{0, {{3, "x"}}}, {1, {{4, "y"}}}, {-1, {{6, "w"}}}}),
        std::invalid_argument);
}

TEST_CASE("evaluate is the exact signed sum") {
    ExpEquation eq = parse_equation("3^x+4^y+5^z=6^w");
    CHECK(evaluate(eq, asg(3, 1, 1, 2)) == 0);  // 27 + 4 + 5 = 36
    CHECK(evaluate(eq, asg(3, 3, 3, 3)) == 0);  // 27 + 64 + 125 = 216
    CHECK(evaluate(eq, asg(1, 1, 1, 1)) == 3 + 4 + 5 - 6);
    CHECK(evaluate(eq, asg(2, 2, 2, 2)) == 9 + 16 + 25 - 36);

    // Values far beyond 64 bits stay exact.
    ExpEquation big = parse_equation("2^x+3^y+5^z=7^w");
    mpz_class expect;
    mpz_ui_pow_ui(expect.get_mpz_t(), 2, 200);
    expect += mpz_class(3) * mpz_class(3) * mpz_class(3);
    expect += 5;
    mpz_class sub;
    mpz_ui_pow_ui(sub.get_mpz_t(), 7, 100);
    expect -= sub;
    CHECK(evaluate(big, {{"x", 200}, {"y", 3}, {"z", 1}, {"w", 100}}) == expect);
}

TEST_CASE("family instances expose shifted consecutive bases") {
    auto [inst, eq] = family_equation(1);
    CHECK(inst.e == 1);
    CHECK(inst.N == 4);
    CHECK(inst.a == 3);
    CHECK(inst.b == 4);
    CHECK(inst.c == 5);
    CHECK(inst.d == 6);
    CHECK(eq == parse_equation("3^x+4^y+5^z=6^w"));

    auto [inst2, eq2] = family_equation(2);
    CHECK(inst2.N == 16);
    CHECK(eq2 == parse_equation("15^x+16^y+17^z=18^w"));

    auto [inst31, eq31] = family_equation(31);
    CHECK(inst31.N == (u64(1) << 62));

    CHECK_THROWS_AS(family_equation(0), std::invalid_argument);
    CHECK_THROWS_AS(family_equation(32), std::invalid_argument);
}

TEST_CASE("brute force finds exactly the small known solutions") {
    ExpEquation eq = parse_equation("3^x+4^y+5^z=6^w");
    std::map<std::string, u64> box{{"x", 6}, {"y", 6}, {"z", 6}, {"w", 6}};
    auto sols = brute_force_solutions(eq, box);
    REQUIRE(sols.size() == 2);
    CHECK(sols[0] == asg(3, 1, 1, 2));  // lexicographic in (x, y, z, w)
    CHECK(sols[1] == asg(3, 3, 3, 3));

    auto threaded = brute_force_solutions(eq, box, {}, 4);
    CHECK(threaded == sols);

    auto constrained = brute_force_solutions(eq, box, ConstraintSet{}.set_fixed("y", 1));
    REQUIRE(constrained.size() == 1);
    CHECK(constrained[0] == asg(3, 1, 1, 2));
}

TEST_CASE("constraint clauses parse and filter") {
    ConstraintSet cs = ConstraintSet::parse({"x>=3", "x odd", "y = 1 mod 4", "z<=2", "w=5"});
    CHECK(cs.lower_of("x") == 3);
    CHECK(cs.admits("x", 3));
    CHECK_FALSE(cs.admits("x", 4));  // even
    CHECK_FALSE(cs.admits("x", 1));  // below the floor
    CHECK(cs.admits("y", 5));
    CHECK_FALSE(cs.admits("y", 3));
    CHECK(cs.pinned("z"));
    CHECK(cs.pinned("w"));
    CHECK_FALSE(cs.pinned("x"));
    CHECK(cs.admits("w", 5));
    CHECK_FALSE(cs.admits("w", 4));
    CHECK(cs.congruence_lcm("x") == 2);
    CHECK(cs.congruence_lcm("y") == 4);

    // Unconstrained variables admit everything >= 1.
    CHECK(cs.admits("v", 1));
    CHECK(cs.lower_of("v") == 1);

    CHECK(ConstraintSet::parse_clause("x ≡ 1 mod 4") ==
          ConstraintSet::parse_clause("x = 1 mod 4"));
    CHECK_THROWS_AS(ConstraintSet::parse_clause("x ? 3"), std::invalid_argument);
    CHECK_THROWS_AS(ConstraintSet::parse_clause("x = 5 mod 1"), std::invalid_argument);
}

TEST_CASE("class compatibility respects congruences and parity") {
    ConstraintSet cs = ConstraintSet::parse({"x odd", "y = 2 mod 3"});
    CHECK(cs.class_compatible("x", 1, 4));
    CHECK(cs.class_compatible("x", 3, 4));
    CHECK_FALSE(cs.class_compatible("x", 0, 4));
    CHECK_FALSE(cs.class_compatible("x", 2, 4));
    CHECK(cs.class_compatible("y", 5, 6));
    CHECK_FALSE(cs.class_compatible("y", 4, 6));
    CHECK(cs.class_compatible("free", 0, 1));
}

TEST_CASE("inconsistent constraints fail validation") {
    CHECK_THROWS_AS(ConstraintSet::parse({"x=4", "x odd"}).validate(), std::invalid_argument);
    CHECK_THROWS_AS(ConstraintSet::parse({"x=2", "x>=3"}).validate(), std::invalid_argument);
    CHECK_NOTHROW(ConstraintSet::parse({"x=5", "x odd", "x>=3"}).validate());
}

TEST_CASE("constraint json round-trip") {
    ConstraintSet cs = ConstraintSet::parse({"x>=3", "x odd", "y = 1 mod 4", "w=2"});
    CHECK(ConstraintSet::from_json(cs.to_json()) == cs);
    CHECK(ConstraintSet::from_json(ConstraintSet{}.to_json()) == ConstraintSet{});
}
