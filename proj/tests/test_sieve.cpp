#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <set>
#include <string>
#include <variant>
#include <vector>

#include "expsieve/equation.hpp"
#include "expsieve/sieve.hpp"
#include "planted.hpp"

using namespace expsieve;

namespace {

const ExpEquation kBase = parse_equation("3^x+4^y+5^z=6^w");

}  // namespace

TEST_CASE("factored moduli parse, render, and reject junk") {
    FactoredModulus m = FactoredModulus::parse("2^4*3^3*7*13*73");
    CHECK(m.value == u64(16) * 27 * 7 * 13 * 73);
    CHECK(m.factors == std::vector<std::pair<u64, int>>{{2, 4}, {3, 3}, {7, 1}, {13, 1}, {73, 1}});
    CHECK(m.str() == "2^4*3^3*7*13*73");
    CHECK(m.prime_powers() == std::vector<u64>{16, 27, 7, 13, 73});

    CHECK(FactoredModulus::parse("16").str() == "2^4");
    CHECK(FactoredModulus::parse("12*3").str() == "2^2*3^2");  // re-factored
    CHECK(FactoredModulus::of(73).factors == std::vector<std::pair<u64, int>>{{73, 1}});
    CHECK(FactoredModulus::of(7).str() == "7");

    CHECK_THROWS_AS(FactoredModulus::parse("0"), std::invalid_argument);
    CHECK_THROWS_AS(FactoredModulus::parse("1"), std::invalid_argument);
    CHECK_THROWS_AS(FactoredModulus::parse("2^"), std::invalid_argument);
    CHECK_THROWS_AS(FactoredModulus::parse("banana"), std::invalid_argument);
}

TEST_CASE("sieve mod 16 under x>=3, y>=2: the two residue classes survive") {
    ConstraintSet cons = ConstraintSet::parse({"x>=3", "y>=2"});
    SieveOutcome out = sieve(kBase, FactoredModulus::of(16), cons);
    REQUIRE(std::holds_alternative<SurvivorsOutcome>(out));
    const auto& sys = std::get<SurvivorsOutcome>(out).system;

    CHECK(sys.variables == std::vector<std::string>{"x", "y", "z", "w"});
    CHECK(sys.moduli == std::vector<u64>{4, 1, 4, 1});
    CHECK(sys.classes == std::set<std::vector<u64>>{{1, 0, 3, 0}, {3, 0, 1, 0}});
    CHECK(sys.floor_of("x") == 2);
    CHECK(sys.floor_of("y") == 1);
    CHECK(sys.floor_of("z") == 0);
    CHECK(sys.floor_of("w") == 3);
    CHECK(sys.small_values.at("w") == std::set<u64>{1, 2, 3});
    CHECK_FALSE(sys.mixed_survivors.empty());

    // Membership matches hand checks: the known solution (3, 3, 3, 3) survives
    // as a mixed tuple (w = 3 is explicit), class members survive, and tuples
    // off both classes are excluded.
    CHECK(sys.admits({3, 3, 3, 3}));
    CHECK(sys.admits({5, 2, 7, 8}));   // class (1 mod 4, -, 3 mod 4, -)
    CHECK(sys.admits({7, 4, 5, 11}));  // class (3 mod 4, -, 1 mod 4, -)
    CHECK_FALSE(sys.admits({3, 3, 1, 2}));  // 27 + 0 + 5 - 36 != 0 mod 16
    CHECK_FALSE(sys.admits({7, 2, 7, 8}));  // x = z = 3 mod 4 is not a class
}

TEST_CASE("sieve pins the last exponent at the published modulus") {
    // The raw outcome is an exponent bound w <= 1; ruling out w = 1 by direct
    // substitution (done by the table replay) is what yields "no solution".
    ExpEquation eq = parse_equation("15^x+16^y+17^z=18^w");
    SieveOutcome out = sieve(eq, FactoredModulus::parse("2^2*7*13*19*37*73"));
    REQUIRE(std::holds_alternative<ExponentBoundOutcome>(out));
    const auto& eb = std::get<ExponentBoundOutcome>(out);
    CHECK(eb.variable == "w");
    CHECK(eb.bound == 1);
    CHECK(eb.modulus.value == u64(4) * 7 * 13 * 19 * 37 * 73);
}

TEST_CASE("parity exclusion needs only the modulus 2") {
    // 2^x is even, 3^y + 5^z - 11^w is odd: no solution at all.
    SieveOutcome out = sieve(parse_equation("2^x+3^y+5^z=11^w"), u64(2));
    CHECK(std::holds_alternative<NoSolutionOutcome>(out));
}

TEST_CASE("sieve proves an exponent bound when only explicit values survive") {
    SieveOutcome out = sieve(kBase, FactoredModulus::of(4), ConstraintSet::parse({"x even"}));
    REQUIRE(std::holds_alternative<ExponentBoundOutcome>(out));
    const auto& eb = std::get<ExponentBoundOutcome>(out);
    CHECK(eb.variable == "w");
    CHECK(eb.bound == 1);  // 1 + 0 + 1 = 2 mod 4 forces 6^w = 2 mod 4, i.e. w = 1
}

TEST_CASE("u64 and factored modulus overloads agree, runs are thread-stable") {
    ConstraintSet cons = ConstraintSet::parse({"x>=3", "y>=2"});
    SieveOutcome a = sieve(kBase, u64(16), cons);
    SieveOutcome b = sieve(kBase, FactoredModulus::of(16), cons);
    CHECK(a == b);

    SieveOptions threaded;
    threaded.threads = 4;
    SieveOutcome c = sieve(kBase, FactoredModulus::of(16), cons, threaded);
    CHECK(a == c);
}

TEST_CASE("budget is charged deterministically and reported") {
    SieveOptions tiny;
    tiny.budget = 1;
    CHECK_THROWS_AS(sieve(kBase, FactoredModulus::of(16), {}, tiny), BudgetExceeded);
    try {
        sieve(kBase, FactoredModulus::of(16), {}, tiny);
    } catch (const BudgetExceeded& ex) {
        CHECK(ex.budget == 1);
        CHECK(ex.needed > 1);
    }

    u64 evals = 0;
    SieveOptions counted;
    counted.evaluations = &evals;
    sieve(kBase, FactoredModulus::of(16), {}, counted);
    CHECK(evals > 0);
    u64 evals_threaded = 0;
    SieveOptions counted4;
    counted4.threads = 4;
    counted4.evaluations = &evals_threaded;
    sieve(kBase, FactoredModulus::of(16), {}, counted4);
    CHECK(evals == evals_threaded);
}

TEST_CASE("candidates violating the constraints never survive") {
    ConstraintSet cons = ConstraintSet::parse({"x odd", "w>=2"});
    SieveOutcome out = sieve(kBase, FactoredModulus::of(16), cons);
    REQUIRE(std::holds_alternative<SurvivorsOutcome>(out));
    const auto& sys = std::get<SurvivorsOutcome>(out).system;
    for (const auto& cls : sys.classes) {
        CHECK(cls[0] % 2 == 1);  // x stays odd in every class
    }
    if (sys.small_values.count("w"))
        for (u64 v : sys.small_values.at("w")) CHECK(v >= 2);
}

TEST_CASE("chains tighten floors step by step and compose to a bound") {
    std::vector<FactoredModulus> chain{
        FactoredModulus::parse("2^4"), FactoredModulus::parse("7"), FactoredModulus::parse("3^3"),
        FactoredModulus::parse("13"), FactoredModulus::parse("73")};
    ChainResult result = sieve_chain(kBase, chain, ConstraintSet::parse({"x>=3", "y>=2"}));

    REQUIRE(std::holds_alternative<ExponentBoundOutcome>(result.outcome));
    const auto& eb = std::get<ExponentBoundOutcome>(result.outcome);
    CHECK(eb.variable == "w");
    CHECK(eb.bound == 3);
    CHECK(eb.modulus.str() == "2^4*3^3*7*13*73");

    REQUIRE(result.steps.size() >= 2);
    // The first step leaves floor w = 3, so the second step starts at w >= 4.
    CHECK(result.steps[1].effective_constraints.lower_of("w") == 4);
    CHECK(result.escapes.count("w"));
    CHECK(result.escapes.at("w").count(1));
    CHECK(result.escapes.at("w").count(2));
    CHECK(result.escapes.at("w").count(3));
}

TEST_CASE("a single-step chain inherits the step outcome") {
    ChainResult result = sieve_chain(kBase, {FactoredModulus::of(4)},
                                     ConstraintSet::parse({"x even"}));
    REQUIRE(std::holds_alternative<ExponentBoundOutcome>(result.outcome));
    CHECK(std::get<ExponentBoundOutcome>(result.outcome).variable == "w");
    CHECK(std::get<ExponentBoundOutcome>(result.outcome).bound == 1);
}

TEST_CASE("system intersection is a CRT conjunction") {
    ResidueClassSystem a;
    a.variables = {"x"};
    a.moduli = {4};
    a.classes = {{1}, {3}};
    a.floors["x"] = 2;
    a.small_values["x"] = {1};

    ResidueClassSystem b;
    b.variables = {"x"};
    b.moduli = {6};
    b.classes = {{1}, {5}, {2}};
    b.floors["x"] = 5;
    b.small_values["x"] = {3};

    ResidueClassSystem c = intersect(a, b);
    CHECK(c.moduli == std::vector<u64>{12});
    CHECK(c.classes == std::set<std::vector<u64>>{{1}, {5}, {7}, {11}});
    CHECK(c.floor_of("x") == 5);
    CHECK(c.small_values.at("x") == std::set<u64>{1, 3});
    CHECK(c.mixed_survivors.empty());

    CHECK(intersect(a, b) == intersect(b, a));
    CHECK(intersect(a, a).classes == a.classes);

    ResidueClassSystem other;
    other.variables = {"y"};
    other.moduli = {2};
    CHECK_THROWS_AS(intersect(a, other), std::invalid_argument);
}

TEST_CASE("automatic modulus search returns certifying moduli cheapest first") {
    ExpEquation eq = parse_equation("2^x+3^y+5^z=11^w");
    auto found = auto_modulus_search(eq, {2, 3}, {{2, 3}, {3, 2}});
    REQUIRE_FALSE(found.empty());
    CHECK(found.front().first.value == 2);
    CHECK(std::holds_alternative<NoSolutionOutcome>(found.front().second));
    for (const auto& [m, out] : found)
        CHECK_FALSE(std::holds_alternative<SurvivorsOutcome>(out));

    CHECK(auto_modulus_search(eq, {2, 3}, {{2, 3}, {3, 2}}, 0).empty());
    CHECK_THROWS_AS(auto_modulus_search(eq, {6}, {}), std::invalid_argument);
}

TEST_CASE("sieve conclusions stay consistent with planted solutions") {
    for (u64 seed = 1; seed <= 40; ++seed) {
        planted::PlantedCase c = planted::make_planted_case(seed);
        REQUIRE(evaluate(c.eq, c.solution) == 0);
        SieveOutcome out = sieve(c.eq, c.modulus);
        CHECK_MESSAGE(planted::planted_case_consistent(c, out),
                      "seed ", seed, " modulus ", c.modulus.str());
    }
}

TEST_CASE("survivor systems serialize losslessly") {
    ConstraintSet cons = ConstraintSet::parse({"x>=3", "y>=2"});
    SieveOutcome out = sieve(kBase, FactoredModulus::of(16), cons);
    const auto& sys = std::get<SurvivorsOutcome>(out).system;
    CHECK(ResidueClassSystem::from_json(sys.to_json()) == sys);
}
