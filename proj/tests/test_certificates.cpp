#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <string>
#include <vector>

#include "expsieve/baker.hpp"
#include "expsieve/certificates.hpp"
#include "expsieve/equation.hpp"
#include "expsieve/sieve.hpp"

using namespace expsieve;
using nlohmann::ordered_json;

namespace {

bool contains(const std::string& hay, const std::string& needle) {
    return hay.find(needle) != std::string::npos;
}

BakerPadicParams two_adic(int e) {
    BakerPadicParams p;
    p.p = 2;
    mpz_class pw;
    mpz_ui_pow_ui(pw.get_mpz_t(), 4, e);
    p.alpha1 = mpq_class(pw + 1);
    p.alpha2 = mpq_class(1 - pw);
    p.b1 = p.b2 = 1;
    p.g = 1;
    p.E = mpq_class(2 * e);
    return p;
}

BakerRationalParams rational_smallest() {
    BakerRationalParams p;
    p.alpha1 = mpq_class(5);
    p.alpha2 = mpq_class(6);
    p.b1 = 1;
    p.b2 = 2;
    return p;
}

}  // namespace

TEST_CASE("sieve certificates replay and verify") {
    ExpEquation eq = parse_equation("3^x+4^y+5^z=6^w");
    ConstraintSet cons = ConstraintSet::parse({"x>=3", "y>=2"});
    FactoredModulus m = FactoredModulus::of(16);
    SieveOutcome out = sieve(eq, m, cons);
    ordered_json cert = make_sieve_certificate(eq, m, cons, out);

    CHECK(cert.at("kind") == "sieve");
    CHECK(cert.at("modulus") == "2^4");
    VerifyResult v = verify_certificate(cert);
    CHECK(v.valid);
    CHECK(v.reason.empty());

    ExpEquation eq2 = parse_equation("7^x+8^y+9^z=10^w");
    SieveOutcome out2 = sieve(eq2, FactoredModulus::of(3), ConstraintSet{});
    ordered_json cert2 = make_sieve_certificate(eq2, FactoredModulus::of(3), ConstraintSet{}, out2);
    CHECK(cert2.at("outcome").at("type") == "no-solution");
    CHECK(verify_certificate(cert2).valid);
}

TEST_CASE("a tampered sieve certificate is rejected with the first difference") {
    ExpEquation eq = parse_equation("3^x+4^y+5^z=6^w");
    ConstraintSet cons = ConstraintSet::parse({"x>=3", "y>=2"});
    FactoredModulus m = FactoredModulus::of(16);
    ordered_json cert = make_sieve_certificate(eq, m, cons, sieve(eq, m, cons));
    REQUIRE(cert.at("outcome").at("type") == "survivors");

    SUBCASE("a mutated class residue") {
        auto& cls = cert["outcome"]["survivors"]["classes"];
        REQUIRE(cls.size() > 0);
        cls[0][0] = cls[0][0].get<u64>() + 1;
        VerifyResult v = verify_certificate(cert);
        CHECK_FALSE(v.valid);
        CHECK(contains(v.reason, "mismatch at"));
        CHECK(contains(v.reason, "/outcome/survivors/classes"));
    }

    SUBCASE("a flipped outcome type") {
        cert["outcome"] = ordered_json{{"type", "no-solution"}, {"modulus", "2^4"}};
        VerifyResult v = verify_certificate(cert);
        CHECK_FALSE(v.valid);
        CHECK(contains(v.reason, "/outcome"));
    }

    SUBCASE("a weakened constraint set changes the replay") {
        cert["constraints"] = ConstraintSet{}.to_json();
        VerifyResult v = verify_certificate(cert);
        CHECK_FALSE(v.valid);
    }
}

TEST_CASE("chain certificates replay and verify") {
    ExpEquation eq = parse_equation("3^x+4^y+5^z=6^w");
    ConstraintSet cons = ConstraintSet::parse({"x=1", "y>=2"});
    std::vector<FactoredModulus> moduli{FactoredModulus::of(9), FactoredModulus::of(7)};
    ChainResult result = sieve_chain(eq, moduli, cons);
    ordered_json cert = make_chain_certificate(eq, moduli, cons, result);

    CHECK(cert.at("kind") == "chain");
    CHECK(cert.at("outcome").at("type") == "exponent-bound");
    CHECK(cert.at("outcome").at("variable") == "w");
    CHECK(cert.at("steps").size() == 2);
    VerifyResult v = verify_certificate(cert);
    CHECK(v.valid);
    CHECK(v.reason.empty());

    SUBCASE("a loosened bound is rejected") {
        cert["outcome"]["bound"] = cert["outcome"]["bound"].get<u64>() + 5;
        VerifyResult bad = verify_certificate(cert);
        CHECK_FALSE(bad.valid);
        CHECK(contains(bad.reason, "/outcome/bound"));
    }

    SUBCASE("an invented escape value is rejected") {
        REQUIRE(cert["escapes"].contains("w"));
        cert["escapes"]["w"].push_back(99);
        VerifyResult bad = verify_certificate(cert);
        CHECK_FALSE(bad.valid);
        CHECK(contains(bad.reason, "/escapes/w"));
    }
}

TEST_CASE("bound certificates replay and verify") {
    BoundReport prep = padic_bound(two_adic(2));
    ordered_json pcert = make_bound_certificate("padic", prep);
    CHECK(pcert.at("kind") == "bound");
    CHECK(pcert.at("flavor") == "padic");
    CHECK(verify_certificate(pcert).valid);

    BoundReport rrep = rational_bound(rational_smallest());
    ordered_json rcert = make_bound_certificate("rational", rrep);
    CHECK(verify_certificate(rcert).valid);

    SUBCASE("a tampered bound value is rejected") {
        std::string val = pcert["report"]["bound_value"].get<std::string>();
        REQUIRE(val.size() > 4);
        val[3] = val[3] == '7' ? '8' : '7';
        pcert["report"]["bound_value"] = val;
        VerifyResult bad = verify_certificate(pcert);
        CHECK_FALSE(bad.valid);
        CHECK(contains(bad.reason, "bound_value"));
    }

    SUBCASE("an unknown flavor is rejected") {
        rcert["flavor"] = "heuristic";
        VerifyResult bad = verify_certificate(rcert);
        CHECK_FALSE(bad.valid);
        CHECK(contains(bad.reason, "unknown bound flavor"));
    }

    CHECK_THROWS_AS(make_bound_certificate("heuristic", prep), std::invalid_argument);
}

TEST_CASE("bound certificates with explicitly supplied heights refuse verification") {
    BakerPadicParams p = two_adic(2);
    p.H1 = Ival(4L);
    BoundReport rep = padic_bound(p);
    ordered_json cert = make_bound_certificate("padic", rep);
    VerifyResult v = verify_certificate(cert);
    CHECK_FALSE(v.valid);
    CHECK(contains(v.reason, "explicitly supplied heights"));
}

TEST_CASE("threshold certificates replay and verify") {
    ordered_json good = make_threshold_certificate(1, 5042);
    CHECK(good.at("kind") == "s-threshold");
    CHECK(verify_certificate(good).valid);
    CHECK(verify_certificate(make_threshold_certificate(3, solve_s_threshold(3))).valid);

    ordered_json bad = make_threshold_certificate(1, 5041);
    VerifyResult v = verify_certificate(bad);
    CHECK_FALSE(v.valid);
    CHECK(contains(v.reason, "threshold mismatch"));
}

TEST_CASE("malformed certificates are rejected, never thrown") {
    VerifyResult non_object = verify_certificate(ordered_json::array());
    CHECK_FALSE(non_object.valid);
    CHECK(contains(non_object.reason, "must be a JSON object"));

    VerifyResult no_kind = verify_certificate(ordered_json{{"note", "hello"}});
    CHECK_FALSE(no_kind.valid);

    VerifyResult unknown = verify_certificate(ordered_json{{"kind", "frobnicate"}});
    CHECK_FALSE(unknown.valid);
    CHECK(contains(unknown.reason, "unknown certificate kind"));

    VerifyResult truncated = verify_certificate(ordered_json{{"kind", "sieve"}});
    CHECK_FALSE(truncated.valid);
    CHECK(contains(truncated.reason, "verification failed:"));
}
