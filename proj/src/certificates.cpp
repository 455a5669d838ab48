#include "expsieve/certificates.hpp"

#include <algorithm>
#include <stdexcept>
#include <type_traits>
#include <utility>
#include <variant>

namespace expsieve {

using nlohmann::ordered_json;

nlohmann::ordered_json outcome_to_json(const SieveOutcome& outcome) {
    return std::visit(
        [](const auto& o) -> ordered_json {
            using T = std::decay_t<decltype(o)>;
            if constexpr (std::is_same_v<T, NoSolutionOutcome>) {
                return ordered_json{{"type", "no-solution"}, {"modulus", o.modulus.str()}};
            } else if constexpr (std::is_same_v<T, ExponentBoundOutcome>) {
                return ordered_json{{"type", "exponent-bound"},
                                    {"variable", o.variable},
                                    {"bound", o.bound},
                                    {"modulus", o.modulus.str()}};
            } else {
                return ordered_json{{"type", "survivors"},
                                    {"modulus", o.modulus.str()},
                                    {"survivors", o.system.to_json()}};
            }
        },
        outcome);
}

nlohmann::ordered_json make_sieve_certificate(const ExpEquation& eq,
                                              const FactoredModulus& modulus,
                                              const ConstraintSet& constraints,
                                              const SieveOutcome& outcome) {
    ordered_json j;
    j["kind"] = "sieve";
    j["equation"] = eq.to_json();
    j["modulus"] = modulus.str();
    j["constraints"] = constraints.to_json();
    j["outcome"] = outcome_to_json(outcome);
    return j;
}

nlohmann::ordered_json make_chain_certificate(const ExpEquation& eq,
                                              const std::vector<FactoredModulus>& moduli,
                                              const ConstraintSet& constraints,
                                              const ChainResult& result) {
    ordered_json j;
    j["kind"] = "chain";
    j["equation"] = eq.to_json();
    ordered_json ms = ordered_json::array();
    for (const auto& m : moduli) ms.push_back(m.str());
    j["moduli"] = ms;
    j["constraints"] = constraints.to_json();
    j["outcome"] = outcome_to_json(result.outcome);
    ordered_json esc = ordered_json::object();
    for (const auto& [var, vals] : result.escapes) esc[var] = vals;
    j["escapes"] = esc;
    ordered_json steps = ordered_json::array();
    for (const auto& st : result.steps) {
        steps.push_back(ordered_json{{"modulus", st.modulus.str()},
                                     {"constraints", st.effective_constraints.to_json()},
                                     {"outcome", outcome_to_json(st.outcome)}});
    }
    j["steps"] = steps;
    return j;
}

nlohmann::ordered_json make_bound_certificate(const std::string& flavor,
                                              const BoundReport& report) {
    if (flavor != "padic" && flavor != "rational")
        throw std::invalid_argument("bound certificate flavor must be \"padic\" or \"rational\"");
    ordered_json j;
    j["kind"] = "bound";
    j["flavor"] = flavor;
    j["report"] = report.to_json();
    return j;
}

nlohmann::ordered_json make_threshold_certificate(int e, u64 s) {
    ordered_json j;
    j["kind"] = "s-threshold";
    j["e"] = e;
    j["s"] = s;
    return j;
}

namespace {

VerifyResult invalid(std::string reason) { return {false, std::move(reason)}; }

// Locates the first point where the recorded JSON diverges from the
// recomputed one; fills `where` with a pointer-style path plus both values.
bool first_difference(const ordered_json& a, const ordered_json& b, const std::string& path,
                      std::string* where) {
    if (a == b) return false;
    if (a.type() != b.type() || (!a.is_object() && !a.is_array())) {
        *where = path + ": recorded " + a.dump() + ", recomputed " + b.dump();
        return true;
    }
    if (a.is_array()) {
        size_t n = std::min(a.size(), b.size());
        for (size_t i = 0; i < n; ++i)
            if (first_difference(a[i], b[i], path + "/" + std::to_string(i), where)) return true;
        *where = path + ": recorded " + std::to_string(a.size()) + " entries, recomputed " +
                 std::to_string(b.size());
        return true;
    }
    for (auto it = a.begin(); it != a.end(); ++it) {
        if (!b.contains(it.key())) {
            *where = path + "/" + it.key() + ": key absent in recomputation";
            return true;
        }
        if (first_difference(it.value(), b.at(it.key()), path + "/" + it.key(), where))
            return true;
    }
    for (auto it = b.begin(); it != b.end(); ++it) {
        if (!a.contains(it.key())) {
            *where = path + "/" + it.key() + ": key missing from certificate";
            return true;
        }
    }
    *where = path + ": objects differ";
    return true;
}

VerifyResult compare_rebuilt(const ordered_json& cert, const ordered_json& rebuilt) {
    std::string where;
    if (first_difference(cert, rebuilt, "", &where)) return invalid("mismatch at " + where);
    return {true, ""};
}

VerifyResult verify_sieve(const ordered_json& cert) {
    ExpEquation eq = ExpEquation::from_json(cert.at("equation"));
    FactoredModulus m = FactoredModulus::parse(cert.at("modulus").get<std::string>());
    ConstraintSet cons = ConstraintSet::from_json(cert.at("constraints"));
    SieveOutcome out = sieve(eq, m, cons);
    return compare_rebuilt(cert, make_sieve_certificate(eq, m, cons, out));
}

VerifyResult verify_chain(const ordered_json& cert) {
    ExpEquation eq = ExpEquation::from_json(cert.at("equation"));
    std::vector<FactoredModulus> moduli;
    for (const auto& m : cert.at("moduli"))
        moduli.push_back(FactoredModulus::parse(m.get<std::string>()));
    ConstraintSet cons = ConstraintSet::from_json(cert.at("constraints"));
    ChainResult result = sieve_chain(eq, moduli, cons);
    return compare_rebuilt(cert, make_chain_certificate(eq, moduli, cons, result));
}

mpq_class mpq_of_string(const std::string& text) {
    mpq_class q(text);
    q.canonicalize();
    return q;
}

VerifyResult verify_bound(const ordered_json& cert) {
    std::string flavor = cert.at("flavor").get<std::string>();
    const ordered_json& rep = cert.at("report");
    const ordered_json& in = rep.at("inputs");
    if (in.at("H1").at("explicit").get<bool>() || in.at("H2").at("explicit").get<bool>())
        return invalid(
            "bound certificates that carry explicitly supplied heights cannot be "
            "reconstructed from their serialized enclosures; re-issue the certificate "
            "with derived heights to make it independently checkable");
    int prec = rep.at("precision").get<int>();
    BoundReport fresh;
    if (flavor == "padic") {
        BakerPadicParams p;
        p.p = in.at("p").get<u64>();
        p.alpha1 = mpq_of_string(in.at("alpha1").get<std::string>());
        p.alpha2 = mpq_of_string(in.at("alpha2").get<std::string>());
        p.b1 = in.at("b1").get<u64>();
        p.b2 = in.at("b2").get<u64>();
        p.g = in.at("g").get<u64>();
        p.E = mpq_of_string(in.at("E").get<std::string>());
        fresh = padic_bound(p, prec);
    } else if (flavor == "rational") {
        BakerRationalParams p;
        p.alpha1 = mpq_of_string(in.at("alpha1").get<std::string>());
        p.alpha2 = mpq_of_string(in.at("alpha2").get<std::string>());
        p.b1 = in.at("b1").get<u64>();
        p.b2 = in.at("b2").get<u64>();
        fresh = rational_bound(p, prec);
    } else {
        return invalid("unknown bound flavor \"" + flavor + "\"");
    }
    return compare_rebuilt(cert, make_bound_certificate(flavor, fresh));
}

VerifyResult verify_threshold(const ordered_json& cert) {
    int e = cert.at("e").get<int>();
    u64 recorded = cert.at("s").get<u64>();
    u64 fresh = solve_s_threshold(e);
    if (fresh != recorded)
        return invalid("threshold mismatch: recorded " + std::to_string(recorded) +
                       ", recomputed " + std::to_string(fresh));
    return {true, ""};
}

}  // namespace

VerifyResult verify_certificate(const nlohmann::ordered_json& cert) {
    try {
        if (!cert.is_object() || !cert.contains("kind"))
            return invalid("certificate must be a JSON object with a \"kind\" field");
        std::string kind = cert.at("kind").get<std::string>();
        if (kind == "sieve") return verify_sieve(cert);
        if (kind == "chain") return verify_chain(cert);
        if (kind == "bound") return verify_bound(cert);
        if (kind == "s-threshold") return verify_threshold(cert);
        return invalid("unknown certificate kind \"" + kind + "\"");
    } catch (const std::exception& ex) {
        return invalid(std::string("verification failed: ") + ex.what());
    }
}

}  // namespace expsieve
