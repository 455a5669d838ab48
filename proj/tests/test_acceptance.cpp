// Acceptance harness: one pass/fail line per criterion, exit code = number of
// criteria in an unexpected state. Criterion 3 pins a known divergence from
// the published restriction-set size (11 vs the enumerated 16) and therefore
// reports FAIL by design; its downstream cardinalities must still reproduce,
// and any drift from the pinned values is counted as a real failure.

#include <array>
#include <chrono>
#include <iostream>
#include <set>
#include <sstream>
#include <string>
#include <variant>
#include <vector>

#include "expsieve/baker.hpp"
#include "expsieve/casework.hpp"
#include "expsieve/certificates.hpp"
#include "expsieve/equation.hpp"
#include "expsieve/sieve.hpp"
#include "planted.hpp"

using namespace expsieve;
using nlohmann::ordered_json;
using Clock = std::chrono::steady_clock;

namespace {

double seconds_since(Clock::time_point start) {
    return std::chrono::duration<double>(Clock::now() - start).count();
}

struct Line {
    int criterion = 0;
    bool pass = false;
    bool unexpected = false;  // true when this state must fail the run
    std::string note;
};

std::string fmt_seconds(double s) {
    std::ostringstream out;
    out.precision(1);
    out << std::fixed << s << " s";
    return out.str();
}

ResidueClassSystem survivors_or_throw(const SieveOutcome& out, const std::string& what) {
    if (!std::holds_alternative<SurvivorsOutcome>(out))
        throw std::runtime_error("expected survivors from " + what);
    return std::get<SurvivorsOutcome>(out).system;
}

}  // namespace

int main() {
    std::vector<Line> lines;
    std::vector<ordered_json> certificates;  // gathered from criteria 1-3 for criterion 9
    const ExpEquation eq1 = family_equation(1).second;

    // Criterion 1: the eight published per-instance moduli reproduce the
    // published conclusions, each equation sieving in under two minutes.
    try {
        auto rows = replay_table1();
        bool ok = rows.size() == 8;
        for (const auto& row : rows) ok = ok && row.matches_published;
        ok = ok && rows.at(0).bound_w == 3 &&
             rows.at(0).conclusion == "solutions (x, y, z, w) = (3, 1, 1, 2), (3, 3, 3, 3)";
        for (size_t i = 1; i < rows.size(); ++i) ok = ok && rows[i].conclusion == "no solution";

        double slowest = 0.0;
        for (const auto& row : rows) {
            const ExpEquation eq = family_equation(row.e).second;
            auto t0 = Clock::now();
            SieveOutcome out = sieve(eq, row.modulus);
            double dt = seconds_since(t0);
            slowest = std::max(slowest, dt);
            ok = ok && dt < 120.0;
            ordered_json cert = make_sieve_certificate(eq, row.modulus, ConstraintSet{}, out);
            ok = ok && cert.at("outcome") == row.raw_outcome;
            certificates.push_back(std::move(cert));
        }
        lines.push_back({1, ok, !ok,
                         ok ? "8/8 published conclusions reproduced; slowest equation " +
                                  fmt_seconds(slowest)
                            : "published conclusions not reproduced"});
    } catch (const std::exception& ex) {
        lines.push_back({1, false, true, std::string("exception: ") + ex.what()});
    }

    // Criterion 2: the four case rows certify bounds no worse than published
    // (1, 2, 2, 3), with the x = 1 row allowed to come in tighter.
    try {
        Table2Report rep = replay_table2(eq1);
        bool ok = rep.rows.size() == 4 && rep.coverage_ok && rep.max_bound == 3;
        const std::array<u64, 4> published{1, 2, 2, 3};
        for (size_t i = 0; ok && i < 4; ++i) {
            ok = rep.rows[i].published_bound == published[i] &&
                 rep.rows[i].achieved_bound <= rep.rows[i].published_bound;
            if (i != 2) ok = ok && rep.rows[i].achieved_bound == published[i];
        }
        std::ostringstream note;
        if (ok) {
            note << "bounds w <= ";
            for (size_t i = 0; i < 4; ++i)
                note << rep.rows[i].achieved_bound << (i + 1 < 4 ? ", " : "");
            note << " against published 1, 2, 2, 3";
        } else {
            note << "case bounds diverge from the published table";
        }
        lines.push_back({2, ok, !ok, note.str()});
    } catch (const std::exception& ex) {
        lines.push_back({2, false, true, std::string("exception: ") + ex.what()});
    }

    // Criterion 3: the published restriction-chain cardinality |H1| = 11 is
    // not reproducible; the enumeration yields 16. The pinned engine values
    // (16, then 18, 15, empty downstream) are regression-checked, and the
    // criterion reports FAIL by design while the pins hold.
    try {
        ConstraintSet consA = ConstraintSet::parse({"x>=3", "y>=2"});
        ConstraintSet consA4 = ConstraintSet::parse({"x>=3", "y>=2", "w>=4"});
        auto run_and_certify = [&](u64 m, const ConstraintSet& cons) {
            FactoredModulus modulus = FactoredModulus::of(m);
            SieveOutcome out = sieve(eq1, modulus, cons);
            certificates.push_back(make_sieve_certificate(eq1, modulus, cons, out));
            return survivors_or_throw(out, "modulus " + std::to_string(m));
        };
        ResidueClassSystem s16 = run_and_certify(16, consA);
        ResidueClassSystem s7 = run_and_certify(7, consA);
        ResidueClassSystem s27 = run_and_certify(27, consA4);
        ResidueClassSystem s13 = run_and_certify(13, consA4);
        ResidueClassSystem s73 = run_and_certify(73, consA4);

        ResidueClassSystem h1 = intersect(s16, s7);
        ResidueClassSystem h2 = intersect(h1, s27);
        ResidueClassSystem h3 = intersect(h2, s13);
        ResidueClassSystem h4 = intersect(h3, s73);
        bool pins_ok = h1.classes.size() == 16 && h2.classes.size() == 18 &&
                       h3.classes.size() == 15 && h4.classes.empty();
        if (pins_ok) {
            lines.push_back({3, false, false,
                             "published |H1|=11 not reproducible; engine computes 16 "
                             "(downstream 18/15/empty reproduce)"});
        } else {
            std::ostringstream note;
            note << "regression pins diverged: |H1|=" << h1.classes.size()
                 << ", |H2|=" << h2.classes.size() << ", |H3|=" << h3.classes.size()
                 << ", |H4|=" << h4.classes.size() << " (expected 16/18/15/0)";
            lines.push_back({3, false, true, note.str()});
        }
    } catch (const std::exception& ex) {
        lines.push_back({3, false, true, std::string("exception: ") + ex.what()});
    }

    // Criterion 4: the box search finds exactly the two known solutions, and
    // the full pipeline certifies them as 5-tuples in under 15 minutes.
    try {
        auto t0 = Clock::now();
        std::map<std::string, u64> box;
        for (const auto& v : eq1.variables) box[v] = 20;
        auto found = brute_force_solutions(eq1, box, ConstraintSet{}, 4);
        std::vector<Assignment> expected{
            {{"x", 3}, {"y", 1}, {"z", 1}, {"w", 2}},
            {{"x", 3}, {"y", 3}, {"z", 3}, {"w", 3}}};
        bool ok = found == expected;

        PipelineResult pipeline = full_theorem_pipeline();
        double total = seconds_since(t0);
        ok = ok && pipeline.ok &&
             pipeline.solutions ==
                 std::set<std::array<u64, 5>>{{3, 3, 1, 1, 2}, {3, 3, 3, 3, 3}} &&
             total < 900.0;
        lines.push_back({4, ok, !ok,
                         ok ? "box search and pipeline agree on the two solutions; total " +
                                  fmt_seconds(total)
                            : "solution set or runtime diverged"});
    } catch (const std::exception& ex) {
        lines.push_back({4, false, true, std::string("exception: ") + ex.what()});
    }

    // Criterion 5: the p-adic resolutions are incompatible for e = 9..64 and
    // compatible at 8; the rational threshold stays <= 5042 for e = 1..8 and
    // the rational chain resolves to e = 8.
    try {
        bool ok = resolve_padic_y_case(8) == CaseResolution::compatible &&
                  resolve_padic_x_case(8) == CaseResolution::compatible;
        for (int e = 9; ok && e <= 64; ++e)
            ok = resolve_padic_y_case(e) == CaseResolution::incompatible &&
                 resolve_padic_x_case(e) == CaseResolution::incompatible;
        for (int e = 1; ok && e <= 8; ++e) ok = solve_s_threshold(e) <= 5042;
        ok = ok && resolve_rational_case() == 8;
        lines.push_back({5, ok, !ok,
                         ok ? "incompatible for e in 9..64, compatible at 8; thresholds <= 5042; "
                              "rational case resolves to 8"
                            : "a bound resolution diverged"});
    } catch (const std::exception& ex) {
        lines.push_back({5, false, true, std::string("exception: ") + ex.what()});
    }

    // Criterion 6: the proof loops and the box searches return their exact sets.
    try {
        auto growth = lemma_wge4e_growth_loop();
        bool ok = !growth.empty();
        for (const auto& [e, w] : growth) ok = ok && e <= 4 && w <= 12;
        ok = ok && lemma_mod4e2_exception_loop() == std::set<std::pair<int, int>>{{1, 3}};
        ok = ok &&
             exceptional_solution_search() == std::set<std::array<u64, 5>>{{1, 3, 3, 3, 3}};
        ok = ok && special_case_solutions() ==
                       std::set<std::array<u64, 5>>{{1, 3, 1, 1, 2}, {1, 3, 3, 3, 3}};
        lines.push_back({6, ok, !ok,
                         ok ? "growth loop confined to e <= 4, w <= 12; exception sets exact"
                            : "a proof loop returned an unexpected set"});
    } catch (const std::exception& ex) {
        lines.push_back({6, false, true, std::string("exception: ") + ex.what()});
    }

    // Criterion 7: 200 planted equations stay consistent with their sieves.
    try {
        int consistent = 0;
        for (u64 seed = 1; seed <= 200; ++seed) {
            planted::PlantedCase pc = planted::make_planted_case(seed);
            SieveOutcome out = sieve(pc.eq, pc.modulus);
            if (planted::planted_case_consistent(pc, out)) ++consistent;
        }
        bool ok = consistent == 200;
        lines.push_back({7, ok, !ok,
                         std::to_string(consistent) + "/200 planted solutions consistent"});
    } catch (const std::exception& ex) {
        lines.push_back({7, false, true, std::string("exception: ") + ex.what()});
    }

    // Criterion 8: the two-sided valuation identities hold exactly at the
    // known solutions.
    try {
        auto zpow = [](long base, unsigned long e) {
            mpz_class r;
            mpz_class b(base);
            mpz_pow_ui(r.get_mpz_t(), b.get_mpz_t(), e);
            return r;
        };
        // (x, y, z, w) = (3, 1, 1, 2): min{y,w} = 1, min{x,w} = 2
        long v2a = padic_valuation(mpq_class(zpow(5, 1) - zpow(-3, 3)), 2);
        long v3a = padic_valuation(mpq_class(zpow(-5, 1) - zpow(-2, 2)), 3);
        // (x, y, z, w) = (3, 3, 3, 3): min{y,w} = 3, min{x,w} = 3
        long v2b = padic_valuation(mpq_class(zpow(5, 3) - zpow(-3, 3)), 2);
        long v3b = padic_valuation(mpq_class(zpow(-5, 3) - zpow(-2, 6)), 3);
        bool ok = v2a == 5 && v3a == 2 && v2b == 3 && v3b == 3;
        ok = ok && std::min(1L, 2L) <= v2a && std::min(3L, 2L) <= v3a &&
             std::min(3L, 3L) <= v2b && std::min(3L, 3L) <= v3b;
        lines.push_back({8, ok, !ok,
                         ok ? "2-adic valuations 5, 3 and 3-adic valuations 2, 3 dominate the "
                              "exponent minima"
                            : "a valuation identity failed"});
    } catch (const std::exception& ex) {
        lines.push_back({8, false, true, std::string("exception: ") + ex.what()});
    }

    // Criterion 9: every certificate gathered above verifies, plus a chain
    // certificate for the published case chain; a mutated certificate fails.
    try {
        ConstraintSet consA = ConstraintSet::parse({"x>=3", "y>=2"});
        std::vector<FactoredModulus> chain_moduli{
            FactoredModulus::of(16), FactoredModulus::of(7), FactoredModulus::of(27),
            FactoredModulus::of(13), FactoredModulus::of(73)};
        ChainResult chain = sieve_chain(eq1, chain_moduli, consA);
        certificates.push_back(make_chain_certificate(eq1, chain_moduli, consA, chain));

        bool ok = !certificates.empty();
        int checked = 0;
        for (const auto& cert : certificates) {
            VerifyResult v = verify_certificate(cert);
            ok = ok && v.valid;
            ++checked;
        }

        ordered_json mutated = certificates.front();  // a sieve certificate
        if (mutated.at("outcome").at("type") == "exponent-bound") {
            mutated["outcome"]["bound"] = mutated["outcome"]["bound"].get<u64>() + 1;
        } else {
            mutated["outcome"] = ordered_json{{"type", "no-solution"},
                                              {"modulus", mutated.at("modulus")}};
        }
        ok = ok && !verify_certificate(mutated).valid;
        lines.push_back({9, ok, !ok,
                         ok ? std::to_string(checked) +
                                  " certificates verified; the mutated one rejected"
                            : "certificate verification diverged"});
    } catch (const std::exception& ex) {
        lines.push_back({9, false, true, std::string("exception: ") + ex.what()});
    }

    int unexpected = 0;
    for (const auto& line : lines) {
        std::cout << "Criterion " << line.criterion << ": " << (line.pass ? "PASS" : "FAIL")
                  << " — " << line.note << "\n";
        if (line.unexpected) ++unexpected;
    }
    std::cout << (9 - unexpected) << "/9 criteria in their expected state";
    if (unexpected == 0) std::cout << " (criterion 3 is a documented divergence)";
    std::cout << "\n";
    return unexpected;
}
