#pragma once
// Mechanical replay of the case analysis that pins down every solution of the
// consecutive-base family (N-1)^x + N^y + (N+1)^z = (N+2)^w with N = 4^e:
// structural exclusions for the other residue classes, parity deductions with
// sieve certificates, size-estimate loops with interval arithmetic, the
// exception box searches, the published per-instance modulus tables, and the
// end-to-end pipeline that certifies the complete solution list.

#include <json.hpp>

#include <array>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "expsieve/constraints.hpp"
#include "expsieve/equation.hpp"
#include "expsieve/sieve.hpp"

namespace expsieve {

struct DeductionStep {
    std::string id;
    std::string claim;
    std::string method;
    nlohmann::ordered_json evidence;
};

struct DeductionTrace {
    int e = 0;
    std::vector<DeductionStep> steps;
    ConstraintSet derived;

    nlohmann::ordered_json to_json() const;
};

// For N ≡ 2 (mod 3), certifies by a sieve modulo 3 (N = 2: a direct residue
// scan) that (N-1)^x + N^y + (N+1)^z = (N+2)^w has no solutions, returning
// true; for other N it confirms the test does not exclude and returns false.
bool check_mod3_exclusion(u64 N);

// Derives the exponent constraints that every solution beyond the two
// recorded special boxes must satisfy:
//   x odd, x ≡ 1 (mod 2e), x >= 2e+1; y odd, y >= 3; z odd; w >= 2e+1.
// Each deduction is certified (sieve contradictions/exponent bounds, exact
// power comparisons, order computations) and appended to `trace` when given.
// Supports e in [1, 9] (the 4^{e+1} modulus must stay within the per-prime-
// power sieve cap).
ConstraintSet derive_parity_constraints(const FamilyInstance& inst,
                                        DeductionTrace* trace = nullptr);

// Certified numeric lower bound: any solution outside the special boxes has
// w > N / (mu_x + mu_z) (rounded down). Works for every FamilyInstance.
double check_w_lower_bound(const FamilyInstance& inst);

// Pairs (e, w) with 2e+1 <= w <= 4e-1 (e up to 100) for which
// 2^{w-2e} + 4^e < (mu_x + mu_z) w cannot be excluded; exactly {(1, 3)}.
std::set<std::pair<int, int>> lemma_mod4e2_exception_loop();

// Pairs (e, w) with 3e <= w <= 4e-1 (e up to 100) for which
// 2^{w-2e} < (mu_x + mu_z) w cannot be excluded; exactly
// {(1,3), (2,6), (2,7), (3,9), (3,10), (4,12)}.
std::set<std::pair<int, int>> lemma_wge4e_growth_loop();

struct SmallECheckReport {
    // (mu_x(3e-1) - 1)((mu_x + mu_z)(3e-1) - 1) < 4^e/2 for e in 5..64.
    bool quadratic_estimate_holds = false;
    // (3e-1) 2^{e-1} < 4^e/2 for e in 5..64, exactly in integers.
    bool linear_estimate_holds = false;
    // The margin of the quadratic estimate grows along e = 49..64 (the right
    // side quadruples per step against quadratic growth on the left).
    bool tail_margin_grows = false;
    // With S = x + z a power of two up to 2^16 and x odd, the balance
    // (z - x)(S - 1) = S w admits no positive integer w.
    bool terminal_search_empty = false;
    bool ok = false;
};
SmallECheckReport lemma_wge4e_small_e_checks();

// Sweeps the candidate boxes left open by the growth loop (e <= 4,
// 3e <= w <= min(4e-1, 12), odd x < mu_x w, odd z < mu_z w with
// x + z ≡ 2^{w-2e} (mod 4^e), y <= mu_y w) for exact solutions.
// Returns (e, x, y, z, w) tuples; exactly {(1, 3, 3, 3, 3)}.
std::set<std::array<u64, 5>> exceptional_solution_search();

// Exhausts the two special boxes (e, w) = (1, 2) and (1, 3) under the size
// bounds; returns {(1, 3, 1, 1, 2), (1, 3, 3, 3, 3)} as (e, x, y, z, w).
std::set<std::array<u64, 5>> special_case_solutions();

struct Table2Row {
    std::string label;
    std::vector<std::string> constraints;
    std::vector<std::string> moduli;
    nlohmann::ordered_json outcome;
    u64 published_bound = 0;
    u64 achieved_bound = 0;  // always <= published_bound
};

struct Table2Report {
    std::vector<Table2Row> rows;
    bool coverage_ok = false;  // the row predicates partition {x >= 1, y >= 1}
    u64 max_bound = 0;

    nlohmann::ordered_json to_json() const;
};

// Replays the published case table for the smallest instance (base tuple
// 3,4,5,6): every (x, y) case yields a certified exponent bound on w no worse
// than the published one, and the cases cover the whole quadrant.
Table2Report replay_table2(const ExpEquation& eq);

struct Table1Row {
    int e = 0;
    FactoredModulus modulus;
    nlohmann::ordered_json raw_outcome;
    u64 bound_w = 0;         // exponent bound extracted at the published modulus
    u64 resolved_w_up_to = 0;  // w values settled by size/box search
    std::string published;
    std::string conclusion;
    bool matches_published = false;
};

// Replays the published per-instance modulus table for e = 1..8: each row's
// sieve outcome, composed with a size refutation or box search for the small
// w values it leaves, reproduces the published conclusion.
std::vector<Table1Row> replay_table1();

struct PipelineResult {
    std::set<std::array<u64, 5>> solutions;  // (n, x, y, z, w), n = N - 1
    nlohmann::ordered_json trace;
    bool ok = false;
};

// Runs every stage of the complete proof: structural exclusions, the mod-3
// test, parity derivations (e = 1..8), the w-bound lemmas, the exception
// searches, the two-term bound resolutions, both published tables, and the
// final box search. The trace records per-stage evidence with wall-clock
// timings isolated under "timing"; on failure `ok` is false and the trace
// names the failing stage.
PipelineResult full_theorem_pipeline();

}  // namespace expsieve
