#pragma once
// Explicit linear-forms-in-logarithms bounds: a two-term p-adic bound and a
// two-term Archimedean (rational) bound, evaluated in directed-rounding
// interval arithmetic so every reported bound is a true upper bound, plus the
// inequality-chain resolvers that turn those bounds into the base-size
// thresholds used by the full proof (compatibility only for e <= 8).

#include <gmpxx.h>
#include <json.hpp>

#include <optional>
#include <string>

#include "expsieve/common.hpp"
#include "expsieve/interval.hpp"

namespace expsieve {

// Absolute logarithmic height of a nonzero rational in lowest terms:
// log max(|numerator|, |denominator|). Throws std::invalid_argument on 0.
Ival log_height(const mpq_class& q, int prec = Ival::kDefaultPrec);

// Exact p-adic valuation of a nonzero rational (negative for denominators).
long padic_valuation(const mpq_class& q, u64 p);

// Exact multiplicative-independence test: factors numerators/denominators
// (trial division to 10^6, then a deterministic 64-bit primality test; larger
// cofactors use GMP's strong probable-prime test and a composite cofactor is
// refused) and checks whether the exponent vectors are parallel. Throws
// std::invalid_argument on 0 and std::runtime_error when a cofactor cannot
// be certified prime (the test then cannot vouch for independence).
bool multiplicatively_independent(const mpq_class& a, const mpq_class& b);

// Parameters of the p-adic bound
//   nu_p(alpha1^b1 - alpha2^b2) <= 36.1 g H1 H2 / (E^3 log^4 p)
//                                  * (max{log b' + log(E log p) + 0.4, 6 E log p})^2
// with b' = b1/H2 + b2/H1.
struct BakerPadicParams {
    u64 p = 2;
    mpq_class alpha1, alpha2;
    u64 b1 = 1, b2 = 1;
    u64 g = 1;       // nu_p(alpha_j^g - 1) >= E for j = 1,2
    mpq_class E;     // exact; must exceed 1 + 1/(p-1)
    // Height parameters; when absent, max{h(alpha_j), E log p} is used (the
    // smallest admissible choice). Explicit values are validated
    // conservatively: the interval's lower end must clear the requirement.
    std::optional<Ival> H1, H2;

    // Throws std::invalid_argument describing the first violated hypothesis.
    void validate(int prec = Ival::kDefaultPrec) const;
    // Effective (H1, H2) at the given precision.
    std::pair<Ival, Ival> heights(int prec = Ival::kDefaultPrec) const;
    nlohmann::ordered_json to_json(int prec = Ival::kDefaultPrec) const;
};

// Parameters of the Archimedean bound
//   log|b2 log alpha2 - b1 log alpha1| > -25.2 H1 H2 (max{log b' + 0.38, 10})^2
// with b' = b1/H2 + b2/H1; alpha1, alpha2 rational and > 1.
struct BakerRationalParams {
    mpq_class alpha1, alpha2;
    u64 b1 = 1, b2 = 1;
    std::optional<Ival> H1, H2;  // default: max{h(alpha_j), log alpha_j, 1}

    void validate(int prec = Ival::kDefaultPrec) const;
    std::pair<Ival, Ival> heights(int prec = Ival::kDefaultPrec) const;
    nlohmann::ordered_json to_json(int prec = Ival::kDefaultPrec) const;
};

struct BoundReport {
    Ival value;          // enclosure of the bound; .hi is the reported bound
    std::string regime;  // which branch of the max{...} was active
    nlohmann::ordered_json inputs;
    int precision = Ival::kDefaultPrec;

    nlohmann::ordered_json to_json() const;
};

// Evaluates the p-adic bound after validating every hypothesis.
BoundReport padic_bound(const BakerPadicParams& params, int prec = Ival::kDefaultPrec);
// Formula evaluation without hypothesis validation, for replaying boundary
// parameter sets that sit exactly on a strict-inequality precondition.
BoundReport padic_bound_unchecked(const BakerPadicParams& params,
                                  int prec = Ival::kDefaultPrec);
// Evaluates the Archimedean bound (magnitude of the negative exponent bound).
BoundReport rational_bound(const BakerRationalParams& params, int prec = Ival::kDefaultPrec);

enum class CaseResolution { compatible, incompatible };

// mu helpers for arbitrary e >= 1 (N = 4^e as a big integer):
// mu_x = log(N+2)/log(N-1), mu_y = log(N+2)/log(N), mu_z = log(N+2)/log(N+1),
// and the w lower bound N/(mu_x + mu_z).
Ival family_mu_x(int e, int prec = Ival::kDefaultPrec);
Ival family_mu_y(int e, int prec = Ival::kDefaultPrec);
Ival family_mu_z(int e, int prec = Ival::kDefaultPrec);
Ival family_w_lower(int e, int prec = Ival::kDefaultPrec);

// Replays the 2-adic inequality chain under the supposition y >= w/2: the
// bound w < 2 C (max{log 3w, 12 e log 2})^2 with C = 36.1 log(4^e+1) /
// ((2e)^2 log^3 2), split into the branch log(3w) > 12 e log 2 (then
// w / log^2(3w) < 2C must hold above w = 2^{12e}/3) and its complement (then
// the w lower bound must stay below 72 * 36.1 * log(4^e+1) / log 2). Returns
// whether the supposition survives for this e; requires e >= 2. Every verdict
// is certified by rigorous interval comparisons with precision escalation.
// If `report` is non-null it receives the branch values, including the
// constant C computed both from the bound's general formula and from the
// specialized closed form (the two agree identically; the report shows both).
CaseResolution resolve_padic_y_case(int e, nlohmann::ordered_json* report = nullptr);

// The 3-adic analogue under x >= w/2: C3 = 36.1 * 3 * log(4^e+1) /
// (2^2 log^3 3), branch threshold 12 log 3, branch A floor
// w0 = max(3^12/5, w lower bound), branch B threshold
// 72 * 36.1 * 3 * log(4^e+1) / log 3. Requires e >= 2.
CaseResolution resolve_padic_x_case(int e, nlohmann::ordered_json* report = nullptr);

// The prefactor exp(0.4) * (1/mu_z + 2 log 3 / mu_y) whose being < 5 turns
// b' * 2 log 3 * exp(0.4) into the 5w envelope of the 3-adic chain.
Ival padic_x_case_prefactor(int e, int prec = Ival::kDefaultPrec);

// Least integer S such that every s >= S violates
//   s < 50.4 (max{log 2s + 0.38, 10})^2 + 2 log 6 / (log(N+1) log(N+2)),
// found by integer bisection and certified rigorously (F(S-1) > S-1,
// F(S) <= S, and the right side's slope stays below 1 beyond S). e >= 1.
u64 solve_s_threshold(int e);

// Largest e in 1..64 with N/(mu_x+mu_z) < S(e) * log(N+1); the Archimedean
// chain is compatible exactly up to this e (returns 8).
int resolve_rational_case();

}  // namespace expsieve
