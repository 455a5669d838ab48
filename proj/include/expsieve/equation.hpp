#pragma once
// Exact representation of purely exponential equations: sums of integer-
// coefficient products of fixed bases raised to variable exponents, stored
// canonically as "sum of terms = 0" (the right-hand side negated).

#include <gmpxx.h>
#include <json.hpp>

#include <map>
#include <set>
#include <string>
#include <vector>

#include "expsieve/common.hpp"
#include "expsieve/constraints.hpp"
#include "expsieve/interval.hpp"

namespace expsieve {

struct Factor {
    long long base;  // > 1
    std::string var;
    bool operator==(const Factor&) const = default;
    auto operator<=>(const Factor&) const = default;
};

struct Term {
    long long coeff;  // nonzero
    std::vector<Factor> factors;
    bool operator==(const Term&) const = default;
};

class ParseError : public std::runtime_error {
  public:
    ParseError(const std::string& msg, size_t position)
        : std::runtime_error(msg + " (at position " + std::to_string(position) + ")"),
          position(position) {}
    size_t position;
};

struct ExpEquation {
    std::vector<Term> terms;
    std::vector<std::string> variables;  // ordered by first appearance

    // Validates invariants (>= 3 terms, bases > 1, coefficients nonzero, every
    // variable referenced) and derives the variable list.
    static ExpEquation from_terms(std::vector<Term> terms);

    // Inverse of parse_equation for canonical equations. Requires at least one
    // positive and one negative term (the negatives form the right-hand side).
    std::string render() const;

    nlohmann::ordered_json to_json() const;
    static ExpEquation from_json(const nlohmann::ordered_json& j);

    bool operator==(const ExpEquation&) const = default;
};

// Grammar: expr "=" expr, expr = term ("+" term)*,
// term = [coeff "*"] base "^" var ("*" base "^" var)*.
// Whitespace-insensitive. Throws ParseError with a position on syntax errors,
// std::invalid_argument on semantic violations (base <= 1, zero coefficient,
// fewer than 3 terms).
ExpEquation parse_equation(const std::string& text);

using Assignment = std::map<std::string, u64>;  // values >= 1

// Exact value of the signed sum at the assignment; zero iff a solution.
mpz_class evaluate(const ExpEquation& eq, const Assignment& asg);

struct FamilyInstance {
    int e;
    u64 N;               // 4^e
    u64 a, b, c, d;      // N-1, N, N+1, N+2

    Ival mu_x(int prec = Ival::kDefaultPrec) const;  // log(N+2)/log(N-1)
    Ival mu_y(int prec = Ival::kDefaultPrec) const;  // log(N+2)/log(N)
    Ival mu_z(int prec = Ival::kDefaultPrec) const;  // log(N+2)/log(N+1)
};

// The equation (4^e-1)^x + (4^e)^y + (4^e+1)^z - (4^e+2)^w = 0. e in [1, 31]
// (bases must fit in 64 bits); throws std::invalid_argument otherwise.
std::pair<FamilyInstance, ExpEquation> family_equation(int e);

// Exhaustive search over the box 1..bounds[v] per variable, filtered by the
// optional constraints; results in lexicographic order of the variable list.
// Prunes by term monotonicity; may partition across threads (results are
// identical to sequential enumeration).
std::vector<Assignment> brute_force_solutions(const ExpEquation& eq,
                                              const std::map<std::string, u64>& bounds,
                                              const ConstraintSet& constraints = {},
                                              int threads = 1);

}  // namespace expsieve
