#pragma once
// Per-variable exponent constraints: fixed values, bounds, congruences, parity.
// Parity is stored as a congruence mod 2. A variable is "pinned" when its value
// range is finite (fixed or upper-bounded); pinned variables are enumerated
// explicitly by the sieve and never contribute residue classes.

#include <json.hpp>

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "expsieve/common.hpp"

namespace expsieve {

struct VarConstraint {
    std::optional<u64> fixed;
    std::optional<u64> lower;
    std::optional<u64> upper;
    std::vector<std::pair<u64, u64>> congruences;  // (residue, modulus >= 2)

    bool operator==(const VarConstraint&) const = default;
};

class ConstraintSet {
  public:
    ConstraintSet() = default;

    // Parses clauses like "x=3", "x>=3", "x<=2", "x odd", "x even",
    // "x = 1 mod 4" (also accepts the ≡ sign). Throws std::invalid_argument.
    static ConstraintSet parse(const std::vector<std::string>& clauses);
    static ConstraintSet parse_clause(const std::string& clause);

    ConstraintSet& set_fixed(const std::string& var, u64 value);
    ConstraintSet& set_lower(const std::string& var, u64 value);
    ConstraintSet& set_upper(const std::string& var, u64 value);
    ConstraintSet& add_congruence(const std::string& var, u64 residue, u64 modulus);
    ConstraintSet& set_odd(const std::string& var) { return add_congruence(var, 1, 2); }
    ConstraintSet& set_even(const std::string& var) { return add_congruence(var, 0, 2); }

    bool empty() const { return by_var_.empty(); }
    const std::map<std::string, VarConstraint>& vars() const { return by_var_; }
    const VarConstraint* find(const std::string& var) const;

    // Does the explicit exponent value t satisfy every constraint on var?
    bool admits(const std::string& var, u64 t) const;

    // Is the residue class {t ≡ r (mod L)} compatible with the congruence and
    // parity constraints on var? Requires every constraint modulus to divide L.
    bool class_compatible(const std::string& var, u64 r, u64 L) const;

    bool pinned(const std::string& var) const;
    u64 lower_of(const std::string& var) const;      // default 1
    u64 congruence_lcm(const std::string& var) const;

    // Throws std::invalid_argument if any variable's constraints are mutually
    // inconsistent (fixed value violating its own congruences or bounds).
    void validate() const;

    nlohmann::ordered_json to_json() const;
    static ConstraintSet from_json(const nlohmann::ordered_json& j);

    bool operator==(const ConstraintSet&) const = default;

  private:
    std::map<std::string, VarConstraint> by_var_;
};

}  // namespace expsieve
