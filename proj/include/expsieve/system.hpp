#pragma once
// Residue-class systems: the structured description of which exponent tuples
// survive a congruence sieve. Survivors split into congruence classes
// (arithmetic progressions per variable above a floor) and isolated small
// explicit values; full mixed tuples are retained for exact membership tests.

#include <json.hpp>

#include <map>
#include <set>
#include <string>
#include <vector>

#include "expsieve/common.hpp"

namespace expsieve {

// One coordinate of a surviving tuple: either an explicit exponent value or a
// congruence class (residue mod the variable's lattice, valid above its floor).
struct SurvivorCoord {
    bool is_explicit = false;
    u64 value = 0;  // explicit exponent, or class residue
    bool operator==(const SurvivorCoord&) const = default;
    auto operator<=>(const SurvivorCoord&) const = default;
};

struct ResidueClassSystem {
    std::vector<std::string> variables;
    std::vector<u64> moduli;  // per-variable lattice, aligned with variables
    // Tuples whose every free coordinate is a congruence class; entry i is a
    // residue mod moduli[i] (0 for variables with lattice 1).
    std::set<std::vector<u64>> classes;
    // Explicit exponent values occurring in mixed survivors, per variable.
    std::map<std::string, std::set<u64>> small_values;
    // Class residues describe exponents strictly above this floor (default 0).
    std::map<std::string, u64> floors;
    // Surviving tuples with at least one explicit coordinate. Populated by a
    // single sieve run; intersection does not preserve them (it keeps the
    // congruence-class part and unions small_values for bookkeeping).
    std::set<std::vector<SurvivorCoord>> mixed_survivors;

    u64 floor_of(const std::string& var) const {
        auto it = floors.find(var);
        return it == floors.end() ? 0 : it->second;
    }

    bool has_survivors() const { return !classes.empty() || !mixed_survivors.empty(); }

    // Exact membership: does the tuple (aligned with `variables`) fall in some
    // surviving class or mixed tuple?
    bool admits(const std::vector<u64>& values) const;

    nlohmann::ordered_json to_json() const;
    static ResidueClassSystem from_json(const nlohmann::ordered_json& j);

    bool operator==(const ResidueClassSystem&) const = default;
};

// Conjunction of two systems over the same variable list (throws
// std::invalid_argument otherwise). Per-variable lattices combine by lcm;
// classes of `a` are lifted to the joint lattice and kept iff their reduction
// lies in `b`. Floors combine by max, small values by union. Commutative,
// associative, and idempotent on class-only systems.
ResidueClassSystem intersect(const ResidueClassSystem& a, const ResidueClassSystem& b);

}  // namespace expsieve
