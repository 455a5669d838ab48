#include "expsieve/constraints.hpp"

#include <algorithm>
#include <cctype>
#include <sstream>
#include <stdexcept>

namespace expsieve {

namespace {

std::vector<std::string> tokenize_clause(const std::string& s) {
    std::vector<std::string> toks;
    size_t i = 0;
    auto is_op_char = [](char c) { return c == '=' || c == '<' || c == '>'; };
    while (i < s.size()) {
        if (std::isspace((unsigned char)s[i])) { ++i; continue; }
        if (is_op_char(s[i])) {
            size_t j = i;
            while (j < s.size() && is_op_char(s[j])) ++j;
            toks.push_back(s.substr(i, j - i));
            i = j;
        } else if ((unsigned char)s[i] == 0xE2 && i + 2 < s.size() &&
                   (unsigned char)s[i + 1] == 0x89 && (unsigned char)s[i + 2] == 0xA1) {
            toks.push_back("=");  // UTF-8 "≡" treated as the congruence form of "="
            i += 3;
        } else {
            size_t j = i;
            while (j < s.size() && !std::isspace((unsigned char)s[j]) && !is_op_char(s[j]) &&
                   !((unsigned char)s[j] == 0xE2))
                ++j;
            toks.push_back(s.substr(i, j - i));
            i = j;
        }
    }
    return toks;
}

u64 parse_u64(const std::string& tok, const std::string& clause) {
    if (tok.empty() || !std::all_of(tok.begin(), tok.end(), [](char c) { return std::isdigit((unsigned char)c); }))
        throw std::invalid_argument("constraint clause '" + clause + "': expected a number, got '" + tok + "'");
    return std::stoull(tok);
}

}  // namespace

ConstraintSet ConstraintSet::parse(const std::vector<std::string>& clauses) {
    ConstraintSet cs;
    for (const auto& c : clauses) {
        ConstraintSet one = parse_clause(c);
        for (const auto& [v, vc] : one.by_var_) {
            auto& dst = cs.by_var_[v];
            if (vc.fixed) dst.fixed = vc.fixed;
            if (vc.lower) dst.lower = std::max(dst.lower.value_or(0), *vc.lower);
            if (vc.upper) dst.upper = dst.upper ? std::min(*dst.upper, *vc.upper) : vc.upper;
            for (auto& cg : vc.congruences) dst.congruences.push_back(cg);
        }
    }
    cs.validate();
    return cs;
}

ConstraintSet ConstraintSet::parse_clause(const std::string& clause) {
    auto toks = tokenize_clause(clause);
    if (toks.size() < 2) throw std::invalid_argument("constraint clause '" + clause + "': too short");
    ConstraintSet cs;
    const std::string var = toks[0];
    if (var.empty() || !std::isalpha((unsigned char)var[0]))
        throw std::invalid_argument("constraint clause '" + clause + "': bad variable name '" + var + "'");
    if (toks[1] == "odd") {
        cs.set_odd(var);
    } else if (toks[1] == "even") {
        cs.set_even(var);
    } else if (toks[1] == "=" || toks[1] == "==" || toks[1] == ">=" || toks[1] == "<=") {
        if (toks.size() < 3) throw std::invalid_argument("constraint clause '" + clause + "': missing value");
        u64 value = parse_u64(toks[2], clause);
        if (toks.size() == 3) {
            if (toks[1] == ">=") cs.set_lower(var, value);
            else if (toks[1] == "<=") cs.set_upper(var, value);
            else cs.set_fixed(var, value);
        } else if (toks.size() == 5 && toks[3] == "mod" && (toks[1] == "=" || toks[1] == "==")) {
            u64 modulus = parse_u64(toks[4], clause);
            if (modulus < 2) throw std::invalid_argument("constraint clause '" + clause + "': modulus must be >= 2");
            cs.add_congruence(var, value % modulus, modulus);
        } else {
            throw std::invalid_argument("constraint clause '" + clause + "': unrecognized form");
        }
    } else {
        throw std::invalid_argument("constraint clause '" + clause + "': unknown operator '" + toks[1] + "'");
    }
    cs.validate();
    return cs;
}

ConstraintSet& ConstraintSet::set_fixed(const std::string& var, u64 value) {
    by_var_[var].fixed = value;
    return *this;
}

ConstraintSet& ConstraintSet::set_lower(const std::string& var, u64 value) {
    auto& vc = by_var_[var];
    vc.lower = std::max(vc.lower.value_or(0), value);
    return *this;
}

ConstraintSet& ConstraintSet::set_upper(const std::string& var, u64 value) {
    auto& vc = by_var_[var];
    vc.upper = vc.upper ? std::min(*vc.upper, value) : std::optional<u64>(value);
    return *this;
}

ConstraintSet& ConstraintSet::add_congruence(const std::string& var, u64 residue, u64 modulus) {
    if (modulus < 2) throw std::invalid_argument("congruence modulus must be >= 2");
    by_var_[var].congruences.emplace_back(residue % modulus, modulus);
    return *this;
}

const VarConstraint* ConstraintSet::find(const std::string& var) const {
    auto it = by_var_.find(var);
    return it == by_var_.end() ? nullptr : &it->second;
}

bool ConstraintSet::admits(const std::string& var, u64 t) const {
    const VarConstraint* c = find(var);
    if (!c) return true;
    if (c->fixed && t != *c->fixed) return false;
    if (c->lower && t < *c->lower) return false;
    if (c->upper && t > *c->upper) return false;
    for (auto [r, m] : c->congruences)
        if (t % m != r) return false;
    return true;
}

bool ConstraintSet::class_compatible(const std::string& var, u64 r, u64 L) const {
    const VarConstraint* c = find(var);
    if (!c) return true;
    for (auto [rr, mm] : c->congruences) {
        if (L % mm != 0)
            throw std::logic_error("class_compatible: class modulus not a multiple of constraint modulus");
        if (r % mm != rr) return false;
    }
    return true;
}

bool ConstraintSet::pinned(const std::string& var) const {
    const VarConstraint* c = find(var);
    return c && (c->fixed || c->upper);
}

u64 ConstraintSet::lower_of(const std::string& var) const {
    const VarConstraint* c = find(var);
    if (!c) return 1;
    u64 lb = c->lower.value_or(1);
    return std::max<u64>(lb, 1);
}

u64 ConstraintSet::congruence_lcm(const std::string& var) const {
    const VarConstraint* c = find(var);
    u64 m = 1;
    if (c)
        for (auto [r, mm] : c->congruences) m = lcm_u64(m, mm);
    return m;
}

void ConstraintSet::validate() const {
    for (const auto& [v, c] : by_var_) {
        if (c.lower && c.upper && *c.lower > *c.upper)
            throw std::invalid_argument("constraints on " + v + ": empty range");
        if (c.fixed) {
            u64 t = *c.fixed;
            if (t < 1) throw std::invalid_argument("constraints on " + v + ": exponents are >= 1");
            if ((c.lower && t < *c.lower) || (c.upper && t > *c.upper))
                throw std::invalid_argument("constraints on " + v + ": fixed value outside bounds");
            for (auto [r, m] : c.congruences)
                if (t % m != r)
                    throw std::invalid_argument("constraints on " + v + ": fixed value violates congruence");
        }
    }
}

nlohmann::ordered_json ConstraintSet::to_json() const {
    nlohmann::ordered_json j = nlohmann::ordered_json::object();
    for (const auto& [v, c] : by_var_) {
        nlohmann::ordered_json jc = nlohmann::ordered_json::object();
        if (c.fixed) jc["fixed"] = *c.fixed;
        if (c.lower) jc["lower"] = *c.lower;
        if (c.upper) jc["upper"] = *c.upper;
        if (!c.congruences.empty()) {
            auto arr = nlohmann::ordered_json::array();
            for (auto [r, m] : c.congruences) arr.push_back({{"residue", r}, {"modulus", m}});
            jc["congruences"] = arr;
        }
        j[v] = jc;
    }
    return j;
}

ConstraintSet ConstraintSet::from_json(const nlohmann::ordered_json& j) {
    ConstraintSet cs;
    for (auto it = j.begin(); it != j.end(); ++it) {
        const auto& jc = it.value();
        if (jc.contains("fixed")) cs.set_fixed(it.key(), jc["fixed"].get<u64>());
        if (jc.contains("lower")) cs.set_lower(it.key(), jc["lower"].get<u64>());
        if (jc.contains("upper")) cs.set_upper(it.key(), jc["upper"].get<u64>());
        if (jc.contains("congruences"))
            for (const auto& cg : jc["congruences"])
                cs.add_congruence(it.key(), cg["residue"].get<u64>(), cg["modulus"].get<u64>());
    }
    cs.validate();
    return cs;
}

}  // namespace expsieve
