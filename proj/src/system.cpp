#include "expsieve/system.hpp"

#include <stdexcept>

namespace expsieve {

bool ResidueClassSystem::admits(const std::vector<u64>& values) const {
    if (values.size() != variables.size())
        throw std::invalid_argument("tuple arity does not match variable count");
    auto coord_ok = [&](size_t i, const SurvivorCoord& c) {
        if (c.is_explicit) return values[i] == c.value;
        return values[i] > floor_of(variables[i]) && values[i] % moduli[i] == c.value;
    };
    for (const auto& cls : classes) {
        bool ok = true;
        for (size_t i = 0; i < values.size() && ok; ++i)
            ok = coord_ok(i, SurvivorCoord{false, cls[i]});
        if (ok) return true;
    }
    for (const auto& mix : mixed_survivors) {
        bool ok = true;
        for (size_t i = 0; i < values.size() && ok; ++i) ok = coord_ok(i, mix[i]);
        if (ok) return true;
    }
    return false;
}

nlohmann::ordered_json ResidueClassSystem::to_json() const {
    nlohmann::ordered_json j;
    j["variables"] = variables;
    j["moduli"] = moduli;
    nlohmann::ordered_json jc = nlohmann::ordered_json::array();
    for (const auto& cls : classes) jc.push_back(cls);
    j["classes"] = std::move(jc);
    nlohmann::ordered_json js = nlohmann::ordered_json::object();
    for (const auto& [var, vals] : small_values) js[var] = vals;
    j["small_values"] = std::move(js);
    nlohmann::ordered_json jf = nlohmann::ordered_json::object();
    for (const auto& [var, fl] : floors) jf[var] = fl;
    j["floors"] = std::move(jf);
    nlohmann::ordered_json jm = nlohmann::ordered_json::array();
    for (const auto& mix : mixed_survivors) {
        nlohmann::ordered_json row = nlohmann::ordered_json::array();
        for (const auto& c : mix)
            row.push_back({{"kind", c.is_explicit ? "value" : "class"}, {"n", c.value}});
        jm.push_back(std::move(row));
    }
    j["mixed_survivors"] = std::move(jm);
    return j;
}

ResidueClassSystem ResidueClassSystem::from_json(const nlohmann::ordered_json& j) {
    ResidueClassSystem s;
    s.variables = j.at("variables").get<std::vector<std::string>>();
    s.moduli = j.at("moduli").get<std::vector<u64>>();
    for (const auto& row : j.at("classes")) s.classes.insert(row.get<std::vector<u64>>());
    for (const auto& [var, vals] : j.at("small_values").items())
        s.small_values[var] = vals.get<std::set<u64>>();
    for (const auto& [var, fl] : j.at("floors").items()) s.floors[var] = fl.get<u64>();
    for (const auto& row : j.at("mixed_survivors")) {
        std::vector<SurvivorCoord> mix;
        for (const auto& c : row)
            mix.push_back({c.at("kind").get<std::string>() == "value", c.at("n").get<u64>()});
        s.mixed_survivors.insert(std::move(mix));
    }
    return s;
}

ResidueClassSystem intersect(const ResidueClassSystem& a, const ResidueClassSystem& b) {
    if (a.variables != b.variables)
        throw std::invalid_argument("cannot intersect systems over different variables");
    size_t n = a.variables.size();
    ResidueClassSystem out;
    out.variables = a.variables;
    out.moduli.resize(n);
    for (size_t i = 0; i < n; ++i) out.moduli[i] = lcm_checked_u64(a.moduli[i], b.moduli[i]);

    // Lift each class of `a` to the joint lattice coordinate-wise and keep the
    // lifts whose reduction mod b's lattice is one of b's classes.
    for (const auto& ca : a.classes) {
        std::vector<u64> lifted(n);
        auto rec = [&](auto&& self, size_t i) -> void {
            if (i == n) {
                std::vector<u64> red(n);
                for (size_t k = 0; k < n; ++k) red[k] = lifted[k] % b.moduli[k];
                if (b.classes.count(red)) out.classes.insert(lifted);
                return;
            }
            for (u64 r = ca[i]; r < out.moduli[i]; r += a.moduli[i]) {
                lifted[i] = r;
                self(self, i + 1);
            }
        };
        rec(rec, 0);
    }

    out.small_values = a.small_values;
    for (const auto& [var, vals] : b.small_values)
        out.small_values[var].insert(vals.begin(), vals.end());
    out.floors = a.floors;
    for (const auto& [var, fl] : b.floors) {
        auto it = out.floors.find(var);
        if (it == out.floors.end())
            out.floors[var] = fl;
        else
            it->second = std::max(it->second, fl);
    }
    return out;
}

}  // namespace expsieve
