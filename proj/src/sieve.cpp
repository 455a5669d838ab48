#include "expsieve/sieve.hpp"

#include <algorithm>
#include <cctype>
#include <limits>
#include <thread>

#include "expsieve/residues.hpp"

namespace expsieve {

namespace {

constexpr u64 kMaxPrimePower = u64{1} << 20;  // dense residue-walk guard

u64 sat_mul(u64 a, u64 b) {
    if (a == 0 || b == 0) return 0;
    if (a > std::numeric_limits<u64>::max() / b) return std::numeric_limits<u64>::max();
    return a * b;
}

}  // namespace

// ---------------------------------------------------------------------------
// FactoredModulus

FactoredModulus FactoredModulus::of(u64 m) {
    if (m < 2) throw std::invalid_argument("modulus must be at least 2");
    FactoredModulus fm;
    fm.value = m;
    fm.factors = factorize_u64(m);
    return fm;
}

FactoredModulus FactoredModulus::parse(const std::string& text) {
    // Product of '*'-separated parts, each "a" or "a^k"; the result is
    // re-factored so the parts need not be prime powers themselves.
    u64 value = 1;
    size_t i = 0;
    auto read_u64 = [&]() -> u64 {
        size_t start = i;
        while (i < text.size() && std::isdigit(static_cast<unsigned char>(text[i]))) ++i;
        if (i == start)
            throw std::invalid_argument("malformed modulus '" + text + "': expected a number at position " +
                                        std::to_string(start));
        u64 v = 0;
        for (size_t k = start; k < i; ++k) {
            u64 digit = static_cast<u64>(text[k] - '0');
            if (v > (std::numeric_limits<u64>::max() - digit) / 10)
                throw std::invalid_argument("modulus out of range: '" + text + "'");
            v = v * 10 + digit;
        }
        return v;
    };
    auto skip_ws = [&] {
        while (i < text.size() && std::isspace(static_cast<unsigned char>(text[i]))) ++i;
    };
    for (;;) {
        skip_ws();
        u64 base = read_u64();
        skip_ws();
        u64 part = base;
        if (i < text.size() && text[i] == '^') {
            ++i;
            skip_ws();
            u64 exp = read_u64();
            skip_ws();
            part = 1;
            for (u64 k = 0; k < exp; ++k) {
                part = sat_mul(part, base);
                if (part == std::numeric_limits<u64>::max())
                    throw std::invalid_argument("modulus out of range: '" + text + "'");
            }
        }
        value = sat_mul(value, part);
        if (value == std::numeric_limits<u64>::max())
            throw std::invalid_argument("modulus out of range: '" + text + "'");
        if (i == text.size()) break;
        if (text[i] != '*')
            throw std::invalid_argument("malformed modulus '" + text + "': unexpected character at position " +
                                        std::to_string(i));
        ++i;
    }
    return of(value);
}

std::string FactoredModulus::str() const {
    if (factors.empty()) return "1";
    std::string out;
    for (size_t i = 0; i < factors.size(); ++i) {
        if (i) out += "*";
        out += std::to_string(factors[i].first);
        if (factors[i].second > 1) out += "^" + std::to_string(factors[i].second);
    }
    return out;
}

std::vector<u64> FactoredModulus::prime_powers() const {
    std::vector<u64> out;
    for (const auto& [p, k] : factors) {
        u64 q = 1;
        for (int i = 0; i < k; ++i) q *= p;
        out.push_back(q);
    }
    return out;
}

// ---------------------------------------------------------------------------
// Engine

namespace {

using OptTuple = std::vector<SurvivorCoord>;

class Engine {
  public:
    Engine(const ExpEquation& eq, const FactoredModulus& fm, const ConstraintSet& cons,
           const SieveOptions& opts)
        : eq_(eq), fm_(fm), cons_(cons), opts_(opts), qs_(fm.prime_powers()) {
        if (fm_.value < 2) throw std::invalid_argument("modulus must be at least 2");
        for (u64 q : qs_)
            if (q > kMaxPrimePower)
                throw std::invalid_argument("prime power " + std::to_string(q) +
                                            " exceeds the supported limit 2^20");
        for (size_t i = 0; i < eq_.variables.size(); ++i) vindex_[eq_.variables[i]] = i;
        for (const auto& t : eq_.terms)
            for (const auto& f : t.factors)
                for (u64 q : qs_) {
                    auto key = std::make_pair(static_cast<u64>(f.base), q);
                    if (!seqs_.count(key)) seqs_.emplace(key, residue_sequence(f.base, q));
                }
    }

    SieveOutcome run();

  private:
    struct VarData {
        std::vector<u64> lam, per;  // per variable index
    };

    const EventuallyPeriodicSequence& seq(u64 base, u64 q) const {
        return seqs_.at(std::make_pair(base, q));
    }

    // Per-variable max preperiod and lcm of cycle lengths over the bases of
    // the terms that mention the variable, at prime power q.
    VarData var_data(u64 q) const {
        size_t nv = eq_.variables.size();
        VarData vd{std::vector<u64>(nv, 0), std::vector<u64>(nv, 1)};
        for (const auto& t : eq_.terms)
            for (const auto& f : t.factors) {
                const auto& s = seq(f.base, q);
                size_t i = vindex_.at(f.var);
                vd.lam[i] = std::max(vd.lam[i], s.lambda());
                vd.per[i] = lcm_checked_u64(vd.per[i], s.period());
            }
        return vd;
    }

    struct SeedPlan {
        std::vector<std::vector<SurvivorCoord>> opts;  // per variable
        std::vector<u64> floors;
        std::vector<u64> lattice;
    };

    SeedPlan seed_options(u64 q) const {
        VarData vd = var_data(q);
        size_t nv = eq_.variables.size();
        SeedPlan plan;
        plan.opts.resize(nv);
        plan.floors.assign(nv, 0);
        plan.lattice.assign(nv, 1);
        for (size_t i = 0; i < nv; ++i) {
            const std::string& v = eq_.variables[i];
            if (cons_.pinned(v)) {
                const VarConstraint* c = cons_.find(v);
                u64 lo = c->fixed ? *c->fixed : cons_.lower_of(v);
                u64 hi = c->fixed ? *c->fixed : *c->upper;
                for (u64 t = lo; t <= hi; ++t)
                    if (cons_.admits(v, t)) plan.opts[i].push_back({true, t});
            } else {
                u64 L = lcm_checked_u64(vd.per[i], cons_.congruence_lcm(v));
                u64 lb = cons_.lower_of(v);
                u64 fl = std::max(vd.lam[i], lb > 0 ? lb - 1 : 0);
                for (u64 t = 1; t <= fl; ++t)
                    if (cons_.admits(v, t)) plan.opts[i].push_back({true, t});
                for (u64 r = 0; r < L; ++r)
                    if (cons_.class_compatible(v, r, L)) plan.opts[i].push_back({false, r});
                plan.floors[i] = fl;
                plan.lattice[i] = L;
            }
        }
        return plan;
    }

    // Signed sum of the equation's terms mod q for a mixed option tuple.
    // Class coordinates denote exponents t > floor >= preperiod with
    // t == value (mod lattice); any representative in the cycle regime gives
    // the same residue because the lattice is a multiple of every cycle length.
    u64 tuple_residue(const OptTuple& tup, u64 q) const {
        u64 s = 0;
        for (const auto& term : eq_.terms) {
            long long cm = term.coeff % static_cast<long long>(q);
            u64 tv = static_cast<u64>(cm < 0 ? cm + static_cast<long long>(q) : cm);
            for (const auto& f : term.factors) {
                const auto& sq = seq(f.base, q);
                const SurvivorCoord& c = tup[vindex_.at(f.var)];
                u64 r;
                if (c.is_explicit) {
                    r = sq.at(c.value);
                } else {
                    u64 L = sq.period();
                    long long d = static_cast<long long>(c.value) -
                                  static_cast<long long>(sq.lambda()) - 1;
                    u64 off = static_cast<u64>(((d % static_cast<long long>(L)) +
                                                static_cast<long long>(L)) %
                                               static_cast<long long>(L));
                    r = sq.cycle[off];
                }
                tv = mulmod(tv, r, q);
            }
            s = (s + tv) % q;
        }
        return s;
    }

    void charge(u64 batch) {
        used_ += batch;
        if (used_ < batch) used_ = std::numeric_limits<u64>::max();  // saturate
        if (used_ > opts_.budget) throw BudgetExceeded(opts_.budget, used_);
    }

    // Evaluates a batch of candidate tuples (already charged to the budget)
    // across the configured threads; returns the survivors as a set.
    template <typename MakeTuple>
    std::set<OptTuple> evaluate_batch(u64 total, u64 q, MakeTuple make) {
        int nthreads = std::max(1, opts_.threads);
        if (total < 2048) nthreads = 1;
        std::vector<std::set<OptTuple>> parts(nthreads);
        auto work = [&](int who) {
            u64 lo = total * who / nthreads, hi = total * (who + 1) / nthreads;
            for (u64 idx = lo; idx < hi; ++idx) {
                OptTuple tup = make(idx);
                if (tuple_residue(tup, q) == 0) parts[who].insert(std::move(tup));
            }
        };
        if (nthreads == 1) {
            work(0);
        } else {
            std::vector<std::thread> pool;
            for (int i = 0; i < nthreads; ++i) pool.emplace_back(work, i);
            for (auto& th : pool) th.join();
        }
        std::set<OptTuple> out;
        for (auto& p : parts) out.merge(p);
        return out;
    }

    SieveOutcome outcome(const std::set<OptTuple>& S, const std::vector<u64>& lattice,
                         const std::vector<u64>& floors) const;

    const ExpEquation& eq_;
    FactoredModulus fm_;
    const ConstraintSet& cons_;
    SieveOptions opts_;
    std::vector<u64> qs_;
    std::map<std::string, size_t> vindex_;
    std::map<std::pair<u64, u64>, EventuallyPeriodicSequence> seqs_;
    u64 used_ = 0;
};

SieveOutcome Engine::run() {
    size_t nv = eq_.variables.size();

    // Seed at the prime power with the fewest option combinations.
    u64 best_cost = 0;
    u64 q0 = 0;
    SeedPlan plan;
    for (u64 q : qs_) {
        SeedPlan p = seed_options(q);
        u64 cost = 1;
        for (size_t i = 0; i < nv; ++i) cost = sat_mul(cost, std::max<u64>(1, p.opts[i].size()));
        if (q0 == 0 || cost < best_cost) {
            best_cost = cost;
            q0 = q;
            plan = std::move(p);
        }
    }

    u64 total = 1;
    for (size_t i = 0; i < nv; ++i) total = sat_mul(total, plan.opts[i].size());
    charge(total);
    std::set<OptTuple> S = evaluate_batch(total, q0, [&](u64 idx) {
        OptTuple tup(nv);
        for (size_t i = nv; i-- > 0;) {
            u64 sz = plan.opts[i].size();
            tup[i] = plan.opts[i][idx % sz];
            idx /= sz;
        }
        return tup;
    });

    std::vector<u64> lattice = plan.lattice, floors = plan.floors;
    std::vector<u64> rest;
    for (u64 q : qs_)
        if (q != q0) rest.push_back(q);

    while (!rest.empty()) {
        // Refine with the prime power of least lattice-lift cost.
        auto lift_cost = [&](u64 q) {
            VarData vd = var_data(q);
            u64 p = 1;
            for (size_t i = 0; i < nv; ++i)
                p = sat_mul(p, lcm_u64(lattice[i], vd.per[i]) / lattice[i]);
            return p;
        };
        std::sort(rest.begin(), rest.end(), [&](u64 a, u64 b) {
            u64 ca = lift_cost(a), cb = lift_cost(b);
            return ca != cb ? ca < cb : a < b;
        });
        u64 q = rest.front();
        rest.erase(rest.begin());

        VarData vd = var_data(q);
        std::vector<u64> newlat(nv), newfl(nv);
        for (size_t i = 0; i < nv; ++i) {
            newlat[i] = lcm_checked_u64(lattice[i], vd.per[i]);
            newfl[i] = std::max(floors[i], vd.lam[i]);
        }

        // Build each survivor's per-variable lift options first so the budget
        // charge precedes any evaluation (deterministic regardless of threads).
        std::vector<std::vector<std::vector<SurvivorCoord>>> lifted;
        lifted.reserve(S.size());
        u64 batch = 0;
        for (const auto& tup : S) {
            std::vector<std::vector<SurvivorCoord>> per_var(nv);
            for (size_t i = 0; i < nv; ++i) {
                const std::string& v = eq_.variables[i];
                if (tup[i].is_explicit) {
                    per_var[i].push_back(tup[i]);
                    continue;
                }
                for (u64 k = 0; k < newlat[i] / lattice[i]; ++k) {
                    u64 r2 = tup[i].value + k * lattice[i];
                    // Members of the old class below the new floor become
                    // explicit candidates; the rest stay one lifted class.
                    for (u64 t = floors[i] + 1; t <= newfl[i]; ++t)
                        if (t % newlat[i] == r2 % newlat[i] && cons_.admits(v, t))
                            per_var[i].push_back({true, t});
                    per_var[i].push_back({false, r2 % newlat[i]});
                }
            }
            u64 prod = 1;
            for (size_t i = 0; i < nv; ++i) prod = sat_mul(prod, per_var[i].size());
            batch += prod;
            if (batch < prod) batch = std::numeric_limits<u64>::max();
            lifted.push_back(std::move(per_var));
        }
        charge(batch);

        std::set<OptTuple> S2;
        std::vector<const std::vector<std::vector<SurvivorCoord>>*> parents;
        for (const auto& pv : lifted) parents.push_back(&pv);
        // Flatten (parent, combination) into one index space for threading.
        std::vector<u64> offsets(parents.size() + 1, 0);
        for (size_t pi = 0; pi < parents.size(); ++pi) {
            u64 prod = 1;
            for (const auto& o : *parents[pi]) prod = sat_mul(prod, o.size());
            offsets[pi + 1] = offsets[pi] + prod;
        }
        S2 = evaluate_batch(offsets.back(), q, [&](u64 idx) {
            size_t pi = std::upper_bound(offsets.begin(), offsets.end(), idx) -
                        offsets.begin() - 1;
            u64 rem = idx - offsets[pi];
            const auto& pv = *parents[pi];
            OptTuple tup(nv);
            for (size_t i = nv; i-- > 0;) {
                u64 sz = pv[i].size();
                tup[i] = pv[i][rem % sz];
                rem /= sz;
            }
            return tup;
        });
        S = std::move(S2);
        lattice = std::move(newlat);
        floors = std::move(newfl);
    }

    if (opts_.evaluations) *opts_.evaluations = used_;
    return outcome(S, lattice, floors);
}

SieveOutcome Engine::outcome(const std::set<OptTuple>& S, const std::vector<u64>& lattice,
                             const std::vector<u64>& floors) const {
    if (S.empty()) return NoSolutionOutcome{fm_};
    size_t nv = eq_.variables.size();
    std::vector<bool> pinned(nv);
    for (size_t i = 0; i < nv; ++i) pinned[i] = cons_.pinned(eq_.variables[i]);

    ResidueClassSystem sys;
    sys.variables = eq_.variables;
    sys.moduli = lattice;
    for (size_t i = 0; i < nv; ++i)
        if (floors[i] > 0) sys.floors[eq_.variables[i]] = floors[i];

    for (const auto& tup : S) {
        bool mixed = false;
        for (size_t i = 0; i < nv; ++i)
            if (tup[i].is_explicit && !pinned[i]) mixed = true;
        if (mixed) {
            for (size_t i = 0; i < nv; ++i)
                if (tup[i].is_explicit && !pinned[i])
                    sys.small_values[eq_.variables[i]].insert(tup[i].value);
        } else {
            std::vector<u64> cls(nv);
            for (size_t i = 0; i < nv; ++i)
                cls[i] = tup[i].is_explicit ? tup[i].value % lattice[i] : tup[i].value;
            sys.classes.insert(cls);
        }
        bool any_explicit = false;
        for (size_t i = 0; i < nv; ++i)
            if (tup[i].is_explicit) any_explicit = true;
        if (any_explicit) sys.mixed_survivors.insert(tup);
    }

    if (sys.classes.empty()) {
        // A variable explicit in every survivor is bounded by its max value.
        std::vector<std::pair<u64, std::string>> cands;
        for (size_t i = 0; i < nv; ++i) {
            if (pinned[i]) continue;
            u64 mx = 0;
            bool all_explicit = true;
            for (const auto& tup : S) {
                if (!tup[i].is_explicit) {
                    all_explicit = false;
                    break;
                }
                mx = std::max(mx, tup[i].value);
            }
            if (all_explicit) cands.push_back({mx, eq_.variables[i]});
        }
        if (!cands.empty()) {
            std::sort(cands.begin(), cands.end());
            return ExponentBoundOutcome{cands.front().second, cands.front().first, fm_};
        }
    }
    return SurvivorsOutcome{std::move(sys), fm_};
}

}  // namespace

SieveOutcome sieve(const ExpEquation& eq, const FactoredModulus& modulus,
                   const ConstraintSet& constraints, const SieveOptions& opts) {
    constraints.validate();
    return Engine(eq, modulus, constraints, opts).run();
}

SieveOutcome sieve(const ExpEquation& eq, u64 modulus, const ConstraintSet& constraints,
                   const SieveOptions& opts) {
    return sieve(eq, FactoredModulus::of(modulus), constraints, opts);
}

u64 estimate_sieve_cost(const ExpEquation& eq, const FactoredModulus& modulus,
                        const ConstraintSet& constraints) {
    std::vector<u64> qs = modulus.prime_powers();
    u64 cost = 1;
    for (const auto& v : eq.variables) {
        if (constraints.pinned(v)) {
            const VarConstraint* c = constraints.find(v);
            u64 lo = c->fixed ? *c->fixed : constraints.lower_of(v);
            u64 hi = c->fixed ? *c->fixed : *c->upper;
            cost = sat_mul(cost, hi >= lo ? hi - lo + 1 : 1);
            continue;
        }
        u64 lam = 0, L = constraints.congruence_lcm(v);
        bool saturated = false;
        for (const auto& t : eq.terms)
            for (const auto& f : t.factors) {
                if (f.var != v) continue;
                for (u64 q : qs) {
                    if (q > kMaxPrimePower)
                        throw std::invalid_argument("prime power " + std::to_string(q) +
                                                    " exceeds the supported limit 2^20");
                    auto s = residue_sequence(f.base, q);
                    lam = std::max(lam, s.lambda());
                    try {
                        L = lcm_checked_u64(L, s.period());
                    } catch (const std::overflow_error&) {
                        saturated = true;
                    }
                }
            }
        u64 fl = std::max(lam, constraints.lower_of(v) - 1);
        cost = saturated ? std::numeric_limits<u64>::max() : sat_mul(cost, fl + L);
    }
    return cost;
}

namespace {

FactoredModulus merge_moduli(const std::vector<FactoredModulus>& mods, size_t upto) {
    std::map<u64, int> exps;
    for (size_t i = 0; i < upto; ++i)
        for (const auto& [p, k] : mods[i].factors)
            exps[p] = std::max(exps[p], k);
    FactoredModulus out;
    out.value = 1;
    for (const auto& [p, k] : exps) {
        out.factors.push_back({p, k});
        for (int i = 0; i < k; ++i) out.value = sat_mul(out.value, p);
    }
    return out;
}

ResidueClassSystem empty_system(const std::vector<std::string>& vars) {
    ResidueClassSystem s;
    s.variables = vars;
    s.moduli.assign(vars.size(), 1);
    return s;
}

}  // namespace

ChainResult sieve_chain(const ExpEquation& eq, const std::vector<FactoredModulus>& moduli,
                        const ConstraintSet& constraints, const SieveOptions& opts) {
    if (moduli.empty()) throw std::invalid_argument("chain needs at least one modulus");
    ChainResult res;
    std::optional<ResidueClassSystem> running;
    for (const auto& v : eq.variables) res.escapes[v];  // stable key set

    for (size_t step = 0; step < moduli.size(); ++step) {
        ConstraintSet c2 = constraints;
        if (running) {
            // Floors established so far mean the class description only covers
            // exponents above them; push that down as lower bounds.
            for (const auto& v : eq.variables) {
                u64 fl = running->floor_of(v);
                if (fl > 0) c2.set_lower(v, std::max(c2.lower_of(v), fl + 1));
            }
        }
        SieveOutcome out = sieve(eq, moduli[step], c2, opts);
        res.steps.push_back({moduli[step], c2, out});

        ResidueClassSystem sysM = empty_system(eq.variables);
        if (const auto* eb = std::get_if<ExponentBoundOutcome>(&out)) {
            res.escapes[eb->variable].insert(eb->bound);
        } else if (const auto* sv = std::get_if<SurvivorsOutcome>(&out)) {
            for (const auto& [v, vals] : sv->system.small_values)
                res.escapes[v].insert(vals.begin(), vals.end());
            sysM = sv->system;
            sysM.small_values.clear();
            sysM.mixed_survivors.clear();
        }
        running = running ? intersect(*running, sysM) : sysM;

        if (running->classes.empty()) {
            FactoredModulus merged = merge_moduli(moduli, step + 1);
            std::map<std::string, std::set<u64>> esc;
            for (const auto& [v, vals] : res.escapes)
                if (!vals.empty()) esc[v] = vals;
            if (esc.empty()) {
                res.outcome = NoSolutionOutcome{merged};
            } else if (esc.size() == 1) {
                const auto& [v, vals] = *esc.begin();
                res.outcome = ExponentBoundOutcome{v, *vals.rbegin(), merged};
            } else {
                ResidueClassSystem sys = *running;
                sys.small_values = esc;
                res.outcome = SurvivorsOutcome{std::move(sys), merged};
            }
            return res;
        }
    }
    FactoredModulus merged = merge_moduli(moduli, moduli.size());
    ResidueClassSystem sys = *running;
    for (const auto& [v, vals] : res.escapes)
        if (!vals.empty()) sys.small_values[v].insert(vals.begin(), vals.end());
    res.outcome = SurvivorsOutcome{std::move(sys), merged};
    return res;
}

std::vector<std::pair<FactoredModulus, SieveOutcome>> auto_modulus_search(
    const ExpEquation& eq, const std::vector<u64>& primes, const std::map<u64, int>& caps,
    u64 enumeration_budget, const ConstraintSet& constraints, const SieveOptions& opts) {
    std::vector<u64> ps = primes;
    std::sort(ps.begin(), ps.end());
    ps.erase(std::unique(ps.begin(), ps.end()), ps.end());
    for (u64 p : ps)
        if (!is_prime_u64(p))
            throw std::invalid_argument(std::to_string(p) + " is not prime");

    // All nonempty products of p^k with 1 <= k <= cap(p).
    std::vector<FactoredModulus> cands;
    std::vector<std::pair<u64, int>> chosen;
    auto rec = [&](auto&& self, size_t i, u64 value) -> void {
        if (i == ps.size()) {
            if (!chosen.empty()) {
                FactoredModulus fm;
                fm.value = value;
                fm.factors = chosen;
                cands.push_back(std::move(fm));
            }
            return;
        }
        self(self, i + 1, value);
        auto it = caps.find(ps[i]);
        int cap = it == caps.end() ? 1 : it->second;
        u64 v = value;
        for (int k = 1; k <= cap; ++k) {
            v = sat_mul(v, ps[i]);
            if (v == std::numeric_limits<u64>::max()) break;
            chosen.push_back({ps[i], k});
            self(self, i + 1, v);
            chosen.pop_back();
        }
    };
    rec(rec, 0, 1);

    std::vector<std::pair<u64, size_t>> ranked;  // (estimate, index)
    for (size_t i = 0; i < cands.size(); ++i)
        ranked.push_back({estimate_sieve_cost(eq, cands[i], constraints), i});
    std::sort(ranked.begin(), ranked.end(), [&](const auto& a, const auto& b) {
        return a.first != b.first ? a.first < b.first
                                  : cands[a.second].value < cands[b.second].value;
    });

    std::vector<std::pair<FactoredModulus, SieveOutcome>> found;
    u64 remaining = enumeration_budget;
    for (const auto& [est, idx] : ranked) {
        if (est > remaining) continue;
        SieveOptions o = opts;
        o.budget = std::min(opts.budget, remaining);
        u64 evals = 0;
        o.evaluations = &evals;
        SieveOutcome out;
        try {
            out = sieve(eq, cands[idx], constraints, o);
        } catch (const BudgetExceeded&) {
            remaining = 0;
            continue;
        }
        remaining = evals >= remaining ? 0 : remaining - evals;
        if (!std::holds_alternative<SurvivorsOutcome>(out)) found.push_back({cands[idx], out});
        if (remaining == 0) break;
    }
    return found;
}

}  // namespace expsieve
