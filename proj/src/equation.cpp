#include "expsieve/equation.hpp"

#include <algorithm>
#include <atomic>
#include <cctype>
#include <stdexcept>
#include <thread>

namespace expsieve {

ExpEquation ExpEquation::from_terms(std::vector<Term> terms) {
    if (terms.size() < 3)
        throw std::invalid_argument("equation needs at least 3 terms, got " +
                                    std::to_string(terms.size()));
    ExpEquation eq;
    for (const auto& t : terms) {
        if (t.coeff == 0) throw std::invalid_argument("zero coefficient");
        if (t.factors.empty())
            throw std::invalid_argument("constant term (every term needs a base^var factor)");
        for (const auto& f : t.factors) {
            if (f.base <= 1)
                throw std::invalid_argument("base must exceed 1, got " + std::to_string(f.base));
            if (f.var.empty()) throw std::invalid_argument("empty variable name");
            if (std::find(eq.variables.begin(), eq.variables.end(), f.var) == eq.variables.end())
                eq.variables.push_back(f.var);
        }
    }
    eq.terms = std::move(terms);
    return eq;
}

namespace {

std::string render_term(const Term& t, bool negate) {
    long long c = negate ? -t.coeff : t.coeff;
    std::string out;
    if (c != 1) out += std::to_string(c) + "*";
    for (size_t i = 0; i < t.factors.size(); ++i) {
        if (i) out += "*";
        out += std::to_string(t.factors[i].base) + "^" + t.factors[i].var;
    }
    return out;
}

}  // namespace

std::string ExpEquation::render() const {
    std::string lhs, rhs;
    for (const auto& t : terms) {
        if (t.coeff > 0) {
            if (!lhs.empty()) lhs += "+";
            lhs += render_term(t, false);
        } else {
            if (!rhs.empty()) rhs += "+";
            rhs += render_term(t, true);
        }
    }
    if (lhs.empty() || rhs.empty())
        throw std::domain_error("cannot render: all terms share one sign");
    return lhs + "=" + rhs;
}

nlohmann::ordered_json ExpEquation::to_json() const {
    nlohmann::ordered_json jt = nlohmann::ordered_json::array();
    for (const auto& t : terms) {
        nlohmann::ordered_json jf = nlohmann::ordered_json::array();
        for (const auto& f : t.factors) jf.push_back({{"base", f.base}, {"var", f.var}});
        jt.push_back({{"coeff", t.coeff}, {"factors", std::move(jf)}});
    }
    return {{"terms", std::move(jt)}};
}

ExpEquation ExpEquation::from_json(const nlohmann::ordered_json& j) {
    std::vector<Term> terms;
    for (const auto& jt : j.at("terms")) {
        Term t;
        t.coeff = jt.at("coeff").get<long long>();
        for (const auto& jf : jt.at("factors"))
            t.factors.push_back({jf.at("base").get<long long>(), jf.at("var").get<std::string>()});
        terms.push_back(std::move(t));
    }
    return from_terms(std::move(terms));
}

namespace {

struct Token {
    enum Kind { Number, Ident, Plus, Star, Caret, Equals, End } kind;
    std::string text;
    size_t pos;
};

std::vector<Token> tokenize(const std::string& s) {
    std::vector<Token> toks;
    size_t i = 0;
    while (i < s.size()) {
        char c = s[i];
        if (std::isspace(static_cast<unsigned char>(c))) {
            ++i;
        } else if (std::isdigit(static_cast<unsigned char>(c))) {
            size_t j = i;
            while (j < s.size() && std::isdigit(static_cast<unsigned char>(s[j]))) ++j;
            toks.push_back({Token::Number, s.substr(i, j - i), i});
            i = j;
        } else if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
            size_t j = i;
            while (j < s.size() &&
                   (std::isalnum(static_cast<unsigned char>(s[j])) || s[j] == '_'))
                ++j;
            toks.push_back({Token::Ident, s.substr(i, j - i), i});
            i = j;
        } else if (c == '+') {
            toks.push_back({Token::Plus, "+", i++});
        } else if (c == '*') {
            toks.push_back({Token::Star, "*", i++});
        } else if (c == '^') {
            toks.push_back({Token::Caret, "^", i++});
        } else if (c == '=') {
            toks.push_back({Token::Equals, "=", i++});
        } else {
            throw ParseError(std::string("unexpected character '") + c + "'", i);
        }
    }
    toks.push_back({Token::End, "", s.size()});
    return toks;
}

class Parser {
  public:
    explicit Parser(const std::string& text) : toks_(tokenize(text)) {}

    std::vector<Term> parse() {
        std::vector<Term> terms = parse_side(false);
        expect(Token::Equals, "'='");
        std::vector<Term> rhs = parse_side(true);
        if (toks_[i_].kind != Token::End)
            throw ParseError("unexpected trailing input", toks_[i_].pos);
        terms.insert(terms.end(), rhs.begin(), rhs.end());
        return terms;
    }

  private:
    std::vector<Term> parse_side(bool negate) {
        std::vector<Term> out;
        out.push_back(parse_term(negate));
        while (toks_[i_].kind == Token::Plus) {
            ++i_;
            out.push_back(parse_term(negate));
        }
        return out;
    }

    Term parse_term(bool negate) {
        Term t;
        t.coeff = 1;
        bool saw_coeff = false, saw_factor = false;
        for (;;) {
            if (toks_[i_].kind != Token::Number)
                throw ParseError("expected a number", toks_[i_].pos);
            size_t num_pos = toks_[i_].pos;
            long long value = parse_ll(toks_[i_]);
            ++i_;
            if (toks_[i_].kind == Token::Caret) {
                ++i_;
                if (toks_[i_].kind != Token::Ident)
                    throw ParseError("expected a variable name after '^'", toks_[i_].pos);
                if (value <= 1)
                    throw std::invalid_argument("base must exceed 1, got " +
                                                std::to_string(value));
                t.factors.push_back({value, toks_[i_].text});
                ++i_;
                saw_factor = true;
            } else {
                if (saw_coeff || saw_factor)
                    throw ParseError("bare number only allowed as leading coefficient", num_pos);
                if (value == 0) throw std::invalid_argument("zero coefficient");
                t.coeff = value;
                saw_coeff = true;
            }
            if (toks_[i_].kind == Token::Star) {
                ++i_;
                continue;
            }
            break;
        }
        if (!saw_factor)
            throw ParseError("term has no base^var factor", toks_[i_].pos);
        if (negate) t.coeff = -t.coeff;
        return t;
    }

    long long parse_ll(const Token& tok) {
        try {
            return std::stoll(tok.text);
        } catch (const std::out_of_range&) {
            throw ParseError("number out of range", tok.pos);
        }
    }

    void expect(Token::Kind k, const char* what) {
        if (toks_[i_].kind != k)
            throw ParseError(std::string("expected ") + what, toks_[i_].pos);
        ++i_;
    }

    std::vector<Token> toks_;
    size_t i_ = 0;
};

}  // namespace

ExpEquation parse_equation(const std::string& text) {
    return ExpEquation::from_terms(Parser(text).parse());
}

mpz_class evaluate(const ExpEquation& eq, const Assignment& asg) {
    mpz_class total = 0, term, pw;
    for (const auto& t : eq.terms) {
        term = static_cast<long>(t.coeff);
        for (const auto& f : t.factors) {
            auto it = asg.find(f.var);
            if (it == asg.end())
                throw std::invalid_argument("assignment missing variable '" + f.var + "'");
            mpz_class base = static_cast<long>(f.base);
            mpz_pow_ui(pw.get_mpz_t(), base.get_mpz_t(), it->second);
            term *= pw;
        }
        total += term;
    }
    return total;
}

Ival FamilyInstance::mu_x(int prec) const { return log_of(d, prec) / log_of(a, prec); }
Ival FamilyInstance::mu_y(int prec) const { return log_of(d, prec) / log_of(b, prec); }
Ival FamilyInstance::mu_z(int prec) const { return log_of(d, prec) / log_of(c, prec); }

std::pair<FamilyInstance, ExpEquation> family_equation(int e) {
    if (e < 1 || e > 31)
        throw std::invalid_argument("family parameter must be in [1, 31], got " +
                                    std::to_string(e));
    FamilyInstance inst;
    inst.e = e;
    inst.N = u64{1} << (2 * e);
    inst.a = inst.N - 1;
    inst.b = inst.N;
    inst.c = inst.N + 1;
    inst.d = inst.N + 2;
    std::vector<Term> terms = {
        {1, {{static_cast<long long>(inst.a), "x"}}},
        {1, {{static_cast<long long>(inst.b), "y"}}},
        {1, {{static_cast<long long>(inst.c), "z"}}},
        {-1, {{static_cast<long long>(inst.d), "w"}}},
    };
    return {inst, ExpEquation::from_terms(std::move(terms))};
}

namespace {

// Exhaustive enumeration state: per-variable exponent ranges, per-term power
// tables, and suffix products of each term's extreme values for pruning.
struct BruteState {
    const ExpEquation& eq;
    const ConstraintSet& cons;
    std::vector<u64> lo, hi;  // per variable index
    // pow[t][f] = table of base^k for term t, factor f, k in [0, hi[var]].
    std::vector<std::vector<std::vector<mpz_class>>> pow;
    std::vector<std::vector<size_t>> fvar;  // pow index -> variable index
    // suffix_min/max[t][d] = prod over factors of term t whose variable index
    // >= d of base^(lo/hi of that variable).
    std::vector<std::vector<mpz_class>> suffix_min, suffix_max;
};

void brute_rec(const BruteState& st, size_t depth, std::vector<u64>& vals,
               std::vector<mpz_class>& partial, std::vector<Assignment>& out) {
    size_t nv = st.eq.variables.size();
    if (depth == nv) {
        mpz_class total = 0;
        for (const auto& p : partial) total += p;
        if (total == 0) {
            Assignment a;
            for (size_t i = 0; i < nv; ++i) a[st.eq.variables[i]] = vals[i];
            out.push_back(std::move(a));
        }
        return;
    }
    // Prune: the achievable sum over the remaining free variables must span 0.
    mpz_class smin = 0, smax = 0;
    for (size_t t = 0; t < st.eq.terms.size(); ++t) {
        if (sgn(partial[t]) >= 0) {
            smin += partial[t] * st.suffix_min[t][depth];
            smax += partial[t] * st.suffix_max[t][depth];
        } else {
            smin += partial[t] * st.suffix_max[t][depth];
            smax += partial[t] * st.suffix_min[t][depth];
        }
    }
    if (smin > 0 || smax < 0) return;

    const std::string& var = st.eq.variables[depth];
    for (u64 v = st.lo[depth]; v <= st.hi[depth]; ++v) {
        if (!st.cons.admits(var, v)) continue;
        std::vector<mpz_class> next = partial;
        for (size_t t = 0; t < st.eq.terms.size(); ++t)
            for (size_t f = 0; f < st.fvar[t].size(); ++f)
                if (st.fvar[t][f] == depth) next[t] *= st.pow[t][f][v];
        vals[depth] = v;
        brute_rec(st, depth + 1, vals, next, out);
    }
}

}  // namespace

std::vector<Assignment> brute_force_solutions(const ExpEquation& eq,
                                              const std::map<std::string, u64>& bounds,
                                              const ConstraintSet& constraints, int threads) {
    size_t nv = eq.variables.size();
    BruteState st{eq, constraints, {}, {}, {}, {}, {}, {}};
    st.lo.resize(nv);
    st.hi.resize(nv);
    for (size_t i = 0; i < nv; ++i) {
        auto it = bounds.find(eq.variables[i]);
        if (it == bounds.end())
            throw std::invalid_argument("missing bound for variable '" + eq.variables[i] + "'");
        st.lo[i] = 1;
        st.hi[i] = it->second;
        if (const VarConstraint* vc = constraints.find(eq.variables[i])) {
            if (vc->fixed) {
                st.lo[i] = std::max(st.lo[i], *vc->fixed);
                st.hi[i] = std::min(st.hi[i], *vc->fixed);
            }
            if (vc->lower) st.lo[i] = std::max(st.lo[i], *vc->lower);
            if (vc->upper) st.hi[i] = std::min(st.hi[i], *vc->upper);
        }
        if (st.lo[i] > st.hi[i]) return {};
    }

    st.pow.resize(eq.terms.size());
    st.fvar.resize(eq.terms.size());
    for (size_t t = 0; t < eq.terms.size(); ++t) {
        for (const auto& f : eq.terms[t].factors) {
            size_t vi = std::find(eq.variables.begin(), eq.variables.end(), f.var) -
                        eq.variables.begin();
            st.fvar[t].push_back(vi);
            std::vector<mpz_class> table(st.hi[vi] + 1);
            table[0] = 1;
            for (u64 k = 1; k <= st.hi[vi]; ++k)
                table[k] = table[k - 1] * static_cast<long>(f.base);
            st.pow[t].push_back(std::move(table));
        }
    }
    st.suffix_min.assign(eq.terms.size(), std::vector<mpz_class>(nv + 1, 1));
    st.suffix_max.assign(eq.terms.size(), std::vector<mpz_class>(nv + 1, 1));
    for (size_t t = 0; t < eq.terms.size(); ++t) {
        for (size_t d = nv; d-- > 0;) {
            st.suffix_min[t][d] = st.suffix_min[t][d + 1];
            st.suffix_max[t][d] = st.suffix_max[t][d + 1];
            for (size_t f = 0; f < st.fvar[t].size(); ++f) {
                if (st.fvar[t][f] != d) continue;
                st.suffix_min[t][d] *= st.pow[t][f][st.lo[d]];
                st.suffix_max[t][d] *= st.pow[t][f][st.hi[d]];
            }
        }
    }

    std::vector<mpz_class> initial(eq.terms.size());
    for (size_t t = 0; t < eq.terms.size(); ++t)
        initial[t] = static_cast<long>(eq.terms[t].coeff);

    // Collect first-variable values admitted by the constraints.
    std::vector<u64> firsts;
    for (u64 v = st.lo[0]; v <= st.hi[0]; ++v)
        if (constraints.admits(eq.variables[0], v)) firsts.push_back(v);

    auto run_first = [&](u64 v, std::vector<Assignment>& out) {
        std::vector<mpz_class> partial = initial;
        for (size_t t = 0; t < eq.terms.size(); ++t)
            for (size_t f = 0; f < st.fvar[t].size(); ++f)
                if (st.fvar[t][f] == 0) partial[t] *= st.pow[t][f][v];
        std::vector<u64> vals(nv);
        vals[0] = v;
        brute_rec(st, 1, vals, partial, out);
    };

    std::vector<std::vector<Assignment>> buckets(firsts.size());
    if (threads <= 1 || firsts.size() <= 1) {
        for (size_t i = 0; i < firsts.size(); ++i) run_first(firsts[i], buckets[i]);
    } else {
        std::atomic<size_t> next{0};
        auto worker = [&] {
            for (;;) {
                size_t i = next.fetch_add(1);
                if (i >= firsts.size()) return;
                run_first(firsts[i], buckets[i]);
            }
        };
        std::vector<std::thread> pool;
        int n = std::min<int>(threads, static_cast<int>(firsts.size()));
        for (int i = 0; i < n; ++i) pool.emplace_back(worker);
        for (auto& th : pool) th.join();
    }
    std::vector<Assignment> out;
    for (auto& b : buckets) out.insert(out.end(), b.begin(), b.end());
    return out;
}

}  // namespace expsieve
