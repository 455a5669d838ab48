#include "expsieve/interval.hpp"

#include <algorithm>
#include <cstdio>
#include <stdexcept>
#include <vector>

namespace expsieve {

Ival::Ival(long v, int prec) : Ival(prec, true) {
    mpfr_set_si(lo_, v, MPFR_RNDD);
    mpfr_set_si(hi_, v, MPFR_RNDU);
}

Ival::Ival(u64 v, int prec) : Ival(prec, true) {
    mpfr_set_uj(lo_, v, MPFR_RNDD);
    mpfr_set_uj(hi_, v, MPFR_RNDU);
}

Ival::Ival(const mpz_class& v, int prec) : Ival(prec, true) {
    mpfr_set_z(lo_, v.get_mpz_t(), MPFR_RNDD);
    mpfr_set_z(hi_, v.get_mpz_t(), MPFR_RNDU);
}

Ival::Ival(const mpq_class& v, int prec) : Ival(prec, true) {
    mpfr_set_q(lo_, v.get_mpq_t(), MPFR_RNDD);
    mpfr_set_q(hi_, v.get_mpq_t(), MPFR_RNDU);
}

Ival::Ival(const Ival& o) : Ival(o.prec_, true) {
    mpfr_set(lo_, o.lo_, MPFR_RNDD);
    mpfr_set(hi_, o.hi_, MPFR_RNDU);
}

Ival::Ival(Ival&& o) noexcept : prec_(o.prec_) {
    mpfr_init2(lo_, prec_);
    mpfr_init2(hi_, prec_);
    mpfr_swap(lo_, o.lo_);
    mpfr_swap(hi_, o.hi_);
}

Ival& Ival::operator=(const Ival& o) {
    if (this != &o) {
        mpfr_set_prec(lo_, o.prec_);
        mpfr_set_prec(hi_, o.prec_);
        prec_ = o.prec_;
        mpfr_set(lo_, o.lo_, MPFR_RNDD);
        mpfr_set(hi_, o.hi_, MPFR_RNDU);
    }
    return *this;
}

Ival& Ival::operator=(Ival&& o) noexcept {
    if (this != &o) {
        mpfr_swap(lo_, o.lo_);
        mpfr_swap(hi_, o.hi_);
        std::swap(prec_, o.prec_);
    }
    return *this;
}

Ival::~Ival() {
    mpfr_clear(lo_);
    mpfr_clear(hi_);
}

int Ival::join_prec(const Ival& a, const Ival& b) { return std::max(a.prec_, b.prec_); }

Ival Ival::operator+(const Ival& o) const {
    Ival r(join_prec(*this, o), true);
    mpfr_add(r.lo_, lo_, o.lo_, MPFR_RNDD);
    mpfr_add(r.hi_, hi_, o.hi_, MPFR_RNDU);
    return r;
}

Ival Ival::operator-(const Ival& o) const {
    Ival r(join_prec(*this, o), true);
    mpfr_sub(r.lo_, lo_, o.hi_, MPFR_RNDD);
    mpfr_sub(r.hi_, hi_, o.lo_, MPFR_RNDU);
    return r;
}

Ival Ival::operator*(const Ival& o) const {
    Ival r(join_prec(*this, o), true);
    mpfr_t cand, best_lo, best_hi;
    mpfr_init2(cand, r.prec_);
    mpfr_init2(best_lo, r.prec_);
    mpfr_init2(best_hi, r.prec_);
    const mpfr_srcptr as[2] = {lo_, hi_};
    const mpfr_srcptr bs[2] = {o.lo_, o.hi_};
    bool first = true;
    for (auto a : as)
        for (auto b : bs) {
            mpfr_mul(cand, a, b, MPFR_RNDD);
            if (first || mpfr_cmp(cand, best_lo) < 0) mpfr_set(best_lo, cand, MPFR_RNDD);
            mpfr_mul(cand, a, b, MPFR_RNDU);
            if (first || mpfr_cmp(cand, best_hi) > 0) mpfr_set(best_hi, cand, MPFR_RNDU);
            first = false;
        }
    mpfr_set(r.lo_, best_lo, MPFR_RNDD);
    mpfr_set(r.hi_, best_hi, MPFR_RNDU);
    mpfr_clear(cand);
    mpfr_clear(best_lo);
    mpfr_clear(best_hi);
    return r;
}

Ival Ival::operator/(const Ival& o) const {
    if (mpfr_sgn(o.lo_) <= 0 && mpfr_sgn(o.hi_) >= 0)
        throw std::domain_error("Ival division: divisor interval contains zero");
    Ival r(join_prec(*this, o), true);
    mpfr_t cand, best_lo, best_hi;
    mpfr_init2(cand, r.prec_);
    mpfr_init2(best_lo, r.prec_);
    mpfr_init2(best_hi, r.prec_);
    const mpfr_srcptr as[2] = {lo_, hi_};
    const mpfr_srcptr bs[2] = {o.lo_, o.hi_};
    bool first = true;
    for (auto a : as)
        for (auto b : bs) {
            mpfr_div(cand, a, b, MPFR_RNDD);
            if (first || mpfr_cmp(cand, best_lo) < 0) mpfr_set(best_lo, cand, MPFR_RNDD);
            mpfr_div(cand, a, b, MPFR_RNDU);
            if (first || mpfr_cmp(cand, best_hi) > 0) mpfr_set(best_hi, cand, MPFR_RNDU);
            first = false;
        }
    mpfr_set(r.lo_, best_lo, MPFR_RNDD);
    mpfr_set(r.hi_, best_hi, MPFR_RNDU);
    mpfr_clear(cand);
    mpfr_clear(best_lo);
    mpfr_clear(best_hi);
    return r;
}

Ival Ival::neg() const {
    Ival r(prec_, true);
    mpfr_neg(r.lo_, hi_, MPFR_RNDD);
    mpfr_neg(r.hi_, lo_, MPFR_RNDU);
    return r;
}

Ival Ival::log() const {
    if (mpfr_sgn(lo_) <= 0) throw std::domain_error("Ival log: interval not strictly positive");
    Ival r(prec_, true);
    mpfr_log(r.lo_, lo_, MPFR_RNDD);
    mpfr_log(r.hi_, hi_, MPFR_RNDU);
    return r;
}

Ival Ival::exp() const {
    Ival r(prec_, true);
    mpfr_exp(r.lo_, lo_, MPFR_RNDD);
    mpfr_exp(r.hi_, hi_, MPFR_RNDU);
    return r;
}

Ival Ival::sqr() const { return (*this) * (*this); }

Ival Ival::max(const Ival& a, const Ival& b) {
    Ival r(join_prec(a, b), true);
    mpfr_max(r.lo_, a.lo_, b.lo_, MPFR_RNDD);
    mpfr_max(r.hi_, a.hi_, b.hi_, MPFR_RNDU);
    return r;
}

bool Ival::definitely_less(const Ival& o) const { return mpfr_cmp(hi_, o.lo_) < 0; }
bool Ival::definitely_greater(const Ival& o) const { return mpfr_cmp(lo_, o.hi_) > 0; }
bool Ival::definitely_le(const Ival& o) const { return mpfr_cmp(hi_, o.lo_) <= 0; }
bool Ival::definitely_ge(const Ival& o) const { return mpfr_cmp(lo_, o.hi_) >= 0; }

double Ival::lo_double() const { return mpfr_get_d(lo_, MPFR_RNDD); }
double Ival::hi_double() const { return mpfr_get_d(hi_, MPFR_RNDU); }

mpz_class Ival::hi_floor() const {
    mpfr_t f;
    mpfr_init2(f, prec_);
    mpfr_floor(f, hi_);
    mpz_class z;
    mpfr_get_z(z.get_mpz_t(), f, MPFR_RNDN);
    mpfr_clear(f);
    return z;
}

mpz_class Ival::lo_floor() const {
    mpfr_t f;
    mpfr_init2(f, prec_);
    mpfr_floor(f, lo_);
    mpz_class z;
    mpfr_get_z(z.get_mpz_t(), f, MPFR_RNDN);
    mpfr_clear(f);
    return z;
}

namespace {
std::string fmt(mpfr_srcptr v, int digits, mpfr_rnd_t rnd) {
    char buf[128];
    std::string f = "%." + std::to_string(digits) + (rnd == MPFR_RNDD ? "RDe" : "RUe");
    mpfr_snprintf(buf, sizeof buf, f.c_str(), v);
    return buf;
}
}  // namespace

std::string Ival::lo_string(int digits) const { return fmt(lo_, digits, MPFR_RNDD); }
std::string Ival::hi_string(int digits) const { return fmt(hi_, digits, MPFR_RNDU); }

Ival log_of(const mpz_class& n, int prec) { return Ival(n, prec).log(); }
Ival log_of(u64 n, int prec) { return Ival(n, prec).log(); }

}  // namespace expsieve
