#pragma once
// A small directed-rounding interval type over MPFR. Every arithmetic operation
// rounds the lower endpoint down and the upper endpoint up, so an Ival always
// encloses the exact real value of the expression it was built from. Claimed
// upper bounds are read from .hi, claimed lower bounds from .lo; strict
// inequalities verified through definitely_less/definitely_greater are rigorous.

#include <gmpxx.h>
#include <mpfr.h>

#include <string>

#include "expsieve/common.hpp"

namespace expsieve {

class Ival {
  public:
    static constexpr int kDefaultPrec = 128;

    Ival() : Ival(0L, kDefaultPrec) {}
    explicit Ival(long v, int prec = kDefaultPrec);
    explicit Ival(u64 v, int prec = kDefaultPrec);
    explicit Ival(const mpz_class& v, int prec = kDefaultPrec);
    explicit Ival(const mpq_class& v, int prec = kDefaultPrec);
    Ival(const Ival& o);
    Ival(Ival&& o) noexcept;
    Ival& operator=(const Ival& o);
    Ival& operator=(Ival&& o) noexcept;
    ~Ival();

    int precision() const { return prec_; }

    Ival operator+(const Ival& o) const;
    Ival operator-(const Ival& o) const;
    Ival operator*(const Ival& o) const;
    Ival operator/(const Ival& o) const;  // requires 0 outside o
    Ival neg() const;
    Ival log() const;  // requires lo > 0
    Ival exp() const;
    Ival sqr() const;

    static Ival max(const Ival& a, const Ival& b);

    // Rigorous comparisons: true only when certain.
    bool definitely_less(const Ival& o) const;     // this < o
    bool definitely_greater(const Ival& o) const;  // this > o
    bool definitely_le(const Ival& o) const;       // this <= o
    bool definitely_ge(const Ival& o) const;       // this >= o

    double lo_double() const;  // rounded down
    double hi_double() const;  // rounded up
    mpz_class hi_floor() const;
    mpz_class lo_floor() const;

    // Decimal rendering of the endpoints with directed rounding.
    std::string lo_string(int digits = 30) const;
    std::string hi_string(int digits = 30) const;

  private:
    Ival(int prec, bool) : prec_(prec) { mpfr_init2(lo_, prec_); mpfr_init2(hi_, prec_); }
    static int join_prec(const Ival& a, const Ival& b);

    mpfr_t lo_, hi_;
    int prec_;
};

// log of an exact integer as an interval at the given precision.
Ival log_of(const mpz_class& n, int prec = Ival::kDefaultPrec);
Ival log_of(u64 n, int prec = Ival::kDefaultPrec);

}  // namespace expsieve
