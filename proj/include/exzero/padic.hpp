#pragma once

// Elements of Q_p at capped precision.
//
// A nonzero value is p^val * unit with unit known modulo p^rel; its absolute
// precision is val + rel. Zero carries only an absolute precision (the value
// is known to be divisible by p^abs). Every operation returns the precision
// its inputs justify and never more.

#include "numeric.hpp"

#include <algorithm>
#include <ostream>
#include <sstream>
#include <string>

namespace exzero {

class PadicNumber {
public:
    PadicNumber() = default;

    static PadicNumber zero(long p, long absprec) {
        PadicNumber r;
        r.p_ = p;
        r.zero_ = true;
        r.abs_ = absprec;
        return r;
    }

    /// Nonzero x is stored to relative precision relprec; zero to absolute
    /// precision relprec.
    static PadicNumber from_rational(const Rational& x, long p, long relprec) {
        if (relprec < 1) throw std::invalid_argument("precision must be positive");
        if (x == 0) return zero(p, relprec);
        Integer num = x.get_num(), den = x.get_den();
        long v = strip(num, p) - strip(den, p);
        Integer m = ipow(p, static_cast<unsigned long>(relprec));
        PadicNumber r;
        r.p_ = p;
        r.zero_ = false;
        r.val_ = v;
        r.abs_ = v + relprec;
        r.unit_ = exzero::mod(num * inverse_mod(den, m), m);
        return r;
    }

    static PadicNumber from_integer(const Integer& n, long p, long relprec) {
        return from_rational(Rational(n), p, relprec);
    }

    /// Value known modulo p^absprec (absprec may be below the valuation,
    /// in which case the result is an inexact zero).
    static PadicNumber with_absolute(const Rational& x, long p, long absprec) {
        auto v = ord(x, p);
        if (v.infinite || v.value >= absprec) return zero(p, absprec);
        return from_rational(x, p, absprec - v.value);
    }

    long prime() const { return p_; }
    bool is_zero() const { return zero_; }
    Valuation valuation() const { return zero_ ? Valuation::inf() : Valuation{val_, false}; }
    /// Valuation for nonzero values, absolute precision for zero.
    long valuation_or_precision() const { return zero_ ? abs_ : val_; }
    long absolute_precision() const { return abs_; }
    long relative_precision() const { return zero_ ? 0 : abs_ - val_; }
    const Integer& unit() const { return unit_; }

    /// Exact rational representative p^val * unit (0 for zero).
    Rational lift() const {
        if (zero_) return 0;
        return Rational(unit_) * rpow(p_, val_);
    }

    /// Residue in Z/p^k; requires integrality and k <= absolute precision.
    Integer residue(long k) const {
        if (k > abs_) throw std::domain_error("residue requested beyond known precision");
        if (k <= 0) return 0;
        if (zero_) return 0;
        if (val_ < 0) throw std::domain_error("residue of non-integral p-adic number");
        Integer m = ipow(p_, static_cast<unsigned long>(k));
        return exzero::mod(Integer(unit_ * ipow(p_, static_cast<unsigned long>(val_))), m);
    }

    PadicNumber with_precision(long absprec) const {
        if (absprec >= abs_) return *this;
        return with_absolute(lift(), p_, absprec);
    }

    PadicNumber operator-() const {
        if (zero_) return *this;
        PadicNumber r = *this;
        Integer m = ipow(p_, static_cast<unsigned long>(abs_ - val_));
        r.unit_ = exzero::mod(Integer(-unit_), m);
        return r;
    }

    friend PadicNumber operator+(const PadicNumber& a, const PadicNumber& b) {
        check_same(a, b);
        long absprec = std::min(a.abs_, b.abs_);
        return with_absolute(a.lift() + b.lift(), a.p_, absprec);
    }
    friend PadicNumber operator-(const PadicNumber& a, const PadicNumber& b) { return a + (-b); }

    friend PadicNumber operator*(const PadicNumber& a, const PadicNumber& b) {
        check_same(a, b);
        if (a.zero_ || b.zero_) {
            long absprec;
            if (a.zero_ && b.zero_) absprec = a.abs_ + b.abs_;
            else if (a.zero_) absprec = a.abs_ + b.val_;
            else absprec = b.abs_ + a.val_;
            return zero(a.p_, absprec);
        }
        long rel = std::min(a.relative_precision(), b.relative_precision());
        PadicNumber r;
        r.p_ = a.p_;
        r.zero_ = false;
        r.val_ = a.val_ + b.val_;
        r.abs_ = r.val_ + rel;
        r.unit_ = exzero::mod(Integer(a.unit_ * b.unit_), ipow(a.p_, static_cast<unsigned long>(rel)));
        return r;
    }

    friend PadicNumber operator/(const PadicNumber& a, const PadicNumber& b) {
        check_same(a, b);
        if (b.zero_) throw std::domain_error("p-adic division by (inexact) zero");
        if (a.zero_) return zero(a.p_, a.abs_ - b.val_);
        long rel = std::min(a.relative_precision(), b.relative_precision());
        Integer m = ipow(a.p_, static_cast<unsigned long>(rel));
        PadicNumber r;
        r.p_ = a.p_;
        r.zero_ = false;
        r.val_ = a.val_ - b.val_;
        r.abs_ = r.val_ + rel;
        r.unit_ = exzero::mod(Integer(a.unit_ * inverse_mod(b.unit_, m)), m);
        return r;
    }

    PadicNumber& operator+=(const PadicNumber& o) { return *this = *this + o; }
    PadicNumber& operator-=(const PadicNumber& o) { return *this = *this - o; }
    PadicNumber& operator*=(const PadicNumber& o) { return *this = *this * o; }
    PadicNumber& operator/=(const PadicNumber& o) { return *this = *this / o; }

    friend PadicNumber operator*(const PadicNumber& a, const Rational& c) {
        return a * from_rational(c, a.p_, std::max<long>(1, a.relative_precision() + 1));
    }

    PadicNumber pow(long e) const {
        if (e < 0) return from_rational(1, p_, std::max<long>(1, relative_precision())) / pow(-e);
        if (e == 0) return from_rational(1, p_, zero_ ? std::max<long>(1, abs_) : relative_precision());
        PadicNumber result = *this;
        for (long i = 1; i < e; ++i) result = result * *this;
        return result;
    }

    /// True when a - b vanishes at the common precision.
    friend bool agree(const PadicNumber& a, const PadicNumber& b) { return (a - b).is_zero(); }

    /// True when ord(a - b) >= k, which needs both operands known to p^k.
    friend bool congruent(const PadicNumber& a, const PadicNumber& b, long k) {
        PadicNumber d = a - b;
        if (d.is_zero()) return d.abs_ >= k;
        return d.val_ >= k;
    }

    std::string str() const {
        std::ostringstream os;
        if (zero_) {
            os << "O(" << p_ << "^" << abs_ << ")";
            return os.str();
        }
        os << unit_.get_str();
        if (val_ != 0) os << "*" << p_ << "^" << val_;
        os << " + O(" << p_ << "^" << abs_ << ")";
        return os.str();
    }

    friend std::ostream& operator<<(std::ostream& os, const PadicNumber& x) { return os << x.str(); }

private:
    static void check_same(const PadicNumber& a, const PadicNumber& b) {
        if (a.p_ != b.p_) throw std::invalid_argument("p-adic numbers over different primes");
    }

    long p_ = 2;
    bool zero_ = true;
    long val_ = 0;
    long abs_ = 1;
    Integer unit_ = 0;
};

inline Valuation ord(const PadicNumber& x) { return x.valuation(); }

/// Teichmüller representative ω(a) modulo p^prec, by iterating x -> x^p.
inline PadicNumber teichmuller(const Integer& a, long p, long prec) {
    if (exzero::mod(a, Integer(p)) == 0) throw std::domain_error("Teichmüller lift of a non-unit");
    Integer m = ipow(p, static_cast<unsigned long>(prec));
    Integer x = exzero::mod(a, m);
    for (;;) {
        Integer y;
        mpz_powm_ui(y.get_mpz_t(), x.get_mpz_t(), static_cast<unsigned long>(p), m.get_mpz_t());
        if (y == x) break;
        x = y;
    }
    return PadicNumber::from_integer(x, p, prec);
}

/// Iwasawa logarithm: log(p) = 0, torsion maps to 0, power series on 1 + pZ_p.
inline PadicNumber log_iwasawa(const PadicNumber& x) {
    if (x.is_zero()) throw std::domain_error("logarithm of zero");
    const long p = x.prime();
    const long rel = x.relative_precision();
    PadicNumber u = PadicNumber::from_integer(x.unit(), p, rel);
    PadicNumber omega = teichmuller(x.unit() % p, p, rel);
    PadicNumber z = u / omega - PadicNumber::from_integer(1, p, rel);
    if (z.is_zero()) return PadicNumber::zero(p, z.absolute_precision());
    const long vz = z.valuation().value;
    const long target = z.absolute_precision();
    PadicNumber sum = PadicNumber::zero(p, target);
    PadicNumber power = z;
    for (long k = 1;; ++k) {
        long vk = ord(Integer(k), p).value;
        if (k * vz - vk >= target) break;
        PadicNumber term = power / PadicNumber::from_integer(k, p, target + 1);
        sum = (k % 2 == 1) ? sum + term : sum - term;
        power = power * z;
    }
    return sum;
}

inline PadicNumber log_iwasawa(const Rational& x, long p, long prec) {
    return log_iwasawa(PadicNumber::from_rational(x, p, prec));
}

/// p-adic exponential on ord(x) > 1/(p-1).
inline PadicNumber exp_padic(const PadicNumber& x) {
    const long p = x.prime();
    const long target = x.absolute_precision();
    if (x.is_zero()) return PadicNumber::from_integer(1, p, std::max<long>(1, target));
    const long v = x.valuation().value;
    if (v * (p - 1) <= 1) throw std::domain_error("exp_p outside its disc of convergence");
    PadicNumber sum = PadicNumber::from_integer(1, p, target);
    PadicNumber term = PadicNumber::from_integer(1, p, target + 64);
    long ord_fact = 0;
    for (long k = 1;; ++k) {
        ord_fact += ord(Integer(k), p).value;
        if (k * v - ord_fact >= target) break;
        term = term * x / PadicNumber::from_integer(k, p, target + 64);
        sum += term;
    }
    return sum;
}

/// Unit root of X^2 - a_p X + p, lifted by Newton iteration.
inline PadicNumber unit_root(const Integer& ap, long p, long prec) {
    if (exzero::mod(ap, Integer(p)) == 0)
        throw std::domain_error("a_p divisible by p: not ordinary");
    Integer m = ipow(p, static_cast<unsigned long>(prec + 1));
    Integer x = exzero::mod(ap, Integer(p));
    for (int iter = 0; iter < 4 * prec + 8; ++iter) {
        Integer f = exzero::mod(Integer(x * x - ap * x + p), m);
        if (f == 0) break;
        Integer df = exzero::mod(Integer(2 * x - ap), m);
        x = exzero::mod(Integer(x - f * inverse_mod(df, m)), m);
    }
    return PadicNumber::from_integer(x, p, prec);
}

}  // namespace exzero
