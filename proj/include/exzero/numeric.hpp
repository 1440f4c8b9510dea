#pragma once

// Exact integer and rational helpers on top of GMP.

#include <gmpxx.h>

#include <cstdint>
#include <limits>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace exzero {

using Integer = mpz_class;
using Rational = mpq_class;

/// Valuation that may be infinite (for zero).
struct Valuation {
    long value = 0;
    bool infinite = false;

    static Valuation inf() { return {0, true}; }
    friend bool operator==(const Valuation&, const Valuation&) = default;
    bool operator<(const Valuation& o) const {
        if (infinite) return false;
        if (o.infinite) return true;
        return value < o.value;
    }
};

inline bool is_prime(long n) {
    if (n < 2) return false;
    for (long d = 2; d * d <= n; ++d)
        if (n % d == 0) return false;
    return true;
}

inline void require_prime(long p) {
    if (!is_prime(p)) throw std::invalid_argument("not a prime: " + std::to_string(p));
}

inline Integer ipow(long base, unsigned long e) {
    Integer r;
    mpz_ui_pow_ui(r.get_mpz_t(), static_cast<unsigned long>(base), e);
    return r;
}

inline Integer ipow(const Integer& base, unsigned long e) {
    Integer r;
    mpz_pow_ui(r.get_mpz_t(), base.get_mpz_t(), e);
    return r;
}

/// p^e as a rational, e may be negative.
inline Rational rpow(long p, long e) {
    if (e >= 0) return Rational(ipow(p, static_cast<unsigned long>(e)));
    return Rational(Integer(1), ipow(p, static_cast<unsigned long>(-e)));
}

inline Rational rpow(const Rational& x, long e) {
    Rational r = 1;
    Rational b = e >= 0 ? x : Rational(1) / x;
    unsigned long n = static_cast<unsigned long>(e >= 0 ? e : -e);
    mpz_pow_ui(r.get_num_mpz_t(), b.get_num_mpz_t(), n);
    mpz_pow_ui(r.get_den_mpz_t(), b.get_den_mpz_t(), n);
    r.canonicalize();
    return r;
}

/// Strips factors of p: returns v with n = p^v * m, m coprime to p. n != 0.
inline long strip(Integer& n, long p) {
    long v = 0;
    if (n == 0) throw std::domain_error("strip of zero");
    Integer q, r;
    Integer pp = p;
    for (;;) {
        mpz_fdiv_qr(q.get_mpz_t(), r.get_mpz_t(), n.get_mpz_t(), pp.get_mpz_t());
        if (r != 0) break;
        n = q;
        ++v;
    }
    return v;
}

inline Valuation ord(const Integer& n, long p) {
    if (n == 0) return Valuation::inf();
    Integer m = n;
    return {strip(m, p), false};
}

inline Valuation ord(const Rational& x, long p) {
    if (x == 0) return Valuation::inf();
    Integer a = x.get_num(), b = x.get_den();
    return {strip(a, p) - strip(b, p), false};
}

/// ord for callers that know x != 0.
inline long ord_finite(const Rational& x, long p) {
    auto v = ord(x, p);
    if (v.infinite) throw std::domain_error("valuation of zero");
    return v.value;
}

inline Integer mod(const Integer& a, const Integer& m) {
    Integer r;
    mpz_mod(r.get_mpz_t(), a.get_mpz_t(), m.get_mpz_t());
    return r;
}

inline Integer inverse_mod(const Integer& a, const Integer& m) {
    Integer r;
    if (mpz_invert(r.get_mpz_t(), a.get_mpz_t(), m.get_mpz_t()) == 0)
        throw std::domain_error("element not invertible");
    return r;
}

inline Integer gcd(const Integer& a, const Integer& b) {
    Integer r;
    mpz_gcd(r.get_mpz_t(), a.get_mpz_t(), b.get_mpz_t());
    return r;
}

inline long gcd(long a, long b) {
    if (a < 0) a = -a;
    if (b < 0) b = -b;
    while (b) {
        long t = a % b;
        a = b;
        b = t;
    }
    return a;
}

inline long lcm(long a, long b) { return a / gcd(a, b) * b; }

inline long mod(long a, long m) {
    long r = a % m;
    return r < 0 ? r + m : r;
}

inline long to_long(const Integer& n) {
    if (!n.fits_slong_p()) throw std::overflow_error("integer does not fit in long");
    return n.get_si();
}

/// Reduces a rational modulo the class of integers coprime to p, i.e.
/// maps x to its residue in Z/p^e when ord_p(x) >= 0.
inline Integer residue(const Rational& x, long p, long e) {
    if (e <= 0) return 0;
    Integer m = ipow(p, static_cast<unsigned long>(e));
    if (ord(x, p) < Valuation{0, false}) throw std::domain_error("residue of non-integral rational");
    return mod(x.get_num() * inverse_mod(x.get_den(), m), m);
}

/// Canonical representative of x + p^m Z_p, taken in Z[1/p] ∩ [0, p^m).
inline Rational reduce_mod_ppow(const Rational& x, long p, long m) {
    if (x == 0) return 0;
    Integer den = x.get_den();
    long k = strip(den, p);  // den = p^k * den', gcd(den', p) = 1
    long e = m + k;
    if (e <= 0) return 0;
    Integer modulus = ipow(p, static_cast<unsigned long>(e));
    Integer num = mod(x.get_num() * inverse_mod(den, modulus), modulus);
    return Rational(num, ipow(p, static_cast<unsigned long>(k)));
}

inline Rational parse_rational(const std::string& s) {
    Rational r;
    if (r.set_str(s, 10) != 0) throw std::invalid_argument("bad rational: " + s);
    if (r.get_den() == 0) throw std::invalid_argument("zero denominator: " + s);
    r.canonicalize();
    return r;
}

inline std::string to_string(const Rational& r) { return r.get_str(); }
inline std::string to_string(const Integer& n) { return n.get_str(); }

}  // namespace exzero
