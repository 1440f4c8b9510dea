#pragma once

// Elliptic curves over Q in long Weierstrass form: invariants, a_ell by point
// counting, Tate periods by inverting the j-series, and L-invariants.

#include "padic.hpp"

#include <array>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

namespace exzero {

enum class Reduction { good, split, nonsplit, additive };

inline const char* to_string(Reduction r) {
    switch (r) {
        case Reduction::good: return "good";
        case Reduction::split: return "split multiplicative";
        case Reduction::nonsplit: return "nonsplit multiplicative";
        case Reduction::additive: return "additive";
    }
    return "?";
}

namespace detail {
inline long powmod(long b, long e, long m) {
    long r = 1 % m;
    b = mod(b, m);
    while (e > 0) {
        if (e & 1) r = static_cast<long>(static_cast<__int128>(r) * b % m);
        b = static_cast<long>(static_cast<__int128>(b) * b % m);
        e >>= 1;
    }
    return r;
}

// Legendre symbol for odd prime l.
inline long legendre(long a, long l) {
    a = mod(a, l);
    if (a == 0) return 0;
    return powmod(a, (l - 1) / 2, l) == 1 ? 1 : -1;
}
}  // namespace detail

class EllipticCurve {
public:
    EllipticCurve(std::string label, long conductor, Integer a1, Integer a2, Integer a3, Integer a4, Integer a6)
        : label_(std::move(label)), N_(conductor), a1_(a1), a2_(a2), a3_(a3), a4_(a4), a6_(a6) {
        Integer b2 = a1 * a1 + 4 * a2;
        Integer b4 = 2 * a4 + a1 * a3;
        Integer b6 = a3 * a3 + 4 * a6;
        Integer b8 = a1 * a1 * a6 + 4 * a2 * a6 - a1 * a3 * a4 + a2 * a3 * a3 - a4 * a4;
        c4_ = b2 * b2 - 24 * b4;
        c6_ = -b2 * b2 * b2 + 36 * b2 * b4 - 216 * b6;
        disc_ = -b2 * b2 * b8 - 8 * b4 * b4 * b4 - 27 * b6 * b6 + 9 * b2 * b4 * b6;
        if (disc_ == 0) throw std::invalid_argument("singular curve: discriminant 0");
        if (N_ < 1) throw std::invalid_argument("conductor must be positive");
        j_ = Rational(c4_ * c4_ * c4_, disc_);
        j_.canonicalize();
    }

    /// `label N a1 a2 a3 a4 a6`, first non-comment line.
    static EllipticCurve read(std::istream& is) {
        std::string line;
        while (std::getline(is, line)) {
            if (line.empty() || line[0] == '#') continue;
            std::istringstream ls(line);
            std::string label;
            long N;
            std::string a[5];
            if (!(ls >> label >> N >> a[0] >> a[1] >> a[2] >> a[3] >> a[4]))
                throw std::runtime_error("bad curve line: " + line);
            return EllipticCurve(label, N, Integer(a[0]), Integer(a[1]), Integer(a[2]), Integer(a[3]), Integer(a[4]));
        }
        throw std::runtime_error("no curve in input");
    }

    static EllipticCurve read_file(const std::string& path) {
        std::ifstream in(path);
        if (!in) throw std::runtime_error("cannot open " + path);
        return read(in);
    }

    const std::string& label() const { return label_; }
    long conductor() const { return N_; }
    const Integer& c4() const { return c4_; }
    const Integer& c6() const { return c6_; }
    const Integer& discriminant() const { return disc_; }
    const Rational& j() const { return j_; }
    std::array<Integer, 5> coefficients() const { return {a1_, a2_, a3_, a4_, a6_}; }

    /// Reduction type at l, read from the conductor exponent.
    Reduction reduction(long l) const {
        require_prime(l);
        if (N_ % l != 0) {
            if (exzero::mod(disc_, Integer(l)) == 0 && exzero::mod(c4_, Integer(l)) != 0 && ord_finite(j_, l) >= 0)
                throw std::invalid_argument("model is not minimal at " + std::to_string(l));
            return Reduction::good;
        }
        if ((N_ / l) % l == 0) return Reduction::additive;
        return split_at(l) ? Reduction::split : Reduction::nonsplit;
    }

    /// #E(F_l) including the point at infinity, good l only.
    long count_points(long l) const {
        long n = 1;
        const long A1 = r(a1_, l), A2 = r(a2_, l), A3 = r(a3_, l), A4 = r(a4_, l), A6 = r(a6_, l);
        for (long x = 0; x < l; ++x) {
            long rhs = mod(((x * x % l) * x + A2 * (x * x % l) + A4 * x + A6), l);
            if (l == 2) {
                for (long y = 0; y < 2; ++y)
                    if (mod(y * y + A1 * x * y + A3 * y - rhs, 2) == 0) ++n;
            } else {
                // (2y + a1 x + a3)^2 = 4 rhs + (a1 x + a3)^2
                long h = mod(A1 * x + A3, l);
                n += 1 + detail::legendre(4 * rhs + h * h, l);
            }
        }
        return n;
    }

    long ap(long l) const {
        if (l > 100000) throw std::invalid_argument("a_l only for l <= 10^5");
        switch (reduction(l)) {
            case Reduction::good: return l + 1 - count_points(l);
            case Reduction::split: return 1;
            case Reduction::nonsplit: return -1;
            case Reduction::additive: throw std::domain_error("additive reduction at " + std::to_string(l));
        }
        return 0;
    }

private:
    static long r(const Integer& a, long l) { return to_long(exzero::mod(a, Integer(l))); }

    // Move the node to (0, 0); the tangent slopes t solve t^2 + a1 t - a2' = 0
    // with a2' = a2 + 3 x0.
    bool split_at(long l) const {
        const long A1 = r(a1_, l), A2 = r(a2_, l), A3 = r(a3_, l), A4 = r(a4_, l), A6 = r(a6_, l);
        auto F = [&](long x, long y) { return mod(y * y + A1 * x * y + A3 * y - (x * x % l * x + A2 * x % l * x + A4 * x + A6), l); };
        auto Fx = [&](long x, long y) { return mod(A1 * y - (3 * x % l * x + 2 * A2 * x + A4), l); };
        auto Fy = [&](long x, long y) { return mod(2 * y + A1 * x + A3, l); };
        for (long x = 0; x < l; ++x)
            for (long y = 0; y < l; ++y) {
                if (l != 2 && Fy(x, y) != 0) continue;
                if (F(x, y) || Fx(x, y) || Fy(x, y)) continue;
                long a2p = mod(A2 + 3 * x, l);
                for (long t = 0; t < l; ++t)
                    if (mod(t * t + A1 * t - a2p, l) == 0) return true;
                return false;
            }
        throw std::logic_error("no singular point on the reduction at " + std::to_string(l));
    }

    std::string label_;
    long N_;
    Integer a1_, a2_, a3_, a4_, a6_;
    Integer c4_, c6_, disc_;
    Rational j_;
};

namespace detail {
using Series = std::vector<Integer>;

inline Series mul(const Series& a, const Series& b, std::size_t K) {
    Series c(K, 0);
    for (std::size_t i = 0; i < std::min(K, a.size()); ++i) {
        if (a[i] == 0) continue;
        for (std::size_t j = 0; i + j < K && j < b.size(); ++j) c[i + j] += a[i] * b[j];
    }
    return c;
}

// 1/a for a[0] = ±1.
inline Series inverse(const Series& a, std::size_t K) {
    if (a[0] != 1 && a[0] != -1) throw std::logic_error("series not invertible over Z");
    Series b(K, 0);
    b[0] = a[0];
    for (std::size_t n = 1; n < K; ++n) {
        Integer s = 0;
        for (std::size_t i = 1; i <= n && i < a.size(); ++i) s += a[i] * b[n - i];
        b[n] = -s * a[0];
    }
    return b;
}

// f(q) = Π(1 - q^n)^24 / E4(q)^3, so that 1/j = q f(q).
inline Series j_inverse_factor(std::size_t K) {
    Series e4(K, 0);
    e4[0] = 1;
    for (std::size_t n = 1; n < K; ++n) {
        Integer s = 0;
        for (std::size_t d = 1; d <= n; ++d)
            if (n % d == 0) s += Integer(d) * d * d;
        e4[n] = 240 * s;
    }
    Series eta24(K, 0);
    eta24[0] = 1;
    for (std::size_t n = 1; n < K; ++n)
        for (int k = 0; k < 24; ++k) {
            Series f(K, 0);
            f[0] = 1;
            f[n] = -1;
            eta24 = mul(eta24, f, K);
        }
    return mul(eta24, inverse(mul(mul(e4, e4, K), e4, K), K), K);
}

// Series g with g(x f(x)) = x, i.e. q as a power series in x = 1/j.
inline Series revert_j(std::size_t K) {
    Series f = j_inverse_factor(K);
    Series q(K, 0);
    q[1] = 1;
    // q = x / f(q), one more correct coefficient per pass
    for (std::size_t it = 1; it < K; ++it) {
        Series fq(K, 0), pw(K, 0);
        pw[0] = 1;
        for (std::size_t i = 0; i < K; ++i) {
            if (f[i] != 0)
                for (std::size_t k = 0; k < K; ++k) fq[k] += f[i] * pw[k];
            pw = mul(pw, q, K);
        }
        Series inv = inverse(fq, K);
        Series next(K, 0);
        for (std::size_t k = 1; k < K; ++k) next[k] = inv[k - 1];
        q = std::move(next);
    }
    return q;
}

inline Integer eval_mod(const Series& s, const Integer& x, const Integer& m) {
    Integer r = 0;
    for (std::size_t i = s.size(); i-- > 0;) r = exzero::mod(Integer(r * x + s[i]), m);
    return r;
}
}  // namespace detail

struct TatePeriod {
    PadicNumber q;
    long valuation;       // ord_p(q) = -ord_p(j)
    bool roundtrip_ok;    // x f(q) == 1/j modulo p^prec
    std::vector<Integer> series;  // q = Σ series[k] j^{-k}
};

/// q_E with j(q_E) = j(E), to absolute precision p^prec.
inline TatePeriod tate_period(const EllipticCurve& E, long p, long prec) {
    require_prime(p);
    const long v = -ord_finite(E.j(), p);
    if (v <= 0) throw std::domain_error("Tate period needs ord_p(j) < 0 (multiplicative reduction at p)");
    if (prec < 1) throw std::invalid_argument("precision must be positive");
    // truncation after x^{K-1} costs ord >= K v
    const std::size_t K = static_cast<std::size_t>((prec + v - 1) / v + 1);
    detail::Series g = detail::revert_j(K);
    const Integer m = ipow(p, static_cast<unsigned long>(prec + 1));
    Rational xr = 1 / E.j();
    Integer x = exzero::mod(Integer(xr.get_num() * inverse_mod(xr.get_den(), m)), m);
    Integer q = detail::eval_mod(g, x, m);
    // x' = q f(q)
    detail::Series f = detail::j_inverse_factor(K);
    Integer back = exzero::mod(Integer(q * detail::eval_mod(f, q, m)), m);
    const Integer mp = ipow(p, static_cast<unsigned long>(prec));
    bool ok = exzero::mod(Integer(back - x), mp) == 0;
    return {PadicNumber::with_absolute(Rational(q), p, prec), v, ok, g};
}

/// log_p(q_E)/ord_p(q_E), split multiplicative reduction only.
inline PadicNumber l_invariant(const EllipticCurve& E, long p, long prec) {
    Reduction red = E.reduction(p);
    if (red != Reduction::split)
        throw std::domain_error(std::string("L-invariant needs split multiplicative reduction, found ") + to_string(red));
    TatePeriod t = tate_period(E, p, prec + ord_finite(E.j(), p) * -1 + 2);
    PadicNumber lg = log_iwasawa(t.q);
    return lg / PadicNumber::from_integer(t.valuation, p, prec + 4);
}

}  // namespace exzero
