#pragma once

// Measures on Z_p^* (p odd) given by their values on the balls a + p^n Z_p,
// 1 <= n <= N, a a unit. Riemann sums against <x>^s and (log_p <x>)^k.

#include "padic.hpp"

#include <climits>
#include <fstream>
#include <functional>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

namespace exzero {

class BallMeasure {
public:
    /// Values are kept modulo p^prec.
    BallMeasure(long p, long N, long prec = 20) : p_(p), N_(N), prec_(prec) {
        require_prime(p);
        if (p == 2) throw std::invalid_argument("measures on Z_2^* are not supported (p must be odd)");
        if (N < 1) throw std::invalid_argument("level must be >= 1");
        for (long n = 1; n <= N; ++n)
            values_.emplace_back(static_cast<std::size_t>(modulus(n)), PadicNumber::zero(p, prec));
    }

    /// Fills every level from f(n, a), a in [1, p^n) a unit.
    static BallMeasure from_function(long p, long N, long prec,
                                     const std::function<PadicNumber(long, long)>& f) {
        BallMeasure m(p, N, prec);
        for (long n = 1; n <= N; ++n)
            for (long a = 1; a < m.modulus(n); ++a)
                if (a % p) m.set(n, a, f(n, a));
        return m;
    }

    /// Values on the top level; coarser levels are the sums over refinements.
    static BallMeasure from_top_level(long p, long N, long prec, const std::vector<Rational>& top) {
        BallMeasure m(p, N, prec);
        if (static_cast<long>(top.size()) != m.modulus(N)) throw std::invalid_argument("top level has wrong size");
        std::vector<Rational> cur = top;
        for (long n = N; n >= 1; --n) {
            long mod_n = m.modulus(n);
            for (long a = 1; a < mod_n; ++a)
                if (a % p) m.set(n, a, cur[static_cast<std::size_t>(a)]);
            if (n == 1) break;
            std::vector<Rational> up(static_cast<std::size_t>(m.modulus(n - 1)), 0);
            for (long a = 0; a < mod_n; ++a) up[static_cast<std::size_t>(a % m.modulus(n - 1))] += cur[static_cast<std::size_t>(a)];
            cur = std::move(up);
        }
        return m;
    }

    static BallMeasure dirac(long p, long N, const Rational& x, long prec = 20) {
        if (ord_finite(x, p) != 0) throw std::domain_error("Dirac mass must sit at a unit");
        BallMeasure m(p, N, prec);
        for (long n = 1; n <= N; ++n)
            m.set(n, to_long(residue(x, p, n)), Rational(1));
        return m;
    }

    long prime() const { return p_; }
    long level() const { return N_; }
    long precision() const { return prec_; }
    long modulus(long n) const { return to_long(ipow(p_, static_cast<unsigned long>(n))); }

    const PadicNumber& operator()(long n, long a) const {
        check_level(n);
        return values_[static_cast<std::size_t>(n - 1)][static_cast<std::size_t>(mod(a, modulus(n)))];
    }

    void set(long n, long a, const PadicNumber& v) {
        check_level(n);
        if (mod(a, p_) == 0) throw std::domain_error("ball a + p^n Z_p must lie in Z_p^*");
        values_[static_cast<std::size_t>(n - 1)][static_cast<std::size_t>(mod(a, modulus(n)))] = v.with_precision(prec_);
    }
    void set(long n, long a, const Rational& v) { set(n, a, PadicNumber::with_absolute(v, p_, prec_)); }

    friend BallMeasure operator+(const BallMeasure& x, const BallMeasure& y) { return combine(x, y, 1); }
    friend BallMeasure operator-(const BallMeasure& x, const BallMeasure& y) { return combine(x, y, -1); }

    BallMeasure scaled(const PadicNumber& c) const {
        BallMeasure r(p_, N_, prec_);
        for (long n = 1; n <= N_; ++n)
            for (long a = 1; a < modulus(n); ++a)
                if (a % p_) r.set(n, a, (*this)(n, a) * c);
        return r;
    }

    /// μ(Z_p^*), the sum over the level-1 balls.
    PadicNumber total_mass() const {
        PadicNumber s = PadicNumber::zero(p_, prec_);
        for (long a = 1; a < p_; ++a) s += (*this)(1, a);
        return s;
    }

    /// Text format: header `p N c`, then `n a num/den` per ball.
    void write(std::ostream& os, long certificate) const {
        os << p_ << ' ' << N_ << ' ' << certificate << '\n';
        for (long n = 1; n <= N_; ++n)
            for (long a = 1; a < modulus(n); ++a)
                if (a % p_) os << n << ' ' << a << ' ' << (*this)(n, a).lift().get_str() << '\n';
    }

    struct Loaded;
    static Loaded read(std::istream& is, long prec = 20);
    static Loaded read_file(const std::string& path, long prec = 20);

private:
    void check_level(long n) const {
        if (n < 1 || n > N_) throw std::out_of_range("level " + std::to_string(n) + " outside 1.." + std::to_string(N_));
    }

    static BallMeasure combine(const BallMeasure& x, const BallMeasure& y, long sign) {
        if (x.p_ != y.p_ || x.N_ != y.N_) throw std::invalid_argument("measures over different primes or levels");
        BallMeasure r(x.p_, x.N_, std::min(x.prec_, y.prec_));
        for (long n = 1; n <= x.N_; ++n)
            for (long a = 1; a < x.modulus(n); ++a)
                if (a % x.p_) r.set(n, a, sign > 0 ? x(n, a) + y(n, a) : x(n, a) - y(n, a));
        return r;
    }

    long p_;
    long N_;
    long prec_;
    std::vector<std::vector<PadicNumber>> values_;
};

struct BallMeasure::Loaded {
    BallMeasure measure;
    long claimed_certificate;
};

inline BallMeasure::Loaded BallMeasure::read(std::istream& is, long prec) {
    long p = 0, N = 0, c = 0;
    std::string line;
    while (std::getline(is, line)) {
        if (line.empty() || line[0] == '#') continue;
        std::istringstream hs(line);
        if (!(hs >> p >> N >> c)) throw std::runtime_error("bad measure header: " + line);
        break;
    }
    if (p == 0) throw std::runtime_error("empty measure file");
    BallMeasure m(p, N, prec);
    long lineno = 1;
    while (std::getline(is, line)) {
        ++lineno;
        if (line.empty() || line[0] == '#') continue;
        std::istringstream ls(line);
        long n, a;
        std::string v;
        if (!(ls >> n >> a >> v)) throw std::runtime_error("bad measure line " + std::to_string(lineno) + ": " + line);
        m.set(n, a, parse_rational(v));
    }
    return {std::move(m), c};
}

inline BallMeasure::Loaded BallMeasure::read_file(const std::string& path, long prec) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open " + path);
    return read(in, prec);
}

struct DistributionReport {
    bool ok = true;
    long certificate = 0;  // least c >= 0 with ord(value) >= -c
    std::optional<std::pair<long, long>> violation;  // (n, a): μ(a + p^n) != Σ children
    std::string message;
};

inline DistributionReport check_distribution_and_bound(const BallMeasure& mu) {
    DistributionReport r;
    const long p = mu.prime();
    for (long n = 1; n <= mu.level(); ++n)
        for (long a = 1; a < mu.modulus(n); ++a) {
            if (a % p == 0) continue;
            const PadicNumber& v = mu(n, a);
            if (!v.is_zero()) r.certificate = std::max(r.certificate, -v.valuation().value);
        }
    for (long n = 1; n < mu.level() && r.ok; ++n)
        for (long a = 1; a < mu.modulus(n); ++a) {
            if (a % p == 0) continue;
            PadicNumber s = PadicNumber::zero(p, mu.precision());
            for (long j = 0; j < p; ++j) s += mu(n + 1, a + j * mu.modulus(n));
            if (!agree(s, mu(n, a))) {
                r.ok = false;
                r.violation = {n, a};
                r.message = "distribution relation fails at a=" + std::to_string(a) + " n=" + std::to_string(n);
                break;
            }
        }
    return r;
}

/// A Riemann sum with the exponent e such that the true integral agrees with
/// it modulo p^e. The value carries its own arithmetic precision on top.
struct RiemannSum {
    PadicNumber value;
    long error_exponent;  // LONG_MAX when the sum is exact

    long reliable_exponent() const { return std::min(error_exponent, value.absolute_precision()); }
};

namespace detail {
inline void require_level(const BallMeasure& mu, long n) {
    if (n < 1 || n > mu.level()) throw std::out_of_range("Riemann-sum level outside the stored levels");
}
}  // namespace detail

/// <a>^s = exp_p(s log_p a) for a unit, ord(s) >= 1.
inline PadicNumber angle_power(long a, const PadicNumber& s, long prec) {
    PadicNumber l = log_iwasawa(Rational(a), s.prime(), prec);
    return exp_padic(s * l);
}

/// Σ_{a mod p^n unit} <a>^s μ(a + p^n Z_p), a in [1, p^n].
///
/// Error: for x in a + p^n Z_p, <x>/<a> = x/a lies in 1 + p^n Z_p, so
/// log_p(<x>/<a>) has ord >= n and s·log_p has ord >= n + ord(s) >= 1; exp_p
/// preserves that valuation, hence |<x>^s - <a>^s| <= p^{-(n + ord s)}. Each
/// ball carries mass of ord >= -c, and the integral minus the sum is a limit of
/// sums of such terms: error exponent n + ord(s) - c.
inline RiemannSum gamma_transform(const BallMeasure& mu, const PadicNumber& s, long n) {
    detail::require_level(mu, n);
    const long p = mu.prime();
    const long prec = mu.precision();
    const long c = check_distribution_and_bound(mu).certificate;
    if (s.is_zero() && s.absolute_precision() >= prec) {
        PadicNumber t = PadicNumber::zero(p, prec);
        for (long a = 1; a < mu.modulus(n); ++a)
            if (a % p) t += mu(n, a);
        return {t, LONG_MAX};
    }
    if (s.prime() != p) throw std::invalid_argument("s over the wrong prime");
    if (!s.is_zero() && s.valuation().value < 1) throw std::domain_error("<x>^s needs ord(s) >= 1 here");
    const long ord_s = s.valuation_or_precision();
    PadicNumber t = PadicNumber::zero(p, prec);
    for (long a = 1; a < mu.modulus(n); ++a)
        if (a % p) t += angle_power(a, s.with_precision(prec + 1), prec + 1) * mu(n, a);
    return {t, n + ord_s - c};
}

inline constexpr long kMaxMoment = 4;

/// Σ (log_p <a>)^k μ(a + p^n Z_p). With L = log_p<a> in pZ_p and the shift
/// δ = log_p<x> - L of ord >= n, (L + δ)^k - L^k has ord >= n + k - 1.
inline RiemannSum moment(const BallMeasure& mu, long k, long n) {
    detail::require_level(mu, n);
    if (k < 0 || k > kMaxMoment) throw std::invalid_argument("moment index outside 0..4");
    const long p = mu.prime();
    const long prec = mu.precision();
    const long c = check_distribution_and_bound(mu).certificate;
    PadicNumber t = PadicNumber::zero(p, prec);
    for (long a = 1; a < mu.modulus(n); ++a) {
        if (a % p == 0) continue;
        if (k == 0) {
            t += mu(n, a);
            continue;
        }
        t += log_iwasawa(Rational(a), p, prec + k).pow(k) * mu(n, a);
    }
    return {t, k == 0 ? LONG_MAX : n + k - 1 - c};
}

struct VanishingOrder {
    long order;         // least k with a provably nonzero moment, or r_max + 1
    bool lower_bound;   // true when every moment up to r_max vanished at precision
    std::vector<RiemannSum> moments;
};

inline VanishingOrder vanishing_order(const BallMeasure& mu, long r_max, long n) {
    VanishingOrder r{r_max + 1, true, {}};
    for (long k = 0; k <= r_max; ++k) {
        RiemannSum m = moment(mu, k, n);
        r.moments.push_back(m);
        if (!m.value.with_precision(m.reliable_exponent()).is_zero()) {
            r.order = k;
            r.lower_bound = false;
            break;
        }
    }
    return r;
}

}  // namespace exzero
