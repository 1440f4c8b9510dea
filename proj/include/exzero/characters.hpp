#pragma once

// Quasicharacters of Q_p^*, the additive character ψ, Gauss sums, the closed
// Mellin integral of ψχ, local L-factors and the interpolation factors e(α, χ).

#include "cvalue.hpp"
#include "numeric.hpp"

#include <cmath>
#include <string>
#include <vector>

namespace exzero {

/// ψ(x) = exp(2πi fr(x)), trivial exactly on Z_p.
struct AdditiveCharacterPsi {
    long p;

    /// fr(x): the representative of x mod Z_p in Z[1/p] ∩ [0, 1).
    Rational fractional_part(const Rational& x) const { return reduce_mod_ppow(x, p, 0); }

    CValue operator()(const Rational& x) const {
        Rational fr = fractional_part(x);
        if (fr == 0) return CValue(1);
        long level = to_long(fr.get_den());
        return CValue::root_of_unity(level, to_long(fr.get_num()));
    }

    std::complex<double> numeric(const Rational& x) const {
        Rational fr = fractional_part(x);
        double ang = 2.0 * std::numbers::pi * fr.get_d();
        return {std::cos(ang), std::sin(ang)};
    }
};

/// Smallest primitive root modulo p^2 (hence modulo every p^n), p odd.
inline long primitive_root_p2(long p) {
    if (p == 2) throw std::invalid_argument("(Z/2^n)^* is not cyclic");
    const long pm1 = p - 1;
    std::vector<long> factors;
    long m = pm1;
    for (long q = 2; q * q <= m; ++q)
        if (m % q == 0) {
            factors.push_back(q);
            while (m % q == 0) m /= q;
        }
    if (m > 1) factors.push_back(m);
    auto powmod = [](long b, long e, long md) {
        long r = 1 % md;
        b %= md;
        while (e) {
            if (e & 1) r = r * b % md;
            b = b * b % md;
            e >>= 1;
        }
        return r;
    };
    for (long g = 2; g < p; ++g) {
        bool prim = true;
        for (long q : factors)
            if (powmod(g, pm1 / q, p) == 1) prim = false;
        if (!prim) continue;
        if (powmod(g, pm1, p * p) == 1) return g + p;
        return g;
    }
    throw std::logic_error("no primitive root");
}

class Quasicharacter {
public:
    /// Builds χ from χ(p) = t and a table of values on (Z/p^f)^*, indexed by
    /// residue. The table is reduced to the true conductor.
    Quasicharacter(long p, CValue t, long f, std::vector<CValue> table) : p_(p), t_(std::move(t)), f_(f) {
        require_prime(p);
        if (f < 0) throw std::invalid_argument("negative conductor exponent");
        if (t_.abs() == 0.0) throw std::invalid_argument("χ(p) must be nonzero");
        const long mod_pf = to_long(ipow(p, static_cast<unsigned long>(f)));
        if (static_cast<long>(table.size()) != mod_pf && !(f == 0 && table.empty()))
            throw std::invalid_argument("unit table has wrong size");
        if (f == 0) table = {CValue(1)};
        check_multiplicative(table, mod_pf);
        table_ = std::move(table);
        renormalize();
    }

    static Quasicharacter unramified(long p, CValue t) { return Quasicharacter(p, std::move(t), 0, {}); }

    /// χ(g^j) = ζ^{jk} with g a primitive root mod p^2 and ζ = exp(2πi/φ(p^f)).
    static Quasicharacter from_generator(long p, long f, long k, CValue t) {
        if (f == 0) return unramified(p, std::move(t));
        const long m = to_long(ipow(p, static_cast<unsigned long>(f)));
        const long order = m / p * (p - 1);
        const long g = primitive_root_p2(p);
        std::vector<CValue> table(static_cast<std::size_t>(m), CValue(0));
        long x = 1;
        for (long j = 0; j < order; ++j) {
            table[static_cast<std::size_t>(x)] = CValue::root_of_unity(order, mod(j * k, order));
            x = x * g % m;
        }
        return Quasicharacter(p, std::move(t), f, std::move(table));
    }

    long prime() const { return p_; }
    long conductor_exponent() const { return f_; }
    const CValue& at_uniformizer() const { return t_; }
    long modulus() const { return to_long(ipow(p_, static_cast<unsigned long>(f_))); }

    /// χ(u) for a unit residue u (any integer coprime to p).
    CValue at_unit(long u) const {
        if (mod(u, p_) == 0) throw std::domain_error("not a unit");
        return table_[static_cast<std::size_t>(mod(u, modulus()))];
    }

    /// χ(x) for x ∈ Q^*, via x = p^v * u.
    CValue operator()(const Rational& x) const {
        if (x == 0) throw std::domain_error("character at zero");
        long v = ord_finite(x, p_);
        Rational u = x * rpow(p_, -v);
        long res = f_ == 0 ? 1 : to_long(residue(u, p_, f_));
        return t_.pow(v) * table_[static_cast<std::size_t>(f_ == 0 ? 0 : res)];
    }

    Quasicharacter inverse() const {
        std::vector<CValue> inv(table_.size(), CValue(0));
        for (std::size_t i = 0; i < table_.size(); ++i)
            if (f_ == 0 || i % static_cast<std::size_t>(p_) != 0) inv[i] = table_[i].inverse();
        if (f_ == 0) inv.clear();
        return Quasicharacter(p_, t_.inverse(), f_, std::move(inv));
    }

    /// Product χ·χ_β with χ_β(x) = β^{ord x} (unramified twist).
    Quasicharacter twisted_by_unramified(const CValue& beta) const {
        std::vector<CValue> tbl = f_ == 0 ? std::vector<CValue>{} : table_;
        return Quasicharacter(p_, t_ * beta, f_, std::move(tbl));
    }

    CValue at_minus_one() const { return at_unit(-1); }

    /// Whether every table entry is an exact value.
    bool is_exact() const {
        if (!t_.is_exact()) return false;
        for (const auto& v : table_)
            if (!v.is_exact()) return false;
        return true;
    }

private:
    void check_multiplicative(const std::vector<CValue>& table, long m) const {
        if (m == 1) return;
        for (long a = 1; a < m; ++a) {
            if (a % p_ == 0) continue;
            for (long b = a; b < m; ++b) {
                if (b % p_ == 0) continue;
                CValue lhs = table[static_cast<std::size_t>(a * b % m)];
                CValue rhs = table[static_cast<std::size_t>(a)] * table[static_cast<std::size_t>(b)];
                bool ok = (lhs.is_exact() && rhs.is_exact()) ? exact_equal(lhs, rhs) : approx_equal(lhs, rhs, 1e-9);
                if (!ok) throw std::invalid_argument("unit table is not multiplicative");
            }
        }
    }

    static bool is_one(const CValue& v) {
        return v.is_exact() ? exact_equal(v, CValue(1)) : approx_equal(v, CValue(1), 1e-9);
    }

    // Lowers f while χ stays trivial on U^{(f-1)}.
    void renormalize() {
        while (f_ > 0) {
            const long m = modulus();
            const long step = m / p_;
            bool trivial = true;
            for (long u = 1; u < m && trivial; u += step)
                if (!is_one(table_[static_cast<std::size_t>(u)])) trivial = false;
            if (!trivial) break;
            std::vector<CValue> smaller(static_cast<std::size_t>(step), CValue(0));
            for (long u = 0; u < step; ++u)
                if (u % p_ != 0 || step == 1) smaller[static_cast<std::size_t>(u)] = table_[static_cast<std::size_t>(u)];
            --f_;
            table_ = f_ == 0 ? std::vector<CValue>{CValue(1)} : std::move(smaller);
        }
    }

    long p_;
    CValue t_;
    long f_;
    std::vector<CValue> table_;
};

/// τ(χ) = Σ_{u mod p^f} ψ(u/p^f) χ(u/p^f); 1 for unramified χ.
inline CValue gauss_sum(const Quasicharacter& chi) {
    const long f = chi.conductor_exponent();
    if (f == 0) return CValue(1);
    const long p = chi.prime();
    const long m = chi.modulus();
    AdditiveCharacterPsi psi{p};
    CValue sum(0);
    for (long u = 1; u < m; ++u) {
        if (u % p == 0) continue;
        sum += psi(Rational(u, m)) * chi.at_unit(u);
    }
    return sum * chi.at_uniformizer().pow(-f);
}

/// Closed form of ∫_{F^*} χ(x)ψ(x) dx, valid for |χ(p)| < p.
inline CValue mellin_closed_form(const Quasicharacter& chi) {
    const long q = chi.prime();
    const CValue& t = chi.at_uniformizer();
    if (auto r = t.as_rational(); r && *r == q) throw std::domain_error("pole at χ(p) = q");
    if (t.abs() >= static_cast<double>(q)) throw std::domain_error("|χ(p)| >= q: integral diverges");
    if (chi.conductor_exponent() > 0) return gauss_sum(chi);
    return (CValue(1) - t.inverse()) / (CValue(1) - t * CValue(Rational(1, q)));
}

inline bool is_plus_minus_one(const CValue& alpha) {
    auto r = alpha.as_rational();
    return r && (*r == 1 || *r == -1);
}

/// Interpolation factor e(α, χ).
inline CValue euler_factor(const CValue& alpha, const Quasicharacter& chi) {
    const CValue& t = chi.at_uniformizer();
    if (t.abs() == 0.0) throw std::domain_error("χ(p) = 0");
    const long f = chi.conductor_exponent();
    if (f > 0) return alpha.pow(-f);
    if (is_plus_minus_one(alpha)) return CValue(1) - alpha * t.inverse();
    return (CValue(1) - t / alpha) * (CValue(1) - (alpha * t).inverse());
}

namespace detail {
// q^{-e} for rational e, exact when e is an integer.
inline CValue ppow_neg(long q, const Rational& e) {
    if (e.get_den() == 1) return CValue(rpow(q, -to_long(e.get_num())));
    return CValue(std::complex<double>(std::pow(static_cast<double>(q), -e.get_d()), 0.0));
}
}  // namespace detail

/// L(s, π_α ⊗ χ).
inline CValue local_L(const Rational& s, const CValue& alpha, const Quasicharacter& chi) {
    if (chi.conductor_exponent() > 0) return CValue(1);
    const long q = chi.prime();
    const CValue& t = chi.at_uniformizer();
    const Rational half(1, 2);
    auto inv_factor = [](const CValue& x) {
        CValue d = CValue(1) - x;
        if (d.is_exact() ? d.is_exact_zero() : d.abs() < 1e-300) throw std::domain_error("pole of local L-factor");
        return d.inverse();
    };
    CValue upper = inv_factor(t * alpha * detail::ppow_neg(q, s + half));
    if (is_plus_minus_one(alpha)) return upper;
    return inv_factor(t * alpha.inverse() * detail::ppow_neg(q, s - half)) * upper;
}

}  // namespace exzero
