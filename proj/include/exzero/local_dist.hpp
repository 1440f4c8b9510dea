#pragma once

// The local distributions μ_α = ψ(x)χ_α(x)dx on Q_p (α = 1) or Q_p^*, with
// dx the additive Haar measure giving Z_p volume 1, and χ_α(x) = α^{ord x}.
// Ball integrals are finite character sums; nothing here uses the vanishing
// identities for ψ, which are checked separately.

#include "ball_function.hpp"
#include "characters.hpp"

#include <cmath>
#include <limits>

namespace exzero {

/// The ball a + p^{ord a + n}Z_p = a·U^{(n)} for n >= 1.
inline Ball coset_ball(long p, const Rational& a, long n) {
    if (n < 1) throw std::invalid_argument("a·U^{(n)} is a single ball only for n >= 1");
    return Ball::make(p, a, ord_finite(a, p) + n);
}

/// a·U as p - 1 balls.
inline std::vector<Ball> unit_coset_balls(long p, const Rational& a) {
    std::vector<Ball> out;
    for (long u = 1; u < p; ++u) out.push_back(Ball::make(p, a * u, ord_finite(a, p) + 1));
    return out;
}

/// ∫_{b + p^m Z_p} ψ dx = p^{-L} Σ_{j mod p^{L-m}} ψ(b + j p^m), L = max(m, 0).
inline CValue psi_ball_integral(const Ball& B) {
    AdditiveCharacterPsi psi{B.p};
    const long L = std::max<long>(B.radius, 0);
    const long count = to_long(ipow(B.p, static_cast<unsigned long>(L - B.radius)));
    const Rational step = rpow(B.p, B.radius);
    // collect multiplicities of each root of unity, reduce once
    long level = 1;
    for (long j = 0; j < std::min<long>(count, 2); ++j)
        level = std::max(level, to_long(psi.fractional_part(B.center + step * j).get_den()));
    std::vector<Rational> mult(static_cast<std::size_t>(level), 0);
    for (long j = 0; j < count; ++j) {
        Rational fr = psi.fractional_part(B.center + step * j) * level;
        mult[static_cast<std::size_t>(to_long(fr.get_num()))] += 1;
    }
    return CValue(Cyclotomic::from_cyclic(level, std::move(mult))) * CValue(rpow(B.p, -L));
}

/// μ_α(B). For α != 1 the ball must avoid 0, where χ_α is constant.
inline CValue mu_alpha_ball(const CValue& alpha, const Ball& B) {
    bool trivial = alpha.is_exact() && alpha.as_rational() && *alpha.as_rational() == 1;
    if (trivial) return psi_ball_integral(B);
    if (B.contains(Rational(0))) throw std::domain_error("μ_α with α != 1 lives on Q_p^*: ball contains 0");
    return alpha.pow(ord_finite(B.center, B.p)) * psi_ball_integral(B);
}

inline CValue integrate_mu_alpha(const RationalBallFunction& f, const CValue& alpha) {
    if (f.constant() != 0) throw std::invalid_argument("integrand must be compactly supported");
    CValue s(0);
    for (const auto& [b, c] : f.terms())
        if (c != 0) s += CValue(c) * mu_alpha_ball(alpha, b);
    return s;
}

/// ∫ (a·f) dμ_α = W_f(diag(a, 1)).
inline CValue whittaker_value(const RationalBallFunction& f, const CValue& alpha, const Rational& a) {
    return integrate_mu_alpha(f.dilated(a), alpha);
}

/// ∫_{p^n U} χ dμ_α, summed over the balls p^n u + p^{n+F}Z_p on which χ is
/// constant (F = max(f, 1)).
inline CValue mellin_shell(const Quasicharacter& chi, const CValue& alpha, long n) {
    const long p = chi.prime();
    const long F = std::max<long>(chi.conductor_exponent(), 1);
    const long m = to_long(ipow(p, static_cast<unsigned long>(F)));
    const Rational pn = rpow(p, n);
    CValue s(0);
    for (long u = 1; u < m; ++u) {
        if (u % p == 0) continue;
        Rational x = pn * u;
        s += chi(x) * mu_alpha_ball(alpha, Ball::make(p, x, n + F));
    }
    return s;
}

struct MellinResult {
    CValue truncated;   // Σ_{n_min <= n <= n_max} shells
    CValue completed;   // truncated plus the geometric tail summed in closed form
    double tail_bound;  // |Σ_{n > n_max} shells|
    long n_min;
    long n_max;
};

/// ∫_{Q_p^*} χ dμ_α by shells. Shells below n_min = -(f + 2) are not summed;
/// they vanish by the ψ-vanishing identities (tested on their own). For n >= 0 the
/// shells form a geometric sequence with ratio χ(p)α/q, giving the tail.
inline MellinResult mellin_mu_alpha(const Quasicharacter& chi, const CValue& alpha, long n_max) {
    const long q = chi.prime();
    if (n_max < 0) throw std::invalid_argument("n_max must be non-negative");
    CValue r = chi.at_uniformizer() * alpha * CValue(Rational(1, q));
    const double ar = r.abs();
    if (ar >= 1.0) throw std::domain_error("|χ(p)α| >= q: the Mellin integral diverges");
    MellinResult res{CValue(0), CValue(0), 0.0, -(chi.conductor_exponent() + 2), n_max};
    CValue last(0);
    for (long n = res.n_min; n <= n_max; ++n) {
        last = mellin_shell(chi, alpha, n);
        res.truncated += last;
    }
    res.completed = res.truncated + last * r / (CValue(1) - r);
    res.tail_bound = last.abs() * ar / (1.0 - ar);
    return res;
}

/// τ(χ)e(α, χ)L(1/2, π_α ⊗ χ).
inline CValue interpolation_target(const Quasicharacter& chi, const CValue& alpha) {
    return gauss_sum(chi) * euler_factor(alpha, chi) * local_L(Rational(1, 2), alpha, chi);
}

}  // namespace exzero
