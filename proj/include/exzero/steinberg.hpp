#pragma once

// The function φ0 on GL_2(Q_p) attached to a homomorphism ℓ: Q_p^* -> R, and
// the 1-cocycle z_ℓ(a) = (1 - a)(ℓ·1_O) of Q_p^* with values in locally
// constant functions (for ℓ = ord) or pointwise-evaluated functions (ℓ = log).

#include "ball_function.hpp"
#include "padic.hpp"

#include <string>
#include <utility>

namespace exzero {

/// ℓ = ord_p, integer valued.
struct EllOrd {
    using value_type = Rational;
    long p;

    static constexpr const char* name = "ord";
    Rational operator()(const Rational& x) const { return ord_finite(x, p); }
    Rational zero() const { return 0; }
    static bool equal(const Rational& a, const Rational& b) { return a == b; }
    static std::string str(const Rational& x) { return x.get_str(); }
};

/// ℓ = log_p (Iwasawa branch), evaluated to relative precision prec.
struct EllLog {
    using value_type = PadicNumber;
    long p;
    long prec;

    static constexpr const char* name = "log";
    PadicNumber operator()(const Rational& x) const { return log_iwasawa(x, p, prec); }
    PadicNumber zero() const { return PadicNumber::zero(p, prec); }
    static bool equal(const PadicNumber& a, const PadicNumber& b) { return agree(a, b); }
    static std::string str(const PadicNumber& x) { return x.str(); }
};

template <class V>
V times_integer(const V& v, long k) {
    return v * V(k);
}
template <>
inline PadicNumber times_integer(const PadicNumber& v, long k) {
    return v * Rational(k);
}

/// φ0(g) = ℓ(a²/det) if ord(a) < ord(c), else ℓ(c²/det).
template <class Ell>
typename Ell::value_type phi0(const tree::Matrix2& g, const Ell& ell) {
    Rational det = g.det();
    if (det == 0) throw std::domain_error("singular matrix");
    if (ord(g.a, ell.p) < ord(g.c, ell.p)) return ell(Rational(g.a * g.a / det));
    return ell(Rational(g.c * g.c / det));
}

/// z_ℓ(a)(x) = ℓ(a)1_{aO}(x) + ℓ(x)(1_O(x) - 1_{aO}(x)).
template <class Ell>
class SteinbergCocycle {
public:
    using value_type = typename Ell::value_type;

    SteinbergCocycle(Rational a, Ell ell) : a_(std::move(a)), ell_(ell) {
        if (a_ == 0) throw std::domain_error("z_ℓ(0) is undefined");
        k_ = ord_finite(a_, ell_.p);
    }

    const Rational& a() const { return a_; }

    value_type operator()(const Rational& x) const {
        const long p = ell_.p;
        bool in_aO = x == 0 || ord_finite(x, p) >= k_;
        bool in_O = x == 0 || ord_finite(x, p) >= 0;
        value_type v = in_aO ? ell_(a_) : ell_.zero();
        if (in_O != in_aO) {
            value_type lx = ell_(x);
            if (in_O)
                v = v + lx;
            else
                v = v - lx;
        }
        return v;
    }

    /// For ℓ = ord: the ball expansion ℓ(a)1_{aO} ± Σ_j j·1_{p^j U} over the
    /// shells between O and aO.
    RationalBallFunction ball_function() const
        requires std::is_same_v<Ell, EllOrd>
    {
        const long p = ell_.p;
        RationalBallFunction f(p);
        f.add(tree::Ball::make(p, 0, k_), Rational(k_));
        long lo = std::min<long>(0, k_), hi = std::max<long>(0, k_);
        Rational sign = k_ >= 0 ? 1 : -1;
        for (long j = lo; j < hi; ++j) {
            if (j == 0) continue;
            // j·1_{p^j U} = j·(1_{p^j O} - 1_{p^{j+1} O})
            f.add(tree::Ball::make(p, 0, j), sign * j);
            f.add(tree::Ball::make(p, 0, j + 1), -sign * j);
        }
        return f;
    }

private:
    Rational a_;
    Ell ell_;
    long k_ = 0;
};

template <class Ell>
SteinbergCocycle<Ell> z_ell(const Rational& a, const Ell& ell) {
    return SteinbergCocycle<Ell>(a, ell);
}

template <class V>
struct CoboundaryCheck {
    V lhs;
    V rhs;
};

/// lhs = φ0(d^{-1}w) - φ0(d^{-1}) - φ0(w) + φ0(1) with d = diag(a,1) and
/// w = ((x, -1), (1, 0)); rhs = 2 z_ℓ(a)(x).
template <class Ell>
CoboundaryCheck<typename Ell::value_type> coboundary_check(const Rational& a, const Rational& x, const Ell& ell) {
    using tree::Matrix2;
    Matrix2 d_inv = Matrix2::diag(a, 1).inverse();
    Matrix2 w{x, -1, 1, 0};
    typename Ell::value_type lhs = phi0(d_inv * w, ell) - phi0(d_inv, ell) - phi0(w, ell) + phi0(Matrix2::identity(), ell);
    return {lhs, times_integer(z_ell(a, ell)(x), 2)};
}

}  // namespace exzero
