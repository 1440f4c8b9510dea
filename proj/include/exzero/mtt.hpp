#pragma once

// The p-adic measure of an elliptic curve built from its plus modular symbol,
// and the two reports: interpolation of the total mass, and the exceptional
// zero (derivative against the L-invariant) at split multiplicative p.

#include "elliptic.hpp"
#include "measure.hpp"
#include "modsym.hpp"

#include <optional>
#include <sstream>

namespace exzero {

struct MttMeasure {
    BallMeasure measure;
    PadicNumber alpha;
    Reduction reduction;
    Rational lambda0;
    long certificate;
};

/// Good ordinary p: μ(a + p^n) = α^{-n}λ(a/p^n) - α^{-n-1}λ(a/p^{n-1}), α the
/// unit root. Multiplicative p: μ(a + p^n) = α^{-n}λ(a/p^n) with α = a_p; λ
/// is already a U_p-eigensymbol there, so no stabilization term.
inline MttMeasure mtt_measure(const EllipticCurve& E, const Eigensymbol& lam, long p, long level, long prec = 20) {
    require_prime(p);
    if (p == 2) throw std::invalid_argument("p must be odd");
    if (level < 1) throw std::invalid_argument("level must be >= 1");
    const Reduction red = E.reduction(p);
    if (red == Reduction::additive) throw std::domain_error("additive reduction at p");
    const long ap = E.ap(p);
    const bool good = red == Reduction::good;
    if (good && ap % p == 0) throw std::domain_error("p is not ordinary for E");
    const long work = prec + level + 2;
    PadicNumber alpha = good ? unit_root(ap, p, work) : PadicNumber::from_rational(ap, p, work);
    PadicNumber alpha_inv = PadicNumber::from_rational(1, p, work) / alpha;

    // λ(a/p^n) for all a mod p^n, n = 0..level
    std::vector<std::vector<Rational>> lam_at(static_cast<std::size_t>(level + 1));
    for (long n = 0; n <= level; ++n) {
        const long m = to_long(ipow(p, static_cast<unsigned long>(n)));
        auto& row = lam_at[static_cast<std::size_t>(n)];
        row.reserve(static_cast<std::size_t>(m));
        for (long a = 0; a < m; ++a) row.push_back(lam(Rational(a, m)));
    }
    BallMeasure mu(p, level, prec);
    for (long n = 1; n <= level; ++n) {
        const long m = to_long(ipow(p, static_cast<unsigned long>(n)));
        const long m1 = m / p;
        PadicNumber an = alpha_inv.pow(n);
        for (long a = 1; a < m; ++a) {
            if (a % p == 0) continue;
            PadicNumber v = an * PadicNumber::with_absolute(lam_at[static_cast<std::size_t>(n)][static_cast<std::size_t>(a)], p, work);
            if (good)
                v -= an * alpha_inv * PadicNumber::with_absolute(lam_at[static_cast<std::size_t>(n - 1)][static_cast<std::size_t>(a % m1)], p, work);
            mu.set(n, a, v);
        }
    }
    DistributionReport rep = check_distribution_and_bound(mu);
    if (!rep.ok) throw std::runtime_error("MTT measure: " + rep.message + " (eigensymbol or a_p inconsistent)");
    return {std::move(mu), alpha, red, lam(Rational(0)), rep.certificate};
}

/// e(α, 1): (1 - 1/α)^2 for good ordinary p, 1 - 1/α for α = ±1.
inline PadicNumber trivial_euler_factor(const PadicNumber& alpha, Reduction red) {
    const long p = alpha.prime();
    PadicNumber one = PadicNumber::from_rational(1, p, alpha.relative_precision());
    PadicNumber f = one - one / alpha;
    return red == Reduction::good ? f * f : f;
}

namespace detail {
inline std::string padic_str(const PadicNumber& x, long k) {
    // residue mod p^k when integral, otherwise the full form
    if (!x.is_zero() && x.valuation().value < 0) return x.str();
    if (k > x.absolute_precision()) return x.str();
    return x.residue(k).get_str() + " mod " + std::to_string(x.prime()) + "^" + std::to_string(k);
}
}  // namespace detail

struct InterpolationReport {
    std::string label;
    long p, level, prec;
    Reduction reduction;
    Rational lambda0;
    PadicNumber alpha;
    PadicNumber ratio;     // total mass / λ(0)
    PadicNumber expected;  // e(α, 1)
    long certificate;
    bool pass;

    std::string machine_line() const {
        std::ostringstream os;
        os << (pass ? "PASS" : "FAIL") << " report=interp curve=" << label << " p=" << p << " level=" << level
           << " prec=" << prec << " reduction=" << (reduction == Reduction::good ? "good" : reduction == Reduction::split ? "split" : "nonsplit")
           << " lambda0=" << lambda0.get_str() << " c=" << certificate << " ratio=" << detail::padic_str(ratio, prec)
           << " expected=" << detail::padic_str(expected, prec);
        return os.str();
    }
};

/// Total mass of the measure against the Euler factor, modulo p^prec.
inline InterpolationReport interpolation_report(const EllipticCurve& E, const Eigensymbol& lam, long p, long level, long prec) {
    MttMeasure m = mtt_measure(E, lam, p, level, prec + 4);
    if (m.lambda0 == 0) throw std::domain_error("λ(0) = 0: the interpolation check is vacuous");
    PadicNumber l0 = PadicNumber::from_rational(m.lambda0, p, prec + 4);
    PadicNumber ratio = m.measure.total_mass() / l0;
    PadicNumber expected = trivial_euler_factor(m.alpha, m.reduction);
    bool pass = congruent(ratio, expected, prec);
    return {E.label(), p, level, prec, m.reduction, m.lambda0, m.alpha, ratio, expected, m.certificate, pass};
}

struct ExceptionalZeroReport {
    std::string label;
    long p, level, prec;
    bool vacuous = false;  // λ(0) = 0
    Rational lambda0;
    long certificate = 0;
    PadicNumber mass_ratio;     // L_p(E, 0)/λ(0)
    long mass_exponent = 0;     // level - c - ord λ(0)
    PadicNumber moment_ratio;   // moment_1/λ(0)
    long moment_exponent = 0;   // reliable exponent of moment_ratio
    PadicNumber l_invariant;
    PadicNumber difference;
    long order = 0;             // vanishing order estimate
    bool order_is_lower_bound = false;
    bool mass_ok = false;
    bool ratio_ok = false;
    bool pass = false;
    std::string note;

    std::string machine_line() const {
        std::ostringstream os;
        os << (pass ? "PASS" : "FAIL") << " report=ezero curve=" << label << " p=" << p << " level=" << level << " prec=" << prec;
        if (vacuous) {
            os << " skipped=lambda0_zero";
            return os.str();
        }
        os << " lambda0=" << lambda0.get_str() << " c=" << certificate << " mass=" << mass_ratio.str()
           << " mass_ok=" << mass_ok << " moment1_ratio=" << detail::padic_str(moment_ratio, prec)
           << " L=" << detail::padic_str(l_invariant, prec) << " ratio_ok=" << ratio_ok
           << " order" << (order_is_lower_bound ? ">=" : "=") << order;
        return os.str();
    }
};

inline ExceptionalZeroReport exceptional_zero_report(const EllipticCurve& E, const Eigensymbol& lam, long p, long level, long prec) {
    ExceptionalZeroReport r;
    r.label = E.label();
    r.p = p;
    r.level = level;
    r.prec = prec;
    Reduction red = E.reduction(p);
    if (red != Reduction::split)
        throw std::domain_error(std::string("exceptional zero needs split multiplicative reduction, found ") + to_string(red));
    r.lambda0 = lam(Rational(0));
    if (r.lambda0 == 0) {
        r.vacuous = true;
        r.pass = true;
        r.note = "λ(0) = 0, analytic rank > 0: the check is vacuous";
        return r;
    }
    const long work = prec + level + 6;
    MttMeasure m = mtt_measure(E, lam, p, level, work);
    r.certificate = m.certificate;
    const long ord_l0 = ord_finite(r.lambda0, p);
    PadicNumber l0 = PadicNumber::from_rational(r.lambda0, p, work);

    RiemannSum m0 = moment(m.measure, 0, level);
    r.mass_ratio = m0.value / l0;
    r.mass_exponent = level - r.certificate - ord_l0;
    r.mass_ok = congruent(r.mass_ratio, PadicNumber::zero(p, work), r.mass_exponent);

    RiemannSum m1 = moment(m.measure, 1, level);
    r.moment_ratio = m1.value / l0;
    r.moment_exponent = std::min(m1.reliable_exponent(), r.moment_ratio.absolute_precision() + ord_l0) - ord_l0;
    r.l_invariant = l_invariant(E, p, work);
    r.difference = r.moment_ratio - r.l_invariant;
    if (r.moment_exponent < prec) {
        r.note = "level too low for the requested precision: moment known mod p^" + std::to_string(r.moment_exponent);
        r.ratio_ok = false;
    } else {
        r.ratio_ok = congruent(r.moment_ratio, r.l_invariant, prec);
    }
    VanishingOrder vo = vanishing_order(m.measure, 2, level);
    r.order = vo.order;
    r.order_is_lower_bound = vo.lower_bound;
    r.pass = r.mass_ok && r.ratio_ok;
    return r;
}

}  // namespace exzero
