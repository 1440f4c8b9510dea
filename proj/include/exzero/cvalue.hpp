#pragma once

// Values of characters and local integrals.
//
// Exact mode: elements of Q(ζ_M) as rational coefficient vectors on the power
// basis 1, ζ, ..., ζ^{φ(M)-1}, always reduced modulo the M-th cyclotomic
// polynomial so that equality is coefficient equality. Float mode: a complex
// double. Mixed arithmetic falls back to float.

#include "linalg.hpp"
#include "numeric.hpp"

#include <cmath>
#include <complex>
#include <map>
#include <numbers>
#include <sstream>
#include <string>
#include <variant>
#include <vector>

namespace exzero {

namespace detail {

using IntPoly = std::vector<Integer>;

inline IntPoly poly_divide_exact(IntPoly num, const IntPoly& den) {
    // den monic
    std::size_t dn = den.size() - 1;
    if (num.size() < den.size()) return {0};
    IntPoly q(num.size() - dn, 0);
    for (std::size_t i = num.size(); i-- > dn;) {
        Integer c = num[i];
        if (c == 0) continue;
        q[i - dn] = c;
        for (std::size_t j = 0; j <= dn; ++j) num[i - dn + j] -= c * den[j];
    }
    return q;
}

inline const IntPoly& cyclotomic_poly(long m) {
    thread_local std::map<long, IntPoly> cache;
    auto it = cache.find(m);
    if (it != cache.end()) return it->second;
    IntPoly num(static_cast<std::size_t>(m) + 1, 0);
    num[0] = -1;
    num[static_cast<std::size_t>(m)] = 1;
    for (long d = 1; d < m; ++d)
        if (m % d == 0) num = poly_divide_exact(num, cyclotomic_poly(d));
    return cache.emplace(m, num).first->second;
}

inline long euler_phi(long m) {
    long r = m;
    for (long q = 2; q * q <= m; ++q) {
        if (m % q == 0) {
            while (m % q == 0) m /= q;
            r -= r / q;
        }
    }
    if (m > 1) r -= r / m;
    return r;
}

}  // namespace detail

class Cyclotomic {
public:
    Cyclotomic() : level_(1), coeffs_{Rational(0)} {}
    explicit Cyclotomic(const Rational& r) : level_(1), coeffs_{r} {}

    /// ζ_M^k with ζ_M = exp(2πi/M).
    static Cyclotomic root_of_unity(long m, long k) {
        std::vector<Rational> c(static_cast<std::size_t>(m), 0);
        c[static_cast<std::size_t>(exzero::mod(k, m))] = 1;
        return from_cyclic(m, std::move(c));
    }

    /// Coefficients indexed by powers of ζ_M modulo x^M - 1.
    static Cyclotomic from_cyclic(long m, std::vector<Rational> c) {
        Cyclotomic r;
        r.level_ = m;
        r.coeffs_ = reduce(m, std::move(c));
        r.minimize();
        return r;
    }

    long level() const { return level_; }
    const std::vector<Rational>& coefficients() const { return coeffs_; }

    bool is_zero() const {
        for (const auto& c : coeffs_)
            if (c != 0) return false;
        return true;
    }

    std::optional<Rational> as_rational() const {
        for (std::size_t i = 1; i < coeffs_.size(); ++i)
            if (coeffs_[i] != 0) return std::nullopt;
        return coeffs_[0];
    }

    std::complex<double> to_complex() const {
        std::complex<double> s = 0;
        for (std::size_t i = 0; i < coeffs_.size(); ++i) {
            if (coeffs_[i] == 0) continue;
            double ang = 2.0 * std::numbers::pi * static_cast<double>(i) / static_cast<double>(level_);
            s += coeffs_[i].get_d() * std::complex<double>(std::cos(ang), std::sin(ang));
        }
        return s;
    }

    Cyclotomic lift_to(long m) const {
        if (m % level_ != 0) throw std::invalid_argument("cyclotomic level does not divide target");
        long step = m / level_;
        std::vector<Rational> c(static_cast<std::size_t>(m), 0);
        for (std::size_t i = 0; i < coeffs_.size(); ++i) c[i * static_cast<std::size_t>(step)] = coeffs_[i];
        Cyclotomic r;
        r.level_ = m;
        r.coeffs_ = reduce(m, std::move(c));
        return r;
    }

    friend Cyclotomic operator+(const Cyclotomic& a, const Cyclotomic& b) {
        long m = lcm(a.level_, b.level_);
        Cyclotomic x = a.lift_to(m), y = b.lift_to(m);
        for (std::size_t i = 0; i < x.coeffs_.size(); ++i) x.coeffs_[i] += y.coeffs_[i];
        x.minimize();
        return x;
    }

    Cyclotomic operator-() const {
        Cyclotomic r = *this;
        for (auto& c : r.coeffs_) c = -c;
        return r;
    }

    friend Cyclotomic operator-(const Cyclotomic& a, const Cyclotomic& b) { return a + (-b); }

    friend Cyclotomic operator*(const Cyclotomic& a, const Cyclotomic& b) {
        if (auto r = a.as_rational()) return b.scaled(*r);
        if (auto r = b.as_rational()) return a.scaled(*r);
        long m = lcm(a.level_, b.level_);
        Cyclotomic x = a.lift_to(m), y = b.lift_to(m);
        std::vector<Rational> c(static_cast<std::size_t>(m), 0);
        for (std::size_t i = 0; i < x.coeffs_.size(); ++i) {
            if (x.coeffs_[i] == 0) continue;
            for (std::size_t j = 0; j < y.coeffs_.size(); ++j) {
                if (y.coeffs_[j] == 0) continue;
                c[(i + j) % static_cast<std::size_t>(m)] += x.coeffs_[i] * y.coeffs_[j];
            }
        }
        return from_cyclic(m, std::move(c));
    }

    Cyclotomic scaled(const Rational& r) const {
        Cyclotomic x = *this;
        for (auto& c : x.coeffs_) c *= r;
        x.minimize();
        return x;
    }

    /// Complex conjugation ζ -> ζ^{-1}.
    Cyclotomic conj() const {
        std::vector<Rational> c(static_cast<std::size_t>(level_), 0);
        for (std::size_t i = 0; i < coeffs_.size(); ++i)
            c[static_cast<std::size_t>(exzero::mod(-static_cast<long>(i), level_))] += coeffs_[i];
        return from_cyclic(level_, std::move(c));
    }

    /// Multiplicative inverse by solving the multiplication-matrix system.
    Cyclotomic inverse() const {
        if (is_zero()) throw std::domain_error("inverse of zero");
        if (auto r = as_rational()) return Cyclotomic(Rational(1) / *r);
        const std::size_t d = coeffs_.size();
        linalg::Mat a(d, linalg::Vec(d, 0));
        for (std::size_t j = 0; j < d; ++j) {
            std::vector<Rational> basis(static_cast<std::size_t>(level_), 0);
            basis[j] = 1;
            Cyclotomic col = *this * from_cyclic_raw(level_, std::move(basis));
            for (std::size_t i = 0; i < d; ++i) a[i][j] = col.lift_to(level_).coeffs_[i];
        }
        linalg::Vec b(d, 0);
        b[0] = 1;
        auto res = linalg::solve(a, b, d);
        if (!res.solution) throw std::domain_error("cyclotomic inverse failed");
        std::vector<Rational> c(static_cast<std::size_t>(level_), 0);
        for (std::size_t i = 0; i < d; ++i) c[i] = (*res.solution)[i];
        return from_cyclic(level_, std::move(c));
    }

    friend bool operator==(const Cyclotomic& a, const Cyclotomic& b) { return (a - b).is_zero(); }

    std::string str() const {
        if (auto r = as_rational()) return r->get_str();
        std::ostringstream os;
        bool first = true;
        for (std::size_t i = 0; i < coeffs_.size(); ++i) {
            if (coeffs_[i] == 0) continue;
            if (!first) os << " + ";
            first = false;
            os << "(" << coeffs_[i].get_str() << ")";
            if (i > 0) os << "*z" << level_ << "^" << i;
        }
        return os.str();
    }

private:
    static Cyclotomic from_cyclic_raw(long m, std::vector<Rational> c) {
        Cyclotomic r;
        r.level_ = m;
        r.coeffs_ = reduce(m, std::move(c));
        return r;
    }

    static std::vector<Rational> reduce(long m, std::vector<Rational> c) {
        const auto& phi = detail::cyclotomic_poly(m);
        std::size_t d = phi.size() - 1;
        for (std::size_t i = c.size(); i-- > d;) {
            if (c[i] == 0) continue;
            Rational k = c[i];
            for (std::size_t j = 0; j <= d; ++j)
                if (phi[j] != 0) c[i - d + j] -= k * Rational(phi[j]);
        }
        c.resize(d);
        return c;
    }

    // Drops to level 1 when the value is rational; keeps the level otherwise.
    void minimize() {
        if (level_ == 1) return;
        if (auto r = as_rational()) {
            level_ = 1;
            coeffs_ = {*r};
        }
    }

    long level_;
    std::vector<Rational> coeffs_;
};

/// A value in C, exact (cyclotomic) when possible.
class CValue {
public:
    using Complex = std::complex<double>;

    CValue() : v_(Cyclotomic()) {}
    CValue(const Rational& r) : v_(Cyclotomic(r)) {}  // NOLINT(implicit)
    CValue(long n) : v_(Cyclotomic(Rational(n))) {}  // NOLINT(implicit)
    CValue(Cyclotomic c) : v_(std::move(c)) {}  // NOLINT(implicit)
    CValue(Complex z) : v_(z) {}  // NOLINT(implicit)

    static CValue root_of_unity(long m, long k) { return Cyclotomic::root_of_unity(m, k); }

    bool is_exact() const { return std::holds_alternative<Cyclotomic>(v_); }
    const Cyclotomic& exact() const { return std::get<Cyclotomic>(v_); }

    Complex to_complex() const {
        if (is_exact()) return exact().to_complex();
        return std::get<Complex>(v_);
    }

    std::optional<Rational> as_rational() const {
        if (!is_exact()) return std::nullopt;
        return exact().as_rational();
    }

    bool is_exact_zero() const { return is_exact() && exact().is_zero(); }

    friend CValue operator+(const CValue& a, const CValue& b) {
        if (a.is_exact() && b.is_exact()) return a.exact() + b.exact();
        return a.to_complex() + b.to_complex();
    }
    friend CValue operator-(const CValue& a, const CValue& b) {
        if (a.is_exact() && b.is_exact()) return a.exact() - b.exact();
        return a.to_complex() - b.to_complex();
    }
    CValue operator-() const {
        if (is_exact()) return -exact();
        return -to_complex();
    }
    friend CValue operator*(const CValue& a, const CValue& b) {
        if (a.is_exact() && b.is_exact()) return a.exact() * b.exact();
        return a.to_complex() * b.to_complex();
    }
    CValue inverse() const {
        if (is_exact()) return exact().inverse();
        Complex z = to_complex();
        if (z == Complex(0)) throw std::domain_error("inverse of zero");
        return Complex(1) / z;
    }
    friend CValue operator/(const CValue& a, const CValue& b) { return a * b.inverse(); }
    CValue& operator+=(const CValue& o) { return *this = *this + o; }
    CValue& operator-=(const CValue& o) { return *this = *this - o; }
    CValue& operator*=(const CValue& o) { return *this = *this * o; }

    CValue conj() const {
        if (is_exact()) return exact().conj();
        return std::conj(to_complex());
    }

    CValue pow(long e) const {
        CValue base = e >= 0 ? *this : inverse();
        CValue r(1);
        for (long i = 0; i < (e >= 0 ? e : -e); ++i) r *= base;
        return r;
    }

    double abs() const { return std::abs(to_complex()); }

    /// Exact equality needs both operands exact.
    friend bool exact_equal(const CValue& a, const CValue& b) {
        return a.is_exact() && b.is_exact() && a.exact() == b.exact();
    }

    friend bool approx_equal(const CValue& a, const CValue& b, double tol) {
        return std::abs(a.to_complex() - b.to_complex()) <= tol;
    }

    std::string str() const {
        if (is_exact()) return exact().str();
        std::ostringstream os;
        os.precision(15);
        Complex z = to_complex();
        os << z.real() << (z.imag() < 0 ? " - " : " + ") << std::abs(z.imag()) << "i";
        return os.str();
    }

private:
    std::variant<Cyclotomic, Complex> v_;
};

}  // namespace exzero
