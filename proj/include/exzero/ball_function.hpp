#pragma once

// Locally constant functions on Q_p or P^1(Q_p) written as
//   f = c_∞ + Σ_B c_B 1_B
// over finitely many balls B. On Q_p (compact support) c_∞ is zero; on P^1
// it is the value at ∞ and everywhere outside the balls.

#include "bt_tree.hpp"

#include <functional>
#include <map>
#include <vector>

namespace exzero {

using tree::Ball;
using tree::ProjectivePoint;

template <class V>
class BallFunction {
public:
    explicit BallFunction(long p, V zero = V(0)) : p_(p), zero_(zero), constant_(zero) {}

    static BallFunction indicator(const Ball& b, V one = V(1)) {
        BallFunction f(b.p, one - one);
        f.add(b, one);
        return f;
    }

    long prime() const { return p_; }
    const V& constant() const { return constant_; }
    const std::map<Ball, V>& terms() const { return terms_; }
    const V& zero() const { return zero_; }

    BallFunction& add(const Ball& b, const V& c) {
        auto [it, fresh] = terms_.emplace(b, c);
        if (!fresh) it->second = it->second + c;
        return *this;
    }
    BallFunction& add_constant(const V& c) {
        constant_ = constant_ + c;
        return *this;
    }

    /// Adds c·1_U for a compact open U of P^1.
    BallFunction& add(const tree::CompactOpen& U, const V& c) {
        if (U.contains_infinity()) {
            add_constant(c);
            for (const auto& b : U.balls()) add(b, zero_ - c);
        } else {
            for (const auto& b : U.balls()) add(b, c);
        }
        return *this;
    }

    V operator()(const Rational& x) const {
        V v = constant_;
        for (const auto& [b, c] : terms_)
            if (b.contains(x)) v = v + c;
        return v;
    }
    V operator()(const ProjectivePoint& z) const { return z.is_infinity() ? constant_ : (*this)(*z.x); }
    V at_infinity() const { return constant_; }

    friend BallFunction operator+(BallFunction f, const BallFunction& g) {
        f.constant_ = f.constant_ + g.constant_;
        for (const auto& [b, c] : g.terms_) f.add(b, c);
        return f;
    }
    BallFunction scaled(const V& s) const {
        BallFunction f(p_, zero_);
        f.constant_ = constant_ * s;
        for (const auto& [b, c] : terms_) f.terms_.emplace(b, c * s);
        return f;
    }
    friend BallFunction operator-(const BallFunction& f, const BallFunction& g) {
        return f + g.scaled(g.zero_ - V(1));
    }

    /// (a·f)(x) = f(a^{-1} x): the ball c + p^m Z_p moves to ac + p^{m+ord a} Z_p.
    BallFunction dilated(const Rational& a) const {
        if (a == 0) throw std::domain_error("dilation by zero");
        long v = ord_finite(a, p_);
        BallFunction f(p_, zero_);
        f.constant_ = constant_;
        for (const auto& [b, c] : terms_) f.add(Ball::make(p_, a * b.center, b.radius + v), c);
        return f;
    }

    /// (t·f)(x) = f(x - t).
    BallFunction translated(const Rational& t) const {
        BallFunction f(p_, zero_);
        f.constant_ = constant_;
        for (const auto& [b, c] : terms_) f.add(Ball::make(p_, b.center + t, b.radius), c);
        return f;
    }

    /// Disjoint balls with the value of f - c_∞ on each; f - c_∞ vanishes
    /// off their union. Zero-valued atoms are dropped.
    std::map<Ball, V> atoms(const std::function<bool(const V&)>& is_zero) const {
        std::vector<Ball> balls;
        for (const auto& [b, c] : terms_) balls.push_back(b);
        std::map<Ball, V> out;
        for (const auto& top : tree::CompactOpen::normalize(p_, balls)) split(top, balls, out);
        for (auto it = out.begin(); it != out.end();) it = is_zero(it->second) ? out.erase(it) : std::next(it);
        return out;
    }

    bool is_zero(const std::function<bool(const V&)>& zero_test) const {
        return zero_test(constant_) && atoms(zero_test).empty();
    }

private:
    void split(const Ball& b, const std::vector<Ball>& balls, std::map<Ball, V>& out) const {
        bool finer = false;
        for (const auto& x : balls)
            if (b.contains(x) && !(x == b)) {
                finer = true;
                break;
            }
        if (finer) {
            for (const auto& child : b.children()) split(child, balls, out);
            return;
        }
        V v = zero_;
        for (const auto& [x, c] : terms_)
            if (x.contains(b)) v = v + c;
        out.emplace(b, v);
    }

    long p_;
    V zero_;
    V constant_;
    std::map<Ball, V> terms_;
};

using RationalBallFunction = BallFunction<Rational>;

inline bool rational_is_zero(const Rational& x) { return x == 0; }

}  // namespace exzero
