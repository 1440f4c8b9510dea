#pragma once

// The Bruhat–Tits tree of PGL_2(Q_p), balls of Q_p and compact opens of P^1.
//
// Vertex (h, b) is the class of the lattice spanned by the columns of
// ((p^{-h}, b), (0, 1)), with b ∈ Z[1/p] ∩ [0, p^{-h}) the canonical residue
// of b mod p^{-h} Z_p. The apartment vertex v_n = [O ⊕ p^n] is (n, 0) and the
// height of (h, b) is h. Vertices and balls of Q_p are in bijection:
// (h, b) <-> b + p^{-h} Z_p, the set of ends reached by going down from (h, b).

#include "numeric.hpp"

#include <algorithm>
#include <compare>
#include <deque>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

namespace exzero::tree {

inline int compare(const Rational& a, const Rational& b) {
    int c = cmp(a, b);
    return (c > 0) - (c < 0);
}

/// 2x2 matrix over Q acting on lattices and on P^1.
struct Matrix2 {
    Rational a = 1, b = 0, c = 0, d = 1;

    Rational det() const { return a * d - b * c; }

    static Matrix2 identity() { return {}; }
    static Matrix2 diag(const Rational& x, const Rational& y) { return {x, 0, 0, y}; }
    static Matrix2 unipotent(const Rational& x) { return {1, x, 0, 1}; }

    friend Matrix2 operator*(const Matrix2& g, const Matrix2& h) {
        return {g.a * h.a + g.b * h.c, g.a * h.b + g.b * h.d, g.c * h.a + g.d * h.c, g.c * h.b + g.d * h.d};
    }

    Matrix2 inverse() const {
        Rational dt = det();
        if (dt == 0) throw std::domain_error("singular matrix");
        return {d / dt, -b / dt, -c / dt, a / dt};
    }
};

/// A point of P^1(Q): a rational or ∞.
struct ProjectivePoint {
    std::optional<Rational> x;  // nullopt is ∞

    static ProjectivePoint infinity() { return {}; }
    bool is_infinity() const { return !x.has_value(); }
    friend bool operator==(const ProjectivePoint& u, const ProjectivePoint& v) {
        if (u.is_infinity() || v.is_infinity()) return u.is_infinity() == v.is_infinity();
        return *u.x == *v.x;
    }
};

inline ProjectivePoint mobius(const Matrix2& g, const ProjectivePoint& z) {
    if (g.det() == 0) throw std::domain_error("singular matrix");
    if (z.is_infinity()) {
        if (g.c == 0) return ProjectivePoint::infinity();
        return {g.a / g.c};
    }
    Rational den = g.c * *z.x + g.d;
    if (den == 0) return ProjectivePoint::infinity();
    return {(g.a * *z.x + g.b) / den};
}

/// The ball center + p^radius Z_p with canonical center.
struct Ball {
    long p = 2;
    long radius = 0;
    Rational center = 0;

    static Ball make(long p, const Rational& center, long radius) {
        return {p, radius, reduce_mod_ppow(center, p, radius)};
    }

    bool contains(const Rational& x) const {
        auto v = ord(Rational(x - center), p);
        return v.infinite || v.value >= radius;
    }
    bool contains(const Ball& inner) const { return inner.radius >= radius && contains(inner.center); }
    bool disjoint(const Ball& o) const { return !contains(o) && !o.contains(*this); }

    Ball parent() const { return make(p, center, radius - 1); }
    std::vector<Ball> children() const {
        std::vector<Ball> out;
        Rational step = rpow(p, radius);
        for (long j = 0; j < p; ++j) out.push_back(make(p, center + step * j, radius + 1));
        return out;
    }

    friend bool operator==(const Ball& u, const Ball& v) {
        return u.p == v.p && u.radius == v.radius && u.center == v.center;
    }
    friend bool operator<(const Ball& u, const Ball& v) {
        if (u.radius != v.radius) return u.radius < v.radius;
        return compare(u.center, v.center) < 0;
    }

    std::string str() const { return center.get_str() + "+" + std::to_string(p) + "^" + std::to_string(radius) + "Z"; }
};

struct TreeVertex {
    long p = 2;
    long h = 0;
    Rational b = 0;

    static TreeVertex make(long p, long h, const Rational& b) { return {p, h, reduce_mod_ppow(b, p, -h)}; }
    static TreeVertex origin(long p) { return {p, 0, 0}; }
    /// v_n = [O ⊕ p^n].
    static TreeVertex apartment(long p, long n) { return {p, n, 0}; }
    static TreeVertex of_ball(const Ball& B) { return {B.p, -B.radius, B.center}; }

    Ball ball() const { return {p, -h, b}; }

    friend bool operator==(const TreeVertex& u, const TreeVertex& v) {
        return u.p == v.p && u.h == v.h && u.b == v.b;
    }
    friend bool operator<(const TreeVertex& u, const TreeVertex& v) {
        if (u.h != v.h) return u.h < v.h;
        return compare(u.b, v.b) < 0;
    }

    std::string str() const { return "(" + std::to_string(h) + "," + b.get_str() + ")"; }
};

inline long height(const TreeVertex& v) { return v.h; }

/// The unique neighbor one step toward ∞.
inline TreeVertex up(const TreeVertex& v) { return TreeVertex::make(v.p, v.h + 1, v.b); }

/// The p neighbors one step away from ∞.
inline std::vector<TreeVertex> down(const TreeVertex& v) {
    std::vector<TreeVertex> out;
    Rational step = rpow(v.p, -v.h);
    for (long j = 0; j < v.p; ++j) out.push_back(TreeVertex::make(v.p, v.h - 1, v.b + step * j));
    return out;
}

inline std::vector<TreeVertex> neighbors(const TreeVertex& v) {
    std::vector<TreeVertex> out = down(v);
    out.push_back(up(v));
    return out;
}

inline long distance(const TreeVertex& u, const TreeVertex& v) {
    // Both vertices lie below their join, the smallest ball containing both.
    long m = std::min(-u.h, -v.h);
    Ball bu = u.ball();
    while (!Ball::make(u.p, bu.center, m).contains(v.b)) --m;
    return (-u.h - m) + (-v.h - m);
}

struct TreeEdge {
    TreeVertex origin;
    TreeVertex target;

    TreeEdge reversed() const { return {target, origin}; }
    /// Oriented away from ∞ (target is a child of origin).
    bool points_down() const { return target.h == origin.h - 1; }
    /// The child endpoint; identifies the geometric edge.
    const TreeVertex& lower() const { return points_down() ? target : origin; }

    friend bool operator==(const TreeEdge&, const TreeEdge&) = default;
};

/// The edge from the parent of w down to w.
inline TreeEdge down_edge(const TreeVertex& w) { return {up(w), w}; }

/// Edge e_n of the apartment: origin v_{n+1}, target v_n.
inline TreeEdge apartment_edge(long p, long n) {
    return {TreeVertex::apartment(p, n + 1), TreeVertex::apartment(p, n)};
}

/// Image of vertex under g, re-normalized by column reduction over Z_p.
inline TreeVertex act(const Matrix2& g, const TreeVertex& v) {
    if (g.det() == 0) throw std::domain_error("singular matrix");
    const long p = v.p;
    Matrix2 m = g * Matrix2{rpow(p, -v.h), v.b, 0, 1};
    Rational x1 = m.a, y1 = m.c, x2 = m.b, y2 = m.d;
    if (ord(y1, p) < ord(y2, p)) {
        std::swap(x1, x2);
        std::swap(y1, y2);
    }
    // y2 has minimal valuation, so y1/y2 ∈ Z_(p).
    Rational k = y1 / y2;
    x1 -= k * x2;
    Rational first = x1 / y2;
    long e = ord_finite(first, p);
    return TreeVertex::make(p, -e, x2 / y2);
}

inline TreeEdge act(const Matrix2& g, const TreeEdge& e) { return {act(g, e.origin), act(g, e.target)}; }

/// Vertices within distance r of center, in BFS order.
inline std::vector<TreeVertex> ball_of_radius(const TreeVertex& center, long r) {
    std::vector<TreeVertex> out{center};
    std::set<TreeVertex> seen{center};
    std::deque<std::pair<TreeVertex, long>> queue{{center, 0}};
    while (!queue.empty()) {
        auto [v, d] = queue.front();
        queue.pop_front();
        if (d == r) continue;
        for (const auto& w : neighbors(v)) {
            if (seen.insert(w).second) {
                out.push_back(w);
                queue.emplace_back(w, d + 1);
            }
        }
    }
    return out;
}

/// Geometric edges (as down edges) with both endpoints within distance r.
inline std::vector<TreeEdge> edges_of_radius(const TreeVertex& center, long r) {
    std::vector<TreeEdge> out;
    for (const auto& v : ball_of_radius(center, r)) {
        TreeEdge e = down_edge(v);
        if (distance(center, e.origin) <= r) out.push_back(e);
    }
    return out;
}

/// Finite union of balls of Q_p, or the complement of one in P^1.
/// When contains_infinity is set the set is P^1 minus the union of balls.
class CompactOpen {
public:
    CompactOpen() = default;
    CompactOpen(long p, bool contains_infinity, std::vector<Ball> balls)
        : p_(p), infinity_(contains_infinity), balls_(normalize(p, std::move(balls))) {}

    static CompactOpen empty(long p) { return {p, false, {}}; }
    static CompactOpen everything(long p) { return {p, true, {}}; }
    static CompactOpen of_ball(const Ball& b) { return {b.p, false, {b}}; }

    long prime() const { return p_; }
    bool contains_infinity() const { return infinity_; }
    /// The balls making up the set, or its complement when it contains ∞.
    const std::vector<Ball>& balls() const { return balls_; }
    bool is_empty() const { return !infinity_ && balls_.empty(); }

    bool contains(const ProjectivePoint& z) const {
        if (z.is_infinity()) return infinity_;
        bool in_union = std::any_of(balls_.begin(), balls_.end(), [&](const Ball& b) { return b.contains(*z.x); });
        return infinity_ ? !in_union : in_union;
    }

    CompactOpen complement() const { return {p_, !infinity_, balls_}; }

    friend CompactOpen intersect(const CompactOpen& x, const CompactOpen& y) {
        if (!x.infinity_ && !y.infinity_) return {x.p_, false, intersect_unions(x.balls_, y.balls_)};
        if (!x.infinity_) return {x.p_, false, subtract_unions(x.balls_, y.balls_)};
        if (!y.infinity_) return {x.p_, false, subtract_unions(y.balls_, x.balls_)};
        std::vector<Ball> all = x.balls_;
        all.insert(all.end(), y.balls_.begin(), y.balls_.end());
        return {x.p_, true, all};
    }

    friend CompactOpen unite(const CompactOpen& x, const CompactOpen& y) {
        return intersect(x.complement(), y.complement()).complement();
    }

    bool subset_of(const CompactOpen& o) const { return intersect(*this, o.complement()).is_empty(); }

    friend bool operator==(const CompactOpen& x, const CompactOpen& y) {
        return x.infinity_ == y.infinity_ && x.balls_ == y.balls_;
    }

    std::string str() const {
        std::string s = infinity_ ? "P1 - {" : "{";
        for (std::size_t i = 0; i < balls_.size(); ++i) s += (i ? ", " : "") + balls_[i].str();
        return s + "}";
    }

    /// Maximal-ball normal form of a finite union: nested balls removed and
    /// complete sibling families merged.
    static std::vector<Ball> normalize(long p, std::vector<Ball> balls) {
        for (bool changed = true; changed;) {
            changed = false;
            std::sort(balls.begin(), balls.end());
            balls.erase(std::unique(balls.begin(), balls.end()), balls.end());
            std::vector<Ball> kept;
            for (const auto& b : balls) {
                bool inside = std::any_of(kept.begin(), kept.end(), [&](const Ball& k) { return k.contains(b); });
                if (!inside) kept.push_back(b);
            }
            if (kept.size() != balls.size()) changed = true;
            std::map<Ball, long> sibling_count;
            for (const auto& b : kept) ++sibling_count[b.parent()];
            std::vector<Ball> merged;
            for (const auto& [parent, n] : sibling_count)
                if (n == p) {
                    merged.push_back(parent);
                    changed = true;
                }
            if (!merged.empty()) {
                for (const auto& b : kept)
                    if (sibling_count[b.parent()] != p) merged.push_back(b);
                kept = std::move(merged);
            }
            balls = std::move(kept);
        }
        std::sort(balls.begin(), balls.end());
        return balls;
    }

private:
    static std::vector<Ball> intersect_unions(const std::vector<Ball>& xs, const std::vector<Ball>& ys) {
        std::vector<Ball> out;
        for (const auto& x : xs)
            for (const auto& y : ys) {
                if (y.contains(x)) out.push_back(x);
                else if (x.contains(y)) out.push_back(y);
            }
        return out;
    }

    static void subtract_into(const Ball& b, const std::vector<Ball>& holes, std::vector<Ball>& out) {
        std::vector<Ball> inside;
        for (const auto& h : holes) {
            if (h.contains(b)) return;
            if (b.contains(h)) inside.push_back(h);
        }
        if (inside.empty()) {
            out.push_back(b);
            return;
        }
        for (const auto& child : b.children()) subtract_into(child, inside, out);
    }

    static std::vector<Ball> subtract_unions(const std::vector<Ball>& xs, const std::vector<Ball>& ys) {
        std::vector<Ball> out;
        for (const auto& x : xs) subtract_into(x, ys, out);
        return out;
    }

    long p_ = 2;
    bool infinity_ = false;
    std::vector<Ball> balls_;
};

/// The set U(e) of ends of P^1 reached through e.
inline CompactOpen ends(const TreeEdge& e) {
    if (e.points_down()) return CompactOpen::of_ball(e.target.ball());
    return CompactOpen::of_ball(e.origin.ball()).complement();
}

/// g·U computed pointwise on balls: each ball is U of its down edge.
inline CompactOpen act(const Matrix2& g, const CompactOpen& U) {
    const long p = U.prime();
    CompactOpen image = CompactOpen::empty(p);
    for (const auto& b : U.balls()) image = unite(image, ends(act(g, down_edge(TreeVertex::of_ball(b)))));
    return U.contains_infinity() ? image.complement() : image;
}

}  // namespace exzero::tree
