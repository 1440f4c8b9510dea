#pragma once

// Finitely supported functions on vertices and edges of the tree, the
// operators δ, δ*_±, T and their ρ-weighted versions, membership in the
// image of T - a, harmonic cocycles and their boundary distributions.

#include "ball_function.hpp"
#include "bt_tree.hpp"
#include "characters.hpp"
#include "linalg.hpp"

#include <functional>
#include <map>
#include <optional>
#include <set>

namespace exzero::tree {

class VertexFunction {
public:
    explicit VertexFunction(long p) : p_(p) {}

    static VertexFunction indicator(const TreeVertex& v) {
        VertexFunction f(v.p);
        f.add(v, 1);
        return f;
    }

    long prime() const { return p_; }
    const std::map<TreeVertex, Rational>& values() const { return values_; }
    bool is_zero() const { return values_.empty(); }

    Rational operator()(const TreeVertex& v) const {
        auto it = values_.find(v);
        return it == values_.end() ? Rational(0) : it->second;
    }

    VertexFunction& add(const TreeVertex& v, const Rational& c) {
        if (c == 0) return *this;
        auto [it, fresh] = values_.emplace(v, c);
        if (!fresh) {
            it->second += c;
            if (it->second == 0) values_.erase(it);
        }
        return *this;
    }

    friend VertexFunction operator+(VertexFunction f, const VertexFunction& g) {
        for (const auto& [v, c] : g.values_) f.add(v, c);
        return f;
    }
    friend VertexFunction operator-(VertexFunction f, const VertexFunction& g) {
        for (const auto& [v, c] : g.values_) f.add(v, -c);
        return f;
    }
    VertexFunction scaled(const Rational& s) const {
        VertexFunction f(p_);
        for (const auto& [v, c] : values_) f.add(v, c * s);
        return f;
    }
    /// Pointwise product with an arbitrary function on vertices.
    VertexFunction times(const std::function<Rational(const TreeVertex&)>& rho) const {
        VertexFunction f(p_);
        for (const auto& [v, c] : values_) f.add(v, c * rho(v));
        return f;
    }

    friend bool operator==(const VertexFunction& f, const VertexFunction& g) { return f.values_ == g.values_; }

    /// Largest distance from center to the support (-1 when zero).
    long support_radius(const TreeVertex& center) const {
        long r = -1;
        for (const auto& [v, c] : values_) r = std::max(r, distance(center, v));
        return r;
    }

private:
    long p_;
    std::map<TreeVertex, Rational> values_;
};

inline Rational pairing(const VertexFunction& f, const VertexFunction& g) {
    Rational s = 0;
    for (const auto& [v, c] : f.values()) s += c * g(v);
    return s;
}

/// ⟨φ, ρ⟩ for ρ not finitely supported.
inline Rational pairing(const VertexFunction& f, const std::function<Rational(const TreeVertex&)>& rho) {
    Rational s = 0;
    for (const auto& [v, c] : f.values()) s += c * rho(v);
    return s;
}

enum class Sign { plus, minus };

/// Function on oriented edges with c(ē) = ∓c(e). One value per geometric
/// edge is stored, on the orientation pointing away from ∞, keyed by its
/// lower endpoint.
class EdgeFunction {
public:
    EdgeFunction(long p, Sign sign) : p_(p), sign_(sign) {}

    long prime() const { return p_; }
    Sign sign() const { return sign_; }
    const std::map<TreeVertex, Rational>& values() const { return values_; }
    bool is_zero() const { return values_.empty(); }

    Rational operator()(const TreeEdge& e) const {
        auto it = values_.find(e.lower());
        if (it == values_.end()) return 0;
        return e.points_down() ? it->second : reverse_factor() * it->second;
    }

    EdgeFunction& add(const TreeEdge& e, const Rational& c) {
        if (c == 0) return *this;
        Rational stored = e.points_down() ? c : reverse_factor() * c;
        auto [it, fresh] = values_.emplace(e.lower(), stored);
        if (!fresh) {
            it->second += stored;
            if (it->second == 0) values_.erase(it);
        }
        return *this;
    }

    /// Both orientations of every geometric edge in the support.
    std::vector<std::pair<TreeEdge, Rational>> oriented() const {
        std::vector<std::pair<TreeEdge, Rational>> out;
        for (const auto& [w, c] : values_) {
            TreeEdge e = down_edge(w);
            out.emplace_back(e, c);
            out.emplace_back(e.reversed(), reverse_factor() * c);
        }
        return out;
    }

    friend EdgeFunction operator+(EdgeFunction f, const EdgeFunction& g) {
        for (const auto& [w, c] : g.values_) f.add(down_edge(w), c);
        return f;
    }
    friend EdgeFunction operator-(EdgeFunction f, const EdgeFunction& g) {
        for (const auto& [w, c] : g.values_) f.add(down_edge(w), -c);
        return f;
    }
    EdgeFunction scaled(const Rational& s) const {
        EdgeFunction f(p_, sign_);
        for (const auto& [w, c] : values_) f.add(down_edge(w), c * s);
        return f;
    }
    friend bool operator==(const EdgeFunction& f, const EdgeFunction& g) {
        return f.sign_ == g.sign_ && f.values_ == g.values_;
    }

private:
    Rational reverse_factor() const { return sign_ == Sign::plus ? Rational(-1) : Rational(1); }

    long p_;
    Sign sign_;
    std::map<TreeVertex, Rational> values_;
};

/// ⟨c1, c2⟩ = Σ over geometric edges, both read on the same orientation.
inline Rational pairing(const EdgeFunction& c1, const EdgeFunction& c2) {
    Rational s = 0;
    for (const auto& [w, c] : c1.values()) s += c * c2(down_edge(w));
    return s;
}

using VertexWeight = std::function<Rational(const TreeVertex&)>;

/// ρ(v) = α^{h(v)}.
inline VertexWeight rho_alpha(const Rational& alpha) {
    if (alpha == 0) throw std::invalid_argument("α must be nonzero");
    return [alpha](const TreeVertex& v) { return rpow(alpha, v.h); };
}

/// τ_ε(v) = ε^{h(v)}.
inline VertexWeight tau(int eps) { return rho_alpha(Rational(eps)); }

/// δ̃_ρ(c)(v) = Σ_{t(e)=v} ρ(o(e)) c(e); ρ ≡ 1 gives δ.
inline VertexFunction tilde_delta_lower(const VertexWeight& rho, const EdgeFunction& c) {
    VertexFunction out(c.prime());
    for (const auto& [e, x] : c.oriented()) out.add(e.target, rho(e.origin) * x);
    return out;
}

inline VertexFunction delta(const EdgeFunction& c) {
    return tilde_delta_lower([](const TreeVertex&) { return Rational(1); }, c);
}

/// Geometric edges meeting the support of φ, as down edges.
inline std::vector<TreeEdge> edges_touching(const VertexFunction& phi) {
    std::set<TreeVertex> lower;
    for (const auto& [v, c] : phi.values()) {
        lower.insert(v);
        for (const auto& w : down(v)) lower.insert(w);
    }
    std::vector<TreeEdge> out;
    for (const auto& w : lower) out.push_back(down_edge(w));
    return out;
}

/// δ̃^ρ(φ)(e) = ρ(o(e))φ(t(e)) - ρ(t(e))φ(o(e)), an element of C^+.
inline EdgeFunction tilde_delta_upper(const VertexWeight& rho, const VertexFunction& phi) {
    EdgeFunction out(phi.prime(), Sign::plus);
    for (const auto& e : edges_touching(phi))
        out.add(e, rho(e.origin) * phi(e.target) - rho(e.target) * phi(e.origin));
    return out;
}

/// δ*_±(φ)(e) = φ(t(e)) ∓ φ(o(e)).
inline EdgeFunction delta_star(const VertexFunction& phi, Sign sign) {
    EdgeFunction out(phi.prime(), sign);
    Rational s = sign == Sign::plus ? Rational(1) : Rational(-1);
    for (const auto& e : edges_touching(phi)) out.add(e, phi(e.target) - s * phi(e.origin));
    return out;
}

/// (Tφ)(v) = Σ_{w ~ v} φ(w).
inline VertexFunction hecke_T(const VertexFunction& phi) {
    VertexFunction out(phi.prime());
    for (const auto& [v, c] : phi.values())
        for (const auto& w : neighbors(v)) out.add(w, c);
    return out;
}

/// (Tρ)(v) for a weight ρ given pointwise.
inline Rational hecke_T_at(const VertexWeight& rho, const TreeVertex& v) {
    Rational s = 0;
    for (const auto& w : neighbors(v)) s += rho(w);
    return s;
}

/// (gφ)(v) = φ(g^{-1} v).
inline VertexFunction act(const Matrix2& g, const VertexFunction& phi) {
    VertexFunction out(phi.prime());
    for (const auto& [v, c] : phi.values()) out.add(act(g, v), c);
    return out;
}

inline EdgeFunction act(const Matrix2& g, const EdgeFunction& c) {
    EdgeFunction out(c.prime(), c.sign());
    for (const auto& [w, x] : c.values()) out.add(act(g, down_edge(w)), x);
    return out;
}

/// φ ↦ φ·τ_ε, inducing B_a -> B_{εa}.
inline VertexFunction twist(const VertexFunction& phi, int eps) {
    if (eps != 1 && eps != -1) throw std::invalid_argument("ε must be ±1");
    return phi.times(tau(eps));
}

enum class Membership { member, nonmember, inconclusive };

inline const char* to_string(Membership m) {
    switch (m) {
        case Membership::member: return "member";
        case Membership::nonmember: return "non-member";
        default: return "inconclusive";
    }
}

struct MembershipResult {
    Membership status = Membership::inconclusive;
    std::optional<VertexFunction> certificate;  // ψ with (T - a)ψ = φ
    std::optional<VertexFunction> obstruction;  // y ⟂ (T - a)(C_c(B_R)) with ⟨y, φ⟩ != 0
    std::optional<Rational> tau_pairing;        // ⟨φ, τ_±⟩ when a = ±(q+1)
    long radius = 0;
};

/// Decides φ ∈ (T - a)C_c(V). If a finitely supported ψ solves (T - a)ψ = φ
/// then every vertex of supp ψ farthest from v0 has children in supp φ, so
/// supp φ ⊆ B_{R-1}(v0) forces supp ψ ⊆ B_{R-2}(v0) and the solve on B_R is
/// decisive.
inline MembershipResult in_image_T_minus_a(const VertexFunction& phi, const Rational& a, long R) {
    const long p = phi.prime();
    const TreeVertex v0 = TreeVertex::origin(p);
    MembershipResult res;
    res.radius = R;
    const long q1 = p + 1;
    if (a == q1) res.tau_pairing = pairing(phi, tau(1));
    if (a == -q1) res.tau_pairing = pairing(phi, tau(-1));
    if (phi.support_radius(v0) > R - 1) return res;

    const auto unknowns = ball_of_radius(v0, R);
    const auto rows = ball_of_radius(v0, R + 1);
    std::map<TreeVertex, std::size_t> row_index;
    for (std::size_t i = 0; i < rows.size(); ++i) row_index.emplace(rows[i], i);

    linalg::Mat A(rows.size(), linalg::Vec(unknowns.size(), 0));
    for (std::size_t j = 0; j < unknowns.size(); ++j) {
        A[row_index.at(unknowns[j])][j] -= a;
        for (const auto& w : neighbors(unknowns[j])) A[row_index.at(w)][j] += 1;
    }
    linalg::Vec b(rows.size(), 0);
    for (std::size_t i = 0; i < rows.size(); ++i) b[i] = phi(rows[i]);

    auto sol = linalg::solve(A, b, unknowns.size());
    if (sol.solution) {
        VertexFunction psi(p);
        for (std::size_t j = 0; j < unknowns.size(); ++j) psi.add(unknowns[j], (*sol.solution)[j]);
        res.status = Membership::member;
        res.certificate = std::move(psi);
    } else {
        VertexFunction y(p);
        if (sol.obstruction)
            for (std::size_t i = 0; i < rows.size(); ++i) y.add(rows[i], (*sol.obstruction)[i]);
        res.status = Membership::nonmember;
        res.obstruction = std::move(y);
    }
    return res;
}

/// Same class in B_a: φ1 - φ2 ∈ (T - a)C_c(V), searching with enough radius.
inline MembershipResult same_class(const VertexFunction& phi1, const VertexFunction& phi2, const Rational& a) {
    VertexFunction d = phi1 - phi2;
    long r = std::max<long>(d.support_radius(TreeVertex::origin(phi1.prime())) + 1, 1);
    return in_image_T_minus_a(d, a, r);
}

/// The edge function Σ_B c_B [e_B] with U(e_B) = B, representing a ball
/// function modulo constants.
inline EdgeFunction edges_of(const RationalBallFunction& f) {
    EdgeFunction c(f.prime(), Sign::plus);
    for (const auto& [b, x] : f.terms()) c.add(down_edge(TreeVertex::of_ball(b)), x);
    return c;
}

/// δ̃_α on C^0(P^1)/R, with ρ = α^h.
inline VertexFunction tilde_delta_alpha(const Rational& alpha, const RationalBallFunction& f) {
    return tilde_delta_lower(rho_alpha(alpha), edges_of(f));
}

/// δ_α(f): χ_α·f extended by zero, then δ̃_α. For α != 1, f must live on F^*.
inline VertexFunction delta_alpha(const Rational& alpha, const RationalBallFunction& f) {
    if (f.constant() != 0) throw std::invalid_argument("δ_α needs a compactly supported function");
    RationalBallFunction g(f.prime());
    for (const auto& [b, x] : f.terms()) {
        if (alpha != 1 && b.contains(Rational(0)))
            throw std::invalid_argument("δ_α with α != 1 needs support in F^*");
        Rational chi = alpha == 1 ? Rational(1) : rpow(alpha, ord_finite(b.center, b.p));
        g.add(b, x * chi);
    }
    return tilde_delta_alpha(alpha, g);
}

/// Harmonic cocycle certified on the ball B_R(v0): built from masses on the
/// sphere of radius R summing to zero.
class HarmonicCocycle {
public:
    HarmonicCocycle(long p, long R, std::map<TreeVertex, Rational> leaf_masses)
        : p_(p), R_(R), leaves_(std::move(leaf_masses)), c_(p, Sign::plus) {
        if (R < 1) throw std::invalid_argument("radius must be at least 1");
        const TreeVertex v0 = TreeVertex::origin(p);
        Rational total = 0;
        for (const auto& [v, m] : leaves_) {
            if (distance(v0, v) != R) throw std::invalid_argument("leaf mass off the sphere");
            total += m;
        }
        if (total != 0) throw std::invalid_argument("leaf masses must sum to zero");
        // c(e) = mass of the leaves beyond t(e), as seen from o(e).
        for (const auto& e : edges_of_radius(v0, R)) {
            Rational s = 0;
            for (const auto& [v, m] : leaves_)
                if (distance(v, e.target) < distance(v, e.origin)) s += m;
            c_.add(e, s);
        }
    }

    long prime() const { return p_; }
    long radius() const { return R_; }
    const EdgeFunction& cochain() const { return c_; }
    const std::map<TreeVertex, Rational>& leaf_masses() const { return leaves_; }

    /// Σ_{o(e)=v} c(e) = 0 for every v strictly inside the ball.
    bool is_harmonic() const {
        const TreeVertex v0 = TreeVertex::origin(p_);
        for (const auto& v : ball_of_radius(v0, R_ - 1)) {
            Rational s = 0;
            for (const auto& w : neighbors(v)) s += c_(TreeEdge{v, w});
            if (s != 0) return false;
        }
        return true;
    }

    /// The edge from the interior into the leaf ℓ; the U of these partition P^1.
    TreeEdge leaf_edge(const TreeVertex& leaf) const {
        const TreeVertex v0 = TreeVertex::origin(p_);
        for (const auto& w : neighbors(leaf))
            if (distance(v0, w) < R_) return {w, leaf};
        throw std::logic_error("leaf without interior neighbor");
    }

    std::vector<TreeVertex> sphere() const {
        std::vector<TreeVertex> out;
        const TreeVertex v0 = TreeVertex::origin(p_);
        for (const auto& v : ball_of_radius(v0, R_))
            if (distance(v0, v) == R_) out.push_back(v);
        return out;
    }

private:
    long p_;
    long R_;
    std::map<TreeVertex, Rational> leaves_;
    EdgeFunction c_;
};

/// μ_c(U) = Σ c(e) over the finest edges U(e) of the certified ball;
/// every such piece must lie inside U or be disjoint from it.
inline Rational boundary_distribution(const HarmonicCocycle& hc, const CompactOpen& U) {
    Rational s = 0;
    for (const auto& leaf : hc.sphere()) {
        TreeEdge e = hc.leaf_edge(leaf);
        CompactOpen piece = ends(e);
        if (piece.subset_of(U)) s += hc.cochain()(e);
        else if (!intersect(piece, U).is_empty())
            throw std::domain_error("compact open is finer than the harmonicity certificate");
    }
    return s;
}

/// Λ(φ - φ(∞)) = Σ_B c_B ∫_B ψ dx, with ∫_{b + p^m Z_p} ψ dx = p^{-m}ψ(b) for
/// m >= 0 and 0 otherwise.
inline CValue whittaker_steinberg(const RationalBallFunction& phi) {
    AdditiveCharacterPsi psi{phi.prime()};
    CValue s(0);
    for (const auto& [b, c] : phi.terms()) {
        if (b.radius < 0 || c == 0) continue;
        s += psi(b.center) * CValue(c * rpow(b.p, -b.radius));
    }
    return s;
}

}  // namespace exzero::tree
