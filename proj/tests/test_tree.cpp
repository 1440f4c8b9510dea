#include <exzero/tree_rep.hpp>

#include <gtest/gtest.h>

#include <random>

using namespace exzero;
using namespace exzero::tree;

namespace {

Rational random_rational(std::mt19937_64& rng, long p) {
    long num = static_cast<long>(rng() % 41) - 20;
    long e = static_cast<long>(rng() % 5) - 2;
    return Rational(num) * rpow(p, e) / Rational(1 + static_cast<long>(rng() % 3) * p);
}

Rational random_unitish(std::mt19937_64& rng, long p) {
    Rational x = 0;
    while (x == 0) x = random_rational(rng, p);
    return x;
}

Matrix2 random_gl2(std::mt19937_64& rng, long p) {
    for (;;) {
        Matrix2 g{random_rational(rng, p), random_rational(rng, p), random_rational(rng, p), random_rational(rng, p)};
        if (g.det() != 0) return g;
    }
}

TreeVertex random_vertex(std::mt19937_64& rng, long p, long r) {
    auto ball = ball_of_radius(TreeVertex::origin(p), r);
    return ball[rng() % ball.size()];
}

VertexFunction random_vertex_function(std::mt19937_64& rng, long p, long r) {
    VertexFunction f(p);
    auto ball = ball_of_radius(TreeVertex::origin(p), r);
    long n = 1 + static_cast<long>(rng() % 5);
    for (long i = 0; i < n; ++i) f.add(ball[rng() % ball.size()], static_cast<long>(rng() % 11) - 5);
    return f;
}

EdgeFunction random_edge_function(std::mt19937_64& rng, long p, long r, Sign s) {
    EdgeFunction c(p, s);
    auto edges = edges_of_radius(TreeVertex::origin(p), r);
    long n = 1 + static_cast<long>(rng() % 5);
    for (long i = 0; i < n; ++i) {
        TreeEdge e = edges[rng() % edges.size()];
        c.add(rng() % 2 ? e : e.reversed(), static_cast<long>(rng() % 11) - 5);
    }
    return c;
}

}  // namespace

TEST(Tree, NeighborsOfOrigin) {
    auto nb = neighbors(TreeVertex::origin(2));
    ASSERT_EQ(nb.size(), 3u);
    std::set<TreeVertex> got(nb.begin(), nb.end());
    std::set<TreeVertex> want{TreeVertex::make(2, 1, 0), TreeVertex::make(2, -1, 0), TreeVertex::make(2, -1, 1)};
    EXPECT_EQ(got, want);
    // v_1 lies above v_0 and v_0 is one of its children
    auto ch = down(TreeVertex::apartment(2, 1));
    EXPECT_NE(std::find(ch.begin(), ch.end(), TreeVertex::origin(2)), ch.end());
}

TEST(Tree, RegularityAndCounts) {
    for (long p : {2L, 3L, 5L}) {
        for (const auto& v : ball_of_radius(TreeVertex::origin(p), 2)) {
            auto nb = neighbors(v);
            std::set<TreeVertex> distinct(nb.begin(), nb.end());
            EXPECT_EQ(distinct.size(), static_cast<std::size_t>(p + 1));
            for (const auto& w : nb) EXPECT_EQ(distance(v, w), 1);
        }
        for (long R = 0; R <= 3; ++R) {
            long expect = 1, qk = 1;
            for (long k = 0; k < R; ++k, qk *= p) expect += (p + 1) * qk;
            EXPECT_EQ(static_cast<long>(ball_of_radius(TreeVertex::origin(p), R).size()), expect);
        }
    }
}

TEST(Tree, Heights) {
    for (long n = -3; n <= 3; ++n) EXPECT_EQ(height(TreeVertex::apartment(3, n)), n);
    EXPECT_EQ(height(act(Matrix2::diag(3, 1), TreeVertex::origin(3))), -1);
    EXPECT_EQ(act(Matrix2::diag(3, 1), TreeVertex::apartment(3, 2)), TreeVertex::apartment(3, 1));
    for (const auto& v : ball_of_radius(TreeVertex::origin(3), 3)) EXPECT_EQ(act(Matrix2::identity(), v), v);
}

TEST(Tree, BorelHeightShift) {
    std::mt19937_64 rng(3);
    for (long p : {2L, 3L, 5L}) {
        for (int i = 0; i < 100; ++i) {
            Rational a = random_unitish(rng, p), b = random_rational(rng, p);
            TreeVertex v = random_vertex(rng, p, 3);
            EXPECT_EQ(height(act(Matrix2{a, b, 0, 1}, v)), height(v) - ord_finite(a, p));
        }
    }
}

TEST(Tree, ActionIsAGroupAction) {
    std::mt19937_64 rng(5);
    for (long p : {2L, 3L}) {
        for (int i = 0; i < 60; ++i) {
            Matrix2 g = random_gl2(rng, p), h = random_gl2(rng, p);
            TreeVertex v = random_vertex(rng, p, 2);
            EXPECT_EQ(act(g, act(h, v)), act(g * h, v));
            EXPECT_EQ(act(Matrix2::diag(p, p), v), v);  // scalars act trivially
            TreeEdge e{v, neighbors(v)[rng() % static_cast<unsigned long>(p + 1)]};
            TreeEdge ge = act(g, e);
            EXPECT_EQ(distance(ge.origin, ge.target), 1);
            EXPECT_EQ(act(g, e.reversed()), ge.reversed());
        }
    }
}

TEST(Tree, Distance) {
    std::mt19937_64 rng(9);
    for (int i = 0; i < 200; ++i) {
        auto u = random_vertex(rng, 3, 3), v = random_vertex(rng, 3, 3), w = random_vertex(rng, 3, 3);
        EXPECT_EQ(distance(u, v), distance(v, u));
        EXPECT_EQ(distance(u, u), 0);
        EXPECT_LE(distance(u, w), distance(u, v) + distance(v, w));
    }
}

TEST(Tree, Ends) {
    const long p = 5;
    EXPECT_EQ(ends(apartment_edge(p, 0)), CompactOpen::of_ball(Ball::make(p, 0, 0)));
    EXPECT_EQ(ends(apartment_edge(p, 0).reversed()), CompactOpen::of_ball(Ball::make(p, 0, 0)).complement());
    EXPECT_EQ(ends(apartment_edge(p, -1)), CompactOpen::of_ball(Ball::make(p, 0, 1)));
    EXPECT_EQ(ends(apartment_edge(p, 2)), CompactOpen::of_ball(Ball::make(p, 0, -2)));
}

TEST(Tree, EndsAndHeight) {
    for (long p : {2L, 3L}) {
        for (const auto& v : ball_of_radius(TreeVertex::origin(p), 2))
            for (const auto& w : neighbors(v)) {
                TreeEdge e{v, w};
                bool inf = ends(e).contains(ProjectivePoint::infinity());
                EXPECT_EQ(height(w) == height(v) + 1, inf);
                EXPECT_EQ(ends(e.reversed()), ends(e).complement());
            }
    }
}

TEST(Tree, EndsPartition) {
    for (long p : {2L, 3L}) {
        for (const auto& v : ball_of_radius(TreeVertex::origin(p), 2)) {
            CompactOpen all = CompactOpen::empty(p);
            for (const auto& w : neighbors(v)) {
                CompactOpen piece = ends(TreeEdge{w, v}).complement();
                EXPECT_TRUE(intersect(all, piece).is_empty());
                all = unite(all, piece);
            }
            EXPECT_EQ(all, CompactOpen::everything(p));
        }
    }
}

TEST(Tree, EndsEquivariantPointwise) {
    std::mt19937_64 rng(13);
    for (long p : {2L, 3L}) {
        for (int i = 0; i < 40; ++i) {
            Matrix2 g = random_gl2(rng, p);
            TreeVertex v = random_vertex(rng, p, 2);
            TreeEdge e{v, neighbors(v)[rng() % static_cast<unsigned long>(p + 1)]};
            CompactOpen U = ends(e), gU = ends(act(g, e));
            EXPECT_EQ(act(g, U), gU);
            std::vector<ProjectivePoint> pts{ProjectivePoint::infinity()};
            for (int k = 0; k < 30; ++k) pts.push_back({random_rational(rng, p)});
            for (const auto& z : pts) EXPECT_EQ(U.contains(z), gU.contains(mobius(g, z)));
        }
    }
}

TEST(CompactOpenTest, NormalFormAndBooleans) {
    const long p = 3;
    std::vector<Ball> kids = Ball::make(p, 0, 0).children();
    EXPECT_EQ(CompactOpen(p, false, kids), CompactOpen::of_ball(Ball::make(p, 0, 0)));
    CompactOpen a = CompactOpen::of_ball(Ball::make(p, 0, 0));
    CompactOpen b = CompactOpen::of_ball(Ball::make(p, 1, 1));
    EXPECT_TRUE(b.subset_of(a));
    EXPECT_EQ(intersect(a, b), b);
    EXPECT_EQ(unite(a, b), a);
    CompactOpen d = intersect(a, b.complement());
    EXPECT_EQ(d.balls().size(), 2u);  // 3Z and 2+3Z
    EXPECT_TRUE(intersect(a, a.complement()).is_empty());
    EXPECT_EQ(unite(a, a.complement()), CompactOpen::everything(p));
}

TEST(TreeRep, DeltaOfSingleEdge) {
    EdgeFunction c(3, Sign::plus);
    c.add(apartment_edge(3, 0), 1);
    VertexFunction d = delta(c);
    EXPECT_EQ(d(TreeVertex::origin(3)), 1);
    EXPECT_EQ(d(TreeVertex::apartment(3, 1)), -1);  // from ē_0, since c(ē_0) = -1
    EXPECT_EQ(d.values().size(), 2u);
}

TEST(TreeRep, DeltaStarOfIndicator) {
    auto phi = VertexFunction::indicator(TreeVertex::origin(3));
    auto c = delta_star(phi, Sign::plus);
    EXPECT_EQ(c.values().size(), 4u);  // 4 geometric edges, 8 orientations
    for (const auto& w : neighbors(TreeVertex::origin(3))) {
        EXPECT_EQ(c(TreeEdge{TreeVertex::origin(3), w}), -1);
        EXPECT_EQ(c(TreeEdge{w, TreeVertex::origin(3)}), 1);
    }
}

TEST(TreeRep, OperatorIdentities) {
    std::mt19937_64 rng(17);
    for (long p : {2L, 3L, 5L}) {
        const Rational q1 = p + 1;
        for (int i = 0; i < 30; ++i) {
            auto phi = random_vertex_function(rng, p, 3);
            auto Tphi = hecke_T(phi);
            EXPECT_EQ(delta(delta_star(phi, Sign::plus)), phi.scaled(q1) - Tphi);
            EXPECT_EQ(delta(delta_star(phi, Sign::minus)), phi.scaled(q1) + Tphi);
            for (Sign s : {Sign::plus, Sign::minus}) {
                auto c = random_edge_function(rng, p, 3, s);
                EXPECT_EQ(pairing(delta(c), phi), pairing(c, delta_star(phi, s)));
            }
            auto psi = random_vertex_function(rng, p, 3);
            EXPECT_EQ(pairing(Tphi, psi), pairing(phi, hecke_T(psi)));
            for (int eps : {1, -1}) EXPECT_EQ(pairing(Tphi, tau(eps)), q1 * eps * pairing(phi, tau(eps)));
        }
    }
}

TEST(TreeRep, LiteralPlusSignIdentityFails) {
    auto phi = VertexFunction::indicator(TreeVertex::origin(3));
    EXPECT_NE(delta(delta_star(phi, Sign::plus)), phi.scaled(4) + hecke_T(phi));
}

TEST(TreeRep, DeltaStarInjective) {
    for (long p : {2L, 3L}) {
        for (Sign s : {Sign::plus, Sign::minus}) {
            auto verts = ball_of_radius(TreeVertex::origin(p), 2);
            auto edges = edges_of_radius(TreeVertex::origin(p), 3);
            std::map<TreeVertex, std::size_t> col;
            for (std::size_t i = 0; i < edges.size(); ++i) col[edges[i].lower()] = i;
            linalg::Mat m;
            for (const auto& v : verts) {
                auto c = delta_star(VertexFunction::indicator(v), s);
                linalg::Vec row(edges.size(), 0);
                for (const auto& [w, x] : c.values()) row[col.at(w)] = x;
                m.push_back(row);
            }
            EXPECT_EQ(linalg::rank(m, edges.size()), verts.size());
        }
    }
}

TEST(TreeRep, ExactnessOnBalls) {
    // Image of δ on edges inside B_R = kernel of ⟨·, τ_±⟩ on C(B_R).
    for (long p : {2L, 3L}) {
        for (long R = 1; R <= 3; ++R) {
            for (Sign s : {Sign::plus, Sign::minus}) {
                auto verts = ball_of_radius(TreeVertex::origin(p), R);
                std::map<TreeVertex, std::size_t> col;
                for (std::size_t i = 0; i < verts.size(); ++i) col[verts[i]] = i;
                linalg::Mat m;
                auto t = tau(s == Sign::plus ? 1 : -1);
                for (const auto& e : edges_of_radius(TreeVertex::origin(p), R)) {
                    EdgeFunction c(p, s);
                    c.add(e, 1);
                    auto d = delta(c);
                    EXPECT_EQ(pairing(d, t), 0);
                    linalg::Vec row(verts.size(), 0);
                    for (const auto& [v, x] : d.values()) row[col.at(v)] = x;
                    m.push_back(row);
                }
                EXPECT_EQ(linalg::rank(m, verts.size()), verts.size() - 1);
            }
        }
    }
}

TEST(TreeRep, WeightedOperators) {
    std::mt19937_64 rng(19);
    auto one = [](const TreeVertex&) { return Rational(1); };
    for (long p : {2L, 3L}) {
        for (int i = 0; i < 20; ++i) {
            auto phi = random_vertex_function(rng, p, 2);
            EXPECT_EQ(tilde_delta_upper(one, phi), delta_star(phi, Sign::plus));
            auto c = random_edge_function(rng, p, 2, Sign::plus);
            EXPECT_EQ(tilde_delta_lower(one, c), delta(c));
            for (Rational a1 : {Rational(1), Rational(-1), Rational(2)})
                for (Rational a2 : {Rational(1), Rational(-1), Rational(2), Rational(1, 2)}) {
                    auto r1 = rho_alpha(a1), r2 = rho_alpha(a2);
                    VertexFunction lhs = tilde_delta_lower(r1, tilde_delta_upper(r2, phi));
                    auto r12 = [&](const TreeVertex& v) -> Rational { return r1(v) * r2(v); };
                    VertexFunction T_r1phi = hecke_T(phi.times(r1));
                    VertexFunction rhs(p);
                    for (const auto& v : ball_of_radius(TreeVertex::origin(p), 4))
                        rhs.add(v, hecke_T_at(r12, v) * phi(v) - r2(v) * T_r1phi(v));
                    EXPECT_EQ(lhs, rhs);
                    EXPECT_EQ(pairing(tilde_delta_lower(r2, c), phi), pairing(c, tilde_delta_upper(r2, phi)));
                }
        }
    }
}

TEST(TreeRep, MembershipExamples) {
    const long p = 2;
    auto v0 = TreeVertex::origin(p);
    for (Rational a : {Rational(0), Rational(3), Rational(-3), Rational(5, 2)}) {
        auto ind = VertexFunction::indicator(v0);
        auto phi = hecke_T(ind) - ind.scaled(a);
        auto r = in_image_T_minus_a(phi, a, 3);
        ASSERT_EQ(r.status, Membership::member);
        EXPECT_EQ(*r.certificate, ind);
    }
    auto r = in_image_T_minus_a(VertexFunction::indicator(v0), 3, 3);
    EXPECT_EQ(r.status, Membership::nonmember);
    ASSERT_TRUE(r.tau_pairing);
    EXPECT_EQ(*r.tau_pairing, 1);
    ASSERT_TRUE(r.obstruction);
    EXPECT_NE(pairing(*r.obstruction, VertexFunction::indicator(v0)), 0);

    auto nb = VertexFunction::indicator(neighbors(v0)[0]);
    auto s = in_image_T_minus_a(nb, 0, 3);
    EXPECT_NE(s.status, Membership::inconclusive);
    if (s.certificate) {
        EXPECT_EQ(hecke_T(*s.certificate), nb);
    }
    EXPECT_EQ(in_image_T_minus_a(nb, 0, 1).status, Membership::inconclusive);
}

TEST(TreeRep, MembershipCertificatesVerify) {
    std::mt19937_64 rng(23);
    for (long p : {2L, 3L}) {
        for (int i = 0; i < 15; ++i) {
            Rational a = static_cast<long>(rng() % 9) - 4;
            auto psi = random_vertex_function(rng, p, 1);
            auto phi = hecke_T(psi) - psi.scaled(a);
            auto r = in_image_T_minus_a(phi, a, 3);
            ASSERT_EQ(r.status, Membership::member);
            EXPECT_EQ(hecke_T(*r.certificate) - r.certificate->scaled(a), phi);
        }
    }
}

TEST(TreeRep, Twist) {
    std::mt19937_64 rng(29);
    for (int i = 0; i < 20; ++i) {
        auto phi = random_vertex_function(rng, 3, 2);
        EXPECT_EQ(twist(phi, 1), phi);
        EXPECT_EQ(twist(twist(phi, -1), -1), phi);
        Matrix2 g = random_gl2(rng, 3);
        long eps_det = ord_finite(g.det(), 3) % 2 == 0 ? 1 : -1;
        EXPECT_EQ(twist(act(g, phi), -1).scaled(eps_det), act(g, twist(phi, -1)));
        EXPECT_EQ(hecke_T(twist(phi, -1)), twist(hecke_T(phi), -1).scaled(-1));
    }
    auto g = Matrix2::diag(3, 1);
    auto phi = VertexFunction::indicator(TreeVertex::origin(3));
    EXPECT_EQ(twist(act(g, phi), -1).scaled(-1), act(g, twist(phi, -1)));
}

TEST(TreeRep, HarmonicCocycles) {
    std::mt19937_64 rng(31);
    for (long p : {2L, 3L}) {
        const long R = 3;
        auto v0 = TreeVertex::origin(p);
        std::map<TreeVertex, Rational> masses;
        Rational total = 0;
        std::vector<TreeVertex> sphere;
        for (const auto& v : ball_of_radius(v0, R))
            if (distance(v0, v) == R) sphere.push_back(v);
        for (std::size_t i = 0; i + 1 < sphere.size(); ++i) {
            Rational m = static_cast<long>(rng() % 7) - 3;
            masses[sphere[i]] = m;
            total += m;
        }
        masses[sphere.back()] = -total;
        HarmonicCocycle hc(p, R, masses);
        EXPECT_TRUE(hc.is_harmonic());
        auto d = delta(hc.cochain());
        for (const auto& v : ball_of_radius(v0, R - 1)) EXPECT_EQ(d(v), 0);
        EXPECT_EQ(boundary_distribution(hc, CompactOpen::everything(p)), 0);
        for (const auto& e : edges_of_radius(v0, R)) {
            for (const TreeEdge& f : {e, e.reversed()}) {
                EXPECT_EQ(boundary_distribution(hc, ends(f)), hc.cochain()(f));
                if (distance(v0, f.target) < R && distance(v0, f.target) > distance(v0, f.origin)) {
                    Rational s = 0;
                    for (const auto& w : neighbors(f.target))
                        if (!(w == f.origin)) s += hc.cochain()(TreeEdge{f.target, w});
                    EXPECT_EQ(s, hc.cochain()(f));
                }
            }
        }
        // additivity on disjoint pieces
        CompactOpen a = CompactOpen::of_ball(Ball::make(p, 0, 1));
        CompactOpen b = CompactOpen::of_ball(Ball::make(p, 1, 1));
        EXPECT_EQ(boundary_distribution(hc, unite(a, b)),
                  boundary_distribution(hc, a) + boundary_distribution(hc, b));
        EXPECT_THROW(boundary_distribution(hc, CompactOpen::of_ball(Ball::make(p, 0, 5))), std::domain_error);
    }
}

TEST(TreeRep, DeltaAlphaEquivariance) {
    std::mt19937_64 rng(37);
    for (long p : {2L, 3L}) {
        for (Rational alpha : {Rational(1), Rational(-1), Rational(2), Rational(1, 2)}) {
            Rational a = alpha + Rational(p) / alpha;
            for (int i = 0; i < 4; ++i) {
                RationalBallFunction f(p);
                f.add(Ball::make(p, 1 + static_cast<long>(rng() % static_cast<unsigned long>(p - 1)), 1), 1 + static_cast<long>(rng() % 3));
                f.add(Ball::make(p, p, 2), static_cast<long>(rng() % 5) - 2);
                Rational t = rng() % 2 ? Rational(p) : Rational(1, p);
                t *= 1 + static_cast<long>(rng() % 2) * p;
                auto lhs = delta_alpha(alpha, f.dilated(t));
                auto rhs = act(Matrix2::diag(t, 1), delta_alpha(alpha, f));
                EXPECT_EQ(same_class(lhs, rhs, a).status, Membership::member);
                // Borel equivariance of δ̃_α
                Matrix2 g{t, Rational(1, p), 0, 1};
                RationalBallFunction gf(p);
                for (const auto& [b, c] : f.terms())
                    gf.add(Ball::make(p, t * b.center + Rational(1, p), b.radius + ord_finite(t, p)), c);
                Rational chi = rpow(alpha, ord_finite(t, p));
                EXPECT_EQ(tilde_delta_alpha(alpha, gf), act(g, tilde_delta_alpha(alpha, f)).scaled(1 / chi));
            }
        }
    }
}

TEST(TreeRep, DeltaAlphaInjectiveAndObstruction) {
    for (long p : {2L, 3L}) {
        for (Rational alpha : {Rational(1), Rational(-1), Rational(2)}) {
            Rational a = alpha + Rational(p) / alpha;
            // nonconstant functions on P^1 have nonzero classes
            std::vector<RationalBallFunction> fs;
            fs.push_back(RationalBallFunction::indicator(Ball::make(p, 0, 0)));
            fs.push_back(RationalBallFunction::indicator(Ball::make(p, 1, 2)));
            RationalBallFunction mix(p);
            mix.add(Ball::make(p, 0, 1), 2).add(Ball::make(p, 1, 1), -1);
            fs.push_back(mix);
            for (const auto& f : fs) {
                auto phi = tilde_delta_alpha(alpha, f);
                long r = phi.support_radius(TreeVertex::origin(p)) + 1;
                EXPECT_EQ(in_image_T_minus_a(phi, a, r).status, Membership::nonmember);
                if (alpha != 1 && alpha != -1) {
                    EXPECT_EQ(pairing(phi, rho_alpha(alpha)), 0);
                }
            }
            // the constant function 1 = 1_{Z_p} + 1_{P^1 - Z_p} maps to zero
            RationalBallFunction one(p);
            one.add(CompactOpen::of_ball(Ball::make(p, 0, 0)), 1);
            one.add(CompactOpen::of_ball(Ball::make(p, 0, 0)).complement(), 1);
            EXPECT_EQ(one.constant(), 1);
        }
    }
}

TEST(TreeRep, WhittakerSteinberg) {
    const long p = 3;
    AdditiveCharacterPsi psi{p};
    EXPECT_TRUE(exact_equal(whittaker_steinberg(RationalBallFunction::indicator(Ball::make(p, 0, 0))), CValue(1)));
    EXPECT_TRUE(whittaker_steinberg(RationalBallFunction::indicator(Ball::make(p, 0, -1))).is_exact_zero());
    RationalBallFunction f(p);
    f.add(Ball::make(p, Rational(1, 3), 0), 2).add(Ball::make(p, 2, 2), -1);
    for (Rational x : {Rational(1, 3), Rational(2, 9), Rational(5)}) {
        auto lhs = whittaker_steinberg(f.translated(x));
        EXPECT_TRUE(exact_equal(lhs, psi(x) * whittaker_steinberg(f)));
    }
}
