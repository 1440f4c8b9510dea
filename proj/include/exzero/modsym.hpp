#pragma once

// Plus modular symbols for Γ0(N) via Manin symbols (c:d) ∈ P^1(Z/N).
// A functional φ on the symbol space vanishing on the 2-term, 3-term and
// star relations is a plus modular symbol; λ(r) = φ({∞, r}).

#include "bt_tree.hpp"
#include "elliptic.hpp"
#include "linalg.hpp"

#include <map>

namespace exzero {

using linalg::Mat;
using linalg::Vec;
using linalg::dot;
using linalg::nullspace;
using linalg::transpose;

class P1List {
public:
    explicit P1List(long N) : N_(N), index_(static_cast<std::size_t>(N * N), -1) {
        if (N < 1) throw std::invalid_argument("level must be positive");
        for (long c = 0; c < N; ++c)
            for (long d = 0; d < N; ++d) {
                if (gcd(gcd(c, d), N) != 1) continue;
                auto canon = normalize(c, d);
                auto it = canon_index_.find(canon);
                long idx;
                if (it == canon_index_.end()) {
                    idx = static_cast<long>(reps_.size());
                    reps_.push_back(canon);
                    canon_index_.emplace(canon, idx);
                } else {
                    idx = it->second;
                }
                index_[static_cast<std::size_t>(c * N + d)] = idx;
            }
    }

    long level() const { return N_; }
    std::size_t size() const { return reps_.size(); }
    const std::pair<long, long>& operator[](std::size_t i) const { return reps_[i]; }

    /// Index of (c:d); c, d any integers with gcd(c, d, N) = 1.
    std::size_t index(const Integer& c, const Integer& d) const {
        long cc = to_long(exzero::mod(c, Integer(N_))), dd = to_long(exzero::mod(d, Integer(N_)));
        long i = index_[static_cast<std::size_t>(cc * N_ + dd)];
        if (i < 0) throw std::domain_error("(c:d) is not in P^1(Z/N)");
        return static_cast<std::size_t>(i);
    }
    std::size_t index(long c, long d) const { return index(Integer(c), Integer(d)); }

private:
    // least (uc, ud) over units u
    std::pair<long, long> normalize(long c, long d) const {
        std::pair<long, long> best{N_, N_};
        for (long u = 1; u <= N_; ++u) {
            if (gcd(u, N_) != 1) continue;
            std::pair<long, long> cand{u * c % N_, u * d % N_};
            if (cand < best) best = cand;
        }
        return best;
    }

    long N_;
    std::vector<long> index_;
    std::vector<std::pair<long, long>> reps_;
    std::map<std::pair<long, long>, long> canon_index_;
};

/// A formal sum of Manin symbols, as a sparse coefficient map.
using SymbolSum = std::map<std::size_t, Rational>;

/// Continued-fraction convergents of r: (p_k, q_k), k = 0..n.
inline std::vector<std::pair<Integer, Integer>> convergents(const Rational& r) {
    std::vector<std::pair<Integer, Integer>> out;
    Integer a = r.get_num(), b = r.get_den();
    Integer p_prev = 1, q_prev = 0, p_cur, q_cur;
    Integer pp2 = 0, qq2 = 1;  // p_{-2}, q_{-2}
    while (b != 0) {
        Integer t;
        mpz_fdiv_q(t.get_mpz_t(), a.get_mpz_t(), b.get_mpz_t());
        p_cur = t * p_prev + pp2;
        q_cur = t * q_prev + qq2;
        out.emplace_back(p_cur, q_cur);
        pp2 = p_prev;
        qq2 = q_prev;
        p_prev = p_cur;
        q_prev = q_cur;
        Integer rem = a - t * b;
        a = b;
        b = rem;
    }
    return out;
}

class ModularSymbols {
public:
    explicit ModularSymbols(long N) : p1_(N) {
        const std::size_t n = p1_.size();
        auto S = [&](long c, long d) { return p1_.index(d, -c); };
        auto T = [&](long c, long d) { return p1_.index(d, -c - d); };
        auto T2 = [&](long c, long d) { return p1_.index(-c - d, c); };
        auto star = [&](long c, long d) { return p1_.index(-c, d); };
        for (std::size_t i = 0; i < n; ++i) {
            auto [c, d] = p1_[i];
            Vec r2(n, 0), r3(n, 0), rs(n, 0);
            r2[i] += 1;
            r2[S(c, d)] += 1;
            r3[i] += 1;
            r3[T(c, d)] += 1;
            r3[T2(c, d)] += 1;
            rs[i] += 1;
            rs[star(c, d)] -= 1;
            relations_.push_back(std::move(r2));
            relations_.push_back(std::move(r3));
            relations_.push_back(std::move(rs));
        }
        plus_functionals_ = nullspace(relations_, n);
    }

    long level() const { return p1_.level(); }
    const P1List& p1() const { return p1_; }
    std::size_t rank() const { return p1_.size(); }
    const Mat& relations() const { return relations_; }
    /// Basis of the plus symbols, as functionals on Manin symbols.
    const std::vector<Vec>& plus_basis() const { return plus_functionals_; }

    /// {∞, r} as a sum of Manin symbols: segment k is g{0, ∞} with g of
    /// bottom row (q_k, ±q_{k-1}).
    SymbolSum path_from_infinity(const Rational& r) const {
        SymbolSum s;
        Integer p_prev = 1, q_prev = 0;
        for (const auto& [pk, qk] : convergents(r)) {
            Integer det = pk * q_prev - p_prev * qk;  // (-1)^{k-1}
            Integer d = det == 1 ? Integer(q_prev) : Integer(-q_prev);
            s[p1_.index(qk, d)] += 1;
            p_prev = pk;
            q_prev = qk;
        }
        return s;
    }

    /// {a, b} = {∞, b} - {∞, a}; a or b may be ∞ (nullopt).
    SymbolSum path(const std::optional<Rational>& a, const std::optional<Rational>& b) const {
        SymbolSum s;
        if (b) s = path_from_infinity(*b);
        if (a)
            for (const auto& [i, c] : path_from_infinity(*a)) s[i] -= c;
        return s;
    }

    /// Rows: T_l applied to each Manin symbol. For l | N this is U_l.
    const Mat& hecke_matrix(long l) const {
        auto it = hecke_.find(l);
        if (it != hecke_.end()) return it->second;
        require_prime(l);
        const std::size_t n = rank();
        const long N = level();
        Mat M(n, Vec(n, 0));
        for (std::size_t i = 0; i < n; ++i) {
            auto [c, d] = p1_[i];
            auto g = lift_to_sl2(c, d);
            std::vector<tree::Matrix2> deltas;
            for (long j = 0; j < l; ++j) deltas.push_back({1, j, 0, l});
            if (N % l != 0) deltas.push_back({l, 0, 0, 1});
            for (const auto& delta : deltas) {
                tree::Matrix2 h = delta * g;
                auto img = [&](bool at_zero) -> std::optional<Rational> {
                    Rational num = at_zero ? h.b : h.a, den = at_zero ? h.d : h.c;
                    if (den == 0) return std::nullopt;
                    return Rational(num / den);
                };
                for (const auto& [k, v] : path(img(true), img(false))) M[i][k] += v;
            }
        }
        return hecke_.emplace(l, std::move(M)).first->second;
    }

    /// φ∘T_l, for φ a functional on Manin symbols.
    Vec apply_hecke(long l, const Vec& phi) const {
        const Mat& M = hecke_matrix(l);
        Vec out(rank(), 0);
        for (std::size_t i = 0; i < rank(); ++i) out[i] = dot(M[i], phi);
        return out;
    }

    static Rational evaluate(const Vec& phi, const SymbolSum& s) {
        Rational v = 0;
        for (const auto& [i, c] : s) v += c * phi[i];
        return v;
    }

private:
    // An SL_2(Z) matrix with bottom row ≡ (c, d) mod N.
    tree::Matrix2 lift_to_sl2(long c, long d) const {
        const long N = level();
        if (N == 1) return tree::Matrix2::identity();
        for (long k = 0;; ++k) {
            // adjust d by multiples of N until gcd(c, d') = 1
            for (long dd : {d + k * N, d - k * N}) {
                long cc = c == 0 ? N : c;
                if (gcd(cc, dd) != 1) continue;
                Integer g, s, t;
                mpz_gcdext(g.get_mpz_t(), s.get_mpz_t(), t.get_mpz_t(), Integer(cc).get_mpz_t(), Integer(dd).get_mpz_t());
                // s cc + t dd = 1, so ((t, -s), (cc, dd)) has det 1
                return {Rational(t), Rational(-s), Rational(cc), Rational(dd)};
            }
        }
    }

    P1List p1_;
    Mat relations_;
    std::vector<Vec> plus_functionals_;
    mutable std::map<long, Mat> hecke_;
};

/// The normalized plus eigensymbol λ of an elliptic curve.
class Eigensymbol {
public:
    /// Cuts the plus space down with T_l - a_l for good l until one dimension
    /// is left; max_prime bounds the primes tried.
    Eigensymbol(const EllipticCurve& E, long max_prime = 97) : ms_(E.conductor()) {
        const std::size_t n = ms_.rank();
        std::vector<Vec> space = ms_.plus_basis();
        for (long l = 2; l <= max_prime && space.size() > 1; ++l) {
            if (!is_prime(l) || E.conductor() % l == 0) continue;
            const Rational a = E.ap(l);
            // coefficients x with Σ x_k (T_l - a) b_k = 0
            Mat cols;
            for (const auto& b : space) {
                Vec w = ms_.apply_hecke(l, b);
                for (std::size_t i = 0; i < n; ++i) w[i] -= a * b[i];
                cols.push_back(std::move(w));
            }
            Mat A = transpose(cols, n);
            std::vector<Vec> ker = nullspace(A, space.size());
            std::vector<Vec> next;
            for (const auto& x : ker) {
                Vec v(n, 0);
                for (std::size_t k = 0; k < space.size(); ++k)
                    if (x[k] != 0)
                        for (std::size_t i = 0; i < n; ++i) v[i] += x[k] * space[k][i];
                next.push_back(std::move(v));
            }
            space = std::move(next);
            primes_used_.push_back(l);
        }
        if (space.size() != 1)
            throw std::runtime_error("eigenspace has dimension " + std::to_string(space.size()) +
                                     " after the available Hecke operators; more primes are needed");
        phi_ = normalize(space[0]);
    }

    const ModularSymbols& space() const { return ms_; }
    const Vec& functional() const { return phi_; }
    const std::vector<long>& primes_used() const { return primes_used_; }

    /// λ(r) = φ({∞, r}).
    Rational operator()(const Rational& r) const { return ModularSymbols::evaluate(phi_, ms_.path_from_infinity(r)); }

    /// Whether φ∘T_l = a φ.
    bool is_eigen(long l, const Rational& a) const {
        Vec w = ms_.apply_hecke(l, phi_);
        for (std::size_t i = 0; i < w.size(); ++i)
            if (w[i] != a * phi_[i]) return false;
        return true;
    }

private:
    // integral with content 1, λ(0) > 0 (or first nonzero entry > 0)
    Vec normalize(Vec v) const {
        Integer den = 1;
        for (const auto& x : v) den = lcm_int(den, x.get_den());
        Integer g = 0;
        for (auto& x : v) {
            x *= den;
            g = gcd(g, Integer(x.get_num()));
        }
        for (auto& x : v) x /= g;
        Rational at0 = ModularSymbols::evaluate(v, ms_.path_from_infinity(0));
        int sign = 0;
        if (at0 != 0) sign = at0 > 0 ? 1 : -1;
        for (std::size_t i = 0; i < v.size() && sign == 0; ++i)
            if (v[i] != 0) sign = v[i] > 0 ? 1 : -1;
        if (sign < 0)
            for (auto& x : v) x = -x;
        return v;
    }

    static Integer lcm_int(const Integer& a, const Integer& b) {
        Integer r;
        mpz_lcm(r.get_mpz_t(), a.get_mpz_t(), b.get_mpz_t());
        return r;
    }

    ModularSymbols ms_;
    Vec phi_;
    std::vector<long> primes_used_;
};

}  // namespace exzero
