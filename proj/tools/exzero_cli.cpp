// exzero_cli: one entry point for the suites and the curve reports.
// Exit 0 when every check passes, 1 on a failed check, 2 on usage errors.

#include <exzero/exzero.hpp>

#include "CLI11.hpp"
#include "json.hpp"

#include <iostream>

#ifndef EXZERO_DATA_DIR
#define EXZERO_DATA_DIR "data"
#endif

using namespace exzero;
using json = nlohmann::ordered_json;

namespace {

struct Report {
    json fields = json::object();
    bool pass = true;
    std::string machine;  // `PASS|FAIL key=value...`, optional
};

bool g_json = false;

int emit(const Report& r) {
    if (g_json) {
        json j = r.fields;
        j["pass"] = r.pass;
        std::cout << j.dump() << '\n';
    } else {
        for (const auto& [k, v] : r.fields.items())
            std::cout << k << ": " << (v.is_string() ? v.get<std::string>() : v.dump()) << '\n';
        if (!r.machine.empty()) std::cout << r.machine << '\n';
    }
    return r.pass ? 0 : 1;
}

json complex_json(const CValue& z) {
    auto c = z.to_complex();
    return json{{"re", c.real()}, {"im", c.imag()}};
}

std::string pass_str(bool ok) { return ok ? "PASS" : "FAIL"; }

Quasicharacter make_char(long p, long f, long k, const Rational& t) {
    if (f == 0) return Quasicharacter::unramified(p, CValue(t));
    return Quasicharacter::from_generator(p, f, k, CValue(t));
}

CValue parse_alpha(const std::string& s, long p) {
    if (s == "sqrtq") return CValue(std::complex<double>(std::sqrt(static_cast<double>(p)), 0.0));
    if (s == "-sqrtq") return CValue(std::complex<double>(-std::sqrt(static_cast<double>(p)), 0.0));
    return CValue(parse_rational(s));
}

// gauss --p P --conductor-exp F --char-spec K
Report gauss(long p, long f, long k) {
    if (f < 1) throw std::invalid_argument("a Gauss sum needs a ramified character (conductor exponent >= 1)");
    Quasicharacter chi = Quasicharacter::from_generator(p, f, k, CValue(1));
    CValue t = gauss_sum(chi);
    Report r;
    r.fields["p"] = p;
    r.fields["conductor_exp"] = chi.conductor_exponent();
    r.fields["char_spec"] = k;
    r.fields["tau_exact"] = t.str();
    r.fields["tau_numeric"] = complex_json(t);
    const long q = to_long(ipow(p, static_cast<unsigned long>(chi.conductor_exponent())));
    if (chi.conductor_exponent() >= 1) {
        bool ident = exact_equal(t * gauss_sum(chi.inverse()), chi.at_minus_one() * CValue(q));
        double dev = std::abs(std::norm(t.to_complex()) - static_cast<double>(q));
        r.fields["tau_tau_inverse_eq_chi_minus_one_q"] = ident;
        r.fields["abs_sq_minus_q"] = dev;
        r.pass = ident && dev < 1e-9;
    }
    if (chi.conductor_exponent() != f) r.fields["note"] = "character renormalized to its true conductor";
    r.machine = pass_str(r.pass) + " report=gauss p=" + std::to_string(p) + " f=" + std::to_string(chi.conductor_exponent()) +
                " k=" + std::to_string(k);
    return r;
}

// local-integral --p P --alpha A --conductor-exp F --char-spec K --chi-p T [--n-max N]
Report local_integral(long p, const std::string& alpha_s, long f, long k, const Rational& t, long n_max) {
    Quasicharacter chi = make_char(p, f, k, t);
    CValue alpha = parse_alpha(alpha_s, p);
    if (n_max < 0) n_max = acceptance::detail::shells_for(chi, alpha, 1e-8);
    MellinResult m = mellin_mu_alpha(chi, alpha, n_max);
    CValue target = interpolation_target(chi, alpha);
    double err = (m.completed - target).abs();
    Report r;
    r.fields["p"] = p;
    r.fields["alpha"] = alpha_s;
    r.fields["conductor_exp"] = chi.conductor_exponent();
    r.fields["shells"] = std::to_string(m.n_min) + ".." + std::to_string(m.n_max);
    r.fields["truncated"] = complex_json(m.truncated);
    r.fields["completed"] = complex_json(m.completed);
    r.fields["closed_form_target"] = complex_json(target);
    r.fields["tail_bound"] = m.tail_bound;
    r.fields["abs_completed_minus_target"] = err;
    r.pass = err <= 1e-8 && (m.truncated - target).abs() <= m.tail_bound + 1e-8;
    r.machine = pass_str(r.pass) + " report=local-integral p=" + std::to_string(p) + " alpha=" + alpha_s;
    return r;
}

// tree --p P --radius R --check
Report tree_check(long p, long R) {
    using namespace tree;
    auto center = TreeVertex::origin(p);
    auto verts = ball_of_radius(center, R);
    auto edges = edges_of_radius(center, R);
    long bad = 0;
    // |B_R| = 1 + (q+1)(q^R - 1)/(q - 1)
    Integer expect_v = 1 + (p + 1) * ((ipow(p, static_cast<unsigned long>(R)) - 1) / (p - 1));
    if (Integer(static_cast<long>(verts.size())) != expect_v) ++bad;
    if (edges.size() + 1 != verts.size()) ++bad;
    std::set<TreeVertex> seen(verts.begin(), verts.end());
    if (seen.size() != verts.size()) ++bad;
    for (const auto& v : verts) {
        auto nb = neighbors(v);
        std::set<TreeVertex> nset(nb.begin(), nb.end());
        if (static_cast<long>(nset.size()) != p + 1) ++bad;
        for (const auto& w : nb)
            if (distance(v, w) != 1) ++bad;
        if (distance(center, v) > R) ++bad;
        if (distance(up(v), v) != 1) ++bad;
    }
    for (const auto& e : edges)
        if (distance(e.origin, e.target) != 1 || !seen.count(e.origin) || !seen.count(e.target)) ++bad;
    Report r;
    r.fields["p"] = p;
    r.fields["radius"] = R;
    r.fields["vertices"] = verts.size();
    r.fields["edges"] = edges.size();
    r.fields["expected_vertices"] = expect_v.get_str();
    r.fields["failures"] = bad;
    r.pass = bad == 0;
    r.machine = pass_str(r.pass) + " report=tree p=" + std::to_string(p) + " radius=" + std::to_string(R) +
                " vertices=" + std::to_string(verts.size()) + " edges=" + std::to_string(edges.size());
    return r;
}

Report suite_report(const std::string& name, const std::string& params, const acceptance::SuiteCount& c, bool extra_ok) {
    Report r;
    r.fields["suite"] = name;
    r.fields["instances"] = c.instances;
    r.fields["failures"] = c.failures;
    if (!c.notes.empty()) r.fields["notes"] = c.notes;
    r.pass = c.failures == 0 && extra_ok;
    r.machine = pass_str(r.pass) + " report=" + name + " " + params + " instances=" + std::to_string(c.instances) +
                " failures=" + std::to_string(c.failures);
    return r;
}

// lp --measure FILE (--s S --level n | --moments K)
Report lp(const std::string& path, const std::optional<std::string>& s_str, long level, long moments, long prec) {
    auto loaded = BallMeasure::read_file(path, prec);
    const BallMeasure& mu = loaded.measure;
    const long p = mu.prime();
    DistributionReport d = check_distribution_and_bound(mu);
    Report r;
    r.fields["p"] = p;
    r.fields["levels"] = mu.level();
    r.fields["distribution_ok"] = d.ok;
    r.fields["certificate"] = d.certificate;
    r.fields["claimed_certificate"] = loaded.claimed_certificate;
    if (!d.ok) r.fields["violation"] = d.message;
    r.pass = d.ok && d.certificate <= loaded.claimed_certificate;
    if (level < 0) level = mu.level();
    if (r.pass && s_str) {
        PadicNumber s = PadicNumber::from_rational(parse_rational(*s_str), p, prec);
        RiemannSum g = gamma_transform(mu, s, level);
        r.fields["s"] = *s_str;
        r.fields["level"] = level;
        r.fields["gamma"] = g.value.str();
        r.fields["error_exponent"] = g.reliable_exponent();
    }
    if (r.pass && moments >= 0) {
        json ms = json::array();
        for (long k = 0; k <= moments; ++k) {
            RiemannSum m = moment(mu, k, level);
            ms.push_back(json{{"k", k}, {"value", m.value.str()}, {"error_exponent", m.reliable_exponent()}});
        }
        r.fields["level"] = level;
        r.fields["moments"] = ms;
    }
    r.machine = pass_str(r.pass) + " report=lp p=" + std::to_string(p) + " c=" + std::to_string(d.certificate) +
                " claimed_c=" + std::to_string(loaded.claimed_certificate);
    return r;
}

Report linv(const std::string& path, long p, long prec) {
    EllipticCurve E = EllipticCurve::read_file(path);
    TatePeriod t = tate_period(E, p, prec + 2);
    PadicNumber L = l_invariant(E, p, prec);
    Report r;
    r.fields["curve"] = E.label();
    r.fields["p"] = p;
    r.fields["reduction"] = to_string(E.reduction(p));
    r.fields["ord_q"] = t.valuation;
    r.fields["q"] = t.q.str();
    r.fields["L_invariant"] = L.str();
    r.pass = t.roundtrip_ok;
    r.machine = pass_str(r.pass) + " report=linv curve=" + E.label() + " p=" + std::to_string(p) + " L=" +
                L.residue(prec).get_str() + " mod " + std::to_string(p) + "^" + std::to_string(prec);
    return r;
}

Report interp(const std::string& path, long p, long level, long prec) {
    EllipticCurve E = EllipticCurve::read_file(path);
    Eigensymbol lam(E);
    InterpolationReport ir = interpolation_report(E, lam, p, level, prec);
    Report r;
    r.fields["curve"] = E.label();
    r.fields["p"] = p;
    r.fields["level"] = level;
    r.fields["reduction"] = to_string(ir.reduction);
    r.fields["lambda0"] = ir.lambda0.get_str();
    r.fields["certificate"] = ir.certificate;
    r.fields["alpha"] = ir.alpha.str();
    r.fields["mass_over_lambda0"] = ir.ratio.str();
    r.fields["euler_factor"] = ir.expected.str();
    r.pass = ir.pass;
    r.machine = ir.machine_line();
    return r;
}

Report ezero(const std::string& path, long p, long level, long prec) {
    EllipticCurve E = EllipticCurve::read_file(path);
    Eigensymbol lam(E);
    ExceptionalZeroReport ez = exceptional_zero_report(E, lam, p, level, prec);
    Report r;
    r.fields["curve"] = E.label();
    r.fields["p"] = p;
    r.fields["level"] = level;
    r.fields["prec"] = prec;
    r.fields["lambda0"] = ez.lambda0.get_str();
    if (ez.vacuous) {
        r.fields["note"] = ez.note;
    } else {
        r.fields["certificate"] = ez.certificate;
        r.fields["mass_over_lambda0"] = ez.mass_ratio.str();
        r.fields["mass_vanishes_mod_p^"] = ez.mass_exponent;
        r.fields["moment1_over_lambda0"] = ez.moment_ratio.str();
        r.fields["moment1_known_mod_p^"] = ez.moment_exponent;
        r.fields["L_invariant"] = ez.l_invariant.str();
        r.fields["vanishing_order"] = (ez.order_is_lower_bound ? ">=" : "") + std::to_string(ez.order);
        if (!ez.note.empty()) r.fields["note"] = ez.note;
    }
    r.pass = ez.pass;
    r.machine = ez.machine_line();
    return r;
}

int suite(bool quick, unsigned long seed, const std::string& data) {
    acceptance::Options o;
    o.quick = quick;
    o.seed = seed;
    o.data_dir = data;
    bool all = true;
    for (const auto& res : acceptance::run_all(o)) {
        all = all && res.pass;
        if (g_json)
            std::cout << json{{"criterion", res.id}, {"name", res.name}, {"pass", res.pass}, {"seconds", res.seconds}, {"detail", res.detail}}.dump()
                      << '\n';
        else
            std::cout << acceptance::line(res) << '\n';
        std::cout.flush();
    }
    return all ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"exzero: local distributions, tree operators, p-adic measures and exceptional zeros"};
    app.require_subcommand(1);
    std::string format = "text";
    app.add_option("--format", format, "text or json")->check(CLI::IsMember({"text", "json"}));

    long p = 3, f = 1, k = 1, radius = 2, level = -1, prec = 4, n_max = -1, moments = -1;
    long rep_trials = 200, st_trials = 200, det_trials = 1000, kmax = 4, mmax = 5;
    std::string alpha = "1", chi_p = "1", path, data = EXZERO_DATA_DIR;
    std::optional<std::string> s_str;
    unsigned long seed = acceptance::Options{}.seed;
    bool flag = false;

    auto* g = app.add_subcommand("gauss", "Gauss sum of a primitive character, exact and numeric");
    g->add_option("--p", p)->required();
    g->add_option("--conductor-exp", f)->check(CLI::Range(1, 6));
    g->add_option("--char-spec", k, "exponent k: χ(g) = ζ^k on a primitive root g");

    auto* li = app.add_subcommand("local-integral", "Mellin transform of μ_α against ψχ by shells");
    li->add_option("--p", p)->required();
    li->add_option("--alpha", alpha, "rational, or sqrtq / -sqrtq");
    li->add_option("--conductor-exp", f)->check(CLI::Range(0, 4));
    li->add_option("--char-spec", k);
    li->add_option("--chi-p", chi_p, "χ(p), rational");
    li->add_option("--n-max", n_max);

    auto* tr = app.add_subcommand("tree", "ball of the tree: counts and invariants");
    tr->add_option("--p", p)->required();
    tr->add_option("--radius", radius)->check(CLI::Range(0, 8));
    tr->add_flag("--check", flag);

    auto* trep = app.add_subcommand("tree-rep", "tree-operator identities on a ball");
    trep->add_option("--p", p)->required();
    trep->add_option("--radius", radius)->check(CLI::Range(1, 5));
    trep->add_option("--trials", rep_trials);
    trep->add_flag("--suite", flag);
    trep->add_option("--seed", seed);

    auto* st = app.add_subcommand("steinberg", "coboundary and cocycle identities of z_ell");
    st->add_option("--p", p)->required();
    st->add_option("--trials", st_trials);
    st->add_flag("--suite", flag);
    st->add_option("--seed", seed);

    auto* dc = app.add_subcommand("detcheck", "determinant expansion over fixed-point-free maps");
    dc->add_option("--trials", det_trials);
    dc->add_option("--kmax", kmax)->check(CLI::Range(1, 6));
    dc->add_option("--mmax", mmax)->check(CLI::Range(2, 8));
    dc->add_option("--seed", seed);

    auto* lpc = app.add_subcommand("lp", "Γ-transform or moments of a measure file");
    lpc->add_option("--measure", path)->required();
    auto* s_opt = lpc->add_option("--s", s_str, "rational s with ord_p(s) >= 1");
    auto* m_opt = lpc->add_option("--moments", moments)->check(CLI::Range(0L, kMaxMoment));
    lpc->add_option("--level", level);
    lpc->add_option("--prec", prec);
    s_opt->excludes(m_opt);

    auto* lv = app.add_subcommand("linv", "Tate period and L-invariant");
    lv->add_option("--curve", path)->required();
    lv->add_option("--p", p)->required();
    lv->add_option("--prec", prec);

    auto* ip = app.add_subcommand("interp", "total mass of the curve's measure against the Euler factor");
    ip->add_option("--curve", path)->required();
    ip->add_option("--p", p)->required();
    ip->add_option("--level", level);
    ip->add_option("--prec", prec);

    auto* ez = app.add_subcommand("ezero", "exceptional zero report at split multiplicative p");
    ez->add_option("--curve", path)->required();
    ez->add_option("--p", p)->required();
    ez->add_option("--level", level);
    ez->add_option("--prec", prec);

    auto* su = app.add_subcommand("suite", "all acceptance checks");
    su->add_flag("--quick", flag);
    su->add_option("--seed", seed);
    su->add_option("--data", data);

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return 2;
    }
    g_json = format == "json";

    try {
        if (g->parsed()) return emit(gauss(p, f, k));
        if (li->parsed()) return emit(local_integral(p, alpha, f, k, parse_rational(chi_p), n_max));
        if (tr->parsed()) return emit(tree_check(p, radius));
        if (trep->parsed()) {
            std::mt19937_64 rng(seed + 1);
            auto c = acceptance::tree_rep_suite(p, radius, rep_trials, rng);
            return emit(suite_report("tree-rep", "p=" + std::to_string(p) + " radius=" + std::to_string(radius), c, c.literal_fails));
        }
        if (st->parsed()) {
            std::mt19937_64 rng(seed + 5);
            auto c = acceptance::steinberg_suite({p}, st_trials, 100, rng);
            return emit(suite_report("steinberg", "p=" + std::to_string(p), c, true));
        }
        if (dc->parsed()) {
            if (mmax <= kmax) throw std::invalid_argument("--mmax must exceed --kmax");
            std::mt19937_64 rng(seed + 6);
            auto c = acceptance::detcheck_suite(det_trials, static_cast<std::size_t>(kmax), static_cast<std::size_t>(mmax), rng);
            return emit(suite_report("detcheck", "kmax=" + std::to_string(kmax) + " mmax=" + std::to_string(mmax), c, true));
        }
        if (lpc->parsed()) {
            if (!s_str && moments < 0) throw std::invalid_argument("lp needs --s or --moments");
            return emit(lp(path, s_str, level, moments, std::max(prec, 20L)));
        }
        if (lv->parsed()) return emit(linv(path, p, prec));
        if (ip->parsed()) return emit(interp(path, p, level < 0 ? 4 : level, prec));
        if (ez->parsed()) return emit(ezero(path, p, level < 0 ? 4 : level, prec));
        if (su->parsed()) return suite(flag, seed, data);
    } catch (const std::invalid_argument& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    }
    return 2;
}
