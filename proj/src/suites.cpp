#include "lrising/suites.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstdio>
#include <random>
#include <stdexcept>

#include "lrising/cluster.hpp"
#include "lrising/contours.hpp"
#include "lrising/oracle.hpp"

namespace lrising {

namespace {

std::string fmt(const char* f, double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, f, v);
    return buf;
}

std::string g(double v) { return fmt("%.6g", v); }

}  // namespace

bool SuiteReport::pass() const {
    return !checks.empty() && std::all_of(checks.begin(), checks.end(), [](const CheckLine& c) { return c.pass; });
}

void SuiteReport::add(std::string name, bool ok, std::string detail) {
    checks.push_back({std::move(name), ok, std::move(detail)});
}

SuiteReport bijection_suite(const BijectionOptions& opt) {
    SuiteReport rep;
    rep.suite = "bijection";

    auto check_one = [](const Spins& s, long& bad_trip, long& bad_inv, long& pairs) {
        const auto fam = build_triangles(s);
        if (reconstruct_spins(fam) != s) ++bad_trip;
        const auto inv = check_family_invariants(fam);
        if (!inv.ok()) ++bad_inv;
        pairs += inv.pairs_checked;
    };

    const int n = 2 * opt.exhaustive_L + 1;
    long bad_trip = 0;
    long bad_inv = 0;
    long pairs = 0;
    Spins s(static_cast<std::size_t>(n), 1);
    const std::uint64_t total = std::uint64_t{1} << n;
    for (std::uint64_t code = 0; code < total; ++code) {
        for (int p = 0; p < n; ++p) s[static_cast<std::size_t>(p)] = (code >> p) & 1u ? -1 : 1;
        check_one(s, bad_trip, bad_inv, pairs);
    }
    rep.add("round trip, all " + std::to_string(total) + " configurations at L=" + std::to_string(opt.exhaustive_L),
            bad_trip == 0, std::to_string(bad_trip) + " mismatches");
    rep.add("triangle invariants, exhaustive", bad_inv == 0,
            std::to_string(bad_inv) + " violations over " + std::to_string(pairs) + " triangle pairs");
    rep.artifact["exhaustive"] = {{"L", opt.exhaustive_L}, {"configurations", total}, {"round_trip_failures", bad_trip},
                                  {"invariant_failures", bad_inv}, {"pairs_checked", pairs}};

    // random lines: a two-state Markov chain with a per-line flip rate gives triangles of every scale
    std::mt19937_64 rng(opt.seed);
    std::uniform_real_distribution<double> rate(0.001, 0.5);
    const int m = 2 * opt.random_L + 1;
    Spins r(static_cast<std::size_t>(m), 1);
    long rt = 0;
    long ri = 0;
    long rp = 0;
    for (long c = 0; c < opt.random_count; ++c) {
        // runs between flips are geometric with the flip rate
        std::geometric_distribution<int> run(rate(rng));
        std::int8_t cur = rng() & 1u ? 1 : -1;
        int p = run(rng);
        std::fill(r.begin(), r.begin() + std::min(p, m), cur);
        while (p < m) {
            cur = static_cast<std::int8_t>(-cur);
            const int end = std::min(m, p + 1 + run(rng));
            std::fill(r.begin() + p, r.begin() + end, cur);
            p = end;
        }
        check_one(r, rt, ri, rp);
    }
    rep.add("round trip, " + std::to_string(opt.random_count) + " random configurations at L=" +
                std::to_string(opt.random_L),
            rt == 0, std::to_string(rt) + " mismatches");
    rep.add("triangle invariants, random", ri == 0,
            std::to_string(ri) + " violations over " + std::to_string(rp) + " triangle pairs");
    rep.artifact["random"] = {{"L", opt.random_L}, {"configurations", opt.random_count}, {"seed", opt.seed},
                              {"round_trip_failures", rt}, {"invariant_failures", ri}, {"pairs_checked", rp}};
    return rep;
}

namespace {

nlohmann::json stats_json(const InequalityStats& s) {
    return {{"inequality", s.name},       {"instances", s.instances},   {"violations", s.violations},
            {"unrealizable", s.unrealizable}, {"worst_margin", s.worst_margin}, {"j_required", s.j_required},
            {"impossible", s.impossible}};
}

}  // namespace

SuiteReport peierls_suite(const ModelParams& params, const PeierlsOptions& opt) {
    SuiteReport rep;
    rep.suite = "peierls";
    rep.artifact["runs"] = nlohmann::json::array();
    std::vector<ModelParams> ps;
    std::vector<PeierlsChecker> checkers;
    for (double alpha : opt.alphas) {
        ModelParams p = params;
        p.alpha = alpha;
        ps.push_back(p);
        checkers.emplace_back(p);
    }
    const int n = 2 * opt.L + 1;
    Spins s(static_cast<std::size_t>(n), 1);
    for (std::uint32_t code = 0; code < (1u << n); ++code) {
        for (int q = 0; q < n; ++q) s[static_cast<std::size_t>(q)] = (code >> q) & 1u ? -1 : 1;
        for (auto& c : checkers) c.add_configuration(s);
    }
    // contour shapes depend on C only, so one census feeds every alpha
    const auto census = contour_census(opt.contour_mass, params.alpha, params.C, [&](const Contour& c) {
        for (auto& ch : checkers) ch.add_contour(c);
    });
    long contours = 0;
    for (const auto& l : census.levels) contours += l.count;

    for (std::size_t k = 0; k < checkers.size(); ++k) {
        const ModelParams& p = ps[k];
        add_sampled_pairs(checkers[k], p, opt.pairs_L, opt.sampled_pairs, opt.seed);
        const auto r = checkers[k].report();

        const std::string tag = "alpha=" + g(p.alpha);
        rep.add(tag + ": minimal integer J <= 30 found", r.min_integer_J >= 1,
                "J_min=" + std::to_string(r.min_integer_J));
        for (const auto& c : r.checks) {
            rep.add(tag + ": " + c.name + " bound at J=" + g(p.J), c.violations == 0 && !c.impossible,
                    std::to_string(c.instances) + " instances, " + std::to_string(c.violations) +
                        " violations, worst margin " + g(c.worst_margin) + ", J required " + g(c.j_required));
        }
        nlohmann::json run = {{"alpha", p.alpha},
                              {"J", p.J},
                              {"C", p.C},
                              {"delta", r.delta},
                              {"min_integer_J", r.min_integer_J},
                              {"contours_enumerated", contours},
                              {"checks", nlohmann::json::array()}};
        for (const auto& c : r.checks) run["checks"].push_back(stats_json(c));
        rep.artifact["runs"].push_back(run);
    }
    return rep;
}

SuiteReport counting_suite(const ModelParams& params, const CountingOptions& opt) {
    SuiteReport rep;
    rep.suite = "counting";
    const auto census = contour_census(opt.mass_max, params.alpha, params.C);
    const double b = opt.b < 0.0 ? census.b_star : opt.b;
    rep.artifact = {{"alpha", params.alpha}, {"C", params.C}, {"b", b}, {"b_star", census.b_star},
                    {"nodes_visited", census.nodes_visited}, {"levels", nlohmann::json::array()}};
    for (const auto& l : census.levels) {
        const double lhs = l.lhs(b);
        const double rhs = l.rhs(b, params.alpha);
        rep.add("mass " + std::to_string(l.mass) + " at b=" + g(b), lhs <= rhs,
                std::to_string(l.count) + " contours, sum " + g(lhs) + " <= " + g(rhs));
        rep.artifact["levels"].push_back(
            {{"mass", l.mass}, {"count", l.count}, {"b_min", l.b_min}, {"lhs", lhs}, {"rhs", rhs}});
    }
    return rep;
}

SuiteReport entropy_suite(const ModelParams& params, const EntropyOptions& opt) {
    SuiteReport rep;
    rep.suite = "entropy";
    rep.artifact["sizes"] = nlohmann::json::array();
    for (int n : opt.sizes) {
        if (n % 2 == 0) throw std::invalid_argument("window sizes must be odd");
        const int L = (n - 1) / 2;
        const double eps_s_abs = std::pow(static_cast<double>(n), 1.0 - params.gamma);
        long worst = 0;
        long total = 0;
        double log_bound = 0.0;
        bool ok = true;
        nlohmann::json rows = nlohmann::json::array();
        for (int k = 1; k <= n; ++k) {
            const auto c = count_external_families(L, static_cast<double>(k) / n, eps_s_abs, params.gamma);
            log_bound = c.log_bound;
            worst = std::max(worst, c.count);
            total += c.count;
            ok = ok && (c.count == 0 || std::log(static_cast<double>(c.count)) <= c.log_bound);
            rows.push_back({{"mass", k}, {"count", c.count}, {"candidates", c.candidates}});
        }
        rep.add("|Lambda|=" + std::to_string(n) + ", gamma=" + g(params.gamma), ok,
                "max count " + std::to_string(worst) + " <= e^" + g(log_bound) + " = " + g(std::exp(log_bound)));
        rep.artifact["sizes"].push_back({{"size", n},
                                         {"gamma", params.gamma},
                                         {"threshold", eps_s_abs},
                                         {"log_bound", log_bound},
                                         {"max_count", worst},
                                         {"total", total},
                                         {"by_mass", rows}});
    }
    return rep;
}

SuiteReport merge_suite(const ModelParams& params, const MergeOptions& opt) {
    SuiteReport rep;
    rep.suite = "merge";
    const Kernel kernel(params.alpha, params.J, 2 * opt.max_L + 2);
    std::mt19937_64 rng(opt.seed);

    long merge_bad = 0;
    long gap_bad = 0;
    long gap_checks = 0;
    double min_gain = std::numeric_limits<double>::infinity();
    for (long f = 0; f < opt.families; ++f) {
        const int L = std::uniform_int_distribution<int>(5, opt.max_L)(rng);
        const int n = 2 * L + 1;
        const int k = std::uniform_int_distribution<int>(2, std::min(10, n / 2))(rng);
        std::vector<int> cuts;
        while (static_cast<int>(cuts.size()) < 2 * k) {
            const int c = std::uniform_int_distribution<int>(0, n)(rng);
            if (std::find(cuts.begin(), cuts.end(), c) == cuts.end()) cuts.push_back(c);
        }
        std::sort(cuts.begin(), cuts.end());
        std::vector<Interval> iv;
        int mass = 0;
        for (int i = 0; i < k; ++i) {
            iv.push_back({cuts[2 * i] - L, cuts[2 * i + 1] - 1 - L});
            mass += iv.back().length();
        }
        const double e = interval_family_energy(iv, kernel, L).total;
        const Interval merged[] = {{iv.front().lo, iv.front().lo + mass - 1}};
        const double gain = e - interval_family_energy(merged, kernel, L).total;
        min_gain = std::min(min_gain, gain);
        if (!(gain > 0.0)) ++merge_bad;
        for (int i = 0; i + 1 < k; ++i) {
            if (iv[i + 1].lo - iv[i].hi < 3) continue;  // gap of at least two sites
            auto closer = iv;
            for (int j = i + 1; j < k; ++j) {
                --closer[j].lo;
                --closer[j].hi;
            }
            ++gap_checks;
            if (!(interval_family_energy(closer, kernel, L).total < e)) ++gap_bad;
        }
    }
    rep.add("merging strictly lowers the energy on " + std::to_string(opt.families) + " random families",
            merge_bad == 0, std::to_string(merge_bad) + " failures, smallest gain " + g(min_gain));
    rep.add("shrinking one gap strictly lowers the energy", gap_bad == 0,
            std::to_string(gap_bad) + " failures in " + std::to_string(gap_checks) + " moves");

    // A fixed sequence of run lengths has its lowest energy at unit gaps, since every
    // pair interaction grows as its distance shrinks; so the compositions at unit gaps
    // cover all families of a given mass.
    const int L = (opt.window - 1) / 2;
    const Kernel wk = build_kernel(params, L);
    const double lead = zeta_alpha(params.alpha) / (2.0 * params.alpha * (1.0 - params.alpha));
    bool minimal = true;
    nlohmann::json rows = nlohmann::json::array();
    for (int m = 2; m <= opt.max_mass; ++m) {
        if (2 * m - 1 > 2 * L + 1) break;
        const double single = wk.run_energy(m);
        double min_excess = std::numeric_limits<double>::infinity();
        double min_ratio = std::numeric_limits<double>::infinity();
        for (std::uint32_t mask = 1; mask < (1u << (m - 1)); ++mask) {
            std::vector<Interval> iv;
            int lo = -L;
            int len = 1;
            int largest = 0;
            for (int b = 0; b < m - 1; ++b) {
                if (mask & (1u << b)) {
                    iv.push_back({lo, lo + len - 1});
                    largest = std::max(largest, len);
                    lo += len + 1;
                    len = 1;
                } else {
                    ++len;
                }
            }
            iv.push_back({lo, lo + len - 1});
            largest = std::max(largest, len);
            const double excess = interval_family_energy(iv, wk, L).total - single;
            min_excess = std::min(min_excess, excess);
            min_ratio = std::min(min_ratio, excess / (lead * std::pow(m - largest, params.alpha)));
        }
        minimal = minimal && min_excess > 0.0;
        rows.push_back({{"mass", m}, {"min_excess", min_excess}, {"min_excess_over_fragment_bound", min_ratio}});
    }
    rep.add("single run is the unique minimum for mass <= " + std::to_string(opt.max_mass) + " in windows <= " +
                std::to_string(opt.window),
            minimal, "smallest excess over all fragmented families reported per mass");

    // brute force over every configuration of a small window
    {
        const int bl = (opt.exhaustive_size - 1) / 2;
        ModelParams p = params;
        p.L = bl;
        auto k = std::make_shared<const Kernel>(build_kernel(p, bl));
        SpinConfig cfg(k, bl);
        const int n = cfg.size();
        std::vector<double> best_single(static_cast<std::size_t>(n + 1), std::numeric_limits<double>::infinity());
        std::vector<double> best_multi(static_cast<std::size_t>(n + 1), std::numeric_limits<double>::infinity());
        for (std::uint64_t i = 1; i < (std::uint64_t{1} << n); ++i) {
            cfg.flip_at(std::countr_zero(i));
            const int minus = (n - cfg.sum()) / 2;
            if (minus > opt.max_mass) continue;
            const auto runs = minus_runs(cfg.spins()).size();
            auto& slot = runs == 1 ? best_single : best_multi;
            slot[static_cast<std::size_t>(minus)] = std::min(slot[static_cast<std::size_t>(minus)], cfg.energy());
        }
        bool ok = true;
        double worst = std::numeric_limits<double>::infinity();
        for (int m = 2; m <= std::min(opt.max_mass, n - 1); ++m) {
            const double gap = best_multi[static_cast<std::size_t>(m)] - best_single[static_cast<std::size_t>(m)];
            worst = std::min(worst, gap);
            ok = ok && gap > 0.0 && std::abs(best_single[static_cast<std::size_t>(m)] - k->run_energy(m)) <=
                                        1e-9 * k->run_energy(m);
        }
        rep.add("brute force over all 2^" + std::to_string(n) + " configurations agrees", ok,
                "smallest multi-run excess " + g(worst));
        rep.artifact["brute_force"] = {{"size", n}, {"smallest_excess", worst}};
    }
    rep.artifact["random"] = {{"families", opt.families}, {"max_L", opt.max_L}, {"seed", opt.seed},
                              {"merge_failures", merge_bad}, {"gap_failures", gap_bad}, {"gap_moves", gap_checks},
                              {"smallest_gain", min_gain}};
    rep.artifact["minimality"] = rows;
    return rep;
}

Triangle smallest_large_droplet(const ModelParams& params) {
    const int n = params.size();
    const int m = static_cast<int>(std::floor(params.eps_s() * n)) + 1;
    if (m > n) throw std::invalid_argument("no triangle is large in this window");
    const int lo = -params.L + (n - m) / 2;
    return Triangle{lo - 1, lo + m - 1};
}

SuiteReport laplace_suite(const ModelParams& params) {
    SuiteReport rep;
    rep.suite = "laplace";
    const int L = params.L;
    const double eps_s_abs = params.eps_s() * params.size();
    const Triangle t0 = smallest_large_droplet(params);
    const double rho = static_cast<double>(t0.mass()) / params.size();
    const double t_vs = field_threshold(ThresholdKind::very_small, params, L);
    const double t_sd = field_threshold(ThresholdKind::single_droplet, params, L, rho);
    struct Case {
        EventSpec event;
        double t_star;
    };
    const std::vector<Case> cases = {
        {events::very_small({}, eps_s_abs), t_vs},
        {events::very_small({t0}, eps_s_abs), t_vs},
        {events::class_of({t0}, eps_s_abs), t_sd},
    };
    rep.artifact = {{"T0", {t0.left, t0.right}}, {"rho", rho}, {"rows", nlohmann::json::array()}};
    for (const auto& c : cases) {
        const std::vector<double> ts = {c.t_star / 2, -c.t_star / 2, c.t_star / 4, -c.t_star / 4};
        try {
            const auto reps = laplace_check(params, c.event, ts, c.t_star);
            for (const auto& r : reps) {
                rep.add(c.event.name + " t=" + g(r.t), r.holds && r.admissible,
                        "|gap| " + g(r.lhs) + " <= " + g(r.rhs));
                rep.artifact["rows"].push_back({{"event", c.event.name},
                                                {"t", r.t},
                                                {"t_star", r.t_star},
                                                {"log_mgf", r.log_mgf},
                                                {"linear", r.linear},
                                                {"lhs", r.lhs},
                                                {"rhs", r.rhs},
                                                {"holds", r.holds}});
            }
        } catch (const EmptyEventError& e) {
            rep.add(c.event.name, false, e.what());
        }
    }
    return rep;
}

SuiteReport cluster_suite(const ModelParams& params, const ClusterOptions& opt) {
    SuiteReport rep;
    rep.suite = "cluster";
    const int L = params.L;
    const double eps_s_abs = params.eps_s() * params.size();
    const Triangle t0 = smallest_large_droplet(params);
    const double rho = static_cast<double>(t0.mass()) / params.size();
    const EventSpec evs[] = {events::all(), events::class_of({t0}, eps_s_abs)};
    OracleOptions o;
    o.two_point = true;
    o.histogram = false;
    const auto res = enumerate(params, evs, o);
    const auto& plus = res[0];
    const auto& cls = res[1];

    const auto lz = logZ_leading(params, L);
    const double sum_xi = lz.uniform.center;
    const double dz = std::abs(plus.logZ - sum_xi);
    rep.add("logZ against sum of site activities", dz <= 0.1 * sum_xi,
            "logZ=" + g(plus.logZ) + ", sum xi=" + g(sum_xi) + ", relative gap " + g(dz / sum_xi));

    const double slack = finite_volume_slack(params, L);
    const auto mb = m_beta_leading(params);
    const double m0 = plus.site_mean[static_cast<std::size_t>(L)];
    rep.add("mu+[sigma_0] inside the leading envelope", mb.contains(m0, slack),
            "exact " + g(m0) + ", center " + g(mb.center) + ", half-width " + g(mb.half_width) + " + slack " +
                g(slack));

    const auto cm = conditional_m_leading(rho, params, L);
    rep.add("conditional magnetization in the class of T0", cm.contains(cls.mean_m, cm.half_width),
            "exact " + g(cls.mean_m) + ", center " + g(cm.center) + ", allowed " + g(2.0 * cm.half_width));

    nlohmann::json pairs = nlohmann::json::array();
    for (int d : opt.separations) {
        const int i = opt.pair_anchor;
        const int j = i + d;
        const double exact = cls.truncated(i + L, j + L);
        const auto e = two_point_leading(i, j, t0, 0.0, params, L);
        const double rel = std::abs(exact - e.center) / std::abs(e.center);
        rep.add("two-point |i-j|=" + std::to_string(d), e.kind != "fixed" && rel <= 0.2,
                "exact " + g(exact) + ", leading " + g(e.center) + ", relative error " + g(rel));
        pairs.push_back({{"i", i}, {"j", j}, {"exact", exact}, {"leading", e.center}, {"relative_error", rel}});
    }
    rep.artifact = {{"T0", {t0.left, t0.right}},
                    {"rho", rho},
                    {"logZ", plus.logZ},
                    {"sum_xi", sum_xi},
                    {"finite_volume_sum", lz.finite.center},
                    {"m0", m0},
                    {"m_beta_center", mb.center},
                    {"m_beta_half_width", mb.half_width},
                    {"envelope_informative", mb.informative},
                    {"slack", slack},
                    {"conditional_m", cls.mean_m},
                    {"conditional_center", cm.center},
                    {"two_point", pairs}};
    return rep;
}

const std::vector<std::string>& suite_names() {
    static const std::vector<std::string> names = {"bijection", "peierls", "counting", "entropy",
                                                   "merge",     "laplace", "cluster"};
    return names;
}

SuiteReport run_suite(const std::string& name, const ModelParams& params, std::uint64_t seed) {
    if (name == "bijection") {
        BijectionOptions o;
        o.seed = seed;
        return bijection_suite(o);
    }
    if (name == "peierls") {
        PeierlsOptions o;
        o.seed = seed;
        return peierls_suite(params, o);
    }
    if (name == "counting") return counting_suite(params, {});
    if (name == "entropy") return entropy_suite(params, {});
    if (name == "merge") {
        MergeOptions o;
        o.seed = seed;
        return merge_suite(params, o);
    }
    if (name == "laplace") return laplace_suite(params);
    if (name == "cluster") return cluster_suite(params, {});
    throw std::invalid_argument("unknown suite: " + name);
}

nlohmann::json suite_json(const SuiteReport& report) {
    nlohmann::json j;
    j["suite"] = report.suite;
    j["pass"] = report.pass();
    j["checks"] = nlohmann::json::array();
    for (const auto& c : report.checks) j["checks"].push_back({{"name", c.name}, {"pass", c.pass}, {"detail", c.detail}});
    j["artifact"] = report.artifact;
    return j;
}

}  // namespace lrising
