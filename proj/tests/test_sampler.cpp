#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <map>

#include "lrising/oracle.hpp"
#include "lrising/sampler.hpp"

using namespace lrising;

namespace {

Spins decode(std::uint32_t code, int n) {
    Spins s(static_cast<std::size_t>(n));
    for (int q = 0; q < n; ++q) s[static_cast<std::size_t>(q)] = (code >> q) & 1u ? -1 : 1;
    return s;
}

int spin_sum(const Spins& s) {
    int t = 0;
    for (auto v : s) t += v;
    return t;
}

ModelParams tiny() {
    ModelParams p;
    p.L = 2;
    p.beta = 0.9;
    p.J = 0.5;
    return p;
}

}  // namespace

TEST_CASE("dynamics names") {
    for (auto d : {Dynamics::free_glauber, Dynamics::window_restricted, Dynamics::fixed_exchange}) {
        CHECK(parse_dynamics(to_string(d)) == d);
    }
    CHECK_THROWS_AS(parse_dynamics("kawasaki-ish"), std::invalid_argument);
    CHECK(to_string(StartKind::cold) == "cold");
}

TEST_CASE("detailed balance for every dynamics") {
    const auto p = tiny();
    const int n = p.size();
    auto k = std::make_shared<const Kernel>(build_kernel(p));
    for (auto d : {Dynamics::free_glauber, Dynamics::window_restricted, Dynamics::fixed_exchange}) {
        EnsembleSpec spec;
        spec.dynamics = d;
        spec.m = 0.2;
        spec.half_width_spins = 2.0;
        INFO(to_string(d));
        // the window measure lives on configurations inside the window
        auto inside = [&](const Spins& x) {
            return d != Dynamics::window_restricted || std::abs(spin_sum(x) - spec.m * n) <= spec.half_width_spins;
        };
        for (std::uint32_t a = 0; a < (1u << n); ++a) {
            const Spins sa = decode(a, n);
            if (!inside(sa)) continue;
            const SpinConfig ca(k, p.L, sa);
            double out = 0.0;
            for (std::uint32_t b = 0; b < (1u << n); ++b) {
                if (a == b) continue;
                const Spins sb = decode(b, n);
                if (!inside(sb)) {
                    CHECK(transition_probability(ca, sb, p, spec) == 0.0);
                    continue;
                }
                const SpinConfig cb(k, p.L, sb);
                const double pab = transition_probability(ca, sb, p, spec);
                const double pba = transition_probability(cb, sa, p, spec);
                out += pab;
                const double lhs = std::exp(-p.beta * ca.energy()) * pab;
                const double rhs = std::exp(-p.beta * cb.energy()) * pba;
                CHECK(lhs == doctest::Approx(rhs).epsilon(1e-12));
                if (d == Dynamics::fixed_exchange && pab > 0) CHECK(spin_sum(sa) == spin_sum(sb));
            }
            CHECK(out <= 1.0 + 1e-12);
        }
    }
}

TEST_CASE("one chain step follows the transition probabilities") {
    const auto p = tiny();
    const int n = p.size();
    auto k = std::make_shared<const Kernel>(build_kernel(p));
    const Spins start = {1, -1, -1, 1, 1};
    for (auto d : {Dynamics::free_glauber, Dynamics::window_restricted, Dynamics::fixed_exchange}) {
        EnsembleSpec spec;
        spec.dynamics = d;
        spec.half_width_spins = 1.0;
        std::map<std::vector<std::int8_t>, long> seen;
        const long trials = 200000;
        for (long t = 0; t < trials; ++t) {
            spec.seed = static_cast<std::uint64_t>(t) + 1;
            Chain c(p, k, start, spec);
            c.step();
            const auto s = c.config().spins();
            ++seen[std::vector<std::int8_t>(s.begin(), s.end())];
        }
        const SpinConfig from(k, p.L, start);
        for (std::uint32_t b = 0; b < (1u << n); ++b) {
            const Spins sb = decode(b, n);
            if (sb == start) continue;
            const double prob = transition_probability(from, sb, p, spec);
            const double freq = static_cast<double>(seen[sb]) / trials;
            INFO(to_string(d) << " target " << b);
            CHECK(std::abs(freq - prob) <= 5.0 * std::sqrt(prob * (1 - prob) / trials) + 1e-9);
        }
    }
}

TEST_CASE("constraints are never left") {
    ModelParams p;
    p.L = 20;
    p.beta = 0.3;
    p.J = 0.5;
    auto k = std::make_shared<const Kernel>(build_kernel(p));
    Spins init(static_cast<std::size_t>(p.size()), 1);
    for (int q = 10; q < 30; ++q) init[static_cast<std::size_t>(q)] = -1;
    const int s0 = spin_sum(init);

    EnsembleSpec win;
    win.dynamics = Dynamics::window_restricted;
    win.m = static_cast<double>(s0) / p.size();
    win.half_width_spins = 4.0;
    Chain cw(p, k, init, win);
    EnsembleSpec ex;
    ex.dynamics = Dynamics::fixed_exchange;
    Chain ce(p, k, init, ex);
    for (int t = 0; t < 2000; ++t) {
        cw.sweep();
        ce.sweep();
        CHECK(std::abs(cw.config().sum() - s0) <= 4);
        CHECK(ce.config().sum() == s0);
    }
    CHECK(cw.accepted() > 0);
    CHECK(ce.accepted() > 0);
    CHECK(cw.config().energy() == doctest::Approx(hamiltonian(cw.config().spins(), *k)).epsilon(1e-9));
    CHECK(ce.config().energy() == doctest::Approx(hamiltonian(ce.config().spins(), *k)).epsilon(1e-9));
}

TEST_CASE("seeded chains are reproducible") {
    ModelParams p;
    p.L = 15;
    p.beta = 0.4;
    auto k = std::make_shared<const Kernel>(build_kernel(p));
    EnsembleSpec spec;
    spec.seed = 99;
    Chain a(p, k, Spins(static_cast<std::size_t>(p.size()), 1), spec);
    Chain b(p, k, Spins(static_cast<std::size_t>(p.size()), 1), spec);
    spec.seed = 100;
    Chain c(p, k, Spins(static_cast<std::size_t>(p.size()), 1), spec);
    for (int t = 0; t < 200; ++t) {
        a.sweep();
        b.sweep();
        c.sweep();
    }
    CHECK(std::vector<std::int8_t>(a.config().spins().begin(), a.config().spins().end()) ==
          std::vector<std::int8_t>(b.config().spins().begin(), b.config().spins().end()));
    CHECK(a.accepted() == b.accepted());
    CHECK(a.accepted() != c.accepted());
}

TEST_CASE("minus-count histogram and correlations against the oracle") {
    ModelParams p;
    p.L = 3;
    p.beta = 0.5;
    p.J = 0.3;
    OracleOptions o;
    o.two_point = true;
    const std::vector<EventSpec> ev = {events::all()};
    const auto exact = enumerate(p, ev, o).front();
    EnsembleSpec spec;
    spec.seed = 5;
    const auto st = collect_statistics(p, spec, Spins(static_cast<std::size_t>(p.size()), 1), 1000, 200000);
    double tv = 0.0;
    for (std::size_t m = 0; m < exact.histogram.size(); ++m) tv += 0.5 * std::abs(exact.histogram[m] - st.minus_histogram[m]);
    CHECK(tv < 0.01);
    const int n = p.size();
    for (int x = 0; x < n; ++x) {
        CHECK(st.corr_origin[static_cast<std::size_t>(x)] ==
              doctest::Approx(exact.pair_mean[static_cast<std::size_t>(p.L * n + x)]).epsilon(0.02).scale(1.0));
        CHECK(std::abs(st.site_mean[static_cast<std::size_t>(x)] - exact.site_mean[static_cast<std::size_t>(x)]) < 0.02);
    }
}

TEST_CASE("spontaneous magnetization estimate") {
    ModelParams p;
    p.L = 4;
    p.beta = 0.6;
    p.J = 1.0;
    const auto est = estimate_m_beta(p, 20000, 4, 3);
    CHECK(est.replica_means.size() == 4);
    CHECK(est.std_error > 0.0);
    CHECK(std::abs(est.mean - exact_m_beta(p)) < 5 * est.std_error + 0.01);
}

TEST_CASE("experiment starts and small runs") {
    ModelParams p = with_standard_exponents(ModelParams{});
    p.L = 40;
    p.beta = 2.0;
    ExperimentConfig cfg;
    cfg.m = 0.0;
    cfg.m_beta = 0.95;
    cfg.replicas = 2;
    cfg.sweeps = 50;
    cfg.burn_in = 10;
    const double hw = window_half_width(p, cfg.m_beta);
    CHECK(hw == doctest::Approx(p.eps0() * cfg.m_beta * p.size()));
    for (auto kind : {StartKind::droplet, StartKind::cold}) {
        const auto s = experiment_start(p, cfg, kind);
        CHECK(std::abs(spin_sum(s)) <= hw);
    }
    const auto drop = experiment_start(p, cfg, StartKind::droplet);
    CHECK(minus_runs(drop).size() == 1);

    long seen = 0;
    const auto r = phase_separation_experiment(p, cfg, [&](const Measurement&) { ++seen; });
    CHECK(seen == 100);
    CHECK(r.replicas.size() == 2);
    CHECK(r.replicas[0].start == StartKind::droplet);
    CHECK(r.replicas[1].start == StartKind::cold);
    CHECK(r.replicas[1].seed == (cfg.seed ^ 1u));
    const auto again = phase_separation_experiment(p, cfg);
    CHECK(again.freq_b == r.freq_b);
    CHECK(again.median_fraction == r.median_fraction);

    cfg.dynamics = Dynamics::free_glauber;
    CHECK_THROWS_AS(phase_separation_experiment(p, cfg), std::invalid_argument);
}
