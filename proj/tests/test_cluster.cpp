#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <gsl/gsl_sf_zeta.h>

#include "lrising/cluster.hpp"
#include "lrising/oracle.hpp"

using namespace lrising;

namespace {

ModelParams desk() {
    ModelParams p;
    p.L = 8;
    p.beta = 1.2;
    p.J = 5.0;
    p.alpha = 0.3;
    return p;
}

double flip_weight_direct(const Spins& g, int x, const ModelParams& p) {
    const Kernel k = build_kernel(p);
    Spins f = g;
    f[static_cast<std::size_t>(x + p.L)] = static_cast<std::int8_t>(-f[static_cast<std::size_t>(x + p.L)]);
    return std::exp(-p.beta * (hamiltonian(f, k) - hamiltonian(g, k)));
}

}  // namespace

TEST_CASE("unit activity") {
    const auto p = desk();
    CHECK(xi_unit(p) == doctest::Approx(std::exp(-2.0 * p.beta * (gsl_sf_zeta(2.0 - p.alpha) + p.J))).epsilon(1e-12));
    const auto m = m_beta_leading(p);
    CHECK(m.center == doctest::Approx(1.0 - 2.0 * xi_unit(p)));
    CHECK(m.half_width > 0.0);
    CHECK(m.half_width == doctest::Approx(2.0 * xi_unit(p) * std::exp(-envelope_exponent(p, 32.0))));
}

TEST_CASE("site flip weights against the direct Hamiltonian") {
    const auto p = desk();
    const Triangle t0{-4, 3};
    const Triangle ext[] = {t0};
    const Spins g = ground_state_of(ext, p.L);
    for (int x = -p.L; x <= p.L; ++x) {
        INFO("x=" << x);
        if (t0.in_frame(x)) {
            CHECK_THROWS_AS(xi_site(x, ext, p, p.L), std::invalid_argument);
            continue;
        }
        CHECK(xi_site(x, ext, p, p.L) == doctest::Approx(flip_weight_direct(g, x, p)).epsilon(1e-10));
    }
    const Spins plus(static_cast<std::size_t>(p.size()), 1);
    for (int x = -p.L; x <= p.L; ++x) {
        CHECK(xi_site(x, {}, p, p.L) == doctest::Approx(xi_unit(p)).epsilon(1e-10));
        CHECK(flip_weight_direct(plus, x, p) == doctest::Approx(xi_unit(p)).epsilon(1e-10));
    }
    CHECK_THROWS_AS(xi_site(p.L + 1, {}, p, p.L), std::out_of_range);
}

TEST_CASE("log Z conventions coincide under a plus exterior") {
    const auto p = desk();
    const auto z = logZ_leading(p, p.L);
    CHECK(z.uniform.center == doctest::Approx(p.size() * xi_unit(p)));
    CHECK(z.max_convention_gap <= 1e-12 * z.uniform.center);
}

TEST_CASE("pair excess energy") {
    const auto p = desk();
    const Triangle t0{-4, 3};
    for (int i = -p.L; i <= p.L; ++i) {
        for (int j = -p.L; j <= p.L; ++j) {
            if (i == j) continue;
            const auto e = pair_excess_energy(i, j, t0, p, p.L);
            CHECK(e.measured == doctest::Approx(e.formula).epsilon(1e-9));
        }
    }
}

TEST_CASE("two-point leading term against the two-site system") {
    const auto p = desk();
    const Triangle t0{-5, 4};
    const Triangle ext[] = {t0};
    for (int i = -p.L; i <= p.L; ++i) {
        for (int j = i + 2; j <= p.L; ++j) {
            const auto e = two_point_leading(i, j, t0, 0.0, p, p.L);
            if (t0.in_frame(i) || t0.in_frame(j)) {
                CHECK(e.kind == "fixed");
                CHECK(e.center == 0.0);
                continue;
            }
            // exact covariance when only sites i and j may flip away from the ground state
            const double xi = xi_site(i, ext, p, p.L);
            const double xj = xi_site(j, ext, p, p.L);
            const double exc = pair_excess_energy(i, j, t0, p, p.L).measured;
            const double wij = xi * xj * std::exp(-p.beta * exc);
            const double si = (i >= t0.lo() && i <= t0.hi()) ? -1.0 : 1.0;
            const double sj = (j >= t0.lo() && j <= t0.hi()) ? -1.0 : 1.0;
            const double z = 1.0 + xi + xj + wij;
            const double mi = si * (1.0 - xi + xj - wij) / z;
            const double mj = sj * (1.0 + xi - xj - wij) / z;
            const double mij = si * sj * (1.0 - xi - xj + wij) / z;
            const double cov = mij - mi * mj;
            INFO("i=" << i << " j=" << j);
            CHECK(e.center == doctest::Approx(cov).epsilon(1e-6));
        }
    }
    CHECK_THROWS_AS(two_point_leading(0, 1, t0, 0.0, p, p.L), std::invalid_argument);
}

TEST_CASE("m_beta envelope contains the exact value at desk scale") {
    auto p = desk();
    p.L = 6;
    const double exact = exact_m_beta(p);
    CHECK(m_beta_leading(p).contains(exact, finite_volume_slack(p, p.L)));
}

TEST_CASE("field thresholds and conditional envelope") {
    const auto p = desk();
    const double n = p.size();
    const double z = zeta_alpha(p.alpha);
    const double a = p.alpha;
    CHECK(field_threshold(ThresholdKind::very_small, p, p.L) ==
          doctest::Approx(z / (4 * a * (1 - a) * std::pow(n * std::pow(n, -p.gamma), 1 - a))));
    CHECK(field_threshold(ThresholdKind::single_droplet, p, p.L, 0.5) ==
          doctest::Approx(z * std::pow(3.0, 1 - a) / (4 * a * (1 - a) * std::pow(0.5 * n, 1 - a))));
    CHECK_THROWS_AS(field_threshold(ThresholdKind::single_droplet, p, p.L, 0.0), std::invalid_argument);
    const auto c = conditional_m_leading(0.25, p, p.L);
    CHECK(c.center == doctest::Approx(0.5 * (1 - 2 * xi_unit(p))));
    CHECK(c.half_width == doctest::Approx(finite_volume_slack(p, p.L)));
    CHECK_THROWS_AS(conditional_m_leading(1.5, p, p.L), std::invalid_argument);
}
