#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <functional>
#include <numbers>
#include <random>
#include <set>

#include "lrising/contours.hpp"

using namespace lrising;

namespace {

std::vector<Triangle> random_family(std::mt19937_64& rng, int L) {
    const int n = 2 * L + 1;
    Spins s(static_cast<std::size_t>(n), 1);
    int x = 0;
    while (x < n) {
        const int len = 1 + static_cast<int>(rng() % 5);
        for (int k = 0; k < len && x + k < n; ++k) s[static_cast<std::size_t>(x + k)] = -1;
        x += len + 1 + static_cast<int>(rng() % 40);
    }
    // sprinkle nested flips
    for (int k = 0; k < 6; ++k) {
        const auto p = static_cast<std::size_t>(rng() % static_cast<unsigned>(n));
        s[p] = static_cast<std::int8_t>(-s[p]);
    }
    return build_triangles(s).triangles;
}

// Single contours of mass M with leftmost flip at -1, by listing every flip set in a window.
long brute_force_contours(int M, double C, int reach) {
    long count = 0;
    std::vector<int> flips = {-1};
    std::function<void(int)> rec = [&](int next) {
        if (flips.size() % 2 == 0) {
            const auto tri = pair_flips(flips);
            long mass = 0;
            for (const auto& t : tri) mass += t.mass();
            if (mass == M && group_contours(tri, C).contours.size() == 1) ++count;
        }
        if (flips.size() >= static_cast<std::size_t>(2 * M)) return;
        for (int f = next; f <= reach; ++f) {
            flips.push_back(f);
            rec(f + 1);
            flips.pop_back();
        }
    };
    rec(0);
    return count;
}

}  // namespace

TEST_CASE("separation constant") {
    CHECK(separation_sum(min_separation_constant()) == doctest::Approx(0.5));
    const auto r = check_separation_constant(14.0);
    CHECK(r.sum_ok);
    CHECK(r.above_pi2_3);
    CHECK_FALSE(check_separation_constant(10.0).sum_ok);
    CHECK(contour_delta(0.3, 14.0) == doctest::Approx(2 * std::numbers::pi * std::numbers::pi / (3 * 0.21 * 14.0)));
}

TEST_CASE("contour basics") {
    const Contour a{{{-1, 0}, {5, 7}}};
    CHECK(a.mass() == 3);
    CHECK(a.x_minus() == 0);
    CHECK(a.x_plus() == 7);
    CHECK(a.norm_alpha(0.5) == doctest::Approx(1.0 + std::sqrt(2.0)));
    const Contour b{{{30, 31}}};
    CHECK(dist(a, b) == 23);
    // unit masses: conflict iff distance <= C
    CHECK(contours_conflict(Contour{{{0, 1}}}, Contour{{{15, 16}}}, 14.0));
    CHECK_FALSE(contours_conflict(Contour{{{0, 1}}}, Contour{{{16, 17}}}, 14.0));
}

TEST_CASE("grouping is a separated partition independent of the merge order") {
    std::mt19937_64 rng(29);
    for (int trial = 0; trial < 300; ++trial) {
        const auto tri = random_family(rng, 150);
        for (double C : {1.2, 4.0, 14.0}) {
            const auto base = group_contours(tri, C);
            const auto chk = check_contour_family(tri, base);
            CHECK_MESSAGE(chk.ok(), chk.violation);
            for (std::uint64_t seed = 1; seed <= 4; ++seed) {
                const auto other = group_contours(tri, C, seed * 7919 + static_cast<std::uint64_t>(trial));
                REQUIRE(other.contours.size() == base.contours.size());
                for (std::size_t c = 0; c < base.contours.size(); ++c) {
                    CHECK(other.contours[c].triangles == base.contours[c].triangles);
                }
            }
            const auto labels = contour_labels(tri, base);
            for (int l : labels) CHECK(l >= 0);
        }
    }
}

TEST_CASE("nested groups stay apart when their hull sits under one triangle") {
    // a tiny pair deep inside a wide triangle, far from its flips
    const std::vector<Triangle> tri = {{-1, 2000}, {900, 901}};
    const auto fam = group_contours(tri, 14.0);
    CHECK(fam.contours.size() == 2);
    // the same pair close to the flip merges by distance
    const std::vector<Triangle> near = {{-1, 2000}, {5, 6}};
    CHECK(group_contours(near, 14.0).contours.size() == 1);
}

TEST_CASE("census counts against brute force") {
    const auto census = contour_census(3, 0.3, 14.0);
    REQUIRE(census.levels.size() == 3);
    CHECK(census.levels[0].count == 1);
    CHECK(census.levels[1].count == 15);
    CHECK(census.levels[2].count == 224);
    for (int M = 1; M <= 3; ++M) {
        INFO("M=" << M);
        CHECK(brute_force_contours(M, 14.0, 40) == census.levels[static_cast<std::size_t>(M - 1)].count);
    }
    // a smaller C keeps the brute-force window small enough for mass 4
    const auto small = contour_census(4, 0.3, 3.5);
    CHECK(brute_force_contours(4, 3.5, 40) == small.levels[3].count);
}

TEST_CASE("census visitor sees separated single contours") {
    long seen = 0;
    std::set<std::vector<Triangle>> distinct;
    const auto census = contour_census(3, 0.3, 14.0, [&](const Contour& c) {
        ++seen;
        distinct.insert(c.triangles);
        CHECK(c.x_minus() == 0);
        CHECK(group_contours(c.triangles, 14.0).contours.size() == 1);
    });
    CHECK(seen == 1 + 15 + 224);
    CHECK(distinct.size() == static_cast<std::size_t>(seen));
    long counted = 0;
    for (const auto& l : census.levels) {
        for (const auto& [v, n] : l.norms) counted += n;
    }
    CHECK(counted == seen);
}

TEST_CASE("counting inequality threshold") {
    const auto census = contour_census(3, 0.3, 14.0);
    CHECK(census.levels[0].b_min == 0.0);
    for (const auto& l : census.levels) {
        CHECK(l.lhs(l.b_min) <= l.rhs(l.b_min, 0.3) * (1 + 1e-12));
        if (l.b_min > 0) CHECK(l.lhs(0.999 * l.b_min) > l.rhs(0.999 * l.b_min, 0.3));
    }
    CHECK(contour_counting_check(3, census.b_star, 0.3, 14.0).holds);
    CHECK_FALSE(contour_counting_check(3, 0.0, 0.3, 14.0).holds);
}

TEST_CASE("Peierls bounds on a small window") {
    ModelParams p;
    p.alpha = 0.3;
    p.J = 10.0;
    const auto r = verify_peierls_exhaustive(p, 4);
    CHECK(r.holds_at_J());
    CHECK(r.min_integer_J >= 1);
    CHECK(r.min_integer_J <= 10);
    for (const auto& c : r.checks) CHECK(c.instances > 0);

    // at J = 0 the unit triangle alone needs 2 zeta(2-alpha) >= 2 lead, which fails
    p.J = 0.0;
    const auto weak = verify_peierls_exhaustive(p, 4);
    CHECK_FALSE(weak.holds_at_J());
    CHECK(weak.min_integer_J == r.min_integer_J);
    CHECK_THROWS_AS(verify_peierls_exhaustive(p, 7), std::invalid_argument);
}

TEST_CASE("sampled removal pairs") {
    ModelParams p;
    PeierlsChecker checker(p);
    add_sampled_pairs(checker, p, 500, 2000, 3);
    const auto r = checker.report();
    CHECK(r.checks[2].instances + r.checks[2].unrealizable == 2000);
    CHECK(r.checks[2].violations == 0);
}
