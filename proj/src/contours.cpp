#include "lrising/contours.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <numbers>
#include <random>
#include <stdexcept>

namespace lrising {

double separation_sum(double C) { return 4.0 * (std::numbers::pi * std::numbers::pi / 6.0) / C; }

double min_separation_constant() { return 4.0 * std::numbers::pi * std::numbers::pi / 3.0; }

SeparationReport check_separation_constant(double C) {
    SeparationReport r;
    r.C = C;
    r.sum = separation_sum(C);
    r.sum_ok = r.sum <= 0.5;
    r.above_pi2_3 = C > std::numbers::pi * std::numbers::pi / 3.0;
    return r;
}

double contour_delta(double alpha, double C) {
    return 2.0 * std::numbers::pi * std::numbers::pi / (3.0 * alpha * (1.0 - alpha) * C);
}

long Contour::mass() const {
    long m = 0;
    for (const auto& t : triangles) m += t.mass();
    return m;
}

double Contour::norm_alpha(double alpha) const {
    double s = 0.0;
    for (const auto& t : triangles) s += std::pow(static_cast<double>(t.mass()), alpha);
    return s;
}

int Contour::x_minus() const {
    int x = std::numeric_limits<int>::max();
    for (const auto& t : triangles) x = std::min(x, t.lo());
    return x;
}

int Contour::x_plus() const {
    int x = std::numeric_limits<int>::min();
    for (const auto& t : triangles) x = std::max(x, t.hi());
    return x;
}

int dist(const Contour& a, const Contour& b) {
    int d = std::numeric_limits<int>::max();
    for (const auto& s : a.triangles) {
        for (const auto& t : b.triangles) d = std::min(d, dist(s, t));
    }
    return d;
}

namespace {

bool bases_meet(const Contour& a, const Contour& b) {
    for (const auto& s : a.triangles) {
        for (const auto& t : b.triangles) {
            if (s.lo() <= t.hi() && t.lo() <= s.hi()) return true;
        }
    }
    return false;
}

// `inner` sits inside one triangle of `outer`, and no triangle of `outer`
// cuts through its hull.
bool nested_inside(const Contour& inner, const Contour& outer) {
    const int lo = inner.x_minus();
    const int hi = inner.x_plus();
    bool enclosed = false;
    for (const auto& t : outer.triangles) {
        const bool contains = t.lo() <= lo && hi <= t.hi();
        const bool apart = t.hi() < lo || t.lo() > hi;
        if (contains) enclosed = true;
        if (!contains && !apart) return false;
    }
    return enclosed;
}

}  // namespace

bool contours_conflict(const Contour& a, const Contour& b, double C) {
    const double m = static_cast<double>(std::min(a.mass(), b.mass()));
    if (static_cast<double>(dist(a, b)) <= C * m * m * m) return true;
    if (bases_meet(a, b)) return !(nested_inside(a, b) || nested_inside(b, a));
    return false;
}

ContourFamily group_contours(std::span<const Triangle> triangles, double C, std::uint64_t order_seed) {
    std::vector<Contour> groups;
    groups.reserve(triangles.size());
    for (const auto& t : triangles) groups.push_back(Contour{{t}});
    std::mt19937_64 rng(order_seed);
    if (order_seed != 0) std::shuffle(groups.begin(), groups.end(), rng);

    bool changed = true;
    while (changed) {
        changed = false;
        for (std::size_t i = 0; i < groups.size(); ++i) {
            for (std::size_t j = i + 1; j < groups.size();) {
                if (contours_conflict(groups[i], groups[j], C)) {
                    auto& dst = groups[i].triangles;
                    dst.insert(dst.end(), groups[j].triangles.begin(), groups[j].triangles.end());
                    groups.erase(groups.begin() + static_cast<std::ptrdiff_t>(j));
                    changed = true;
                    j = i + 1;
                } else {
                    ++j;
                }
            }
        }
        if (order_seed != 0 && changed) std::shuffle(groups.begin(), groups.end(), rng);
    }
    for (auto& g : groups) std::sort(g.triangles.begin(), g.triangles.end());
    std::sort(groups.begin(), groups.end(), [](const Contour& a, const Contour& b) {
        return a.triangles.front() < b.triangles.front();
    });
    ContourFamily fam;
    fam.C = C;
    fam.contours = std::move(groups);
    return fam;
}

std::vector<int> contour_labels(std::span<const Triangle> triangles, const ContourFamily& contours) {
    std::vector<int> labels(triangles.size(), -1);
    for (std::size_t k = 0; k < triangles.size(); ++k) {
        for (std::size_t c = 0; c < contours.contours.size() && labels[k] < 0; ++c) {
            const auto& tri = contours.contours[c].triangles;
            if (std::binary_search(tri.begin(), tri.end(), triangles[k])) labels[k] = static_cast<int>(c);
        }
    }
    return labels;
}

ContourFamilyCheck check_contour_family(std::span<const Triangle> triangles, const ContourFamily& contours) {
    ContourFamilyCheck r;
    std::vector<Triangle> all;
    for (const auto& c : contours.contours) {
        if (c.triangles.empty()) {
            r.partition = false;
            r.violation = "empty contour";
        }
        all.insert(all.end(), c.triangles.begin(), c.triangles.end());
    }
    std::vector<Triangle> input(triangles.begin(), triangles.end());
    std::sort(all.begin(), all.end());
    std::sort(input.begin(), input.end());
    if (all != input) {
        r.partition = false;
        r.violation = "contours do not partition the triangles";
    }
    for (std::size_t i = 0; i < contours.contours.size(); ++i) {
        for (std::size_t j = i + 1; j < contours.contours.size(); ++j) {
            if (contours_conflict(contours.contours[i], contours.contours[j], contours.C)) {
                r.separated = false;
                if (r.violation.empty()) r.violation = "two contours are not separated";
            }
        }
    }
    return r;
}

bool PeierlsReport::holds_at_J() const {
    return std::all_of(checks.begin(), checks.end(), [](const auto& c) { return c.violations == 0 && !c.impossible; });
}

PeierlsChecker::PeierlsChecker(const ModelParams& params)
    : params_(params),
      kernel0_(params.alpha, 0.0, 8192),
      lead_(zeta_alpha(params.alpha) / (params.alpha * (1.0 - params.alpha))),
      delta_(contour_delta(params.alpha, params.C)) {
    total_.name = "configuration";
    contour_.name = "single-contour";
    pair_.name = "contour-removal";
    for (auto* s : {&total_, &contour_, &pair_}) {
        s->worst_margin = std::numeric_limits<double>::infinity();
        s->j_required = -std::numeric_limits<double>::infinity();
    }
}

PeierlsChecker::Split PeierlsChecker::energy_of(std::span<const Triangle> triangles, bool& realizable) const {
    auto& flips = flips_;
    flips.clear();
    for (const auto& t : triangles) {
        flips.push_back(t.left);
        flips.push_back(t.right);
    }
    std::sort(flips.begin(), flips.end());
    sorted_.assign(triangles.begin(), triangles.end());
    std::sort(sorted_.begin(), sorted_.end());
    realizable = std::adjacent_find(flips.begin(), flips.end()) == flips.end();
    if (realizable) {
        // same stack pairing as pair_flips, matched against the given triangles
        auto& stack = stack_;
        stack.clear();
        auto take = [&] {
            const Triangle t{stack[stack.size() - 2], stack[stack.size() - 1]};
            stack.resize(stack.size() - 2);
            return std::binary_search(sorted_.begin(), sorted_.end(), t);
        };
        for (int f : flips) {
            while (realizable && stack.size() >= 2 && stack[stack.size() - 1] - stack[stack.size() - 2] <= f - stack.back()) {
                realizable = take();
            }
            stack.push_back(f);
        }
        while (realizable && stack.size() >= 2) realizable = take();
    }
    if (!realizable) return {0.0, 0};
    // pairwise domain-wall form: H0 = sum_{i<j} (-1)^(j-i+1) E0(f_j - f_i)
    double h0 = 0.0;
    const std::size_t n = flips.size();
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = i + 1; j < n; ++j) {
            const double e = kernel0_.run_energy(flips[j] - flips[i]);
            h0 += (j - i) % 2 == 1 ? e : -e;
        }
    }
    return {h0, static_cast<long>(n)};
}

void PeierlsChecker::record(InequalityStats& s, double h0, long flips, double rhs) {
    ++s.instances;
    const double margin = h0 + params_.J * static_cast<double>(flips) - rhs;
    s.worst_margin = std::min(s.worst_margin, margin);
    if (margin < -1e-12 * std::max(1.0, std::abs(rhs))) ++s.violations;
    if (flips == 0) {
        if (h0 < rhs) s.impossible = true;
    } else {
        s.j_required = std::max(s.j_required, (rhs - h0) / static_cast<double>(flips));
    }
}

void PeierlsChecker::add_configuration(std::span<const std::int8_t> spins) {
    const auto family = build_triangles(spins);
    if (family.empty()) return;
    double norm = 0.0;
    for (const auto& t : family.triangles) norm += std::pow(static_cast<double>(t.mass()), params_.alpha);
    record(total_, bulk_energy(spins, kernel0_) + [&] {
        double b = 0.0;
        const int n = static_cast<int>(spins.size());
        for (int p = 0; p < n; ++p) {
            if (spins[static_cast<std::size_t>(p)] < 0) b += boundary_field(kernel0_, n, p);
        }
        return b;
    }(), static_cast<long>(2 * family.size()), 2.0 * lead_ * norm);

    const auto contours = group_contours(family.triangles, params_.C);
    for (std::size_t c = 0; c < contours.contours.size(); ++c) {
        add_contour(contours.contours[c]);
        std::vector<Triangle> rest;
        for (std::size_t o = 0; o < contours.contours.size(); ++o) {
            if (o == c) continue;
            rest.insert(rest.end(), contours.contours[o].triangles.begin(), contours.contours[o].triangles.end());
        }
        add_pair(contours.contours[c], rest);
    }
}

void PeierlsChecker::add_contour(const Contour& contour) {
    bool ok = false;
    const Split e = energy_of(contour.triangles, ok);
    if (!ok) {
        ++contour_.unrealizable;
        return;
    }
    record(contour_, e.h0, e.flips, lead_ * contour.norm_alpha(params_.alpha));
}

void PeierlsChecker::add_pair(const Contour& gamma0, std::span<const Triangle> rest) {
    std::vector<Triangle> all(rest.begin(), rest.end());
    all.insert(all.end(), gamma0.triangles.begin(), gamma0.triangles.end());
    bool ok_all = false;
    bool ok_rest = false;
    const Split with = energy_of(all, ok_all);
    const Split without = energy_of(rest, ok_rest);
    if (!ok_all || !ok_rest) {
        ++pair_.unrealizable;
        return;
    }
    record(pair_, with.h0 - without.h0, with.flips - without.flips, delta_ * gamma0.norm_alpha(params_.alpha));
}

PeierlsReport PeierlsChecker::report() const {
    PeierlsReport r;
    r.alpha = params_.alpha;
    r.J = params_.J;
    r.C = params_.C;
    r.delta = delta_;
    r.checks = {total_, contour_, pair_};
    double need = -std::numeric_limits<double>::infinity();
    bool impossible = false;
    for (const auto& c : r.checks) {
        need = std::max(need, c.j_required);
        impossible = impossible || c.impossible;
    }
    if (!impossible) {
        for (int J = 1; J <= 30; ++J) {
            if (static_cast<double>(J) >= need - 1e-12 * std::max(1.0, std::abs(need))) {
                r.min_integer_J = J;
                break;
            }
        }
    }
    return r;
}

PeierlsReport verify_peierls_exhaustive(const ModelParams& params, int L) {
    if (L > 6) throw std::invalid_argument("exhaustive Peierls check needs L <= 6");
    PeierlsChecker checker(params);
    const int n = 2 * L + 1;
    Spins s(static_cast<std::size_t>(n), 1);
    for (std::uint32_t code = 0; code < (1u << n); ++code) {
        for (int p = 0; p < n; ++p) s[static_cast<std::size_t>(p)] = (code >> p) & 1u ? -1 : 1;
        checker.add_configuration(s);
    }
    return checker.report();
}

void add_sampled_pairs(PeierlsChecker& checker, const ModelParams& params, int L, long count,
                       std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::uniform_int_distribution<int> runs_dist(2, 8);
    std::uniform_int_distribution<int> len_dist(1, 6);
    std::uniform_int_distribution<int> gap_dist(1, 400);
    const int n = 2 * L + 1;
    long produced = 0;
    while (produced < count) {
        Spins s(static_cast<std::size_t>(n), 1);
        int x = std::uniform_int_distribution<int>(0, n / 4)(rng);
        const int runs = runs_dist(rng);
        for (int r = 0; r < runs && x < n; ++r) {
            const int len = len_dist(rng);
            for (int k = 0; k < len && x + k < n; ++k) s[static_cast<std::size_t>(x + k)] = -1;
            x += len + (rng() % 3 == 0 ? std::uniform_int_distribution<int>(1, 3)(rng) : gap_dist(rng));
        }
        const auto family = build_triangles(s);
        const auto contours = group_contours(family.triangles, params.C);
        if (contours.contours.size() < 2) continue;
        const std::size_t pick = rng() % contours.contours.size();
        std::vector<Triangle> rest;
        for (std::size_t o = 0; o < contours.contours.size(); ++o) {
            if (o == pick) continue;
            rest.insert(rest.end(), contours.contours[o].triangles.begin(), contours.contours[o].triangles.end());
        }
        checker.add_pair(contours.contours[pick], rest);
        ++produced;
    }
}

double ContourCensusLevel::lhs(double b) const {
    double s = 0.0;
    for (const auto& [v, n] : norms) s += static_cast<double>(n) * std::exp(-b * v);
    return s;
}

double ContourCensusLevel::rhs(double b, double alpha) const {
    return 2.0 * std::exp(-b * std::pow(static_cast<double>(mass), alpha));
}

namespace {

constexpr int kMaxCensusTriangles = 8;

int tri_dist(const Triangle& a, const Triangle& b) {
    return std::min(std::min(std::abs(a.left - b.left), std::abs(a.left - b.right)),
                    std::min(std::abs(a.right - b.left), std::abs(a.right - b.right)));
}

// Contour grouping of the first n census triangles, one bitmask per group.
// Grown one triangle at a time: groups of a prefix never conflict with each
// other, so only the group absorbing the new triangle needs rechecking.
struct SmallGrouping {
    std::array<std::uint32_t, kMaxCensusTriangles> mask{};
    std::array<int, kMaxCensusTriangles> mass{};
    int groups = 0;

    int max_mass() const {
        int m = 0;
        for (int g = 0; g < groups; ++g) m = std::max(m, mass[g]);
        return m;
    }
};

struct PairTable {
    const Triangle* t = nullptr;
    double C = 0.0;
    std::array<std::array<int, kMaxCensusTriangles>, kMaxCensusTriangles> d{};
    std::array<std::uint32_t, kMaxCensusTriangles> meets{};  // bit y of meets[x]: bases of x and y overlap

    void add(int k) {
        meets[k] = 0;
        for (int x = 0; x < k; ++x) {
            d[k][x] = d[x][k] = tri_dist(t[k], t[x]);
            const bool meet = t[x].lo() <= t[k].hi() && t[k].lo() <= t[x].hi();
            if (meet) {
                meets[k] |= 1u << x;
                meets[x] |= 1u << k;
            } else {
                meets[x] &= ~(1u << k);
            }
        }
    }

    bool nested(std::uint32_t inner, std::uint32_t outer, int n) const {
        int lo = std::numeric_limits<int>::max();
        int hi = std::numeric_limits<int>::min();
        for (int k = 0; k < n; ++k) {
            if (inner >> k & 1u) {
                lo = std::min(lo, t[k].lo());
                hi = std::max(hi, t[k].hi());
            }
        }
        bool enclosed = false;
        for (int k = 0; k < n; ++k) {
            if (!(outer >> k & 1u)) continue;
            const bool contains = t[k].lo() <= lo && hi <= t[k].hi();
            const bool apart = t[k].hi() < lo || t[k].lo() > hi;
            if (contains) enclosed = true;
            if (!contains && !apart) return false;
        }
        return enclosed;
    }

    bool conflict(std::uint32_t a, int mass_a, std::uint32_t b, int mass_b, int n) const {
        int dmin = std::numeric_limits<int>::max();
        bool meet = false;
        for (int x = 0; x < n; ++x) {
            if (!(a >> x & 1u)) continue;
            meet = meet || (meets[x] & b) != 0;
            for (int y = 0; y < n; ++y) {
                if (b >> y & 1u) dmin = std::min(dmin, d[x][y]);
            }
        }
        const double m = static_cast<double>(std::min(mass_a, mass_b));
        if (static_cast<double>(dmin) <= C * m * m * m) return true;
        if (meet) return !(nested(a, b, n) || nested(b, a, n));
        return false;
    }

    // groups of triangles [0, k) extended by triangle k
    SmallGrouping extend(const SmallGrouping& prev, int k) const {
        SmallGrouping g = prev;
        int cur = g.groups++;
        g.mask[cur] = 1u << k;
        g.mass[cur] = t[k].mass();
        bool changed = true;
        while (changed) {
            changed = false;
            for (int o = 0; o < g.groups; ++o) {
                if (o == cur || !conflict(g.mask[cur], g.mass[cur], g.mask[o], g.mass[o], k + 1)) continue;
                g.mask[o] |= g.mask[cur];
                g.mass[o] += g.mass[cur];
                const int last = g.groups - 1;
                g.mask[cur] = g.mask[last];
                g.mass[cur] = g.mass[last];
                --g.groups;
                cur = o == last ? cur : o;
                changed = true;
                break;
            }
        }
        return g;
    }
};

struct CensusSearch {
    int target = 0;
    double alpha = 0.0;
    double C = 0.0;
    const std::function<void(const Contour&)>* visit = nullptr;
    ContourCensusLevel* level = nullptr;
    std::array<Triangle, kMaxCensusTriangles> cur{};
    int size = 0;
    long nodes = 0;
    std::array<double, kMaxCensusTriangles + 1> mass_pow{};
    Contour scratch;
    PairTable table;
    std::array<SmallGrouping, kMaxCensusTriangles + 1> grouping{};  // grouping[k]: first k triangles

    void push(const Triangle& t) {
        cur[static_cast<std::size_t>(size)] = t;
        table.add(size);
        grouping[static_cast<std::size_t>(size + 1)] = table.extend(grouping[static_cast<std::size_t>(size)], size);
        ++size;
    }
    void pop() { --size; }

    bool compatible_with(const Triangle& t) const {
        for (int k = 0; k < size; ++k) {
            const Triangle& s = cur[static_cast<std::size_t>(k)];
            if (s.left == t.left || s.left == t.right || s.right == t.left || s.right == t.right) return false;
            if (tri_dist(s, t) < std::min(s.mass(), t.mass())) return false;
        }
        return true;
    }

    // the triangles must be exactly what the pairing of their flips produces
    bool realizable() const {
        std::array<int, 2 * kMaxCensusTriangles> flips{};
        int nf = 0;
        for (int k = 0; k < size; ++k) {
            flips[static_cast<std::size_t>(nf++)] = cur[static_cast<std::size_t>(k)].left;
            flips[static_cast<std::size_t>(nf++)] = cur[static_cast<std::size_t>(k)].right;
        }
        std::sort(flips.begin(), flips.begin() + nf);
        std::array<int, 2 * kMaxCensusTriangles> stack{};
        int top = 0;
        auto paired = [&](int l, int r) {
            for (int k = 0; k < size; ++k) {
                if (cur[static_cast<std::size_t>(k)].left == l && cur[static_cast<std::size_t>(k)].right == r) return true;
            }
            return false;
        };
        for (int i = 0; i < nf; ++i) {
            const int f = flips[static_cast<std::size_t>(i)];
            while (top >= 2 && stack[static_cast<std::size_t>(top - 1)] - stack[static_cast<std::size_t>(top - 2)] <=
                                   f - stack[static_cast<std::size_t>(top - 1)]) {
                if (!paired(stack[static_cast<std::size_t>(top - 2)], stack[static_cast<std::size_t>(top - 1)])) return false;
                top -= 2;
            }
            stack[static_cast<std::size_t>(top++)] = f;
        }
        while (top >= 2) {
            if (!paired(stack[static_cast<std::size_t>(top - 2)], stack[static_cast<std::size_t>(top - 1)])) return false;
            top -= 2;
        }
        return true;
    }

    void leaf() {
        if (!realizable()) return;
        if (grouping[static_cast<std::size_t>(size)].groups != 1) return;
        // summed by mass so that equal multisets give bit-identical norms
        std::array<int, kMaxCensusTriangles + 1> by_mass{};
        for (int k = 0; k < size; ++k) ++by_mass[static_cast<std::size_t>(cur[static_cast<std::size_t>(k)].mass())];
        double norm = 0.0;
        for (std::size_t m = 1; m < by_mass.size(); ++m) norm += by_mass[m] * mass_pow[m];
        ++level->count;
        ++level->norms[norm];
        if (visit && *visit) {
            scratch.triangles.assign(cur.begin(), cur.begin() + size);
            std::sort(scratch.triangles.begin(), scratch.triangles.end());
            (*visit)(scratch);
        }
    }

    void dfs(int remaining) {
        ++nodes;
        if (remaining == 0) {
            leaf();
            return;
        }
        if (size == kMaxCensusTriangles) return;
        const Triangle last = cur[static_cast<std::size_t>(size - 1)];
        int max_right = last.right;
        for (int k = 0; k < size; ++k) max_right = std::max(max_right, cur[static_cast<std::size_t>(k)].right);

        // nested: the new left flip falls under an open triangle
        for (int l = last.left + 1; l < max_right; ++l) {
            int enclosing = -1;
            int next = max_right;
            for (int k = 0; k < size; ++k) {
                const Triangle& s = cur[static_cast<std::size_t>(k)];
                if (s.left < l && l < s.right) {
                    if (enclosing < 0 || s.mass() < cur[static_cast<std::size_t>(enclosing)].mass()) enclosing = k;
                } else if (s.left >= l && s.mass() >= 3) {
                    next = std::min(next, s.left);
                }
            }
            if (enclosing < 0) {
                l = next;  // resumes at next + 1, the first point under that triangle
                continue;
            }
            const Triangle& e = cur[static_cast<std::size_t>(enclosing)];
            const int cap = std::min(remaining, e.mass() / 3);
            const int e_right = e.right;
            for (int m = 1; m <= cap && l + m < e_right; ++m) {
                const Triangle t{l, l + m};
                if (!compatible_with(t)) continue;
                push(t);
                dfs(remaining - m);
                pop();
            }
        }

        // after a gap: the parts on either side must still merge by distance
        const long block = grouping[static_cast<std::size_t>(size)].max_mass();
        const double reach_mass = static_cast<double>(std::min<long>(block, remaining));
        const long max_gap = static_cast<long>(std::floor(C * reach_mass * reach_mass * reach_mass));
        for (int m = 1; m <= remaining; ++m) {
            for (long gap = 1; gap <= max_gap; ++gap) {
                const Triangle t{static_cast<int>(max_right + gap), static_cast<int>(max_right + gap + m)};
                if (!compatible_with(t)) continue;
                push(t);
                dfs(remaining - m);
                pop();
            }
        }
    }
};

}  // namespace

ContourCensus contour_census(int mass_max, double alpha, double C,
                             const std::function<void(const Contour&)>& visit) {
    if (mass_max > 8) throw std::invalid_argument("contour census supports mass_max <= 8");
    ContourCensus census;
    census.alpha = alpha;
    census.C = C;
    for (int M = 1; M <= mass_max; ++M) {
        ContourCensusLevel level;
        level.mass = M;
        CensusSearch search;
        search.target = M;
        search.alpha = alpha;
        search.C = C;
        search.visit = &visit;
        search.level = &level;
        search.table.t = search.cur.data();
        search.table.C = C;
        for (int m = 1; m <= kMaxCensusTriangles; ++m) search.mass_pow[static_cast<std::size_t>(m)] = std::pow(m, alpha);
        for (int m = 1; m <= M; ++m) {
            search.size = 0;
            search.push(Triangle{-1, -1 + m});
            search.dfs(M - m);
        }
        census.nodes_visited += search.nodes;

        auto holds = [&](double b) { return level.lhs(b) <= level.rhs(b, alpha); };
        if (holds(0.0)) {
            level.b_min = 0.0;
        } else {
            double hi = 1.0;
            while (!holds(hi)) hi *= 2.0;
            double lo = 0.0;
            for (int it = 0; it < 200 && hi - lo > 1e-13 * hi; ++it) {
                const double mid = 0.5 * (lo + hi);
                (holds(mid) ? hi : lo) = mid;
            }
            level.b_min = hi;
        }
        census.b_star = std::max(census.b_star, level.b_min);
        census.levels.push_back(std::move(level));
    }
    return census;
}

ContourCountingReport contour_counting_check(int mass_max, double b, double alpha, double C) {
    ContourCountingReport r;
    r.census = contour_census(mass_max, alpha, C);
    r.b = b;
    r.holds = std::all_of(r.census.levels.begin(), r.census.levels.end(),
                          [&](const ContourCensusLevel& l) { return l.lhs(b) <= l.rhs(b, alpha); });
    return r;
}

}  // namespace lrising
