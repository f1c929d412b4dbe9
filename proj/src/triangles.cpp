#include "lrising/triangles.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace lrising {

int dist(const Triangle& a, const Triangle& b) {
    int d = std::abs(a.left - b.left);
    d = std::min(d, std::abs(a.left - b.right));
    d = std::min(d, std::abs(a.right - b.left));
    d = std::min(d, std::abs(a.right - b.right));
    return d;
}

long TriangleFamily::total_mass() const {
    long m = 0;
    for (const auto& t : triangles) m += t.mass();
    return m;
}

namespace {

// Parent of each triangle in a sorted list; throws when the list is not laminar.
void assign_parents(std::span<const Triangle> triangles, int L, std::vector<int>& parent, std::vector<int>& open) {
    parent.assign(triangles.size(), -1);
    open.clear();
    for (std::size_t k = 0; k < triangles.size(); ++k) {
        const Triangle& t = triangles[k];
        if (t.left >= t.right) throw std::invalid_argument("triangle with non-positive mass");
        if (t.left < -L - 1 || t.right > L) throw std::invalid_argument("triangle outside window");
        while (!open.empty() && triangles[static_cast<std::size_t>(open.back())].right < t.left) open.pop_back();
        if (!open.empty()) {
            const Triangle& top = triangles[static_cast<std::size_t>(open.back())];
            if (top.right == t.left || top.left == t.left || t.right >= top.right) {
                throw std::invalid_argument("triangles share a flip or cross");
            }
            parent[k] = open.back();
        }
        open.push_back(static_cast<int>(k));
    }
}

}  // namespace

TriangleFamily make_family(std::vector<Triangle> triangles, int L) {
    if (!std::is_sorted(triangles.begin(), triangles.end())) std::sort(triangles.begin(), triangles.end());
    TriangleFamily fam;
    fam.L = L;
    std::vector<int> open;
    assign_parents(triangles, L, fam.parent, open);
    fam.triangles = std::move(triangles);
    return fam;
}

std::vector<int> spin_flips(std::span<const std::int8_t> spins) {
    const int n = static_cast<int>(spins.size());
    const int L = (n - 1) / 2;
    std::vector<int> flips;
    flips.reserve(16);
    int prev = 1;
    for (int p = 0; p <= n; ++p) {
        const int cur = p < n ? spins[static_cast<std::size_t>(p)] : 1;
        if (cur != prev) flips.push_back(p - 1 - L);
        prev = cur;
    }
    return flips;
}

std::vector<Triangle> pair_flips(std::span<const int> flips) {
    if (flips.size() % 2 != 0) throw std::invalid_argument("odd number of flips");
    const int n = static_cast<int>(flips.size());
    std::vector<int> partner(flips.size());
    std::vector<int> stack;
    stack.reserve(flips.size());
    // Gaps between consecutive stack entries are strictly decreasing, so the
    // top pair is a local minimum as soon as the incoming gap is not smaller.
    for (int k = 0; k < n; ++k) {
        const int f = flips[static_cast<std::size_t>(k)];
        while (stack.size() >= 2) {
            const int top = stack[stack.size() - 1];
            const int below = stack[stack.size() - 2];
            const int ft = flips[static_cast<std::size_t>(top)];
            if (ft - flips[static_cast<std::size_t>(below)] <= f - ft) {
                partner[static_cast<std::size_t>(below)] = top;
                partner[static_cast<std::size_t>(top)] = -1;
                stack.resize(stack.size() - 2);
            } else {
                break;
            }
        }
        stack.push_back(k);
    }
    while (stack.size() >= 2) {
        partner[static_cast<std::size_t>(stack[stack.size() - 2])] = stack[stack.size() - 1];
        partner[static_cast<std::size_t>(stack[stack.size() - 1])] = -1;
        stack.resize(stack.size() - 2);
    }
    std::vector<Triangle> out;
    out.reserve(flips.size() / 2);
    for (int k = 0; k < n; ++k) {
        const int q = partner[static_cast<std::size_t>(k)];
        if (q >= 0) out.push_back({flips[static_cast<std::size_t>(k)], flips[static_cast<std::size_t>(q)]});
    }
    return out;
}

TriangleFamily build_triangles(std::span<const std::int8_t> spins) {
    const int L = (static_cast<int>(spins.size()) - 1) / 2;
    const auto flips = spin_flips(spins);
    return make_family(pair_flips(flips), L);
}

Spins reconstruct_spins(std::span<const Triangle> triangles, int L) {
    std::vector<int> flips;
    flips.reserve(triangles.size() * 2);
    for (const auto& t : triangles) {
        if (t.left >= t.right) throw std::invalid_argument("triangle with non-positive mass");
        if (t.left < -L - 1 || t.right > L) throw std::invalid_argument("triangle outside window");
        flips.push_back(t.left);
        flips.push_back(t.right);
    }
    std::sort(flips.begin(), flips.end());
    if (std::adjacent_find(flips.begin(), flips.end()) != flips.end()) {
        throw std::invalid_argument("two triangles share a flip");
    }
    const int n = 2 * L + 1;
    Spins s(static_cast<std::size_t>(n), 1);
    // spins between flip k and flip k+1 carry sign (-1)^(k+1)
    for (std::size_t k = 0; k < flips.size(); k += 2) {
        const int from = flips[k] + 1 + L;
        const int to = k + 1 < flips.size() ? flips[k + 1] + 1 + L : n;
        std::fill(s.begin() + from, s.begin() + std::min(to, n), std::int8_t{-1});
    }
    std::vector<Triangle> sorted(triangles.begin(), triangles.end());
    if (!std::is_sorted(sorted.begin(), sorted.end())) std::sort(sorted.begin(), sorted.end());
    if (pair_flips(flips) != sorted) {
        throw std::invalid_argument("family is not produced by any configuration");
    }
    return s;
}

Spins reconstruct_spins(const TriangleFamily& family) {
    return reconstruct_spins(family.triangles, family.L);
}

std::vector<Triangle> external_large(const TriangleFamily& family, double threshold) {
    std::vector<Triangle> out;
    for (std::size_t k = 0; k < family.size(); ++k) {
        if (family.is_external(k) && family.triangles[k].mass() > threshold) out.push_back(family.triangles[k]);
    }
    return out;
}

Spins ground_state_of(std::span<const Triangle> externals, int L) {
    std::vector<Triangle> sorted(externals.begin(), externals.end());
    std::sort(sorted.begin(), sorted.end());
    Spins s(static_cast<std::size_t>(2 * L + 1), 1);
    for (std::size_t k = 0; k < sorted.size(); ++k) {
        const Triangle& t = sorted[k];
        if (t.mass() < 1) throw std::invalid_argument("triangle with non-positive mass");
        if (t.lo() < -L || t.hi() > L) throw std::invalid_argument("triangle base outside window");
        if (k > 0 && sorted[k - 1].hi() >= t.lo()) throw std::invalid_argument("external bases overlap");
        for (int x = t.lo(); x <= t.hi(); ++x) s[static_cast<std::size_t>(x + L)] = -1;
    }
    return s;
}

bool externals_compatible(std::span<const Triangle> externals, int L, double threshold) {
    std::vector<Triangle> sorted(externals.begin(), externals.end());
    std::sort(sorted.begin(), sorted.end());
    for (const auto& t : sorted) {
        if (!(t.mass() > threshold)) return false;
    }
    Spins s;
    try {
        s = ground_state_of(sorted, L);
    } catch (const std::invalid_argument&) {
        return false;
    }
    return external_large(build_triangles(s), threshold) == sorted;
}

FamilyInvariants check_family_invariants(const TriangleFamily& family) {
    FamilyInvariants r;
    const auto& tri = family.triangles;
    try {
        std::vector<int> parent;
        std::vector<int> open;
        if (std::is_sorted(tri.begin(), tri.end())) {
            assign_parents(tri, family.L, parent, open);
        } else {
            (void)make_family(tri, family.L);
        }
    } catch (const std::invalid_argument& e) {
        r.laminar = false;
        r.violation = e.what();
    }
    for (std::size_t k = 0; k < tri.size(); ++k) {
        const int p = family.parent.size() == tri.size() ? family.parent[k] : -1;
        if (p >= 0 && 3 * tri[k].mass() > tri[static_cast<std::size_t>(p)].mass()) {
            if (r.third && r.violation.empty()) {
                r.violation = "nested triangle heavier than a third of its parent";
            }
            r.third = false;
        }
    }
    // A pair closer than min mass is within distance < own mass of both
    // triangles, so scanning each triangle's own neighbourhood finds it.
    struct Point {
        int x;
        int owner;
    };
    std::vector<Point> pts;
    pts.reserve(tri.size() * 2);
    const int lo = -family.L - 1;
    std::vector<int> owner_at(static_cast<std::size_t>(2 * family.L + 2), -1);
    bool bucketed = true;
    for (std::size_t k = 0; k < tri.size() && bucketed; ++k) {
        for (int x : {tri[k].left, tri[k].right}) {
            if (x < lo || x > family.L || owner_at[static_cast<std::size_t>(x - lo)] >= 0) {
                bucketed = false;
                break;
            }
            owner_at[static_cast<std::size_t>(x - lo)] = static_cast<int>(k);
        }
    }
    if (bucketed) {
        for (std::size_t i = 0; i < owner_at.size(); ++i) {
            if (owner_at[i] >= 0) pts.push_back({static_cast<int>(i) + lo, owner_at[i]});
        }
    } else {
        for (std::size_t k = 0; k < tri.size(); ++k) {
            pts.push_back({tri[k].left, static_cast<int>(k)});
            pts.push_back({tri[k].right, static_cast<int>(k)});
        }
        std::stable_sort(pts.begin(), pts.end(), [](const Point& a, const Point& b) { return a.x < b.x; });
    }
    for (std::size_t q = 0; q < pts.size(); ++q) {
        const int owner = pts[q].owner;
        const int m = tri[static_cast<std::size_t>(owner)].mass();
        for (std::size_t s = q + 1; s < pts.size() && pts[s].x - pts[q].x < m; ++s) {
            const int other = pts[s].owner;
            if (other == owner) continue;
            ++r.pairs_checked;
            const Triangle& a = tri[static_cast<std::size_t>(owner)];
            const Triangle& b = tri[static_cast<std::size_t>(other)];
            if (dist(a, b) < std::min(a.mass(), b.mass())) {
                if (r.distance && r.violation.empty()) r.violation = "triangles closer than their smaller mass";
                r.distance = false;
            }
        }
    }
    return r;
}

DropletReport droplet_stats(std::span<const std::int8_t> spins, const ModelParams& params,
                            const DropletTargets& targets) {
    return droplet_stats(build_triangles(spins), spins, params, targets);
}

DropletReport droplet_stats(const TriangleFamily& family, std::span<const std::int8_t> spins,
                            const ModelParams& params, const DropletTargets& targets) {
    const int n = static_cast<int>(spins.size());
    const int L = (n - 1) / 2;
    const double size = static_cast<double>(n);
    const double eps_s_abs = std::pow(size, -params.gamma) * size;
    const double eps_c = std::pow(size, -params.nu);
    const double eps0 = std::pow(size, -params.a);

    DropletReport r;
    r.m_emp = empirical_magnetization(spins);
    r.in_window = std::abs(r.m_emp - targets.m) <= eps0 * targets.m_beta;

    int best = -1;
    for (std::size_t k = 0; k < family.size(); ++k) {
        if (!family.is_external(k)) continue;
        const Triangle& t = family.triangles[k];
        if (best < 0 || t.mass() > family.triangles[static_cast<std::size_t>(best)].mass()) {
            best = static_cast<int>(k);
        }
        if (t.mass() > eps_s_abs) {
            r.external_masses.push_back(t.mass());
            r.external_mass += t.mass();
        }
    }
    r.rho_emp = static_cast<double>(r.external_mass) / size;
    const double n0_cut = static_cast<double>(r.external_mass) - 6.0 * eps_c * size;
    for (int m : r.external_masses) {
        if (m >= n0_cut) ++r.n0;
    }
    r.in_s1 = !r.external_masses.empty() && std::abs(r.rho_emp - targets.rho) <= eps_c;
    r.is_b = r.in_s1 && r.n0 == 1;

    if (best >= 0) {
        const Triangle& t = family.triangles[static_cast<std::size_t>(best)];
        r.has_droplet = true;
        r.largest_lo = t.lo();
        r.largest_hi = t.hi();
        r.largest_fraction = t.mass() / size;
        long in_sum = 0;
        long out_sum = 0;
        for (int x = -L; x <= L; ++x) {
            const int v = spins[static_cast<std::size_t>(x + L)];
            if (x >= t.lo() && x <= t.hi()) {
                in_sum += v;
            } else {
                out_sum += v;
            }
        }
        const int out_count = n - t.mass();
        r.block_inside = static_cast<double>(in_sum) / t.mass();
        r.block_outside = out_count > 0 ? static_cast<double>(out_sum) / out_count
                                        : std::numeric_limits<double>::quiet_NaN();
    } else {
        r.block_inside = std::numeric_limits<double>::quiet_NaN();
        r.block_outside = r.m_emp;
    }
    return r;
}

RhoTargets rho_targets(double m, double m_beta, int L) {
    if (!(m_beta > 0.0 && m_beta <= 1.0)) throw std::invalid_argument("m_beta must lie in (0, 1]");
    if (std::abs(m) > m_beta) throw std::invalid_argument("|m| must not exceed m_beta");
    const long n = 2L * L + 1;
    RhoTargets r;
    r.rho_hat = 0.5 * (1.0 - m / m_beta);
    r.k = static_cast<long>(std::floor(r.rho_hat * static_cast<double>(n) + 1e-9));
    r.k = std::clamp(r.k, 0L, n);
    r.rho_lattice = static_cast<double>(r.k) / static_cast<double>(n);
    const double tau = m_beta - std::abs(m);
    const double edge = tau / (2.0 * m_beta);
    r.within_bounds = r.rho_hat >= edge - 1e-12 && r.rho_hat <= 1.0 - edge + 1e-12;
    return r;
}

namespace {

struct ExternalEnumerator {
    int L;
    int min_len;
    double threshold;
    long target;
    std::vector<Triangle> current;
    long count = 0;
    long candidates = 0;

    void run(int first_site, long remaining) {
        if (remaining == 0) {
            ++candidates;
            if (externals_compatible(current, L, threshold)) ++count;
            return;
        }
        for (int lo = first_site; lo + min_len - 1 <= L; ++lo) {
            for (int len = min_len; len <= remaining && lo + len - 1 <= L; ++len) {
                current.push_back({lo - 1, lo + len - 1});
                run(lo + len + 1, remaining - len);
                current.pop_back();
            }
        }
    }
};

}  // namespace

ExternalFamilyCount count_external_families(int L, double rho, double eps_s_abs, double gamma) {
    const long n = 2L * L + 1;
    if (n > 24) throw std::invalid_argument("window too large for exhaustive enumeration");
    if (!(rho >= 0.0 && rho <= 1.0)) throw std::invalid_argument("rho must lie in [0, 1]");
    const double scaled = rho * static_cast<double>(n);
    const long k = std::lround(scaled);
    if (std::abs(scaled - static_cast<double>(k)) > 1e-9) {
        throw std::invalid_argument("rho |Lambda| is not an integer");
    }
    ExternalFamilyCount out;
    out.total_mass = k;
    out.threshold = eps_s_abs;
    out.log_bound = (2.0 - gamma) * std::pow(static_cast<double>(n), gamma) * std::log(static_cast<double>(n));
    ExternalEnumerator e{L, static_cast<int>(std::floor(eps_s_abs)) + 1, eps_s_abs, k, {}, 0, 0};
    e.run(-L, k);
    out.count = e.count;
    out.candidates = e.candidates;
    return out;
}

}  // namespace lrising
