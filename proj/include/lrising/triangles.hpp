#pragma once

#include <array>
#include <compare>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "lrising/model.hpp"

namespace lrising {

/// A triangle pairs the spin flips (left, left+1) and (right, right+1).
/// Flip coordinates range over [-L-1, L]; the base is the site interval [left+1, right].
struct Triangle {
    int left = 0;
    int right = 0;

    int mass() const { return right - left; }
    int lo() const { return left + 1; }
    int hi() const { return right; }
    std::array<int, 4> frame() const { return {lo() - 1, lo(), hi(), hi() + 1}; }
    bool in_frame(int x) const { return x == lo() - 1 || x == lo() || x == hi() || x == hi() + 1; }

    /// Base of `other` is a subset of this base (and they differ).
    bool contains(const Triangle& other) const {
        return left <= other.left && other.right <= right && !(left == other.left && right == other.right);
    }
    bool disjoint(const Triangle& other) const { return right <= other.left || other.right <= left; }

    friend auto operator<=>(const Triangle&, const Triangle&) = default;
};

/// Distance between the flip points of two triangles.
int dist(const Triangle& a, const Triangle& b);

/// Triangles sorted by left flip, with the nesting forest.
struct TriangleFamily {
    int L = 0;
    std::vector<Triangle> triangles;
    std::vector<int> parent;  // index of the smallest enclosing triangle, -1 if external

    std::size_t size() const { return triangles.size(); }
    bool empty() const { return triangles.empty(); }
    bool is_external(std::size_t k) const { return parent[k] < 0; }
    long total_mass() const;

    friend bool operator==(const TriangleFamily& a, const TriangleFamily& b) {
        return a.triangles == b.triangles;
    }
};

/// Sorts the triangles and builds the nesting forest. Throws
/// std::invalid_argument when two triangles overlap without nesting or share a flip.
TriangleFamily make_family(std::vector<Triangle> triangles, int L);

/// Flip coordinates of a configuration with + boundary, ascending.
std::vector<int> spin_flips(std::span<const std::int8_t> spins);

/// Pairs an even, strictly increasing list of flip points by repeatedly
/// matching the adjacent pair at minimal distance, leftmost on ties. O(n).
/// The result is sorted by left endpoint.
std::vector<Triangle> pair_flips(std::span<const int> flips);

TriangleFamily build_triangles(std::span<const std::int8_t> spins);

/// Inverse of build_triangles; throws std::invalid_argument if the family is
/// not the image of any configuration on [-L, L].
Spins reconstruct_spins(const TriangleFamily& family);
Spins reconstruct_spins(std::span<const Triangle> triangles, int L);

/// External triangles with mass strictly above `threshold`.
std::vector<Triangle> external_large(const TriangleFamily& family, double threshold);

/// Minus on the union of the bases, plus elsewhere. Throws std::invalid_argument
/// when the bases overlap or leave the window.
Spins ground_state_of(std::span<const Triangle> externals, int L);

/// True when some configuration has exactly `externals` as its large external
/// family; certified by round-tripping the ground state.
bool externals_compatible(std::span<const Triangle> externals, int L, double threshold);

struct FamilyInvariants {
    bool laminar = true;
    bool distance = true;  // dist(T, T') >= min(|T|, |T'|)
    bool third = true;     // nested mass <= parent mass / 3
    long pairs_checked = 0;
    std::string violation;

    bool ok() const { return laminar && distance && third; }
};

FamilyInvariants check_family_invariants(const TriangleFamily& family);

struct DropletTargets {
    double m = 0.0;       // magnetization target of the window constraint
    double rho = 0.0;     // droplet density target
    double m_beta = 1.0;  // spontaneous magnetization used by the window
};

struct DropletReport {
    double m_emp = 0.0;
    std::vector<int> external_masses;  // large external triangles, left to right
    long external_mass = 0;
    double rho_emp = 0.0;
    int n0 = 0;
    bool in_s1 = false;
    bool is_b = false;
    bool in_window = false;
    int largest_lo = 0;  // base of the largest external triangle (any size)
    int largest_hi = -1;
    double largest_fraction = 0.0;
    double block_inside = 0.0;   // mean spin on the largest base
    double block_outside = 0.0;  // mean spin on its complement
    bool has_droplet = false;
};

DropletReport droplet_stats(std::span<const std::int8_t> spins, const ModelParams& params,
                            const DropletTargets& targets);
DropletReport droplet_stats(const TriangleFamily& family, std::span<const std::int8_t> spins,
                            const ModelParams& params, const DropletTargets& targets);

struct RhoTargets {
    double rho_hat = 0.0;
    double rho_lattice = 0.0;
    long k = 0;  // rho_lattice * |Lambda|
    bool within_bounds = false;  // rho_hat in [tau/(2 m_beta), 1 - tau/(2 m_beta)], tau = m_beta - |m|
};

/// Throws std::invalid_argument when |m| > m_beta or m_beta outside (0, 1].
RhoTargets rho_targets(double m, double m_beta, int L);

struct ExternalFamilyCount {
    long total_mass = 0;
    double threshold = 0.0;
    long count = 0;
    long candidates = 0;  // interval families before compatibility certification
    double log_bound = 0.0;
};

/// Enumerates compatible mutually external families of large triangles of
/// total mass rho |Lambda|. Throws std::invalid_argument when rho |Lambda| is
/// not an integer or |Lambda| > 24.
ExternalFamilyCount count_external_families(int L, double rho, double eps_s_abs, double gamma);

}  // namespace lrising
