#pragma once

#include <cstdint>
#include <functional>
#include <map>
#include <span>
#include <string>
#include <vector>

#include "lrising/model.hpp"
#include "lrising/triangles.hpp"

namespace lrising {

/// 4 zeta(2) / C summed form: sum_M 4M/(C M^3).
double separation_sum(double C);

/// Smallest C with separation_sum(C) <= 1/2, i.e. 8 zeta(2) = 4 pi^2 / 3.
double min_separation_constant();

struct SeparationReport {
    double C = 0.0;
    double sum = 0.0;
    bool sum_ok = false;       // sum <= 1/2
    bool above_pi2_3 = false;  // C > pi^2/3
};
SeparationReport check_separation_constant(double C);

/// delta = 2 pi^2 / (3 alpha (1 - alpha) C).
double contour_delta(double alpha, double C);

struct Contour {
    std::vector<Triangle> triangles;  // sorted by left flip

    long mass() const;
    double norm_alpha(double alpha) const;
    int x_minus() const;
    int x_plus() const;
};

int dist(const Contour& a, const Contour& b);

struct ContourFamily {
    double C = 0.0;
    std::vector<Contour> contours;  // sorted by x_minus, then first triangle

    double delta(double alpha) const { return contour_delta(alpha, C); }
};

/// True when two disjoint triangle groups must belong to the same contour:
/// they are too close for their masses, or their bases meet without one
/// group sitting inside a single triangle of the other.
bool contours_conflict(const Contour& a, const Contour& b, double C);

/// Merges groups of triangles until no pair conflicts. The conflict relation
/// is monotone under union, so the fixed point does not depend on the merge
/// order; `order_seed` != 0 shuffles the order, for testing that claim.
ContourFamily group_contours(std::span<const Triangle> triangles, double C, std::uint64_t order_seed = 0);

/// Contour index of every triangle of `triangles`, in input order.
std::vector<int> contour_labels(std::span<const Triangle> triangles, const ContourFamily& contours);

struct ContourFamilyCheck {
    bool partition = true;
    bool separated = true;
    std::string violation;
    bool ok() const { return partition && separated; }
};
ContourFamilyCheck check_contour_family(std::span<const Triangle> triangles, const ContourFamily& contours);

struct InequalityStats {
    std::string name;
    long instances = 0;
    long violations = 0;    // at the configured J
    long unrealizable = 0;  // instances skipped because no configuration realizes them
    double worst_margin = 0.0;  // min of lhs - rhs at the configured J
    double j_required = 0.0;    // smallest real J making every instance hold
    bool impossible = false;    // some instance fails for every J
};

struct PeierlsReport {
    double alpha = 0.0;
    double J = 0.0;
    double C = 0.0;
    double delta = 0.0;
    std::vector<InequalityStats> checks;
    int min_integer_J = -1;  // smallest J in [1, 30] for which all checks hold, -1 if none
    bool holds_at_J() const;
};

/// Accumulates the three Peierls-type inequalities. Energies are split as
/// h0 + J * (number of flips), so the J needed by every instance is exact.
class PeierlsChecker {
public:
    explicit PeierlsChecker(const ModelParams& params);

    /// Configuration-level check on every triangle, plus per-contour and
    /// removal checks for each of its contours.
    void add_configuration(std::span<const std::int8_t> spins);

    /// Single-contour check on a contour placed anywhere.
    void add_contour(const Contour& contour);

    /// Removal check: H(gamma0 + rest) - H(rest) >= delta ||gamma0||.
    void add_pair(const Contour& gamma0, std::span<const Triangle> rest);

    PeierlsReport report() const;

private:
    struct Split {
        double h0;
        long flips;
    };
    Split energy_of(std::span<const Triangle> triangles, bool& realizable) const;
    void record(InequalityStats& s, double h0, long flips, double rhs);

    ModelParams params_;
    Kernel kernel0_;
    double lead_;  // zeta_alpha / (alpha (1 - alpha))
    double delta_;
    InequalityStats total_;
    InequalityStats contour_;
    InequalityStats pair_;
    mutable std::vector<int> flips_;
    mutable std::vector<int> stack_;
    mutable std::vector<Triangle> sorted_;
};

PeierlsReport verify_peierls_exhaustive(const ModelParams& params, int L);

/// Removal check on `count` compatible pairs drawn from sparse random
/// configurations on a window of half-width L.
void add_sampled_pairs(PeierlsChecker& checker, const ModelParams& params, int L, long count,
                       std::uint64_t seed);

struct ContourCensusLevel {
    int mass = 0;
    long count = 0;
    std::map<double, long> norms;  // ||Gamma||_alpha -> number of contours of this mass
    double b_min = 0.0;         // smallest b >= 0 with sum_Gamma e^{-b||Gamma||} <= 2 e^{-b M^alpha}
    double lhs(double b) const;
    double rhs(double b, double alpha) const;
};

struct ContourCensus {
    double alpha = 0.0;
    double C = 0.0;
    std::vector<ContourCensusLevel> levels;  // mass 1..mass_max
    double b_star = 0.0;                     // max of the per-mass thresholds
    long nodes_visited = 0;
};

/// All single contours with x_minus = 0 and mass M <= mass_max, found by a
/// pruned depth-first search over triangle families in [0, C M^3 + M].
/// `visit` receives each contour.
ContourCensus contour_census(int mass_max, double alpha, double C,
                             const std::function<void(const Contour&)>& visit = {});

struct ContourCountingReport {
    ContourCensus census;
    double b = 0.0;
    bool holds = false;  // inequality at b for every mass
};
ContourCountingReport contour_counting_check(int mass_max, double b, double alpha, double C);

}  // namespace lrising
