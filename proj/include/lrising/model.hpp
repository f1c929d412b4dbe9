#pragma once

#include <cstdint>
#include <memory>
#include <span>
#include <string>
#include <vector>

namespace lrising {

/// Upper end of the admissible decay range, log(3)/log(2) - 1.
inline constexpr double kAlphaPlus = 0.58496250072115618;

/// zeta_alpha = 1 - 2(2^alpha - 1); positive exactly when alpha < kAlphaPlus.
double zeta_alpha(double alpha);

/// Spin values are stored as +1 / -1, index 0 is site -L.
using Spins = std::vector<std::int8_t>;

struct ModelParams {
    double alpha = 0.3;
    double J = 10.0;  // nearest-neighbour enhancement, J(1) = J + 1
    double beta = 1.0;
    int L = 8;
    double C = 14.0;  // contour separation constant

    // epsilon_0 = |Lambda|^-a, epsilon_s = |Lambda|^-gamma, epsilon_c = |Lambda|^-nu
    double a = 0.105;
    double gamma = 0.075;
    double nu = 0.0525;

    int size() const { return 2 * L + 1; }

    double eps0() const;
    double eps_s() const;
    double eps_c() const;

    /// Throws std::invalid_argument on alpha outside (0, alpha_+), J < 0,
    /// beta < 0, L < 1 or C <= pi^2/3.
    void validate() const;
};

/// Sets (nu, gamma, a) = (alpha(1-alpha)/4, alpha/4, alpha(1-alpha)/2).
ModelParams with_standard_exponents(ModelParams p);

/// Pair coupling J(n) and its tails, memoized up to a fixed distance.
///
/// J(0) = 0, J(+-1) = J + 1, J(n) = |n|^(alpha-2) otherwise. Tails beyond the
/// memo window are evaluated through the Hurwitz zeta function.
class Kernel {
public:
    Kernel(double alpha, double J, long window);

    double alpha() const { return alpha_; }
    double J() const { return J_; }
    long window() const { return window_; }

    double operator()(long n) const;

    /// sum_{n >= k} n^(alpha-2), pure power law, k >= 1. tail(1) = zeta(2 - alpha).
    double tail(long k) const;

    /// sum_{n >= k} J(n); differs from tail() only at k <= 1.
    double coupled_tail(long k) const;

    /// Energy of a single run of n minus spins in a plus background:
    /// 2 * sum_{k=1}^{n} coupled_tail(k).
    double run_energy(long n) const;

private:
    double alpha_;
    double J_;
    long window_;
    std::vector<double> pair_;       // J(n), n in [0, window]
    std::vector<double> tail_;       // tail(k), k in [0, window + 1], tail_[0] unused
    std::vector<double> run_energy_; // run_energy(n), n in [0, window]
};

/// Kernel whose memo window covers every distance occurring in a window of
/// half-width L (and interval arithmetic on it).
Kernel build_kernel(const ModelParams& params);
Kernel build_kernel(const ModelParams& params, int L);

/// Closed-form boundary field at array index p of a window of size n:
/// sum over j outside the window of J(i - j).
double boundary_field(const Kernel& kernel, int n, int p);

/// Hamiltonian with + boundary conditions, evaluated from scratch in O(|Lambda|^2).
double hamiltonian(std::span<const std::int8_t> spins, const Kernel& kernel);

/// Bulk double-sum part of the Hamiltonian only (no boundary term).
double bulk_energy(std::span<const std::int8_t> spins, const Kernel& kernel);

double empirical_magnetization(std::span<const std::int8_t> spins);

/// A spin configuration on [-L, L] with cached local fields and energy.
///
/// field(p) = sum_{q != p} J(p - q) s_q + boundary_field(p), so flipping
/// site p changes the energy by s_p * field(p). Accepting a flip refreshes all
/// fields in one O(|Lambda|) pass.
class SpinConfig {
public:
    SpinConfig(std::shared_ptr<const Kernel> kernel, int L);
    SpinConfig(std::shared_ptr<const Kernel> kernel, int L, Spins spins);

    int L() const { return L_; }
    int size() const { return static_cast<int>(spins_.size()); }
    const Kernel& kernel() const { return *kernel_; }
    std::shared_ptr<const Kernel> kernel_ptr() const { return kernel_; }

    std::span<const std::int8_t> spins() const { return spins_; }
    int spin(int site) const { return spins_.at(index_of(site)); }
    int sum() const { return sum_; }
    double energy() const { return energy_; }
    double field_at(int index) const { return field_[static_cast<std::size_t>(index)]; }

    int index_of(int site) const;

    /// Energy change of flipping `site`; O(1). Throws std::out_of_range.
    double flip_delta(int site) const;
    double flip_delta_at(int index) const {
        return spins_[static_cast<std::size_t>(index)] * field_[static_cast<std::size_t>(index)];
    }

    void flip(int site);
    void flip_at(int index);
    void flip_at(int index, double delta);

    /// Rebuild fields and energy from scratch.
    void recompute();

    /// Relative deviation of the cached energy from a from-scratch evaluation,
    /// measured against max(1, |energy|).
    double energy_drift() const;

private:
    std::shared_ptr<const Kernel> kernel_;
    int L_;
    Spins spins_;
    std::vector<double> field_;
    std::vector<double> coupling_;  // J(d) for d in [0, size)
    double energy_ = 0.0;
    int sum_ = 0;
};

/// Closed integer interval of sites.
struct Interval {
    int lo;
    int hi;
    int length() const { return hi - lo + 1; }
    friend bool operator==(const Interval&, const Interval&) = default;
};

/// W(I, K) = sum_{x in I} sum_{y in K} J(x - y) for disjoint intervals.
double interval_interaction(Interval lhs, Interval rhs, const Kernel& kernel);

struct IntervalFamilyEnergy {
    double total = 0.0;
    double singles = 0.0;     // sum of single-interval energies
    double interaction = 0.0; // sum_{i<j} W(I_i, I_j)
};

/// Energy of the configuration that is minus on the union of the intervals,
/// decomposed as singles - 2 * interaction. Intervals must be disjoint,
/// sorted left to right and inside [-L, L]; throws std::invalid_argument.
IntervalFamilyEnergy interval_family_energy(std::span<const Interval> intervals,
                                            const Kernel& kernel, int L);

/// Maximal runs of minus spins, in site coordinates.
std::vector<Interval> minus_runs(std::span<const std::int8_t> spins);

Spins spins_from_runs(std::span<const Interval> runs, int L);

struct ExponentCheck {
    std::string name;
    bool holds = false;
    double lhs = 0.0;
    double rhs = 0.0;
};

struct ExponentReport {
    std::vector<ExponentCheck> checks;
    double eta_lo = 0.0;  // admissible eta range [(gamma + nu alpha)/(1-alpha), (1-nu) alpha]
    double eta_hi = 0.0;
    bool eta_exists = false;

    bool all_pass() const;
};

/// Evaluates the exponent constraints on (a, gamma, nu). Strict inequalities
/// need a relative margin above 1e-12, so algebraic equality counts as failure.
ExponentReport validate_exponents(const ModelParams& params);

/// Bounds for the energy of one isolated run of length n under the pure power
/// law (J = 0): 2n^a/(a(1-a)) - 2/a and 2n^a/(a(1-a)) - 2(1 - 1/a).
struct RunEnergyBounds {
    double lower;
    double upper;
};
RunEnergyBounds single_run_bounds(long n, double alpha);

}  // namespace lrising
