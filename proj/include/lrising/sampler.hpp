#pragma once

#include <cstdint>
#include <functional>
#include <memory>
#include <random>
#include <string>
#include <vector>

#include "lrising/model.hpp"
#include "lrising/triangles.hpp"

namespace lrising {

enum class Dynamics { free_glauber, window_restricted, fixed_exchange };

std::string to_string(Dynamics d);
Dynamics parse_dynamics(const std::string& s);

struct EnsembleSpec {
    Dynamics dynamics = Dynamics::free_glauber;
    double m = 0.0;                 // target magnetization
    double half_width_spins = 0.0;  // window half-width eps0 m_beta |Lambda| on sum(sigma)
    std::uint64_t seed = 1;
};

/// Window half-width in spin units for the configured eps0 and m_beta.
double window_half_width(const ModelParams& params, double m_beta);

/// Single Metropolis chain. Proposals cost O(1); accepted flips refresh the
/// field cache in O(|Lambda|).
class Chain {
public:
    Chain(const ModelParams& params, std::shared_ptr<const Kernel> kernel, Spins init, EnsembleSpec spec);

    /// One proposal. Returns true when accepted.
    bool step();
    /// |Lambda| proposals.
    void sweep();

    const SpinConfig& config() const { return cfg_; }
    const EnsembleSpec& spec() const { return spec_; }
    std::uint64_t proposals() const { return proposals_; }
    std::uint64_t accepted() const { return accepted_; }
    std::uint64_t sweeps() const { return sweeps_; }

    bool in_window(int sum) const;

private:
    bool accept(double delta);
    double uniform01();
    std::uint64_t below(std::uint64_t n);
    void exchange_step();

    ModelParams params_;
    EnsembleSpec spec_;
    SpinConfig cfg_;
    std::mt19937_64 rng_;
    std::uint64_t proposals_ = 0;
    std::uint64_t accepted_ = 0;
    std::uint64_t sweeps_ = 0;
    // fixed-exchange bookkeeping
    std::vector<int> plus_;
    std::vector<int> minus_;
    std::vector<int> slot_;
};

/// Probability that one step moves `from` to `to` (which differs in one site,
/// or in one opposite pair for fixed-exchange); 0 for unreachable targets.
double transition_probability(const SpinConfig& from, const Spins& to, const ModelParams& params,
                              const EnsembleSpec& spec);

struct Estimate {
    double mean = 0.0;
    double std_error = 0.0;
    std::vector<double> replica_means;
};

/// Time-and-replica average of sigma_0 under free dynamics from all-plus.
Estimate estimate_m_beta(const ModelParams& params, long sweeps, int replicas, std::uint64_t seed,
                         long burn_in = -1);

/// Histogram of the number of minus spins and the site correlations
/// mu[sigma_0 sigma_x], collected once per sweep.
struct ChainStatistics {
    std::vector<double> minus_histogram;  // k = 0..|Lambda|
    std::vector<double> corr_origin;      // index = site + L
    std::vector<double> site_mean;
    long samples = 0;
};
ChainStatistics collect_statistics(const ModelParams& params, const EnsembleSpec& spec, Spins init,
                                   long burn_in, long sweeps);

enum class StartKind { droplet, cold };
std::string to_string(StartKind s);

struct ExperimentConfig {
    double m = 0.0;
    double m_beta = 1.0;  // estimate used for the window and the droplet targets
    int replicas = 20;    // half droplet starts, half cold starts
    long sweeps = 100000;
    long burn_in = -1;    // -1: 10 |Lambda|
    long thin = 1;        // sweeps between measurements
    Dynamics dynamics = Dynamics::window_restricted;
    std::uint64_t seed = 1;
};

struct Measurement {
    int chain = 0;
    long sweep = 0;
    DropletReport report;
};

struct ReplicaSummary {
    int chain = 0;
    StartKind start = StartKind::droplet;
    std::uint64_t seed = 0;
    long measurements = 0;
    double freq_b = 0.0;
    double freq_s1 = 0.0;
    double median_fraction = 0.0;
    double mean_fraction = 0.0;
    double mean_inside = 0.0;   // over measurements with a droplet
    double mean_outside = 0.0;
    double acceptance = 0.0;
    double max_energy_drift = 0.0;
};

struct ExperimentReport {
    std::vector<std::string> warnings;
    double rho_hat = 0.0;
    double rho_lattice = 0.0;
    double half_width_spins = 0.0;
    std::vector<ReplicaSummary> replicas;
    double freq_b = 0.0;  // pooled over all measurements
    double freq_s1 = 0.0;
    double median_fraction = 0.0;  // median over all measurements
    double mean_inside = 0.0;
    double mean_outside = 0.0;
};

/// Initial state for a replica: the ground state of a centred droplet of the
/// target mass, or evenly scattered minus spins just inside the window.
Spins experiment_start(const ModelParams& params, const ExperimentConfig& cfg, StartKind kind);

/// Runs every replica (seed_r = seed xor r), recording a DropletReport per measurement.
ExperimentReport phase_separation_experiment(const ModelParams& params, const ExperimentConfig& cfg,
                                             const std::function<void(const Measurement&)>& sink = {});

}  // namespace lrising
