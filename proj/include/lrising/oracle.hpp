#pragma once

#include <cstdint>
#include <functional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "lrising/model.hpp"
#include "lrising/triangles.hpp"

namespace lrising {

/// What an event predicate sees of a configuration during enumeration.
struct ConfigView {
    std::span<const std::int8_t> spins;
    int sum = 0;
    double energy = 0.0;
    const TriangleFamily* family = nullptr;  // set when some event needs triangles

    const TriangleFamily& triangles() const;
};

struct EventSpec {
    std::string name;
    bool needs_triangles = false;
    std::function<bool(const ConfigView&)> predicate;
};

namespace events {

EventSpec all();
/// |m_Lambda - m| <= half_width (magnetization units, e.g. eps0 * m_beta).
EventSpec window(double m, double half_width);
/// No external triangle heavier than eps_s_abs.
EventSpec small(double eps_s_abs);
/// Large external family equal to `externals`.
EventSpec class_of(std::vector<Triangle> externals, double eps_s_abs);
/// Nonempty large external family with |T^E|/|Lambda| in [rho - eps_c, rho + eps_c].
EventSpec s1(double rho, double eps_s_abs, double eps_c);
/// As s1, plus exactly one external triangle of mass >= |T^E| - 6 eps_c |Lambda|.
EventSpec s_b(double rho, double eps_s_abs, double eps_c);
/// Class of `externals` with every other triangle of mass <= eps_s_abs.
EventSpec very_small(std::vector<Triangle> externals, double eps_s_abs);
EventSpec complement(EventSpec e);
EventSpec intersect(EventSpec a, EventSpec b);

}  // namespace events

class EmptyEventError : public std::domain_error {
public:
    explicit EmptyEventError(const std::string& event)
        : std::domain_error("empty conditioning event: " + event) {}
};

struct OracleOptions {
    double field_r = 0.0;  // tilt beta * r * sum(sigma)
    bool site_means = true;
    bool two_point = false;
    bool histogram = true;
    std::vector<double> laplace_t;  // log mu[e^{beta t sum sigma} | E] for each t
    double laplace_center = 0.0;    // reference sum for the cancellation-free gap; pick the typical sum
    unsigned workers = 0;           // 0: hardware concurrency
    bool allow_empty = false;       // otherwise a zero-probability event throws EmptyEventError
};

struct OracleResult {
    std::string event;
    std::uint64_t count = 0;  // configurations in the event
    double logZ = 0.0;        // log of the restricted (tilted) partition function
    double log_prob = 0.0;    // log mu[E]
    double mean_m = 0.0;      // mu[m_Lambda | E]
    std::vector<double> site_mean;  // mu[sigma_x | E], index 0 = site -L
    std::vector<double> pair_mean;  // mu[sigma_x sigma_y | E], row-major |Lambda| x |Lambda|
    std::vector<double> histogram;  // mu[number of minus spins = k | E], k = 0..|Lambda|
    std::vector<double> log_mgf;    // aligned with OracleOptions::laplace_t
    std::vector<double> laplace_gap;  // log_mgf - beta t mu[sum sigma | E], accurate when tiny

    bool empty() const { return count == 0; }
    double truncated(int i_index, int j_index) const;
};

/// Exhaustive enumeration in Gray-code order with O(|Lambda|) updates per step.
/// Throws std::invalid_argument for L > 12.
std::vector<OracleResult> enumerate(const ModelParams& params, std::span<const EventSpec> events,
                                    const OracleOptions& options = {});

double conditional_magnetization(const ModelParams& params, const EventSpec& event);

/// Truncated correlation under the tilted measure conditioned on `event`, sites i, j.
double two_point(const ModelParams& params, int i, int j, const EventSpec& event, double field_r = 0.0);

/// mu+[sigma_0] from exhaustive enumeration.
double exact_m_beta(const ModelParams& params);

struct LaplaceReport {
    double t = 0.0;
    double t_star = 0.0;
    bool admissible = false;  // |t| <= t_star
    double log_mgf = 0.0;
    double linear = 0.0;  // beta t |Lambda| mu[m_Lambda | E]
    double lhs = 0.0;     // |log_mgf - linear|, evaluated without cancellation
    double rhs = 0.0;     // (beta^2/2) t^2 |Lambda| e^{-2 beta J}
    bool holds = false;
};

/// Evaluates the quadratic bound on the conditional log-Laplace transform for every t.
std::vector<LaplaceReport> laplace_check(const ModelParams& params, const EventSpec& event,
                                         std::span<const double> ts, double t_star);

}  // namespace lrising
