#pragma once

#include <cmath>
#include <span>
#include <string>
#include <vector>

#include "lrising/model.hpp"
#include "lrising/triangles.hpp"

namespace lrising {

struct Envelope {
    std::string quantity;
    double center = 0.0;
    double half_width = 0.0;
    std::string kind = "absolute";
    bool informative = true;

    bool contains(double value, double slack = 0.0) const {
        return std::abs(value - center) <= half_width + slack;
    }
};

/// Unit-triangle activity e^{-2 beta (zeta(2 - alpha) + J)}.
double xi_unit(const ModelParams& params);

/// (beta / denom) (zeta_alpha / (alpha (1 - alpha)) - 3 delta); the error factor
/// is e^{-exponent} and is only informative for a positive exponent.
double envelope_exponent(const ModelParams& params, double denom);

/// Center 1 - 2 xi, half-width 2 xi e^{-(beta/32)(...)}.
Envelope m_beta_leading(const ModelParams& params);

/// Flip weight e^{-beta (h(flip x in ground state) - h(ground state))} of the
/// ground state of `externals`, from the closed forms. Throws
/// std::invalid_argument when x lies in the frame of an external triangle.
double xi_site(int x, std::span<const Triangle> externals, const ModelParams& params, int L);

/// Finite-size slack 10 xi |Lambda|^{alpha-1} / (alpha (1 - alpha)).
double finite_volume_slack(const ModelParams& params, int L);

/// Center (1 - 2 rho)(1 - 2 xi), half-width finite_volume_slack.
Envelope conditional_m_leading(double rho, const ModelParams& params, int L);

struct LogZLeading {
    Envelope uniform;     // |Lambda| xi, the infinite-volume activity at every site
    Envelope finite;      // sum of the true finite-volume unit flip weights
    double max_convention_gap = 0.0;  // |finite - uniform| center difference
};
LogZLeading logZ_leading(const ModelParams& params, int L);

/// Leading truncated two-point function in the class of T0 under field r.
/// Returns a zero envelope (kind "fixed") when i or j lies in the frame of T0.
/// Throws std::invalid_argument for |i - j| < 2.
Envelope two_point_leading(int i, int j, const Triangle& T0, double field_r, const ModelParams& params, int L);

struct PairExcess {
    double measured = 0.0;  // H(flip i, j) - H(flip i) - H(flip j) + H(ground)
    double formula = 0.0;   // -2 s_i s_j J(i - j)
};
PairExcess pair_excess_energy(int i, int j, const Triangle& T0, const ModelParams& params, int L);

enum class ThresholdKind { very_small, single_droplet };

/// Admissible |t| for the Laplace bound: zeta_alpha / (4 alpha (1-alpha) (eps_s |Lambda|)^{1-alpha})
/// or zeta_alpha 3^{1-alpha} / (4 alpha (1-alpha) (rho |Lambda|)^{1-alpha}).
double field_threshold(ThresholdKind kind, const ModelParams& params, int L, double rho = 0.0);

}  // namespace lrising
