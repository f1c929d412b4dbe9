#include "lrising/cluster.hpp"

#include <cmath>
#include <memory>
#include <stdexcept>

#include "lrising/contours.hpp"

namespace lrising {

namespace {

double lead(double alpha) { return zeta_alpha(alpha) / (alpha * (1.0 - alpha)); }

// sum over y in [a, b], y != x, of J(x - y)
double interval_sum(const Kernel& k, int x, int a, int b) {
    if (x < a) return k.coupled_tail(a - x) - k.coupled_tail(b + 1 - x);
    if (x > b) return k.coupled_tail(x - b) - k.coupled_tail(x - a + 1);
    return 2.0 * k.coupled_tail(1) - k.coupled_tail(x - a + 1) - k.coupled_tail(b - x + 1);
}

}  // namespace

double xi_unit(const ModelParams& params) {
    const Kernel k(params.alpha, params.J, 2);
    return std::exp(-2.0 * params.beta * k.coupled_tail(1));
}

double envelope_exponent(const ModelParams& params, double denom) {
    return params.beta / denom * (lead(params.alpha) - 3.0 * contour_delta(params.alpha, params.C));
}

Envelope m_beta_leading(const ModelParams& params) {
    const double xi = xi_unit(params);
    const double ex = envelope_exponent(params, 32.0);
    Envelope e;
    e.quantity = "m_beta";
    e.center = 1.0 - 2.0 * xi;
    e.half_width = 2.0 * xi * std::exp(-ex);
    e.informative = ex > 0.0 && e.half_width < e.center;
    return e;
}

double xi_site(int x, std::span<const Triangle> externals, const ModelParams& params, int L) {
    if (x < -L || x > L) throw std::out_of_range("site outside window");
    for (const auto& t : externals) {
        if (t.in_frame(x)) throw std::invalid_argument("site lies in the frame of an external triangle");
    }
    const Kernel k = build_kernel(params, L);
    double s_in = 0.0;
    bool inside = false;
    for (const auto& t : externals) {
        s_in += interval_sum(k, x, t.lo(), t.hi());
        inside = inside || (x >= t.lo() && x <= t.hi());
    }
    const double t1 = k.coupled_tail(1);
    const double delta = inside ? 2.0 * s_in - 2.0 * t1 : 2.0 * t1 - 2.0 * s_in;
    return std::exp(-params.beta * delta);
}

double finite_volume_slack(const ModelParams& params, int L) {
    const double n = 2.0 * L + 1.0;
    return 10.0 * xi_unit(params) * std::pow(n, params.alpha - 1.0) / (params.alpha * (1.0 - params.alpha));
}

Envelope conditional_m_leading(double rho, const ModelParams& params, int L) {
    if (!(rho >= 0.0 && rho <= 1.0)) throw std::invalid_argument("rho must lie in [0, 1]");
    Envelope e;
    e.quantity = "conditional_m";
    e.center = (1.0 - 2.0 * rho) * (1.0 - 2.0 * xi_unit(params));
    e.half_width = finite_volume_slack(params, L);
    return e;
}

LogZLeading logZ_leading(const ModelParams& params, int L) {
    const double n = 2.0 * L + 1.0;
    const double factor = std::exp(-envelope_exponent(params, 32.0));
    const bool informative = envelope_exponent(params, 32.0) > 0.0;
    LogZLeading out;
    out.uniform.quantity = "logZ";
    out.uniform.center = n * xi_unit(params);
    out.uniform.half_width = out.uniform.center * factor;
    out.uniform.informative = informative;

    auto kernel = std::make_shared<const Kernel>(build_kernel(params, L));
    const SpinConfig plus(kernel, L);
    double sum = 0.0;
    for (int p = 0; p < plus.size(); ++p) sum += std::exp(-params.beta * plus.flip_delta_at(p));
    out.finite = out.uniform;
    out.finite.quantity = "logZ_finite_volume";
    out.finite.center = sum;
    out.finite.half_width = sum * factor;
    out.max_convention_gap = std::abs(out.finite.center - out.uniform.center);
    return out;
}

Envelope two_point_leading(int i, int j, const Triangle& T0, double field_r, const ModelParams& params, int L) {
    if (std::abs(i - j) < 2) throw std::invalid_argument("two-point leading term needs |i - j| >= 2");
    Envelope e;
    e.quantity = "two_point";
    if (T0.in_frame(i) || T0.in_frame(j)) {
        e.kind = "fixed";
        return e;
    }
    const Triangle ext[] = {T0};
    const double si = (i >= T0.lo() && i <= T0.hi()) ? -1.0 : 1.0;
    const double sj = (j >= T0.lo() && j <= T0.hi()) ? -1.0 : 1.0;
    const Kernel k = build_kernel(params, L);
    const double b = params.beta;
    e.center = xi_site(i, ext, params, L) * xi_site(j, ext, params, L) * std::exp(-2.0 * b * field_r * si) *
               std::exp(-2.0 * b * field_r * sj) * 4.0 * si * sj *
               std::expm1(2.0 * si * sj * b * k(std::abs(i - j)));
    const double ex = envelope_exponent(params, 64.0);
    e.half_width = std::abs(e.center) * std::exp(-ex);
    e.kind = "relative";
    e.informative = ex > 0.0;
    return e;
}

PairExcess pair_excess_energy(int i, int j, const Triangle& T0, const ModelParams& params, int L) {
    const Triangle ext[] = {T0};
    auto kernel = std::make_shared<const Kernel>(build_kernel(params, L));
    SpinConfig g(kernel, L, ground_state_of(ext, L));
    const double dj = g.flip_delta(j);
    PairExcess out;
    out.formula = -2.0 * g.spin(i) * g.spin(j) * (*kernel)(std::abs(i - j));
    g.flip(i);
    out.measured = g.flip_delta(j) - dj;
    return out;
}

double field_threshold(ThresholdKind kind, const ModelParams& params, int L, double rho) {
    const double n = 2.0 * L + 1.0;
    const double a = params.alpha;
    const double z = zeta_alpha(a);
    if (kind == ThresholdKind::very_small) {
        const double eps_s_abs = std::pow(n, -params.gamma) * n;
        return z / (4.0 * a * (1.0 - a) * std::pow(eps_s_abs, 1.0 - a));
    }
    if (!(rho > 0.0)) throw std::invalid_argument("single-droplet threshold needs rho > 0");
    return z * std::pow(3.0, 1.0 - a) / (4.0 * a * (1.0 - a) * std::pow(rho * n, 1.0 - a));
}

}  // namespace lrising
