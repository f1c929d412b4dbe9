#include "lrising/model.hpp"

#include <gsl/gsl_errno.h>
#include <gsl/gsl_sf_zeta.h>

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>
#include <string>

namespace lrising {

namespace {

double hurwitz(double s, double q) {
    gsl_sf_result r;
    int status = gsl_sf_hzeta_e(s, q, &r);
    if (status != GSL_SUCCESS) {
        throw std::runtime_error(std::string("hurwitz zeta failed: ") + gsl_strerror(status));
    }
    return r.val;
}

struct GslHandlerGuard {
    GslHandlerGuard() { gsl_set_error_handler_off(); }
};
const GslHandlerGuard gsl_guard;

bool strictly_less(double lhs, double rhs) {
    double scale = std::max({1.0, std::abs(lhs), std::abs(rhs)});
    return rhs - lhs > 1e-12 * scale;
}

bool less_equal(double lhs, double rhs) {
    double scale = std::max({1.0, std::abs(lhs), std::abs(rhs)});
    return lhs - rhs <= 1e-12 * scale;
}

}  // namespace

double zeta_alpha(double alpha) { return 1.0 - 2.0 * (std::pow(2.0, alpha) - 1.0); }

double ModelParams::eps0() const { return std::pow(static_cast<double>(size()), -a); }
double ModelParams::eps_s() const { return std::pow(static_cast<double>(size()), -gamma); }
double ModelParams::eps_c() const { return std::pow(static_cast<double>(size()), -nu); }

void ModelParams::validate() const {
    if (!(alpha > 0.0 && alpha < kAlphaPlus)) {
        throw std::invalid_argument("alpha must lie in (0, " + std::to_string(kAlphaPlus) + ")");
    }
    if (!(J >= 0.0)) throw std::invalid_argument("J must be >= 0");
    if (!(beta >= 0.0)) throw std::invalid_argument("beta must be >= 0");
    if (L < 1) throw std::invalid_argument("L must be >= 1");
    if (!(C > std::numbers::pi * std::numbers::pi / 3.0)) {
        throw std::invalid_argument("C must exceed pi^2/3");
    }
}

ModelParams with_standard_exponents(ModelParams p) {
    p.nu = p.alpha * (1.0 - p.alpha) / 4.0;
    p.gamma = p.alpha / 4.0;
    p.a = p.alpha * (1.0 - p.alpha) / 2.0;
    return p;
}

Kernel::Kernel(double alpha, double J, long window) : alpha_(alpha), J_(J), window_(window) {
    if (!(alpha > 0.0 && alpha < kAlphaPlus)) {
        throw std::invalid_argument("alpha must lie in (0, " + std::to_string(kAlphaPlus) + ")");
    }
    if (!(J >= 0.0)) throw std::invalid_argument("J must be >= 0");
    if (window < 2) window_ = 2;
    const double s = 2.0 - alpha_;
    pair_.assign(static_cast<std::size_t>(window_ + 1), 0.0);
    for (long n = 1; n <= window_; ++n) pair_[static_cast<std::size_t>(n)] = std::pow(static_cast<double>(n), -s);
    pair_[1] = J_ + 1.0;

    tail_.assign(static_cast<std::size_t>(window_ + 2), 0.0);
    tail_[static_cast<std::size_t>(window_ + 1)] = hurwitz(s, static_cast<double>(window_ + 1));
    for (long k = window_; k >= 1; --k) {
        tail_[static_cast<std::size_t>(k)] =
            tail_[static_cast<std::size_t>(k + 1)] + std::pow(static_cast<double>(k), -s);
    }

    run_energy_.assign(static_cast<std::size_t>(window_ + 1), 0.0);
    for (long n = 1; n <= window_; ++n) {
        run_energy_[static_cast<std::size_t>(n)] =
            run_energy_[static_cast<std::size_t>(n - 1)] + 2.0 * coupled_tail(n);
    }
}

double Kernel::operator()(long n) const {
    if (n < 0) n = -n;
    if (n <= window_) return pair_[static_cast<std::size_t>(n)];
    return std::pow(static_cast<double>(n), alpha_ - 2.0);
}

double Kernel::tail(long k) const {
    if (k < 1) throw std::out_of_range("tail index must be >= 1");
    if (k <= window_ + 1) return tail_[static_cast<std::size_t>(k)];
    return hurwitz(2.0 - alpha_, static_cast<double>(k));
}

double Kernel::coupled_tail(long k) const {
    if (k < 1) throw std::out_of_range("tail index must be >= 1");
    return k == 1 ? tail(1) + J_ : tail(k);
}

double Kernel::run_energy(long n) const {
    if (n < 0) throw std::out_of_range("run length must be >= 0");
    if (n <= window_) return run_energy_[static_cast<std::size_t>(n)];
    double e = run_energy_[static_cast<std::size_t>(window_)];
    for (long k = window_ + 1; k <= n; ++k) e += 2.0 * coupled_tail(k);
    return e;
}

Kernel build_kernel(const ModelParams& params) { return build_kernel(params, params.L); }

Kernel build_kernel(const ModelParams& params, int L) {
    long n = 2L * L + 1;
    return Kernel(params.alpha, params.J, std::max(4 * n + 4, 64L));
}

double boundary_field(const Kernel& kernel, int n, int p) {
    // distance to the first outside site on each side
    return kernel.coupled_tail(n - p) + kernel.coupled_tail(p + 1);
}

double bulk_energy(std::span<const std::int8_t> spins, const Kernel& kernel) {
    const int n = static_cast<int>(spins.size());
    double e = 0.0;
    for (int p = 0; p < n; ++p) {
        for (int q = p + 1; q < n; ++q) {
            if (spins[p] != spins[q]) e += kernel(q - p);
        }
    }
    return e;
}

double hamiltonian(std::span<const std::int8_t> spins, const Kernel& kernel) {
    const int n = static_cast<int>(spins.size());
    double e = bulk_energy(spins, kernel);
    for (int p = 0; p < n; ++p) {
        if (spins[p] < 0) e += boundary_field(kernel, n, p);
    }
    return e;
}

double empirical_magnetization(std::span<const std::int8_t> spins) {
    if (spins.empty()) return 0.0;
    long s = 0;
    for (auto v : spins) s += v;
    return static_cast<double>(s) / static_cast<double>(spins.size());
}

SpinConfig::SpinConfig(std::shared_ptr<const Kernel> kernel, int L)
    : SpinConfig(std::move(kernel), L, Spins(static_cast<std::size_t>(2 * L + 1), 1)) {}

SpinConfig::SpinConfig(std::shared_ptr<const Kernel> kernel, int L, Spins spins)
    : kernel_(std::move(kernel)), L_(L), spins_(std::move(spins)) {
    if (!kernel_) throw std::invalid_argument("null kernel");
    if (L < 1) throw std::invalid_argument("L must be >= 1");
    if (spins_.size() != static_cast<std::size_t>(2 * L + 1)) {
        throw std::invalid_argument("spin vector length must be 2L+1");
    }
    for (auto v : spins_) {
        if (v != 1 && v != -1) throw std::invalid_argument("spins must be +1 or -1");
    }
    const int n = size();
    coupling_.resize(static_cast<std::size_t>(n));
    for (int d = 0; d < n; ++d) coupling_[static_cast<std::size_t>(d)] = (*kernel_)(d);
    recompute();
}

int SpinConfig::index_of(int site) const {
    if (site < -L_ || site > L_) {
        throw std::out_of_range("site " + std::to_string(site) + " outside [-L, L]");
    }
    return site + L_;
}

double SpinConfig::flip_delta(int site) const { return flip_delta_at(index_of(site)); }

void SpinConfig::flip(int site) { flip_at(index_of(site)); }

void SpinConfig::flip_at(int index) { flip_at(index, flip_delta_at(index)); }

void SpinConfig::flip_at(int index, double delta) {
    const int n = size();
    const std::size_t p = static_cast<std::size_t>(index);
    const std::int8_t s_new = static_cast<std::int8_t>(-spins_[p]);
    spins_[p] = s_new;
    sum_ += 2 * s_new;
    energy_ += delta;
    const double twice = 2.0 * s_new;
    double* f = field_.data();
    const double* c = coupling_.data();
    for (int q = 0; q < index; ++q) f[q] += twice * c[index - q];
    for (int q = index + 1; q < n; ++q) f[q] += twice * c[q - index];
}

void SpinConfig::recompute() {
    const int n = size();
    field_.assign(static_cast<std::size_t>(n), 0.0);
    sum_ = 0;
    double bulk = 0.0;
    double boundary = 0.0;
    for (int p = 0; p < n; ++p) {
        double h = boundary_field(*kernel_, n, p);
        if (spins_[p] < 0) boundary += h;
        for (int q = 0; q < n; ++q) {
            if (q == p) continue;
            const double c = coupling_[static_cast<std::size_t>(std::abs(p - q))];
            h += c * spins_[q];
            if (q > p && spins_[q] != spins_[p]) bulk += c;
        }
        field_[static_cast<std::size_t>(p)] = h;
        sum_ += spins_[p];
    }
    energy_ = bulk + boundary;
}

double SpinConfig::energy_drift() const {
    const double fresh = hamiltonian(spins_, *kernel_);
    return std::abs(energy_ - fresh) / std::max(1.0, std::abs(fresh));
}

double interval_interaction(Interval lhs, Interval rhs, const Kernel& kernel) {
    if (lhs.lo > rhs.lo) std::swap(lhs, rhs);
    if (lhs.hi >= rhs.lo) throw std::invalid_argument("intervals overlap");
    double w = 0.0;
    if (lhs.length() <= rhs.length()) {
        for (int x = lhs.lo; x <= lhs.hi; ++x) {
            w += kernel.coupled_tail(rhs.lo - x) - kernel.coupled_tail(rhs.hi + 1 - x);
        }
    } else {
        for (int y = rhs.lo; y <= rhs.hi; ++y) {
            w += kernel.coupled_tail(y - lhs.hi) - kernel.coupled_tail(y - lhs.lo + 1);
        }
    }
    return w;
}

IntervalFamilyEnergy interval_family_energy(std::span<const Interval> intervals,
                                            const Kernel& kernel, int L) {
    IntervalFamilyEnergy out;
    for (std::size_t k = 0; k < intervals.size(); ++k) {
        const Interval& I = intervals[k];
        if (I.lo > I.hi) throw std::invalid_argument("empty interval");
        if (I.lo < -L || I.hi > L) throw std::invalid_argument("interval outside window");
        if (k > 0 && intervals[k - 1].hi >= I.lo) {
            throw std::invalid_argument("intervals overlap or are not sorted");
        }
        out.singles += kernel.run_energy(I.length());
    }
    for (std::size_t i = 0; i < intervals.size(); ++i) {
        for (std::size_t j = i + 1; j < intervals.size(); ++j) {
            out.interaction += interval_interaction(intervals[i], intervals[j], kernel);
        }
    }
    out.total = out.singles - 2.0 * out.interaction;
    return out;
}

std::vector<Interval> minus_runs(std::span<const std::int8_t> spins) {
    const int n = static_cast<int>(spins.size());
    const int L = (n - 1) / 2;
    std::vector<Interval> runs;
    int p = 0;
    while (p < n) {
        if (spins[p] > 0) {
            ++p;
            continue;
        }
        int q = p;
        while (q + 1 < n && spins[q + 1] < 0) ++q;
        runs.push_back({p - L, q - L});
        p = q + 1;
    }
    return runs;
}

Spins spins_from_runs(std::span<const Interval> runs, int L) {
    Spins s(static_cast<std::size_t>(2 * L + 1), 1);
    for (const auto& r : runs) {
        if (r.lo < -L || r.hi > L || r.lo > r.hi) throw std::invalid_argument("run outside window");
        for (int x = r.lo; x <= r.hi; ++x) s[static_cast<std::size_t>(x + L)] = -1;
    }
    return s;
}

bool ExponentReport::all_pass() const {
    return eta_exists && std::all_of(checks.begin(), checks.end(), [](const auto& c) { return c.holds; });
}

ExponentReport validate_exponents(const ModelParams& p) {
    ExponentReport r;
    auto add = [&](std::string name, double lhs, double rhs, bool strict) {
        r.checks.push_back({std::move(name), strict ? strictly_less(lhs, rhs) : less_equal(lhs, rhs), lhs, rhs});
    };
    add("0 < gamma", 0.0, p.gamma, true);
    add("gamma < alpha - nu", p.gamma, p.alpha - p.nu, true);
    add("gamma < 2/3", p.gamma, 2.0 / 3.0, true);
    r.eta_lo = (p.gamma + p.nu * p.alpha) / (1.0 - p.alpha);
    r.eta_hi = (1.0 - p.nu) * p.alpha;
    add("(gamma + nu alpha)/(1 - alpha) <= (1 - nu) alpha", r.eta_lo, r.eta_hi, false);
    add("nu < a", p.nu, p.a, true);
    add("nu < gamma (1 - alpha)", p.nu, p.gamma * (1.0 - p.alpha), true);
    r.eta_exists = less_equal(r.eta_lo, r.eta_hi);
    return r;
}

RunEnergyBounds single_run_bounds(long n, double alpha) {
    const double lead = 2.0 * std::pow(static_cast<double>(n), alpha) / (alpha * (1.0 - alpha));
    return {lead - 2.0 / alpha, lead - 2.0 * (1.0 - 1.0 / alpha)};
}

}  // namespace lrising
