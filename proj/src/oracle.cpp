#include "lrising/oracle.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <limits>
#include <memory>
#include <thread>

namespace lrising {

const TriangleFamily& ConfigView::triangles() const {
    if (!family) throw std::logic_error("event needs triangles but none were built");
    return *family;
}

namespace events {

namespace {

std::vector<Triangle> large_externals(const ConfigView& v, double eps_s_abs) {
    return external_large(v.triangles(), eps_s_abs);
}

std::string fmt(double x) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.6g", x);
    return buf;
}

std::string describe(const std::vector<Triangle>& ts) {
    std::string s;
    for (const auto& t : ts) {
        if (!s.empty()) s += ";";
        s += std::to_string(t.left) + ":" + std::to_string(t.right);
    }
    return s;
}

}  // namespace

EventSpec all() {
    return {"all", false, [](const ConfigView&) { return true; }};
}

EventSpec window(double m, double half_width) {
    return {"window(m=" + fmt(m) + ",half_width=" + fmt(half_width) + ")", false,
            [m, half_width](const ConfigView& v) {
                const double emp = static_cast<double>(v.sum) / static_cast<double>(v.spins.size());
                return std::abs(emp - m) <= half_width;
            }};
}

EventSpec small(double eps_s_abs) {
    return {"small(eps_s_abs=" + fmt(eps_s_abs) + ")", true,
            [eps_s_abs](const ConfigView& v) { return large_externals(v, eps_s_abs).empty(); }};
}

EventSpec class_of(std::vector<Triangle> externals, double eps_s_abs) {
    std::sort(externals.begin(), externals.end());
    std::string name = "class(T=" + describe(externals) + ",eps_s_abs=" + fmt(eps_s_abs) + ")";
    return {std::move(name), true, [externals = std::move(externals), eps_s_abs](const ConfigView& v) {
                return large_externals(v, eps_s_abs) == externals;
            }};
}

EventSpec s1(double rho, double eps_s_abs, double eps_c) {
    return {"s1(rho=" + fmt(rho) + ",eps_s_abs=" + fmt(eps_s_abs) + ",eps_c=" + fmt(eps_c) + ")", true,
            [=](const ConfigView& v) {
                const auto te = large_externals(v, eps_s_abs);
                if (te.empty()) return false;
                long mass = 0;
                for (const auto& t : te) mass += t.mass();
                const double r = static_cast<double>(mass) / static_cast<double>(v.spins.size());
                return std::abs(r - rho) <= eps_c + 1e-12;
            }};
}

EventSpec s_b(double rho, double eps_s_abs, double eps_c) {
    return {"sB(rho=" + fmt(rho) + ",eps_s_abs=" + fmt(eps_s_abs) + ",eps_c=" + fmt(eps_c) + ")", true,
            [=](const ConfigView& v) {
                const auto te = large_externals(v, eps_s_abs);
                if (te.empty()) return false;
                long mass = 0;
                for (const auto& t : te) mass += t.mass();
                const double n = static_cast<double>(v.spins.size());
                if (std::abs(static_cast<double>(mass) / n - rho) > eps_c + 1e-12) return false;
                const double cut = static_cast<double>(mass) - 6.0 * eps_c * n;
                int n0 = 0;
                for (const auto& t : te) n0 += t.mass() >= cut ? 1 : 0;
                return n0 == 1;
            }};
}

EventSpec very_small(std::vector<Triangle> externals, double eps_s_abs) {
    std::sort(externals.begin(), externals.end());
    std::string name = "vs(T=" + describe(externals) + ",eps_s_abs=" + fmt(eps_s_abs) + ")";
    return {std::move(name), true, [externals = std::move(externals), eps_s_abs](const ConfigView& v) {
                const auto& fam = v.triangles();
                if (external_large(fam, eps_s_abs) != externals) return false;
                for (const auto& t : fam.triangles) {
                    if (t.mass() > eps_s_abs && !std::binary_search(externals.begin(), externals.end(), t)) {
                        return false;
                    }
                }
                return true;
            }};
}

EventSpec complement(EventSpec e) {
    return {"not(" + e.name + ")", e.needs_triangles,
            [p = std::move(e.predicate)](const ConfigView& v) { return !p(v); }};
}

EventSpec intersect(EventSpec a, EventSpec b) {
    return {"and(" + a.name + "," + b.name + ")", a.needs_triangles || b.needs_triangles,
            [p = std::move(a.predicate), q = std::move(b.predicate)](const ConfigView& v) { return p(v) && q(v); }};
}

}  // namespace events

double OracleResult::truncated(int i_index, int j_index) const {
    const std::size_t n = site_mean.size();
    if (pair_mean.size() != n * n) throw std::logic_error("two-point data not collected");
    return pair_mean[static_cast<std::size_t>(i_index) * n + static_cast<std::size_t>(j_index)] -
           site_mean[static_cast<std::size_t>(i_index)] * site_mean[static_cast<std::size_t>(j_index)];
}

namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();

// log1p(x) - x without cancellation for small x
double log1p_minus_x(double x) {
    if (std::abs(x) < 1e-3) {
        const double x2 = x * x;
        return -x2 / 2.0 + x2 * x / 3.0 - x2 * x2 / 4.0 + x2 * x2 * x / 5.0;
    }
    return std::log1p(x) - x;
}

struct Accumulator {
    std::uint64_t count = 0;
    double shift = kNegInf;
    double z = 0.0;
    double zm = 0.0;
    double zc = 0.0;  // sum of w (S - center)
    std::vector<double> site;
    std::vector<double> pair;
    std::vector<double> hist;
    std::vector<double> mgf_shift;
    std::vector<double> mgf_z;
    std::vector<double> gap_q;  // sum of w (expm1(a) - a), a = beta t (S - center)

    void init(int n, const OracleOptions& o) {
        if (o.site_means || o.two_point) site.assign(static_cast<std::size_t>(n), 0.0);
        if (o.two_point) pair.assign(static_cast<std::size_t>(n) * static_cast<std::size_t>(n), 0.0);
        if (o.histogram) hist.assign(static_cast<std::size_t>(n + 1), 0.0);
        mgf_shift.assign(o.laplace_t.size(), kNegInf);
        mgf_z.assign(o.laplace_t.size(), 0.0);
        gap_q.assign(o.laplace_t.size(), 0.0);
    }

    void scale(double f) {
        z *= f;
        zm *= f;
        zc *= f;
        for (auto& v : gap_q) v *= f;
        for (auto& v : site) v *= f;
        for (auto& v : pair) v *= f;
        for (auto& v : hist) v *= f;
    }

    void add(double lw, std::span<const std::int8_t> s, int sum, double beta, const OracleOptions& o) {
        ++count;
        if (lw > shift) {
            scale(std::exp(shift - lw));
            shift = lw;
        }
        const double w = std::exp(lw - shift);
        z += w;
        zm += w * sum;
        zc += w * (sum - o.laplace_center);
        const int n = static_cast<int>(s.size());
        if (!site.empty()) {
            for (int p = 0; p < n; ++p) site[static_cast<std::size_t>(p)] += w * s[static_cast<std::size_t>(p)];
        }
        if (!pair.empty()) {
            for (int p = 0; p < n; ++p) {
                const double wp = w * s[static_cast<std::size_t>(p)];
                double* row = pair.data() + static_cast<std::size_t>(p) * static_cast<std::size_t>(n);
                for (int q = p; q < n; ++q) row[q] += wp * s[static_cast<std::size_t>(q)];
            }
        }
        if (!hist.empty()) hist[static_cast<std::size_t>((n - sum) / 2)] += w;
        for (std::size_t k = 0; k < o.laplace_t.size(); ++k) {
            const double lt = lw + beta * o.laplace_t[k] * sum;
            if (lt > mgf_shift[k]) {
                mgf_z[k] *= std::exp(mgf_shift[k] - lt);
                mgf_shift[k] = lt;
            }
            mgf_z[k] += std::exp(lt - mgf_shift[k]);
            const double a = beta * o.laplace_t[k] * (sum - o.laplace_center);
            gap_q[k] += w * (std::expm1(a) - a);
        }
    }

    void merge(const Accumulator& o) {
        count += o.count;
        if (o.shift == kNegInf) return;
        if (o.shift > shift) {
            scale(std::exp(shift - o.shift));
            shift = o.shift;
        }
        const double f = std::exp(o.shift - shift);
        z += f * o.z;
        zm += f * o.zm;
        zc += f * o.zc;
        for (std::size_t k = 0; k < gap_q.size(); ++k) gap_q[k] += f * o.gap_q[k];
        for (std::size_t k = 0; k < site.size(); ++k) site[k] += f * o.site[k];
        for (std::size_t k = 0; k < pair.size(); ++k) pair[k] += f * o.pair[k];
        for (std::size_t k = 0; k < hist.size(); ++k) hist[k] += f * o.hist[k];
        for (std::size_t k = 0; k < mgf_z.size(); ++k) {
            if (o.mgf_shift[k] == kNegInf) continue;
            if (o.mgf_shift[k] > mgf_shift[k]) {
                mgf_z[k] *= std::exp(mgf_shift[k] - o.mgf_shift[k]);
                mgf_shift[k] = o.mgf_shift[k];
            }
            mgf_z[k] += std::exp(o.mgf_shift[k] - mgf_shift[k]) * o.mgf_z[k];
        }
    }
};

struct WorkerState {
    std::vector<Accumulator> acc;  // events..., then the unconditioned total
};

void run_worker(const ModelParams& params, const std::shared_ptr<const Kernel>& kernel,
                std::span<const EventSpec> evs, const OracleOptions& opts, int low_bits,
                std::uint32_t prefix, WorkerState& out) {
    const int L = params.L;
    const int n = params.size();
    Spins init(static_cast<std::size_t>(n), 1);
    for (int p = low_bits; p < n; ++p) {
        if ((prefix >> (p - low_bits)) & 1u) init[static_cast<std::size_t>(p)] = -1;
    }
    SpinConfig cfg(kernel, L, std::move(init));
    const bool need_tri = std::any_of(evs.begin(), evs.end(), [](const EventSpec& e) { return e.needs_triangles; });
    out.acc.resize(evs.size() + 1);
    for (auto& a : out.acc) a.init(n, opts);
    OracleOptions bare;
    bare.site_means = false;
    bare.histogram = false;
    out.acc.back().init(n, bare);

    const double beta = params.beta;
    const std::uint64_t steps = 1ull << low_bits;
    TriangleFamily fam;
    for (std::uint64_t k = 0; k < steps; ++k) {
        if (k > 0) cfg.flip_at(std::countr_zero(k));
        ConfigView view{cfg.spins(), cfg.sum(), cfg.energy(), nullptr};
        if (need_tri) {
            fam = build_triangles(cfg.spins());
            view.family = &fam;
        }
        const double lw = -beta * cfg.energy() + beta * opts.field_r * cfg.sum();
        for (std::size_t e = 0; e < evs.size(); ++e) {
            if (evs[e].predicate(view)) out.acc[e].add(lw, cfg.spins(), cfg.sum(), beta, opts);
        }
        out.acc.back().add(lw, cfg.spins(), cfg.sum(), beta, bare);
    }
}

}  // namespace

std::vector<OracleResult> enumerate(const ModelParams& params, std::span<const EventSpec> evs,
                                    const OracleOptions& opts) {
    params.validate();
    if (params.L > 12) throw std::invalid_argument("exhaustive enumeration needs L <= 12");
    const int n = params.size();
    auto kernel = std::make_shared<const Kernel>(build_kernel(params));

    unsigned hw = opts.workers ? opts.workers : std::max(1u, std::thread::hardware_concurrency());
    int prefix_bits = 0;
    while ((1u << (prefix_bits + 1)) <= hw && prefix_bits + 1 <= std::min(6, n - 1)) ++prefix_bits;
    const int low_bits = n - prefix_bits;
    const std::uint32_t workers = 1u << prefix_bits;

    std::vector<WorkerState> states(workers);
    if (workers == 1) {
        run_worker(params, kernel, evs, opts, low_bits, 0, states[0]);
    } else {
        std::vector<std::thread> pool;
        for (std::uint32_t w = 0; w < workers; ++w) {
            pool.emplace_back([&, w] { run_worker(params, kernel, evs, opts, low_bits, w, states[w]); });
        }
        for (auto& t : pool) t.join();
    }
    for (std::uint32_t w = 1; w < workers; ++w) {
        for (std::size_t e = 0; e < states[0].acc.size(); ++e) states[0].acc[e].merge(states[w].acc[e]);
    }

    const Accumulator& total = states[0].acc.back();
    const double logZ_all = total.shift + std::log(total.z);
    std::vector<OracleResult> out;
    for (std::size_t e = 0; e < evs.size(); ++e) {
        const Accumulator& a = states[0].acc[e];
        OracleResult r;
        r.event = evs[e].name;
        r.count = a.count;
        if (a.count == 0) {
            if (!opts.allow_empty) throw EmptyEventError(evs[e].name);
            r.logZ = kNegInf;
            r.log_prob = kNegInf;
            out.push_back(std::move(r));
            continue;
        }
        r.logZ = a.shift + std::log(a.z);
        r.log_prob = r.logZ - logZ_all;
        r.mean_m = a.zm / a.z / n;
        for (double v : a.site) r.site_mean.push_back(v / a.z);
        if (!a.pair.empty()) {
            r.pair_mean.assign(a.pair.size(), 0.0);
            for (int p = 0; p < n; ++p) {
                for (int q = p; q < n; ++q) {
                    const double v = a.pair[static_cast<std::size_t>(p * n + q)] / a.z;
                    r.pair_mean[static_cast<std::size_t>(p * n + q)] = v;
                    r.pair_mean[static_cast<std::size_t>(q * n + p)] = v;
                }
            }
        }
        for (double v : a.hist) r.histogram.push_back(v / a.z);
        for (std::size_t k = 0; k < a.mgf_z.size(); ++k) {
            r.log_mgf.push_back(a.mgf_shift[k] + std::log(a.mgf_z[k]) - r.logZ);
            const double x = a.gap_q[k] / a.z + params.beta * opts.laplace_t[k] * a.zc / a.z;
            r.laplace_gap.push_back(a.gap_q[k] / a.z + log1p_minus_x(x));
        }
        out.push_back(std::move(r));
    }
    return out;
}

double conditional_magnetization(const ModelParams& params, const EventSpec& event) {
    OracleOptions o;
    o.site_means = false;
    o.histogram = false;
    return enumerate(params, std::span(&event, 1), o).front().mean_m;
}

double two_point(const ModelParams& params, int i, int j, const EventSpec& event, double field_r) {
    if (i < -params.L || i > params.L || j < -params.L || j > params.L) {
        throw std::out_of_range("two_point sites outside window");
    }
    OracleOptions o;
    o.field_r = field_r;
    o.two_point = true;
    o.histogram = false;
    const auto r = enumerate(params, std::span(&event, 1), o).front();
    return r.truncated(i + params.L, j + params.L);
}

double exact_m_beta(const ModelParams& params) {
    const EventSpec e = events::all();
    OracleOptions o;
    o.histogram = false;
    const auto r = enumerate(params, std::span(&e, 1), o).front();
    return r.site_mean[static_cast<std::size_t>(params.L)];
}

std::vector<LaplaceReport> laplace_check(const ModelParams& params, const EventSpec& event,
                                         std::span<const double> ts, double t_star) {
    OracleOptions o;
    o.site_means = false;
    const auto first = enumerate(params, std::span(&event, 1), o).front();
    const auto mode = std::max_element(first.histogram.begin(), first.histogram.end()) - first.histogram.begin();
    o.histogram = false;
    o.laplace_center = static_cast<double>(params.size() - 2 * mode);
    o.laplace_t.assign(ts.begin(), ts.end());
    const auto r = enumerate(params, std::span(&event, 1), o).front();
    const double n = static_cast<double>(params.size());
    const double b = params.beta;
    std::vector<LaplaceReport> out;
    for (std::size_t k = 0; k < ts.size(); ++k) {
        LaplaceReport rep;
        rep.t = ts[k];
        rep.t_star = t_star;
        rep.admissible = std::abs(ts[k]) <= t_star * (1.0 + 1e-12);
        rep.log_mgf = r.log_mgf[k];
        rep.linear = b * ts[k] * n * r.mean_m;
        rep.lhs = std::abs(r.laplace_gap[k]);
        rep.rhs = 0.5 * b * b * ts[k] * ts[k] * n * std::exp(-2.0 * b * params.J);
        rep.holds = rep.lhs <= rep.rhs;
        out.push_back(rep);
    }
    return out;
}

}  // namespace lrising
