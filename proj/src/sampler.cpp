#include "lrising/sampler.hpp"

#include <algorithm>
#include <cmath>
#include <mutex>
#include <numeric>
#include <stdexcept>
#include <thread>

namespace lrising {

std::string to_string(Dynamics d) {
    switch (d) {
        case Dynamics::free_glauber: return "free-glauber";
        case Dynamics::window_restricted: return "window-restricted";
        case Dynamics::fixed_exchange: return "fixed-exchange";
    }
    return "unknown";
}

Dynamics parse_dynamics(const std::string& s) {
    if (s == "free-glauber") return Dynamics::free_glauber;
    if (s == "window-restricted") return Dynamics::window_restricted;
    if (s == "fixed-exchange") return Dynamics::fixed_exchange;
    throw std::invalid_argument("unknown dynamics: " + s);
}

std::string to_string(StartKind s) { return s == StartKind::droplet ? "droplet" : "cold"; }

double window_half_width(const ModelParams& params, double m_beta) {
    return params.eps0() * m_beta * params.size();
}

Chain::Chain(const ModelParams& params, std::shared_ptr<const Kernel> kernel, Spins init, EnsembleSpec spec)
    : params_(params), spec_(spec), cfg_(std::move(kernel), params.L, std::move(init)), rng_(spec.seed) {
    if (spec_.dynamics == Dynamics::window_restricted && !in_window(cfg_.sum())) {
        throw std::invalid_argument("initial state outside the magnetization window");
    }
    if (spec_.dynamics == Dynamics::fixed_exchange) {
        slot_.assign(static_cast<std::size_t>(cfg_.size()), 0);
        for (int p = 0; p < cfg_.size(); ++p) {
            auto& list = cfg_.spins()[static_cast<std::size_t>(p)] > 0 ? plus_ : minus_;
            slot_[static_cast<std::size_t>(p)] = static_cast<int>(list.size());
            list.push_back(p);
        }
    }
}

bool Chain::in_window(int sum) const {
    return std::abs(sum - spec_.m * cfg_.size()) <= spec_.half_width_spins + 1e-9;
}

double Chain::uniform01() { return static_cast<double>(rng_() >> 11) * 0x1.0p-53; }

std::uint64_t Chain::below(std::uint64_t n) {
    return static_cast<std::uint64_t>((static_cast<unsigned __int128>(rng_()) * n) >> 64);
}

bool Chain::accept(double delta) {
    if (delta <= 0.0) return true;
    return uniform01() < std::exp(-params_.beta * delta);
}

bool Chain::step() {
    ++proposals_;
    if (spec_.dynamics == Dynamics::fixed_exchange) {
        const auto before = accepted_;
        exchange_step();
        return accepted_ != before;
    }
    const int p = static_cast<int>(below(static_cast<std::uint64_t>(cfg_.size())));
    const double delta = cfg_.flip_delta_at(p);
    if (spec_.dynamics == Dynamics::window_restricted) {
        const int next = cfg_.sum() - 2 * cfg_.spins()[static_cast<std::size_t>(p)];
        if (!in_window(next)) return false;
    }
    if (!accept(delta)) return false;
    cfg_.flip_at(p, delta);
    ++accepted_;
    return true;
}

void Chain::exchange_step() {
    if (plus_.empty() || minus_.empty()) return;
    const int a = plus_[below(plus_.size())];
    const int b = minus_[below(minus_.size())];
    const double da = cfg_.flip_delta_at(a);
    const double db = cfg_.flip_delta_at(b) + 2.0 * cfg_.kernel()(a - b);
    if (!accept(da + db)) return;
    cfg_.flip_at(a, da);
    cfg_.flip_at(b, db);
    auto move = [this](std::vector<int>& from, std::vector<int>& to, int p) {
        const int s = slot_[static_cast<std::size_t>(p)];
        from[static_cast<std::size_t>(s)] = from.back();
        slot_[static_cast<std::size_t>(from.back())] = s;
        from.pop_back();
        slot_[static_cast<std::size_t>(p)] = static_cast<int>(to.size());
        to.push_back(p);
    };
    move(plus_, minus_, a);
    move(minus_, plus_, b);
    ++accepted_;
}

void Chain::sweep() {
    const int n = cfg_.size();
    for (int k = 0; k < n; ++k) step();
    ++sweeps_;
}

double transition_probability(const SpinConfig& from, const Spins& to, const ModelParams& params,
                              const EnsembleSpec& spec) {
    const auto s = from.spins();
    const int n = from.size();
    if (static_cast<int>(to.size()) != n) throw std::invalid_argument("size mismatch");
    std::vector<int> diff;
    for (int p = 0; p < n; ++p) {
        if (s[static_cast<std::size_t>(p)] != to[static_cast<std::size_t>(p)]) diff.push_back(p);
    }
    auto metropolis = [&](double delta) { return delta <= 0.0 ? 1.0 : std::exp(-params.beta * delta); };
    if (spec.dynamics == Dynamics::fixed_exchange) {
        if (diff.size() != 2) return 0.0;
        const int a = diff[0];
        const int b = diff[1];
        if (s[static_cast<std::size_t>(a)] == s[static_cast<std::size_t>(b)]) return 0.0;
        long plus = 0;
        for (auto v : s) plus += v > 0;
        const double delta = from.flip_delta_at(a) + from.flip_delta_at(b) + 2.0 * from.kernel()(a - b);
        return metropolis(delta) / (static_cast<double>(plus) * static_cast<double>(n - plus));
    }
    if (diff.size() != 1) return 0.0;
    const int p = diff[0];
    if (spec.dynamics == Dynamics::window_restricted) {
        const int next = from.sum() - 2 * s[static_cast<std::size_t>(p)];
        if (std::abs(next - spec.m * n) > spec.half_width_spins + 1e-9) return 0.0;
    }
    return metropolis(from.flip_delta_at(p)) / n;
}

Estimate estimate_m_beta(const ModelParams& params, long sweeps, int replicas, std::uint64_t seed, long burn_in) {
    if (replicas < 1) throw std::invalid_argument("need at least one replica");
    if (burn_in < 0) burn_in = sweeps / 10;
    auto kernel = std::make_shared<const Kernel>(build_kernel(params));
    Estimate est;
    for (int r = 0; r < replicas; ++r) {
        EnsembleSpec spec;
        spec.seed = seed ^ static_cast<std::uint64_t>(r);
        Chain chain(params, kernel, Spins(static_cast<std::size_t>(params.size()), 1), spec);
        for (long k = 0; k < burn_in; ++k) chain.sweep();
        double acc = 0.0;
        for (long k = 0; k < sweeps; ++k) {
            chain.sweep();
            acc += chain.config().spins()[static_cast<std::size_t>(params.L)];
        }
        est.replica_means.push_back(sweeps > 0 ? acc / static_cast<double>(sweeps) : 0.0);
    }
    const double n = static_cast<double>(replicas);
    est.mean = std::accumulate(est.replica_means.begin(), est.replica_means.end(), 0.0) / n;
    if (replicas > 1) {
        double ss = 0.0;
        for (double v : est.replica_means) ss += (v - est.mean) * (v - est.mean);
        est.std_error = std::sqrt(ss / (n - 1.0) / n);
    }
    return est;
}

ChainStatistics collect_statistics(const ModelParams& params, const EnsembleSpec& spec, Spins init,
                                   long burn_in, long sweeps) {
    auto kernel = std::make_shared<const Kernel>(build_kernel(params));
    Chain chain(params, kernel, std::move(init), spec);
    const int n = params.size();
    for (long k = 0; k < burn_in; ++k) chain.sweep();
    ChainStatistics st;
    st.minus_histogram.assign(static_cast<std::size_t>(n + 1), 0.0);
    st.corr_origin.assign(static_cast<std::size_t>(n), 0.0);
    st.site_mean.assign(static_cast<std::size_t>(n), 0.0);
    std::vector<long> hist(static_cast<std::size_t>(n + 1), 0);
    std::vector<long> corr(static_cast<std::size_t>(n), 0);
    std::vector<long> mean(static_cast<std::size_t>(n), 0);
    for (long k = 0; k < sweeps; ++k) {
        chain.sweep();
        const auto s = chain.config().spins();
        ++hist[static_cast<std::size_t>((n - chain.config().sum()) / 2)];
        const int s0 = s[static_cast<std::size_t>(params.L)];
        for (int p = 0; p < n; ++p) {
            corr[static_cast<std::size_t>(p)] += s0 * s[static_cast<std::size_t>(p)];
            mean[static_cast<std::size_t>(p)] += s[static_cast<std::size_t>(p)];
        }
    }
    const double N = static_cast<double>(std::max(1L, sweeps));
    for (int p = 0; p <= n; ++p) st.minus_histogram[static_cast<std::size_t>(p)] = hist[static_cast<std::size_t>(p)] / N;
    for (int p = 0; p < n; ++p) {
        st.corr_origin[static_cast<std::size_t>(p)] = corr[static_cast<std::size_t>(p)] / N;
        st.site_mean[static_cast<std::size_t>(p)] = mean[static_cast<std::size_t>(p)] / N;
    }
    st.samples = sweeps;
    return st;
}

namespace {

int target_sum(const ModelParams& params, double m) {
    // nearest sum with the parity of |Lambda|, ties toward plus
    const int n = params.size();
    const double x = m * n;
    int lo = static_cast<int>(std::floor(x));
    if ((lo - n) % 2 != 0) --lo;
    const int hi = lo + 2;
    return (x - lo < hi - x) ? lo : hi;
}

Spins droplet_of(const ModelParams& params, int k) {
    const int L = params.L;
    if (k <= 0) return Spins(static_cast<std::size_t>(params.size()), 1);
    const int lo = -L + (params.size() - k) / 2;
    const Triangle t{lo - 1, lo + k - 1};
    return ground_state_of(std::span(&t, 1), L);
}

Spins scattered(const ModelParams& params, int q) {
    const int n = params.size();
    Spins s(static_cast<std::size_t>(n), 1);
    for (int k = 0; k < q; ++k) {
        const auto p = static_cast<std::size_t>((static_cast<double>(k) + 0.5) * n / q);
        s[std::min(p, static_cast<std::size_t>(n - 1))] = -1;
    }
    return s;
}

double median(std::vector<double> v) {
    if (v.empty()) return 0.0;
    const std::size_t mid = v.size() / 2;
    std::nth_element(v.begin(), v.begin() + static_cast<std::ptrdiff_t>(mid), v.end());
    double m = v[mid];
    if (v.size() % 2 == 0) {
        m = 0.5 * (m + *std::max_element(v.begin(), v.begin() + static_cast<std::ptrdiff_t>(mid)));
    }
    return m;
}

}  // namespace

Spins experiment_start(const ModelParams& params, const ExperimentConfig& cfg, StartKind kind) {
    const int n = params.size();
    const auto targets = rho_targets(cfg.m, cfg.m_beta, params.L);
    if (cfg.dynamics == Dynamics::fixed_exchange) {
        const int k = (n - target_sum(params, cfg.m)) / 2;
        return kind == StartKind::droplet ? droplet_of(params, k) : scattered(params, k);
    }
    const double hw = window_half_width(params, cfg.m_beta);
    auto inside = [&](int minus) { return std::abs((n - 2 * minus) - cfg.m * n) <= hw + 1e-9; };
    if (kind == StartKind::droplet) {
        int k = static_cast<int>(targets.k);
        if (cfg.dynamics == Dynamics::window_restricted) {
            // move the droplet mass toward the window if the estimate puts it outside
            while (!inside(k) && (n - 2 * k) > cfg.m * n && k < n) ++k;
            while (!inside(k) && (n - 2 * k) < cfg.m * n && k > 0) --k;
        }
        return droplet_of(params, k);
    }
    int q = 0;
    if (cfg.dynamics == Dynamics::window_restricted) {
        while (!inside(q) && q < n) ++q;
    }
    return scattered(params, q);
}

ExperimentReport phase_separation_experiment(const ModelParams& params, const ExperimentConfig& cfg,
                                             const std::function<void(const Measurement&)>& sink) {
    if (cfg.dynamics == Dynamics::free_glauber) {
        throw std::invalid_argument("phase separation needs window-restricted or fixed-exchange dynamics");
    }
    ExperimentReport rep;
    const auto exps = validate_exponents(params);
    if (!exps.all_pass()) {
        for (const auto& c : exps.checks) {
            if (!c.holds) rep.warnings.push_back("exponent constraint fails: " + c.name);
        }
        if (!exps.eta_exists) rep.warnings.push_back("no admissible eta");
    }
    const auto targets = rho_targets(cfg.m, cfg.m_beta, params.L);
    rep.rho_hat = targets.rho_hat;
    rep.rho_lattice = targets.rho_lattice;
    rep.half_width_spins = window_half_width(params, cfg.m_beta);
    if (cfg.dynamics == Dynamics::window_restricted && rep.half_width_spins < 4.0) {
        rep.warnings.push_back("window narrower than two magnetization steps; dynamics may be reducible");
    }
    const long burn_in = cfg.burn_in >= 0 ? cfg.burn_in : 10L * params.size();
    const long thin = std::max(1L, cfg.thin);
    auto kernel = std::make_shared<const Kernel>(build_kernel(params));
    const DropletTargets dt{cfg.m, targets.rho_lattice, cfg.m_beta};

    std::vector<ReplicaSummary> summaries(static_cast<std::size_t>(cfg.replicas));
    std::vector<std::vector<double>> fractions(static_cast<std::size_t>(cfg.replicas));
    std::vector<long> count_b(static_cast<std::size_t>(cfg.replicas), 0);
    std::vector<long> count_s1(static_cast<std::size_t>(cfg.replicas), 0);

    auto run = [&](int r) {
        ReplicaSummary& s = summaries[static_cast<std::size_t>(r)];
        s.chain = r;
        s.start = r % 2 == 0 ? StartKind::droplet : StartKind::cold;
        s.seed = cfg.seed ^ static_cast<std::uint64_t>(r);
        EnsembleSpec spec;
        spec.dynamics = cfg.dynamics;
        spec.m = cfg.m;
        spec.half_width_spins = rep.half_width_spins;
        spec.seed = s.seed;
        Chain chain(params, kernel, experiment_start(params, cfg, s.start), spec);
        for (long k = 0; k < burn_in; ++k) chain.sweep();
        const auto accepted0 = chain.accepted();
        const auto proposals0 = chain.proposals();
        double inside = 0.0;
        double outside = 0.0;
        long with_droplet = 0;
        auto& frac = fractions[static_cast<std::size_t>(r)];
        for (long k = 1; k <= cfg.sweeps; ++k) {
            chain.sweep();
            if (k % 100000 == 0) {
                s.max_energy_drift = std::max(s.max_energy_drift, chain.config().energy_drift());
            }
            if (k % thin != 0) continue;
            Measurement meas{r, k, droplet_stats(chain.config().spins(), params, dt)};
            const auto& d = meas.report;
            ++s.measurements;
            count_b[static_cast<std::size_t>(r)] += d.is_b;
            count_s1[static_cast<std::size_t>(r)] += d.in_s1;
            frac.push_back(d.largest_fraction);
            if (d.has_droplet && d.largest_hi - d.largest_lo + 1 < params.size()) {
                inside += d.block_inside;
                outside += d.block_outside;
                ++with_droplet;
            }
            if (sink) sink(meas);
        }
        s.max_energy_drift = std::max(s.max_energy_drift, chain.config().energy_drift());
        const double m = static_cast<double>(std::max(1L, s.measurements));
        s.freq_b = count_b[static_cast<std::size_t>(r)] / m;
        s.freq_s1 = count_s1[static_cast<std::size_t>(r)] / m;
        s.median_fraction = median(frac);
        s.mean_fraction = frac.empty() ? 0.0 : std::accumulate(frac.begin(), frac.end(), 0.0) / frac.size();
        s.mean_inside = with_droplet ? inside / with_droplet : 0.0;
        s.mean_outside = with_droplet ? outside / with_droplet : 0.0;
        const auto props = chain.proposals() - proposals0;
        s.acceptance = props ? static_cast<double>(chain.accepted() - accepted0) / static_cast<double>(props) : 0.0;
    };

    const unsigned hw = std::max(1u, std::thread::hardware_concurrency());
    if (sink || hw == 1 || cfg.replicas == 1) {
        for (int r = 0; r < cfg.replicas; ++r) run(r);
    } else {
        std::mutex mu;
        int next = 0;
        std::vector<std::thread> pool;
        for (unsigned w = 0; w < std::min<unsigned>(hw, static_cast<unsigned>(cfg.replicas)); ++w) {
            pool.emplace_back([&] {
                for (;;) {
                    int r;
                    {
                        std::lock_guard<std::mutex> lock(mu);
                        if (next >= cfg.replicas) return;
                        r = next++;
                    }
                    run(r);
                }
            });
        }
        for (auto& t : pool) t.join();
    }

    long total = 0;
    long b = 0;
    long s1 = 0;
    std::vector<double> pooled;
    double inside = 0.0;
    double outside = 0.0;
    for (int r = 0; r < cfg.replicas; ++r) {
        total += summaries[static_cast<std::size_t>(r)].measurements;
        b += count_b[static_cast<std::size_t>(r)];
        s1 += count_s1[static_cast<std::size_t>(r)];
        pooled.insert(pooled.end(), fractions[static_cast<std::size_t>(r)].begin(),
                      fractions[static_cast<std::size_t>(r)].end());
        inside += summaries[static_cast<std::size_t>(r)].mean_inside;
        outside += summaries[static_cast<std::size_t>(r)].mean_outside;
    }
    rep.replicas = std::move(summaries);
    rep.freq_b = total ? static_cast<double>(b) / total : 0.0;
    rep.freq_s1 = total ? static_cast<double>(s1) / total : 0.0;
    rep.median_fraction = median(std::move(pooled));
    rep.mean_inside = cfg.replicas ? inside / cfg.replicas : 0.0;
    rep.mean_outside = cfg.replicas ? outside / cfg.replicas : 0.0;
    return rep;
}

}  // namespace lrising
