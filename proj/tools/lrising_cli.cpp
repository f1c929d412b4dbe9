#include <CLI11.hpp>

#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <memory>
#include <sstream>
#include <string>

#include "lrising/cluster.hpp"
#include "lrising/contours.hpp"
#include "lrising/io.hpp"
#include "lrising/oracle.hpp"
#include "lrising/sampler.hpp"
#include "lrising/suites.hpp"
#include "lrising/triangles.hpp"

using namespace lrising;

namespace {

constexpr int kPass = 0;
constexpr int kFail = 1;
constexpr int kUsage = 2;

struct UsageError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Output goes to --out (a directory for sample, a file otherwise) or to stdout.
class Output {
public:
    explicit Output(const std::string& path) {
        if (!path.empty()) {
            file_ = std::make_unique<std::ofstream>(path, std::ios::binary);
            if (!*file_) throw UsageError("cannot open " + path);
        }
    }
    std::ostream& stream() { return file_ ? *file_ : std::cout; }

private:
    std::unique_ptr<std::ofstream> file_;
};

std::string opt(const RunConfig& cfg, const std::string& key, const std::string& fallback) {
    const auto f = cfg.options.find(key);
    return f == cfg.options.end() ? fallback : f->second;
}

double opt_double(const RunConfig& cfg, const std::string& key, double fallback) {
    const auto s = opt(cfg, key, "");
    if (s.empty()) return fallback;
    try {
        std::size_t used = 0;
        const double v = std::stod(s, &used);
        if (used != s.size()) throw std::invalid_argument(s);
        return v;
    } catch (const std::exception&) {
        throw UsageError(key + ": not a number: '" + s + "'");
    }
}

long opt_long(const RunConfig& cfg, const std::string& key, long fallback) {
    const auto s = opt(cfg, key, "");
    if (s.empty()) return fallback;
    try {
        std::size_t used = 0;
        const long v = std::stol(s, &used);
        if (used != s.size()) throw std::invalid_argument(s);
        return v;
    } catch (const std::exception&) {
        throw UsageError(key + ": not an integer: '" + s + "'");
    }
}

nlohmann::json header_json(const RunConfig& cfg, const std::string& command) {
    return {{"header", {{"command", command}, {"seed", cfg.seed}, {"config", format_config(cfg)}}}};
}

int cmd_geometry(const RunConfig& cfg, const std::string& input) {
    std::vector<Spins> lines;
    {
        std::ifstream file;
        std::istream* in = &std::cin;
        if (input != "-") {
            file.open(input);
            if (!file) throw UsageError("cannot open " + input);
            in = &file;
        }
        lines = read_spin_lines(*in);
    }
    Output out(cfg.out);
    const double m_beta = opt_double(cfg, "mbeta", 1.0);
    long bad = 0;
    for (std::size_t k = 0; k < lines.size(); ++k) {
        const auto& s = lines[k];
        ModelParams p = cfg.params;
        p.L = static_cast<int>(s.size() / 2);
        const auto fam = build_triangles(s);
        const auto contours = group_contours(fam.triangles, p.C);
        const auto inv = check_family_invariants(fam);
        const bool round_trip = reconstruct_spins(fam) == s;
        const auto cc = check_contour_family(fam.triangles, contours);
        const bool ok = inv.ok() && round_trip && cc.ok();
        bad += !ok;
        const auto rt = rho_targets(std::clamp(cfg.m, -m_beta, m_beta), m_beta, p.L);
        const auto report = droplet_stats(fam, s, p, {cfg.m, rt.rho_lattice, m_beta});
        nlohmann::json rec;
        rec["index"] = k;
        rec["spins"] = format_spins(s);
        rec["triangles"] = triangles_json(fam);
        rec["contours"] = contours_json(fam, contours, p.alpha);
        rec["droplet"] = droplet_json(report);
        rec["checks_pass"] = ok;
        if (!ok) rec["violation"] = inv.violation.empty() ? cc.violation : inv.violation;
        out.stream() << rec.dump() << '\n';
    }
    std::cerr << lines.size() << " configurations, " << bad << " failing invariant checks\n";
    return bad == 0 ? kPass : kFail;
}

int cmd_check(const RunConfig& cfg, const std::string& suite) {
    const auto& names = suite_names();
    if (std::find(names.begin(), names.end(), suite) == names.end()) throw UsageError("unknown suite: " + suite);
    const auto rep = run_suite(suite, cfg.params, cfg.seed);
    Output out(cfg.out);
    auto j = suite_json(rep);
    j["config"] = format_config(cfg);
    out.stream() << j.dump(2) << '\n';
    for (const auto& c : rep.checks) {
        std::cerr << (c.pass ? "PASS " : "FAIL ") << c.name << ": " << c.detail << '\n';
    }
    return rep.pass() ? kPass : kFail;
}

int cmd_enumerate(const RunConfig& cfg) {
    if (cfg.params.L > 12) throw UsageError("enumerate needs L <= 12");
    EventContext ctx{cfg.params, cfg.m, opt_double(cfg, "mbeta", 1.0)};
    std::vector<EventSpec> evs;
    try {
        evs = parse_events(opt(cfg, "events", "all"), ctx);
    } catch (const std::invalid_argument& e) {
        throw UsageError(e.what());
    }
    OracleOptions o;
    o.field_r = opt_double(cfg, "field", 0.0);
    o.allow_empty = true;
    const auto res = enumerate(cfg.params, evs, o);
    Output out(cfg.out);
    CsvWriter csv(out.stream());
    write_oracle_csv(csv, res);
    return kPass;
}

int cmd_cluster(const RunConfig& cfg) {
    const auto& p = cfg.params;
    if (p.L > 12) throw UsageError("cluster needs L <= 12 for the exact comparison");
    const int L = p.L;
    const Triangle t0 = smallest_large_droplet(p);
    const double rho = static_cast<double>(t0.mass()) / p.size();
    const EventSpec evs[] = {events::all(), events::class_of({t0}, p.eps_s() * p.size())};
    OracleOptions o;
    o.two_point = true;
    o.histogram = false;
    o.allow_empty = true;
    const auto res = enumerate(p, evs, o);
    Output out(cfg.out);
    CsvWriter csv(out.stream());
    write_envelope_header(csv);
    const double slack = finite_volume_slack(p, L);
    const auto lz = logZ_leading(p, L);
    write_envelope_row(csv, lz.uniform, p, res[0].logZ, 0.0);
    write_envelope_row(csv, lz.finite, p, res[0].logZ, 0.0);
    write_envelope_row(csv, m_beta_leading(p), p, res[0].site_mean[static_cast<std::size_t>(L)], slack);
    if (!res[1].empty()) {
        const auto cm = conditional_m_leading(rho, p, L);
        write_envelope_row(csv, cm, p, res[1].mean_m, cm.half_width);
        for (int d = 2; d <= 4; ++d) {
            const int i = t0.lo() + 2;
            const int j = i + d;
            if (j > t0.hi() - 2) break;
            auto e = two_point_leading(i, j, t0, 0.0, p, L);
            e.quantity = "two_point(" + std::to_string(i) + "," + std::to_string(j) + ")";
            write_envelope_row(csv, e, p, res[1].truncated(i + L, j + L), 0.0);
        }
    }
    return kPass;
}

int cmd_sample(const RunConfig& cfg) {
    ExperimentConfig ec;
    ec.m = cfg.m;
    ec.seed = cfg.seed;
    ec.replicas = static_cast<int>(opt_long(cfg, "replicas", ec.replicas));
    ec.sweeps = opt_long(cfg, "sweeps", ec.sweeps);
    ec.burn_in = opt_long(cfg, "burn_in", ec.burn_in);
    ec.thin = opt_long(cfg, "thin", ec.thin);
    try {
        ec.dynamics = parse_dynamics(opt(cfg, "dynamics", to_string(ec.dynamics)));
    } catch (const std::invalid_argument& e) {
        throw UsageError(e.what());
    }
    const double mb = opt_double(cfg, "mbeta", -1.0);
    if (mb > 0.0) {
        ec.m_beta = mb;
    } else {
        const auto est = estimate_m_beta(cfg.params, opt_long(cfg, "mbeta_sweeps", 2000), 4, cfg.seed);
        ec.m_beta = est.mean;
    }
    if (std::abs(ec.m) > ec.m_beta) throw UsageError("|m| exceeds the magnetization estimate");

    std::unique_ptr<std::ofstream> jsonl_file;
    std::ostream* jsonl = &std::cout;
    if (!cfg.out.empty()) {
        std::filesystem::create_directories(cfg.out);
        std::ofstream(cfg.out + "/run.cfg", std::ios::binary) << format_config(cfg);
        jsonl_file = std::make_unique<std::ofstream>(cfg.out + "/measurements.jsonl", std::ios::binary);
        jsonl = jsonl_file.get();
    }
    auto header = header_json(cfg, "sample");
    header["header"]["m_beta"] = ec.m_beta;
    *jsonl << header.dump() << '\n';
    const auto rep = phase_separation_experiment(cfg.params, ec, [&](const Measurement& m) {
        *jsonl << measurement_json(m).dump() << '\n';
    });
    for (const auto& w : rep.warnings) std::cerr << "warning: " << w << '\n';
    if (!cfg.out.empty()) {
        std::ofstream f(cfg.out + "/summary.csv", std::ios::binary);
        CsvWriter csv(f);
        write_experiment_csv(csv, rep);
    }
    std::cerr << "freq_b=" << format_double(rep.freq_b) << " median_fraction=" << format_double(rep.median_fraction)
              << '\n';
    return kPass;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Long-range Ising droplet lab"};
    app.require_subcommand(1);

    std::string config_path;
    std::map<std::string, std::string> flags;
    const std::pair<const char*, const char*> model_flags[] = {
        {"alpha", "kernel exponent"}, {"beta", "inverse temperature"}, {"bigJ", "nearest-neighbour enhancement J"},
        {"L", "window half-width"},   {"m", "target magnetization"},   {"a", "exponent of eps0"},
        {"gamma", "exponent of eps_s"}, {"nu", "exponent of eps_c"},   {"C", "contour separation constant"},
        {"seed", "RNG seed"},         {"out", "output path"},
    };
    for (const auto& [name, help] : model_flags) {
        app.add_option(std::string("--") + name, flags[name], help);
    }
    app.add_option("--config", config_path, "key=value configuration file");

    auto* geometry = app.add_subcommand("geometry", "triangles, contours and droplet report per spin line");
    std::string input = "-";
    geometry->add_option("input", input, "spin file, '-' for stdin");
    geometry->add_option("--mbeta", flags["mbeta"], "magnetization used by the droplet targets");

    auto* check = app.add_subcommand("check", "run a verification suite");
    std::string suite;
    check->add_option("suite", suite, "bijection|peierls|counting|entropy|merge|laplace|cluster")->required();

    auto* sample = app.add_subcommand("sample", "phase-separation experiment");
    for (const char* k : {"replicas", "sweeps", "burn_in", "thin", "dynamics", "mbeta", "mbeta_sweeps"}) {
        sample->add_option(std::string("--") + k, flags[k]);
    }

    auto* enumerate_cmd = app.add_subcommand("enumerate", "exact conditional expectations");
    enumerate_cmd->add_option("--events", flags["events"], "event list, e.g. all,window(m=0,eps0=0.2)");
    enumerate_cmd->add_option("--field", flags["field"], "tilt r");
    enumerate_cmd->add_option("--mbeta", flags["mbeta"], "magnetization used by window and droplet events");

    auto* cluster = app.add_subcommand("cluster", "leading-order envelopes against the exact oracle");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int rc = app.exit(e);
        return rc == 0 ? kPass : kUsage;
    }

    try {
        RunConfig cfg;
        if (!config_path.empty()) {
            std::ifstream in(config_path);
            if (!in) throw UsageError("cannot open " + config_path);
            cfg = parse_config(in);
        }
        std::vector<std::string> problems;
        for (const auto& [k, v] : flags) {
            if (v.empty()) continue;
            auto msg = apply_config_value(cfg, k, v);
            if (!msg.empty()) problems.push_back(msg);
        }
        for (auto& p : config_problems(cfg)) problems.push_back(std::move(p));
        if (!problems.empty()) throw ConfigError(problems);

        if (*geometry) return cmd_geometry(cfg, input);
        if (*check) return cmd_check(cfg, suite);
        if (*sample) return cmd_sample(cfg);
        if (*enumerate_cmd) return cmd_enumerate(cfg);
        if (*cluster) return cmd_cluster(cfg);
    } catch (const ConfigError& e) {
        for (const auto& p : e.problems()) std::cerr << "config: " << p << '\n';
        return kUsage;
    } catch (const UsageError& e) {
        std::cerr << "usage: " << e.what() << '\n';
        return kUsage;
    } catch (const ParseError& e) {
        std::cerr << "input: " << e.what() << '\n';
        return kUsage;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kFail;
    }
    return kUsage;
}
