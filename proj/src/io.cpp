#include "lrising/io.hpp"

#include <charconv>
#include <cmath>
#include <cstdio>
#include <numbers>
#include <sstream>

namespace lrising {

namespace {

std::string_view trim(std::string_view s) {
    const auto b = s.find_first_not_of(" \t\r\n");
    if (b == std::string_view::npos) return {};
    const auto e = s.find_last_not_of(" \t\r\n");
    return s.substr(b, e - b + 1);
}

// Splits at `sep` outside parentheses.
std::vector<std::string_view> split_top(std::string_view s, char sep) {
    std::vector<std::string_view> out;
    int depth = 0;
    std::size_t start = 0;
    for (std::size_t k = 0; k < s.size(); ++k) {
        if (s[k] == '(') ++depth;
        if (s[k] == ')') --depth;
        if (depth < 0) throw std::invalid_argument("unbalanced ')' in: " + std::string(s));
        if (s[k] == sep && depth == 0) {
            out.push_back(trim(s.substr(start, k - start)));
            start = k + 1;
        }
    }
    if (depth != 0) throw std::invalid_argument("unbalanced '(' in: " + std::string(s));
    out.push_back(trim(s.substr(start)));
    return out;
}

bool parse_double(std::string_view s, double& v) {
    s = trim(s);
    if (s.empty()) return false;
    const auto r = std::from_chars(s.data(), s.data() + s.size(), v);
    return r.ec == std::errc() && r.ptr == s.data() + s.size() && std::isfinite(v);
}

template <typename Int>
bool parse_int(std::string_view s, Int& v) {
    s = trim(s);
    if (s.empty()) return false;
    const auto r = std::from_chars(s.data(), s.data() + s.size(), v);
    return r.ec == std::errc() && r.ptr == s.data() + s.size();
}

}  // namespace

Spins parse_spin_line(std::string_view line, int line_no) {
    line = trim(line);
    Spins s;
    s.reserve(line.size());
    for (std::size_t k = 0; k < line.size(); ++k) {
        if (line[k] == '+') {
            s.push_back(1);
        } else if (line[k] == '-') {
            s.push_back(-1);
        } else {
            throw ParseError(line_no, "unexpected character '" + std::string(1, line[k]) + "' at column " +
                                          std::to_string(k + 1));
        }
    }
    if (s.size() < 3 || s.size() % 2 == 0) {
        throw ParseError(line_no, "length " + std::to_string(s.size()) + " is not 2L+1 with L >= 1");
    }
    return s;
}

std::string format_spins(std::span<const std::int8_t> spins) {
    std::string out(spins.size(), '+');
    for (std::size_t k = 0; k < spins.size(); ++k) {
        if (spins[k] < 0) out[k] = '-';
    }
    return out;
}

std::vector<Spins> read_spin_lines(std::istream& in) {
    std::vector<Spins> out;
    std::string line;
    int line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        const auto t = trim(line);
        if (t.empty() || t.front() == '#') continue;
        out.push_back(parse_spin_line(t, line_no));
        if (out.size() > 1 && out.back().size() != out.front().size()) {
            throw ParseError(line_no, "length differs from the first configuration");
        }
    }
    return out;
}

std::string format_double(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

nlohmann::json triangles_json(const TriangleFamily& family) {
    auto arr = nlohmann::json::array();
    for (std::size_t k = 0; k < family.size(); ++k) {
        const auto& t = family.triangles[k];
        nlohmann::json rec;
        rec["i"] = t.left;
        rec["j"] = t.right;
        rec["mass"] = t.mass();
        rec["external"] = family.is_external(k);
        if (family.parent[k] < 0) {
            rec["parent"] = nullptr;
        } else {
            rec["parent"] = family.parent[k];
        }
        arr.push_back(std::move(rec));
    }
    return arr;
}

nlohmann::json contours_json(const TriangleFamily& family, const ContourFamily& contours, double alpha) {
    auto arr = triangles_json(family);
    const auto labels = contour_labels(family.triangles, contours);
    for (std::size_t k = 0; k < arr.size(); ++k) {
        const int id = labels[k];
        arr[k]["contour_id"] = id;
        arr[k]["norm_alpha"] = contours.contours[static_cast<std::size_t>(id)].norm_alpha(alpha);
    }
    return arr;
}

nlohmann::json droplet_json(const DropletReport& r) {
    nlohmann::json j;
    j["m_emp"] = r.m_emp;
    j["external_masses"] = r.external_masses;
    j["external_mass"] = r.external_mass;
    j["rho_emp"] = r.rho_emp;
    j["n0"] = r.n0;
    j["in_s1"] = r.in_s1;
    j["is_b"] = r.is_b;
    j["in_window"] = r.in_window;
    j["largest_lo"] = r.largest_lo;
    j["largest_hi"] = r.largest_hi;
    j["largest_fraction"] = r.largest_fraction;
    j["block_inside"] = r.block_inside;
    j["block_outside"] = r.block_outside;
    j["has_droplet"] = r.has_droplet;
    return j;
}

nlohmann::json measurement_json(const Measurement& m) {
    auto j = droplet_json(m.report);
    j["chain"] = m.chain;
    j["sweep"] = m.sweep;
    return j;
}

bool operator==(const RunConfig& a, const RunConfig& b) {
    const auto& p = a.params;
    const auto& q = b.params;
    return p.alpha == q.alpha && p.J == q.J && p.beta == q.beta && p.L == q.L && p.C == q.C && p.a == q.a &&
           p.gamma == q.gamma && p.nu == q.nu && a.m == b.m && a.seed == b.seed && a.out == b.out &&
           a.options == b.options;
}

namespace {

std::string join(const std::vector<std::string>& v) {
    std::string s;
    for (const auto& x : v) s += (s.empty() ? "" : "; ") + x;
    return s;
}

}  // namespace

ConfigError::ConfigError(std::vector<std::string> problems)
    : std::runtime_error("invalid configuration: " + join(problems)), problems_(std::move(problems)) {}

std::string apply_config_value(RunConfig& cfg, const std::string& key, const std::string& value) {
    auto real = [&](double& slot) -> std::string {
        double v = 0.0;
        if (!parse_double(value, v)) return key + ": not a finite number: '" + value + "'";
        slot = v;
        return {};
    };
    if (key == "alpha") return real(cfg.params.alpha);
    if (key == "beta") return real(cfg.params.beta);
    if (key == "bigJ") return real(cfg.params.J);
    if (key == "C") return real(cfg.params.C);
    if (key == "a") return real(cfg.params.a);
    if (key == "gamma") return real(cfg.params.gamma);
    if (key == "nu") return real(cfg.params.nu);
    if (key == "m") return real(cfg.m);
    if (key == "L") {
        int v = 0;
        if (!parse_int(value, v)) return "L: not an integer: '" + value + "'";
        cfg.params.L = v;
        return {};
    }
    if (key == "seed") {
        std::uint64_t v = 0;
        if (!parse_int(value, v)) return "seed: not an unsigned integer: '" + value + "'";
        cfg.seed = v;
        return {};
    }
    if (key == "out") {
        cfg.out = value;
        return {};
    }
    if (key.empty()) return "empty key";
    cfg.options[key] = value;
    return {};
}

RunConfig parse_config(std::istream& in) {
    RunConfig cfg;
    std::vector<std::string> problems;
    std::string line;
    int line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        const auto t = trim(line);
        if (t.empty() || t.front() == '#') continue;
        const auto eq = t.find('=');
        if (eq == std::string_view::npos) {
            problems.push_back("line " + std::to_string(line_no) + ": expected key=value");
            continue;
        }
        const std::string key(trim(t.substr(0, eq)));
        const std::string value(trim(t.substr(eq + 1)));
        auto msg = apply_config_value(cfg, key, value);
        if (!msg.empty()) problems.push_back("line " + std::to_string(line_no) + ": " + msg);
    }
    if (!problems.empty()) throw ConfigError(std::move(problems));
    return cfg;
}

RunConfig parse_config_string(const std::string& text) {
    std::istringstream in(text);
    return parse_config(in);
}

std::string format_config(const RunConfig& cfg) {
    std::ostringstream out;
    const auto& p = cfg.params;
    out << "alpha=" << format_double(p.alpha) << '\n'
        << "bigJ=" << format_double(p.J) << '\n'
        << "beta=" << format_double(p.beta) << '\n'
        << "L=" << p.L << '\n'
        << "C=" << format_double(p.C) << '\n'
        << "a=" << format_double(p.a) << '\n'
        << "gamma=" << format_double(p.gamma) << '\n'
        << "nu=" << format_double(p.nu) << '\n'
        << "m=" << format_double(cfg.m) << '\n'
        << "seed=" << cfg.seed << '\n'
        << "out=" << cfg.out << '\n';
    for (const auto& [k, v] : cfg.options) out << k << '=' << v << '\n';
    return out.str();
}

std::vector<std::string> config_problems(const RunConfig& cfg) {
    std::vector<std::string> out;
    const auto& p = cfg.params;
    if (!(p.alpha > 0.0 && p.alpha < kAlphaPlus)) out.push_back("alpha must lie in (0, alpha_+)");
    if (!(p.J >= 0.0)) out.push_back("bigJ must be >= 0");
    if (!(p.beta >= 0.0)) out.push_back("beta must be >= 0");
    if (p.L < 1) out.push_back("L must be >= 1");
    if (!(p.C > std::numbers::pi * std::numbers::pi / 3.0)) out.push_back("C must exceed pi^2/3");
    if (!(p.a > 0.0)) out.push_back("a must be > 0");
    if (!(p.gamma > 0.0)) out.push_back("gamma must be > 0");
    if (!(p.nu > 0.0)) out.push_back("nu must be > 0");
    if (!(cfg.m > -1.0 && cfg.m < 1.0)) out.push_back("m must lie in (-1, 1)");
    if (out.empty()) {
        try {
            p.validate();
        } catch (const std::invalid_argument& e) {
            out.push_back(e.what());
        }
    }
    return out;
}

std::string csv_escape(std::string_view field) {
    if (field.find_first_of(",\"\r\n") == std::string_view::npos) return std::string(field);
    std::string out = "\"";
    for (char c : field) {
        if (c == '"') out += '"';
        out += c;
    }
    out += '"';
    return out;
}

void CsvWriter::row(const std::vector<std::string>& fields) {
    for (std::size_t k = 0; k < fields.size(); ++k) {
        if (k) out_ << ',';
        out_ << csv_escape(fields[k]);
    }
    out_ << "\r\n";
}

std::vector<std::vector<std::string>> parse_csv(std::string_view text) {
    std::vector<std::vector<std::string>> rows;
    std::vector<std::string> row;
    std::string field;
    bool quoted = false;
    bool any = false;
    for (std::size_t k = 0; k < text.size(); ++k) {
        const char c = text[k];
        if (quoted) {
            if (c == '"') {
                if (k + 1 < text.size() && text[k + 1] == '"') {
                    field += '"';
                    ++k;
                } else {
                    quoted = false;
                }
            } else {
                field += c;
            }
            continue;
        }
        any = true;
        if (c == '"') {
            quoted = true;
        } else if (c == ',') {
            row.push_back(std::move(field));
            field.clear();
        } else if (c == '\r' || c == '\n') {
            if (c == '\r' && k + 1 < text.size() && text[k + 1] == '\n') ++k;
            row.push_back(std::move(field));
            field.clear();
            rows.push_back(std::move(row));
            row.clear();
            any = false;
        } else {
            field += c;
        }
    }
    if (quoted) throw std::invalid_argument("unterminated quoted CSV field");
    if (any || !field.empty() || !row.empty()) {
        row.push_back(std::move(field));
        rows.push_back(std::move(row));
    }
    return rows;
}

namespace {

struct Item {
    std::string name;
    std::map<std::string, std::string> args;
    std::string inner;  // raw argument text, for not(...)
};

Item parse_item(std::string_view text) {
    Item it;
    const auto open = text.find('(');
    if (open == std::string_view::npos) {
        it.name = std::string(trim(text));
        return it;
    }
    if (text.back() != ')') throw std::invalid_argument("event item must end with ')': " + std::string(text));
    it.name = std::string(trim(text.substr(0, open)));
    it.inner = std::string(trim(text.substr(open + 1, text.size() - open - 2)));
    if (it.name == "not" || it.inner.empty()) return it;
    for (auto arg : split_top(it.inner, ',')) {
        const auto eq = arg.find('=');
        if (eq == std::string_view::npos) throw std::invalid_argument("expected key=value in: " + std::string(text));
        it.args[std::string(trim(arg.substr(0, eq)))] = std::string(trim(arg.substr(eq + 1)));
    }
    return it;
}

double number_arg(const Item& it, const std::string& key, double fallback) {
    const auto f = it.args.find(key);
    if (f == it.args.end()) return fallback;
    double v = 0.0;
    if (!parse_double(f->second, v)) {
        throw std::invalid_argument(it.name + ": argument " + key + " is not a number: '" + f->second + "'");
    }
    return v;
}

std::vector<Triangle> triangles_arg(const Item& it) {
    const auto f = it.args.find("T");
    if (f == it.args.end()) throw std::invalid_argument(it.name + ": missing T=i:j;...");
    std::vector<Triangle> out;
    if (trim(f->second).empty()) return out;
    for (auto pair : split_top(f->second, ';')) {
        const auto colon = pair.find(':');
        Triangle t;
        if (colon == std::string_view::npos || !parse_int(pair.substr(0, colon), t.left) ||
            !parse_int(pair.substr(colon + 1), t.right) || t.right <= t.left) {
            throw std::invalid_argument(it.name + ": bad triangle '" + std::string(pair) + "'");
        }
        out.push_back(t);
    }
    return out;
}

void check_keys(const Item& it, std::initializer_list<const char*> allowed) {
    for (const auto& [k, v] : it.args) {
        bool ok = false;
        for (const char* a : allowed) ok = ok || k == a;
        if (!ok) throw std::invalid_argument(it.name + ": unknown argument '" + k + "'");
    }
}

EventSpec build_event(std::string_view text, const EventContext& ctx) {
    const Item it = parse_item(text);
    const auto& p = ctx.params;
    const double n = p.size();
    EventSpec e;
    if (it.name == "all") {
        check_keys(it, {});
        e = events::all();
    } else if (it.name == "window") {
        check_keys(it, {"m", "eps0", "mbeta"});
        e = events::window(number_arg(it, "m", ctx.m),
                           number_arg(it, "eps0", p.eps0()) * number_arg(it, "mbeta", ctx.m_beta));
    } else if (it.name == "small") {
        check_keys(it, {"eps_s"});
        e = events::small(number_arg(it, "eps_s", p.eps_s()) * n);
    } else if (it.name == "s1" || it.name == "sB") {
        check_keys(it, {"rho", "eps_s", "eps_c"});
        const double rho_default =
            it.args.count("rho") ? 0.0 : rho_targets(ctx.m, ctx.m_beta, p.L).rho_lattice;
        const double rho = number_arg(it, "rho", rho_default);
        const double eps_s = number_arg(it, "eps_s", p.eps_s()) * n;
        const double eps_c = number_arg(it, "eps_c", p.eps_c());
        e = it.name == "s1" ? events::s1(rho, eps_s, eps_c) : events::s_b(rho, eps_s, eps_c);
    } else if (it.name == "class" || it.name == "vs") {
        check_keys(it, {"T", "eps_s"});
        const double eps_s = number_arg(it, "eps_s", p.eps_s()) * n;
        e = it.name == "class" ? events::class_of(triangles_arg(it), eps_s)
                               : events::very_small(triangles_arg(it), eps_s);
    } else if (it.name == "not") {
        e = events::complement(build_event(it.inner, ctx));
    } else {
        throw std::invalid_argument("unknown event '" + it.name + "'");
    }
    e.name = std::string(trim(text));
    return e;
}

}  // namespace

std::vector<EventSpec> parse_events(std::string_view text, const EventContext& ctx) {
    std::vector<EventSpec> out;
    for (auto item : split_top(text, ',')) {
        if (item.empty()) throw std::invalid_argument("empty event item in: " + std::string(text));
        out.push_back(build_event(item, ctx));
    }
    return out;
}

void write_oracle_csv(CsvWriter& csv, const std::vector<OracleResult>& results) {
    csv.row({"event", "observable", "value", "count"});
    for (const auto& r : results) {
        const auto count = std::to_string(r.count);
        csv.row({r.event, "logZ", format_double(r.logZ), count});
        csv.row({r.event, "log_prob", format_double(r.log_prob), count});
        csv.row({r.event, "mean_m", format_double(r.mean_m), count});
        const int L = static_cast<int>(r.site_mean.size() / 2);
        for (std::size_t k = 0; k < r.site_mean.size(); ++k) {
            csv.row({r.event, "site_mean(" + std::to_string(static_cast<int>(k) - L) + ")",
                     format_double(r.site_mean[k]), count});
        }
        for (std::size_t k = 0; k < r.histogram.size(); ++k) {
            csv.row({r.event, "minus_count(" + std::to_string(k) + ")", format_double(r.histogram[k]), count});
        }
    }
}

void write_envelope_header(CsvWriter& csv) {
    csv.row({"quantity", "center", "half_width", "kind", "informative", "alpha", "bigJ", "beta", "L", "C",
             "exact", "slack", "contained"});
}

void write_envelope_row(CsvWriter& csv, const Envelope& e, const ModelParams& p, double exact, double slack) {
    csv.row({e.quantity, format_double(e.center), format_double(e.half_width), e.kind,
             e.informative ? "true" : "false", format_double(p.alpha), format_double(p.J), format_double(p.beta),
             std::to_string(p.L), format_double(p.C), format_double(exact), format_double(slack),
             e.contains(exact, slack) ? "true" : "false"});
}

void write_experiment_csv(CsvWriter& csv, const ExperimentReport& rep) {
    csv.row({"chain", "start", "seed", "measurements", "freq_b", "freq_s1", "median_fraction", "mean_fraction",
             "mean_inside", "mean_outside", "acceptance", "max_energy_drift"});
    for (const auto& r : rep.replicas) {
        csv.row({std::to_string(r.chain), to_string(r.start), std::to_string(r.seed),
                 std::to_string(r.measurements), format_double(r.freq_b), format_double(r.freq_s1),
                 format_double(r.median_fraction), format_double(r.mean_fraction), format_double(r.mean_inside),
                 format_double(r.mean_outside), format_double(r.acceptance), format_double(r.max_energy_drift)});
    }
}

}  // namespace lrising
