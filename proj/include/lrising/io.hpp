#pragma once

#include <cstdint>
#include <istream>
#include <map>
#include <ostream>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "lrising/cluster.hpp"
#include "lrising/contours.hpp"
#include "lrising/model.hpp"
#include "lrising/oracle.hpp"
#include "lrising/sampler.hpp"
#include "lrising/triangles.hpp"

namespace lrising {

class ParseError : public std::runtime_error {
public:
    ParseError(int line, const std::string& what)
        : std::runtime_error("line " + std::to_string(line) + ": " + what), line_(line) {}
    int line() const { return line_; }

private:
    int line_;
};

/// One line of '+'/'-' characters, site -L leftmost; odd length >= 3.
Spins parse_spin_line(std::string_view line, int line_no = 1);
std::string format_spins(std::span<const std::int8_t> spins);

/// Reads every non-blank line that does not start with '#'. All lines must share one length.
std::vector<Spins> read_spin_lines(std::istream& in);

/// %.17g, which round-trips any double.
std::string format_double(double v);

/// Triangle records {i, j, mass, external, parent}.
nlohmann::json triangles_json(const TriangleFamily& family);
/// Triangle records plus {contour_id, norm_alpha}.
nlohmann::json contours_json(const TriangleFamily& family, const ContourFamily& contours, double alpha);
nlohmann::json droplet_json(const DropletReport& report);
nlohmann::json measurement_json(const Measurement& m);

/// Flat key=value configuration. Unknown keys are kept in `options`.
struct RunConfig {
    ModelParams params;
    double m = 0.0;
    std::uint64_t seed = 1;
    std::string out;
    std::map<std::string, std::string> options;

    friend bool operator==(const RunConfig& a, const RunConfig& b);
};

class ConfigError : public std::runtime_error {
public:
    explicit ConfigError(std::vector<std::string> problems);
    const std::vector<std::string>& problems() const { return problems_; }

private:
    std::vector<std::string> problems_;
};

/// Applies `key` = `value`; returns an error message, empty on success.
std::string apply_config_value(RunConfig& cfg, const std::string& key, const std::string& value);

/// Parses a key=value document ('#' comments). Collects every problem before throwing ConfigError.
RunConfig parse_config(std::istream& in);
RunConfig parse_config_string(const std::string& text);
std::string format_config(const RunConfig& cfg);

/// Every validation failure of the model parameters and the target magnetization.
std::vector<std::string> config_problems(const RunConfig& cfg);

/// RFC 4180 writer: CRLF line ends, fields quoted when they hold a comma, quote or line break.
class CsvWriter {
public:
    explicit CsvWriter(std::ostream& out) : out_(out) {}
    void row(const std::vector<std::string>& fields);

private:
    std::ostream& out_;
};

std::string csv_escape(std::string_view field);
/// Splits a CSV document into rows of fields.
std::vector<std::vector<std::string>> parse_csv(std::string_view text);

/// Defaults for event arguments that are not given explicitly.
struct EventContext {
    ModelParams params;
    double m = 0.0;
    double m_beta = 1.0;
};

/// Parses a comma-separated event list. Items:
///   all
///   window([m=..][,eps0=..][,mbeta=..]) half-width eps0 * mbeta
///   small([eps_s=..])                   threshold eps_s |Lambda|
///   s1([rho=..][,eps_s=..][,eps_c=..])  and sB(...) with the same arguments
///   class(T=i:j;k:l[,eps_s=..])         T lists triangle flip pairs
///   vs(T=i:j;..[,eps_s=..])
///   not(<item>)
/// Throws std::invalid_argument naming the offending item.
std::vector<EventSpec> parse_events(std::string_view text, const EventContext& ctx);

/// One row per (event, observable): event, observable, value, count.
void write_oracle_csv(CsvWriter& csv, const std::vector<OracleResult>& results);

void write_envelope_header(CsvWriter& csv);
void write_envelope_row(CsvWriter& csv, const Envelope& e, const ModelParams& params, double exact,
                        double slack);

void write_experiment_csv(CsvWriter& csv, const ExperimentReport& report);

}  // namespace lrising
