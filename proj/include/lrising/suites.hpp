#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include <json.hpp>

#include "lrising/model.hpp"
#include "lrising/triangles.hpp"

namespace lrising {

struct CheckLine {
    std::string name;
    bool pass = false;
    std::string detail;
};

struct SuiteReport {
    std::string suite;
    std::vector<CheckLine> checks;
    nlohmann::json artifact = nlohmann::json::object();

    bool pass() const;
    void add(std::string name, bool pass, std::string detail);
};

struct BijectionOptions {
    int exhaustive_L = 7;
    int random_L = 512;
    long random_count = 1000000;
    std::uint64_t seed = 1;
};
/// Spin/triangle round trip and the triangle invariants, exhaustive and on random lines.
SuiteReport bijection_suite(const BijectionOptions& opt);

struct PeierlsOptions {
    std::vector<double> alphas = {0.1, 0.3, 0.5};
    int L = 6;
    int contour_mass = 6;
    long sampled_pairs = 10000;
    int pairs_L = 2000;
    std::uint64_t seed = 1;
};
/// Lower bounds on configuration, contour and contour-removal energies; J and C from `params`.
SuiteReport peierls_suite(const ModelParams& params, const PeierlsOptions& opt);

struct CountingOptions {
    int mass_max = 6;
    double b = -1.0;  // < 0: the census threshold
};
SuiteReport counting_suite(const ModelParams& params, const CountingOptions& opt);

struct EntropyOptions {
    std::vector<int> sizes = {11, 15, 21};
};
/// Exact count of external families against e^{(2 - gamma)|Lambda|^gamma log|Lambda|}; gamma from `params`.
SuiteReport entropy_suite(const ModelParams& params, const EntropyOptions& opt);

struct MergeOptions {
    long families = 1000;
    int max_L = 2000;
    int max_mass = 12;
    int window = 60;
    int exhaustive_size = 21;  // brute-force cross-check over all configurations of this size
    std::uint64_t seed = 1;
};
SuiteReport merge_suite(const ModelParams& params, const MergeOptions& opt);

/// Quadratic Laplace bound at t in {+-t*/2, +-t*/4} for the very-small events and
/// for the class of a centred droplet of the smallest large mass.
SuiteReport laplace_suite(const ModelParams& params);

struct ClusterOptions {
    int pair_anchor = -2;  // first site of the two-point checks
    std::vector<int> separations = {2, 3, 4};
};
/// Exact oracle values against the leading-order cluster terms.
SuiteReport cluster_suite(const ModelParams& params, const ClusterOptions& opt);

/// Centred triangle of the smallest mass above eps_s |Lambda|.
Triangle smallest_large_droplet(const ModelParams& params);

const std::vector<std::string>& suite_names();

/// Runs a suite by name with default options. Throws std::invalid_argument on an unknown name.
SuiteReport run_suite(const std::string& name, const ModelParams& params, std::uint64_t seed);

nlohmann::json suite_json(const SuiteReport& report);

}  // namespace lrising
