#pragma once

#include <cstdint>
#include <json.hpp>
#include <optional>
#include <string>

#include "prbfn/cell_optimizer.hpp"
#include "prbfn/pixel_network.hpp"

namespace prbfn::cli {

// Raised for any config defect; the message carries the offending field path.
class config_error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

struct RunConfig {
    struct Fas {
        double W = 0.0;
        int N = 0;
    } fas;

    struct Optimizer {
        double eta = 0.05;
        int max_iter = 20000;
        int restarts = 30;
        std::uint64_t seed = 1;
        double epsilon0 = 0.01;
    } optimizer;

    struct Cell {
        int Q = 12;
        double c1 = 1.0;
        double c2 = 0.5;
        double t_s_db = -10.0;
        double t_m_db = -15.0;
        double t_loss = 0.37;
        std::string method = "annealing";
        long long budget = 20000;
        std::uint64_t seed = 2;
        double center_freq_hz = 2.6e9;
        double band_fraction = 0.05;
        int n_freq = 21;
        double coupling_scale = 1.0;
        double loss_scale = 0.05;
    } cell;

    struct Switch {
        double r_on_ohm = 1.5;
        double l_on_nh = 0.7;
        double r_off_ohm = 1.5;
        double c_off_pf = 0.15;
    } sw;

    struct Channel {
        int T = 10000;
        int users = 2;
        int locations = 1;
        std::uint64_t seed = 3;
        bool centered = false;
    } channel;

    struct Paths {
        std::optional<std::string> touchstone_in;
        std::string out_dir = "out";
    } paths;

    SwitchModel switch_model() const;
    SearchMethod search_method() const;
    SurrogateParams surrogate_params() const;
    CellObjective cell_objective() const;
};

// Parses and validates a config document. Unknown keys are rejected; every
// value is checked against the owning module's preconditions before any work
// starts. Throws config_error.
RunConfig parse_config(const nlohmann::json& j);
RunConfig load_config_file(const std::string& path);

// Fully-resolved document (all defaults materialized), which round-trips
// through parse_config.
nlohmann::json resolved_config(const RunConfig& cfg);

}  // namespace prbfn::cli
