#include "config.hpp"

#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

namespace prbfn::cli {

namespace {

using nlohmann::json;

void reject_unknown(const json& j, const std::string& where,
                    const std::set<std::string>& allowed) {
    if (!j.is_object()) {
        throw config_error(where + ": expected an object");
    }
    for (const auto& [key, value] : j.items()) {
        if (!allowed.count(key)) {
            throw config_error(where + "." + key + ": unknown key");
        }
    }
}

template <typename T>
void read(const json& j, const std::string& where, const char* key, T& out) {
    if (!j.contains(key)) return;
    try {
        out = j.at(key).get<T>();
    } catch (const json::exception&) {
        throw config_error(where + "." + key + ": wrong type");
    }
}

void require(bool ok, const std::string& field, const std::string& what) {
    if (!ok) throw config_error(field + ": " + what);
}

}  // namespace

SwitchModel RunConfig::switch_model() const {
    SwitchModel m;
    m.r_on_ohm = sw.r_on_ohm;
    m.l_on_h = sw.l_on_nh * 1e-9;
    m.r_off_ohm = sw.r_off_ohm;
    m.c_off_f = sw.c_off_pf * 1e-12;
    return m;
}

SearchMethod RunConfig::search_method() const {
    if (cell.method == "exhaustive") return SearchMethod::Exhaustive;
    if (cell.method == "annealing") return SearchMethod::Annealing;
    if (cell.method == "genetic") return SearchMethod::Genetic;
    throw config_error("cell.method: must be exhaustive, annealing or genetic");
}

SurrogateParams RunConfig::surrogate_params() const {
    SurrogateParams p;
    p.q = cell.Q;
    p.coupling_scale = cell.coupling_scale;
    p.loss_scale = cell.loss_scale;
    p.center_hz = cell.center_freq_hz;
    p.band_fraction = cell.band_fraction;
    p.n_freq = cell.n_freq;
    return p;
}

CellObjective RunConfig::cell_objective() const {
    CellObjective obj;
    obj.c1 = cell.c1;
    obj.c2 = cell.c2;
    obj.t_s_db = cell.t_s_db;
    obj.t_m_db = cell.t_m_db;
    obj.t_loss = cell.t_loss;
    return obj;
}

RunConfig parse_config(const json& j) {
    reject_unknown(j, "config", {"fas", "optimizer", "cell", "switch", "channel", "paths"});
    RunConfig cfg;

    if (!j.contains("fas")) throw config_error("fas: section is required");
    const json& fas = j.at("fas");
    reject_unknown(fas, "fas", {"W", "N"});
    if (!fas.contains("W") || !fas.contains("N")) {
        throw config_error("fas: W and N are required");
    }
    read(fas, "fas", "W", cfg.fas.W);
    read(fas, "fas", "N", cfg.fas.N);
    require(std::isfinite(cfg.fas.W) && cfg.fas.W > 0.0, "fas.W", "must be finite and > 0");
    require(cfg.fas.N >= 2, "fas.N", "must be >= 2");

    if (j.contains("optimizer")) {
        const json& o = j.at("optimizer");
        reject_unknown(o, "optimizer", {"eta", "max_iter", "restarts", "seed", "epsilon0"});
        read(o, "optimizer", "eta", cfg.optimizer.eta);
        read(o, "optimizer", "max_iter", cfg.optimizer.max_iter);
        read(o, "optimizer", "restarts", cfg.optimizer.restarts);
        read(o, "optimizer", "seed", cfg.optimizer.seed);
        read(o, "optimizer", "epsilon0", cfg.optimizer.epsilon0);
    }
    require(cfg.optimizer.eta > 0.0, "optimizer.eta", "must be > 0");
    require(cfg.optimizer.max_iter >= 1, "optimizer.max_iter", "must be >= 1");
    require(cfg.optimizer.restarts >= 1, "optimizer.restarts", "must be >= 1");
    require(cfg.optimizer.epsilon0 > 0.0, "optimizer.epsilon0", "must be > 0");

    if (j.contains("cell")) {
        const json& c = j.at("cell");
        reject_unknown(c, "cell",
                       {"Q", "c1", "c2", "t_s_db", "t_m_db", "t_loss", "method", "budget", "seed",
                        "center_freq_hz", "band_fraction", "n_freq", "coupling_scale",
                        "loss_scale"});
        read(c, "cell", "Q", cfg.cell.Q);
        read(c, "cell", "c1", cfg.cell.c1);
        read(c, "cell", "c2", cfg.cell.c2);
        read(c, "cell", "t_s_db", cfg.cell.t_s_db);
        read(c, "cell", "t_m_db", cfg.cell.t_m_db);
        read(c, "cell", "t_loss", cfg.cell.t_loss);
        read(c, "cell", "method", cfg.cell.method);
        read(c, "cell", "budget", cfg.cell.budget);
        read(c, "cell", "seed", cfg.cell.seed);
        read(c, "cell", "center_freq_hz", cfg.cell.center_freq_hz);
        read(c, "cell", "band_fraction", cfg.cell.band_fraction);
        read(c, "cell", "n_freq", cfg.cell.n_freq);
        read(c, "cell", "coupling_scale", cfg.cell.coupling_scale);
        read(c, "cell", "loss_scale", cfg.cell.loss_scale);
    }
    require(cfg.cell.Q >= 0 && cfg.cell.Q <= 64, "cell.Q", "must be in [0, 64]");
    require(cfg.cell.c1 >= 0.0 && cfg.cell.c2 >= 0.0, "cell.c1/c2", "weights must be >= 0");
    require(std::isfinite(cfg.cell.t_s_db) && std::isfinite(cfg.cell.t_m_db) &&
                std::isfinite(cfg.cell.t_loss),
            "cell.thresholds", "must be finite");
    require(cfg.cell.budget >= 1, "cell.budget", "must be >= 1");
    require(cfg.cell.center_freq_hz > 0.0, "cell.center_freq_hz", "must be > 0");
    require(cfg.cell.band_fraction >= 0.0 && cfg.cell.band_fraction < 2.0, "cell.band_fraction",
            "must be in [0, 2)");
    require(cfg.cell.n_freq >= 1, "cell.n_freq", "must be >= 1");
    require(cfg.cell.coupling_scale >= 0.0 && cfg.cell.coupling_scale <= 1.0,
            "cell.coupling_scale", "must be in [0, 1]");
    require(cfg.cell.loss_scale >= 0.0, "cell.loss_scale", "must be >= 0");
    if (cfg.cell.method == "exhaustive") {
        require(cfg.cell.Q <= 20, "cell.method", "exhaustive search requires Q <= 20");
    } else {
        require(cfg.cell.method == "annealing" || cfg.cell.method == "genetic", "cell.method",
                "must be exhaustive, annealing or genetic");
    }

    if (j.contains("switch")) {
        const json& s = j.at("switch");
        reject_unknown(s, "switch", {"r_on_ohm", "l_on_nh", "r_off_ohm", "c_off_pf"});
        read(s, "switch", "r_on_ohm", cfg.sw.r_on_ohm);
        read(s, "switch", "l_on_nh", cfg.sw.l_on_nh);
        read(s, "switch", "r_off_ohm", cfg.sw.r_off_ohm);
        read(s, "switch", "c_off_pf", cfg.sw.c_off_pf);
    }
    require(cfg.sw.r_on_ohm >= 0.0 && cfg.sw.r_off_ohm >= 0.0, "switch",
            "resistances must be >= 0 (passive loads)");
    require(cfg.sw.l_on_nh >= 0.0, "switch.l_on_nh", "must be >= 0");
    require(cfg.sw.c_off_pf > 0.0, "switch.c_off_pf", "must be > 0");

    if (j.contains("channel")) {
        const json& c = j.at("channel");
        reject_unknown(c, "channel", {"T", "users", "locations", "seed", "centered"});
        read(c, "channel", "T", cfg.channel.T);
        read(c, "channel", "users", cfg.channel.users);
        read(c, "channel", "locations", cfg.channel.locations);
        read(c, "channel", "seed", cfg.channel.seed);
        read(c, "channel", "centered", cfg.channel.centered);
    }
    require(cfg.channel.T >= 1, "channel.T", "must be >= 1");
    require(cfg.channel.users >= 2, "channel.users", "must be >= 2 (FAMA needs an interferer)");
    require(cfg.channel.locations >= 1, "channel.locations", "must be >= 1");

    if (j.contains("paths")) {
        const json& p = j.at("paths");
        reject_unknown(p, "paths", {"touchstone_in", "out_dir"});
        if (p.contains("touchstone_in") && !p.at("touchstone_in").is_null()) {
            std::string t;
            read(p, "paths", "touchstone_in", t);
            cfg.paths.touchstone_in = t;
        }
        read(p, "paths", "out_dir", cfg.paths.out_dir);
    }
    require(!cfg.paths.out_dir.empty(), "paths.out_dir", "must be nonempty");

    cfg.search_method();  // validates the method string
    return cfg;
}

RunConfig load_config_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw config_error("config file '" + path + "' cannot be opened");
    std::stringstream buf;
    buf << in.rdbuf();
    json j;
    try {
        j = json::parse(buf.str());
    } catch (const json::parse_error& e) {
        throw config_error(std::string("config JSON: ") + e.what());
    }
    return parse_config(j);
}

json resolved_config(const RunConfig& cfg) {
    json j;
    j["fas"] = {{"W", cfg.fas.W}, {"N", cfg.fas.N}};
    j["optimizer"] = {{"eta", cfg.optimizer.eta},
                      {"max_iter", cfg.optimizer.max_iter},
                      {"restarts", cfg.optimizer.restarts},
                      {"seed", cfg.optimizer.seed},
                      {"epsilon0", cfg.optimizer.epsilon0}};
    j["cell"] = {{"Q", cfg.cell.Q},
                 {"c1", cfg.cell.c1},
                 {"c2", cfg.cell.c2},
                 {"t_s_db", cfg.cell.t_s_db},
                 {"t_m_db", cfg.cell.t_m_db},
                 {"t_loss", cfg.cell.t_loss},
                 {"method", cfg.cell.method},
                 {"budget", cfg.cell.budget},
                 {"seed", cfg.cell.seed},
                 {"center_freq_hz", cfg.cell.center_freq_hz},
                 {"band_fraction", cfg.cell.band_fraction},
                 {"n_freq", cfg.cell.n_freq},
                 {"coupling_scale", cfg.cell.coupling_scale},
                 {"loss_scale", cfg.cell.loss_scale}};
    j["switch"] = {{"r_on_ohm", cfg.sw.r_on_ohm},
                   {"l_on_nh", cfg.sw.l_on_nh},
                   {"r_off_ohm", cfg.sw.r_off_ohm},
                   {"c_off_pf", cfg.sw.c_off_pf}};
    j["channel"] = {{"T", cfg.channel.T},
                    {"users", cfg.channel.users},
                    {"locations", cfg.channel.locations},
                    {"seed", cfg.channel.seed},
                    {"centered", cfg.channel.centered}};
    j["paths"] = {{"touchstone_in",
                   cfg.paths.touchstone_in ? json(*cfg.paths.touchstone_in) : json(nullptr)},
                  {"out_dir", cfg.paths.out_dir}};
    return j;
}

}  // namespace prbfn::cli
