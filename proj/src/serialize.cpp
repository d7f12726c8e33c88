#include "prbfn/serialize.hpp"

#include <stdexcept>

namespace prbfn {

namespace {

using nlohmann::json;

// Flat row-major scan of one component.
json matrix_part(const Eigen::MatrixXcd& m, bool real) {
    json flat = json::array();
    for (Eigen::Index i = 0; i < m.rows(); ++i) {
        for (Eigen::Index j = 0; j < m.cols(); ++j) {
            flat.push_back(real ? m(i, j).real() : m(i, j).imag());
        }
    }
    return flat;
}

// Nested rows, used where the shape should be visible in the document.
json matrix_rows(const Eigen::MatrixXcd& m, bool real) {
    json rows = json::array();
    for (Eigen::Index i = 0; i < m.rows(); ++i) {
        json row = json::array();
        for (Eigen::Index j = 0; j < m.cols(); ++j) {
            row.push_back(real ? m(i, j).real() : m(i, j).imag());
        }
        rows.push_back(std::move(row));
    }
    return rows;
}

Eigen::MatrixXcd matrix_from_parts(const json& re, const json& im, Eigen::Index rows,
                                   Eigen::Index cols) {
    if (!re.is_array() || !im.is_array() ||
        static_cast<Eigen::Index>(re.size()) != rows * cols || re.size() != im.size()) {
        throw std::invalid_argument("serialize: malformed matrix parts");
    }
    Eigen::MatrixXcd m(rows, cols);
    for (Eigen::Index i = 0; i < rows; ++i) {
        for (Eigen::Index j = 0; j < cols; ++j) {
            const std::size_t k = static_cast<std::size_t>(i * cols + j);
            m(i, j) = {re[k].get<double>(), im[k].get<double>()};
        }
    }
    return m;
}

}  // namespace

json solve_report_to_json(const SolveReport& rep) {
    json j;
    j["objective"] = rep.objective;
    j["epsilon"] = rep.epsilon;
    j["iterations"] = rep.iterations;
    j["converged"] = rep.converged;
    j["phase_spread_rad"] = rep.phase_spread;
    j["rows"] = rep.best.rows();
    j["cols"] = rep.best.cols();
    j["B_real"] = matrix_part(rep.best, true);
    j["B_imag"] = matrix_part(rep.best, false);
    json restarts = json::array();
    for (const auto& r : rep.per_restart) {
        restarts.push_back({{"objective", r.objective}, {"iterations", r.iterations}});
    }
    j["per_restart"] = std::move(restarts);
    return j;
}

SolveReport solve_report_from_json(const json& j) {
    SolveReport rep;
    rep.objective = j.at("objective").get<double>();
    rep.epsilon = j.at("epsilon").get<double>();
    rep.iterations = j.at("iterations").get<int>();
    rep.converged = j.at("converged").get<bool>();
    rep.phase_spread = j.at("phase_spread_rad").get<double>();
    rep.best = matrix_from_parts(j.at("B_real"), j.at("B_imag"), j.at("rows").get<Eigen::Index>(),
                                 j.at("cols").get<Eigen::Index>());
    if (j.contains("per_restart")) {
        for (const auto& r : j.at("per_restart")) {
            rep.per_restart.push_back(
                {r.at("objective").get<double>(), r.at("iterations").get<int>()});
        }
    }
    return rep;
}

json cascade_plan_to_json(const CascadePlan& plan) {
    json j;
    j["M"] = plan.M;
    j["splitter"] = {{plan.splitter(0).real(), plan.splitter(0).imag()},
                     {plan.splitter(1).real(), plan.splitter(1).imag()}};
    json units = json::array();
    for (const auto& u : plan.units) {
        json states = json::array();
        for (const auto& s : u.states) {
            states.push_back({{"amp1", s.amp1}, {"amp2", s.amp2}, {"dphase_rad", s.dphase}});
        }
        units.push_back({{"stage", u.stage}, {"index", u.index}, {"states", std::move(states)}});
    }
    j["units"] = std::move(units);
    j["global_phases"] = plan.global_phases;
    if (plan.spdt_routing) {
        const MirrorSplit& ms = *plan.spdt_routing;
        json routes = json::array();
        for (const auto& r : ms.routing) {
            routes.push_back({{"state", r.state},
                              {"upper_unit", r.upper_unit},
                              {"upper_state", r.upper_state},
                              {"lower_unit", r.lower_unit},
                              {"lower_state", r.lower_state},
                              {"spdt_hops", r.spdt_hops}});
        }
        j["spdt_routing"] = {{"routes", std::move(routes)},
                             {"mismatch", ms.mismatch},
                             {"max_mismatch", ms.max_mismatch},
                             {"mismatch_flagged", ms.mismatch_flagged},
                             {"spdt_loss_db", ms.spdt_loss_db}};
    } else {
        j["spdt_routing"] = nullptr;
    }
    return j;
}

CascadePlan cascade_plan_from_json(const json& j) {
    CascadePlan plan;
    plan.M = j.at("M").get<int>();
    const auto& sp = j.at("splitter");
    plan.splitter = Eigen::Vector2cd(
        std::complex<double>(sp[0][0].get<double>(), sp[0][1].get<double>()),
        std::complex<double>(sp[1][0].get<double>(), sp[1][1].get<double>()));
    for (const auto& u : j.at("units")) {
        UnitTarget unit;
        unit.stage = u.at("stage").get<int>();
        unit.index = u.at("index").get<int>();
        for (const auto& s : u.at("states")) {
            unit.states.push_back({s.at("amp1").get<double>(), s.at("amp2").get<double>(),
                                   s.at("dphase_rad").get<double>()});
        }
        plan.units.push_back(std::move(unit));
    }
    plan.global_phases = j.at("global_phases").get<std::vector<double>>();
    if (j.contains("spdt_routing") && !j.at("spdt_routing").is_null()) {
        const auto& r = j.at("spdt_routing");
        MirrorSplit ms;
        for (const auto& e : r.at("routes")) {
            ms.routing.push_back({e.at("state").get<int>(), e.at("upper_unit").get<int>(),
                                  e.at("upper_state").get<int>(), e.at("lower_unit").get<int>(),
                                  e.at("lower_state").get<int>(), e.at("spdt_hops").get<int>()});
        }
        ms.mismatch = r.at("mismatch").get<std::vector<double>>();
        ms.max_mismatch = r.at("max_mismatch").get<double>();
        ms.mismatch_flagged = r.at("mismatch_flagged").get<bool>();
        ms.spdt_loss_db = r.at("spdt_loss_db").get<double>();
        plan.spdt_routing = std::move(ms);
    }
    return plan;
}

json state_set_to_json(const StateSet& set) {
    json states = json::array();
    for (const auto& s : set.states) {
        states.push_back({{"bits", to_bit_string(s.x)},
                          {"g1", s.eval.g1},
                          {"g2", s.eval.g2},
                          {"g3", s.eval.g3},
                          {"weighted", s.eval.weighted},
                          {"penalized", s.eval.penalized},
                          {"worst_freq_index", s.eval.worst_freq_index},
                          {"margins",
                           {{"matching_db", s.eval.margins.matching_db},
                            {"isolation_db", s.eval.margins.isolation_db},
                            {"loss", s.eval.margins.loss}}},
                          {"feasible", s.feasible}});
    }
    return json{{"states", std::move(states)}};
}

StateSet state_set_from_json(const json& j) {
    StateSet set;
    for (const auto& s : j.at("states")) {
        SearchedState st;
        st.x = from_bit_string(s.at("bits").get<std::string>());
        st.eval.g1 = s.at("g1").get<double>();
        st.eval.g2 = s.at("g2").get<double>();
        st.eval.g3 = s.at("g3").get<double>();
        st.eval.weighted = s.at("weighted").get<double>();
        st.eval.penalized = s.at("penalized").get<double>();
        st.eval.worst_freq_index = s.at("worst_freq_index").get<std::size_t>();
        const auto& m = s.at("margins");
        st.eval.margins.matching_db = m.at("matching_db").get<double>();
        st.eval.margins.isolation_db = m.at("isolation_db").get<double>();
        st.eval.margins.loss = m.at("loss").get<double>();
        st.feasible = s.at("feasible").get<bool>();
        set.states.push_back(std::move(st));
    }
    return set;
}

json prune_report_to_json(const PruneReport& rep) {
    return json{{"removable_open", rep.removable_open},
                {"replace_with_wire", rep.replace_with_wire}};
}

json pixel_network_to_json(const PixelNetwork& net) {
    json j;
    j["n_feed"] = net.n_feed;
    j["q"] = net.q;
    j["z0"] = net.z0;
    j["reciprocal"] = net.reciprocal;
    j["freqs_hz"] = net.freqs_hz;
    json mats = json::array();
    for (const auto& Z : net.z) {
        mats.push_back({{"re", matrix_rows(Z, true)}, {"im", matrix_rows(Z, false)}});
    }
    j["z"] = std::move(mats);
    return j;
}

}  // namespace prbfn
