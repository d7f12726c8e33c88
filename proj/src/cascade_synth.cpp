#include "prbfn/cascade_synth.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

namespace prbfn {

namespace {

constexpr double kPi = 3.14159265358979323846;

bool is_power_of_two(Eigen::Index x) { return x >= 1 && (x & (x - 1)) == 0; }

int log2_exact(Eigen::Index x) {
    int m = 0;
    while ((Eigen::Index(1) << m) < x) ++m;
    return m;
}

}  // namespace

double wrap_phase(double a) {
    a = std::remainder(a, 2.0 * kPi);  // (-pi, pi) plus the boundary cases
    if (a <= -kPi) a = kPi;
    return a;
}

Eigen::Vector2cd unit_state_vector(const UnitStateTarget& t) {
    return {std::polar(t.amp1, t.dphase), std::complex<double>(t.amp2, 0.0)};
}

std::vector<UnitTarget> stage_targets(const BeamMatrix& Bhat) {
    const Eigen::Index rows = Bhat.rows();
    const Eigen::Index n_states = Bhat.cols();
    if (!is_power_of_two(rows) || rows < 2) {
        throw std::invalid_argument("stage_targets: row count must be a power of two >= 2");
    }
    const int stage = log2_exact(rows);
    const Eigen::Index n_units = rows / 2;

    std::vector<UnitTarget> units(static_cast<std::size_t>(n_units));
    for (Eigen::Index k = 0; k < n_units; ++k) {
        UnitTarget& u = units[static_cast<std::size_t>(k)];
        u.stage = stage;
        u.index = static_cast<int>(k) + 1;
        u.states.resize(static_cast<std::size_t>(n_states));
        for (Eigen::Index n = 0; n < n_states; ++n) {
            const std::complex<double> v1 = Bhat(2 * k, n);
            const std::complex<double> v2 = Bhat(2 * k + 1, n);
            const double norm = std::sqrt(std::norm(v1) + std::norm(v2));
            if (norm == 0.0) {
                throw std::invalid_argument("stage_targets: zero sub-vector at stage " +
                                            std::to_string(stage) + ", unit " +
                                            std::to_string(k + 1) + ", state " +
                                            std::to_string(n + 1));
            }
            UnitStateTarget& s = u.states[static_cast<std::size_t>(n)];
            s.amp1 = std::abs(v1) / norm;
            s.amp2 = std::abs(v2) / norm;
            const std::complex<double> cross = v1 * std::conj(v2);
            s.dphase = (cross == std::complex<double>(0.0, 0.0)) ? 0.0 : wrap_phase(std::arg(cross));
        }
    }
    return units;
}

Eigen::VectorXcd backward_reduce(const Eigen::VectorXcd& i_n,
                                 const std::vector<Eigen::Vector2cd>& blocks) {
    const Eigen::Index rows = i_n.size();
    if (rows != 2 * static_cast<Eigen::Index>(blocks.size())) {
        throw std::invalid_argument("backward_reduce: vector length must be twice the block count");
    }
    Eigen::VectorXcd out(blocks.size());
    for (std::size_t k = 0; k < blocks.size(); ++k) {
        const double bn = blocks[k].norm();
        if (std::abs(bn - 1.0) > 1e-9) {
            throw std::invalid_argument("backward_reduce: block " + std::to_string(k + 1) +
                                        " norm deviates from 1 by " + std::to_string(bn - 1.0));
        }
        out(static_cast<Eigen::Index>(k)) =
            blocks[k].dot(i_n.segment(2 * static_cast<Eigen::Index>(k), 2));
    }
    return out;
}

CascadePlan synthesize_plan(const BeamMatrix& Bhat) {
    const Eigen::Index n_a = Bhat.rows();
    const Eigen::Index n_states = Bhat.cols();
    if (!is_power_of_two(n_a) || n_a < 2) {
        throw std::invalid_argument("synthesize_plan: output port count must be a power of two >= 2");
    }
    if (n_states < 1) {
        throw std::invalid_argument("synthesize_plan: beam matrix has no states");
    }

    CascadePlan plan;
    plan.M = log2_exact(n_a);
    plan.splitter = Eigen::Vector2cd(std::sqrt(0.5), std::sqrt(0.5));

    Eigen::MatrixXcd current = Bhat;
    for (int m = plan.M; m >= 1; --m) {
        std::vector<UnitTarget> units = stage_targets(current);
        Eigen::MatrixXcd reduced(current.rows() / 2, n_states);
        for (Eigen::Index n = 0; n < n_states; ++n) {
            std::vector<Eigen::Vector2cd> blocks(units.size());
            for (std::size_t k = 0; k < units.size(); ++k) {
                blocks[k] = unit_state_vector(units[k].states[static_cast<std::size_t>(n)]);
            }
            reduced.col(n) = backward_reduce(current.col(n), blocks);
        }
        plan.units.insert(plan.units.end(), units.begin(), units.end());
        current = std::move(reduced);
    }

    plan.global_phases.resize(static_cast<std::size_t>(n_states));
    for (Eigen::Index n = 0; n < n_states; ++n) {
        plan.global_phases[static_cast<std::size_t>(n)] = std::arg(current(0, n));
    }

    std::sort(plan.units.begin(), plan.units.end(), [](const UnitTarget& a, const UnitTarget& b) {
        return a.stage != b.stage ? a.stage < b.stage : a.index < b.index;
    });

    const double residual = max_column_error_up_to_phase(forward_compose(plan), Bhat);
    if (!(residual < 1e-9)) {
        throw std::runtime_error("synthesize_plan: forward-composition residual " +
                                 std::to_string(residual) + " exceeds 1e-9");
    }
    return plan;
}

BeamMatrix forward_compose(const CascadePlan& plan) {
    if (plan.M < 1 || plan.units.empty()) {
        throw std::invalid_argument("forward_compose: empty plan");
    }
    const Eigen::Index n_states = static_cast<Eigen::Index>(plan.units.front().states.size());
    const Eigen::Index n_a = Eigen::Index(1) << plan.M;

    // units grouped per stage, index-ordered
    std::vector<std::vector<const UnitTarget*>> by_stage(static_cast<std::size_t>(plan.M) + 1);
    for (const UnitTarget& u : plan.units) {
        if (u.stage < 1 || u.stage > plan.M) {
            throw std::invalid_argument("forward_compose: unit stage out of range");
        }
        by_stage[static_cast<std::size_t>(u.stage)].push_back(&u);
    }
    for (int m = 1; m <= plan.M; ++m) {
        auto& stage = by_stage[static_cast<std::size_t>(m)];
        if (static_cast<Eigen::Index>(stage.size()) != (Eigen::Index(1) << (m - 1))) {
            throw std::invalid_argument("forward_compose: stage " + std::to_string(m) +
                                        " must hold " + std::to_string(1 << (m - 1)) + " units");
        }
        std::sort(stage.begin(), stage.end(),
                  [](const UnitTarget* a, const UnitTarget* b) { return a->index < b->index; });
        for (std::size_t k = 0; k < stage.size(); ++k) {
            if (stage[k]->index != static_cast<int>(k) + 1 ||
                stage[k]->states.size() != static_cast<std::size_t>(n_states)) {
                throw std::invalid_argument("forward_compose: stage " + std::to_string(m) +
                                            " units are not a complete 1..2^(m-1) sequence");
            }
        }
    }

    BeamMatrix B(n_a, n_states);
    for (Eigen::Index n = 0; n < n_states; ++n) {
        Eigen::VectorXcd v = Eigen::VectorXcd::Ones(1);
        for (int m = 1; m <= plan.M; ++m) {
            Eigen::VectorXcd next(Eigen::Index(1) << m);
            const auto& stage = by_stage[static_cast<std::size_t>(m)];
            for (std::size_t k = 0; k < stage.size(); ++k) {
                const Eigen::Vector2cd block =
                    unit_state_vector(stage[k]->states[static_cast<std::size_t>(n)]);
                next.segment(2 * static_cast<Eigen::Index>(k), 2) =
                    block * v(static_cast<Eigen::Index>(k));
            }
            v = std::move(next);
        }
        B.col(n) = v;
    }
    return B;
}

double max_column_error_up_to_phase(const Eigen::MatrixXcd& A, const Eigen::MatrixXcd& B) {
    if (A.rows() != B.rows() || A.cols() != B.cols()) {
        throw std::invalid_argument("max_column_error_up_to_phase: dimension mismatch");
    }
    double worst = 0.0;
    for (Eigen::Index j = 0; j < A.cols(); ++j) {
        // Align the columns at the optimal phase and subtract directly; the
        // closed form sqrt(|a|^2+|b|^2-2|a^H b|) cancels catastrophically for
        // near-equal columns.
        const std::complex<double> inner = A.col(j).dot(B.col(j));  // A^H B
        const std::complex<double> rot =
            (inner == std::complex<double>(0.0, 0.0)) ? 1.0 : std::polar(1.0, std::arg(inner));
        worst = std::max(worst, (A.col(j) * rot - B.col(j)).norm());
    }
    return worst;
}

MirrorSplit mirror_split(const BeamMatrix& Bhat) {
    if (Bhat.rows() != 4) {
        throw std::invalid_argument("mirror_split: requires a 4-output beam matrix");
    }
    const Eigen::Index n = Bhat.cols();
    if (n % 2 != 0 || n == 0) {
        throw std::invalid_argument("mirror_split: state count must be even");
    }
    const Eigen::Index half = n / 2;

    MirrorSplit ms;
    ms.first_half = Bhat.leftCols(half);
    ms.second_half = Bhat.rightCols(half);

    // Per-state targets of the two second-stage units.
    auto pair_target = [&](Eigen::Index row0, Eigen::Index state) {
        const std::complex<double> v1 = Bhat(row0, state);
        const std::complex<double> v2 = Bhat(row0 + 1, state);
        const double norm = std::sqrt(std::norm(v1) + std::norm(v2));
        if (norm == 0.0) {
            throw std::invalid_argument("mirror_split: zero sub-vector at state " +
                                        std::to_string(state + 1));
        }
        UnitStateTarget t;
        t.amp1 = std::abs(v1) / norm;
        t.amp2 = std::abs(v2) / norm;
        const std::complex<double> cross = v1 * std::conj(v2);
        t.dphase = (cross == std::complex<double>(0.0, 0.0)) ? 0.0 : wrap_phase(std::arg(cross));
        return t;
    };

    ms.mismatch.resize(static_cast<std::size_t>(n));
    ms.routing.reserve(static_cast<std::size_t>(n));
    for (Eigen::Index s = 0; s < n; ++s) {
        // Mirror relation: unit-1 target at state s equals unit-2 target at
        // the mirrored state.
        const UnitStateTarget a = pair_target(0, s);
        const UnitStateTarget b = pair_target(2, n - 1 - s);
        const double d = std::max({std::abs(a.amp1 - b.amp1), std::abs(a.amp2 - b.amp2),
                                   std::abs(wrap_phase(a.dphase - b.dphase))});
        ms.mismatch[static_cast<std::size_t>(s)] = d;
        ms.max_mismatch = std::max(ms.max_mismatch, d);

        SpdtRoute route;
        route.state = static_cast<int>(s) + 1;
        route.spdt_hops = 2;
        if (s < half) {
            route.upper_unit = 1;
            route.upper_state = static_cast<int>(s) + 1;
            route.lower_unit = 2;
            route.lower_state = static_cast<int>(s) + 1;
        } else {
            const int mirrored = static_cast<int>(n - s);  // N - s_1based + 1
            route.upper_unit = 2;
            route.upper_state = mirrored;
            route.lower_unit = 1;
            route.lower_state = mirrored;
        }
        ms.routing.push_back(route);
    }
    ms.mismatch_flagged = ms.max_mismatch > 1e-6;
    return ms;
}

}  // namespace prbfn
