#include "prbfn/cell_optimizer.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "prbfn/rng.hpp"

namespace prbfn {

namespace {

double to_db(double magnitude) {
    return magnitude > 0.0 ? 20.0 * std::log10(magnitude)
                           : -std::numeric_limits<double>::infinity();
}

std::vector<std::size_t> grid_of(const PixelNetwork& net, const CellObjective& obj) {
    if (obj.freq_indices.empty()) {
        std::vector<std::size_t> all(net.freqs_hz.size());
        for (std::size_t i = 0; i < all.size(); ++i) all[i] = i;
        return all;
    }
    for (std::size_t f : obj.freq_indices) {
        if (f >= net.freqs_hz.size()) {
            throw std::invalid_argument("eval_state: frequency index out of range");
        }
    }
    return obj.freq_indices;
}

void check_involution(const std::vector<int>& perm) {
    const int n = static_cast<int>(perm.size());
    for (int i = 0; i < n; ++i) {
        const int p = perm[static_cast<std::size_t>(i)];
        if (p < 0 || p >= n || perm[static_cast<std::size_t>(p)] != i) {
            throw std::invalid_argument("mirror_state: permutation is not an involution");
        }
    }
}

SwitchState random_state(int q, std::mt19937_64& rng) {
    SwitchState x;
    x.bits.resize(static_cast<std::size_t>(q));
    for (auto& b : x.bits) b = static_cast<std::uint8_t>(rng() & 1u);
    return x;
}

struct Candidate {
    SwitchState x;
    StateEval eval;
};

// Keeps the candidate with the lower penalized objective; ties resolved by
// the lexicographically smaller bit vector so results are deterministic.
bool better(const Candidate& a, const Candidate& b) {
    if (a.eval.penalized != b.eval.penalized) return a.eval.penalized < b.eval.penalized;
    return a.x.bits < b.x.bits;
}

Candidate exhaustive_search(const PixelNetwork& net, const SwitchModel& sw,
                            const UnitStateTarget& target, const CellObjective& obj) {
    const int q = net.q;
    if (q > 20) {
        throw std::invalid_argument("search_states: exhaustive search limited to q <= 20");
    }
    Candidate best;
    bool first = true;
    SwitchState x;
    x.bits.resize(static_cast<std::size_t>(q));
    const std::uint64_t count = std::uint64_t(1) << q;
    for (std::uint64_t mask = 0; mask < count; ++mask) {
        for (int k = 0; k < q; ++k) {
            x.bits[static_cast<std::size_t>(k)] = static_cast<std::uint8_t>((mask >> k) & 1u);
        }
        Candidate c{x, eval_state(net, x, sw, target, obj)};
        if (first || better(c, best)) {
            best = std::move(c);
            first = false;
        }
    }
    if (first) throw std::logic_error("search_states: empty exhaustive space");
    return best;
}

Candidate annealing_search(const PixelNetwork& net, const SwitchModel& sw,
                           const UnitStateTarget& target, const CellObjective& obj,
                           long long budget, std::uint64_t seed) {
    const int q = net.q;
    const int chains = static_cast<int>(std::min<long long>(8, std::max<long long>(1, budget / 64)));
    const long long per_chain = std::max<long long>(1, budget / chains);

    Candidate best;
    bool have_best = false;
    for (int chain = 0; chain < chains; ++chain) {
        std::mt19937_64 rng(derive_seed(seed, static_cast<std::uint64_t>(chain)));
        Candidate cur{random_state(q, rng), {}};
        cur.eval = eval_state(net, cur.x, sw, target, obj);
        if (!have_best || better(cur, best)) {
            best = cur;
            have_best = true;
        }
        long long evals = 1;

        // Temperature scale from a short random probe of the landscape.
        double t0 = 0.0;
        {
            double mean = cur.eval.penalized, m2 = 0.0;
            const long long probes = std::min<long long>(16, per_chain - evals);
            for (long long i = 0; i < probes; ++i) {
                Candidate c{random_state(q, rng), {}};
                c.eval = eval_state(net, c.x, sw, target, obj);
                ++evals;
                const double e = c.eval.penalized;
                const double d = e - mean;
                mean += d / static_cast<double>(i + 2);
                m2 += d * (e - mean);
                if (better(c, best)) best = std::move(c);
            }
            const double var = probes > 1 ? m2 / static_cast<double>(probes - 1) : 1.0;
            t0 = std::max(std::sqrt(std::max(var, 0.0)), 1e-6);
        }
        const double t_end = 1e-5 * t0;
        const long long steps = std::max<long long>(1, per_chain - evals);
        const double decay = std::pow(t_end / t0, 1.0 / static_cast<double>(steps));

        double temp = t0;
        for (long long s = 0; s < steps; ++s, temp *= decay) {
            Candidate c;
            c.x = cur.x;
            const std::size_t flip = static_cast<std::size_t>(uniform_index(rng, q));
            c.x.bits[flip] ^= 1u;
            c.eval = eval_state(net, c.x, sw, target, obj);
            const double delta = c.eval.penalized - cur.eval.penalized;
            if (delta <= 0.0 || uniform_unit(rng) < std::exp(-delta / temp)) {
                cur = c;
                if (better(cur, best)) best = cur;
            }
        }
    }
    return best;
}

Candidate genetic_search(const PixelNetwork& net, const SwitchModel& sw,
                         const UnitStateTarget& target, const CellObjective& obj, long long budget,
                         std::uint64_t seed) {
    const int q = net.q;
    std::mt19937_64 rng(seed);
    const int pop_size = static_cast<int>(std::min<long long>(64, std::max<long long>(4, budget / 8)));
    const double mutation_rate = 1.5 / std::max(1, q);

    std::vector<Candidate> pop;
    pop.reserve(static_cast<std::size_t>(pop_size));
    for (int i = 0; i < pop_size; ++i) {
        Candidate c{random_state(q, rng), {}};
        c.eval = eval_state(net, c.x, sw, target, obj);
        pop.push_back(std::move(c));
    }
    long long evals = pop_size;
    Candidate best = pop.front();
    for (const auto& c : pop) {
        if (better(c, best)) best = c;
    }

    auto tournament = [&](const std::vector<Candidate>& gen) -> const Candidate& {
        const Candidate* pick = &gen[uniform_index(rng, gen.size())];
        for (int i = 0; i < 2; ++i) {
            const Candidate* other = &gen[uniform_index(rng, gen.size())];
            if (better(*other, *pick)) pick = other;
        }
        return *pick;
    };

    while (evals < budget) {
        std::vector<Candidate> next;
        next.reserve(pop.size());
        next.push_back(best);  // elitism
        while (static_cast<int>(next.size()) < pop_size && evals < budget) {
            const Candidate& a = tournament(pop);
            const Candidate& b = tournament(pop);
            Candidate c;
            c.x.bits.resize(static_cast<std::size_t>(q));
            for (int k = 0; k < q; ++k) {
                const std::size_t kk = static_cast<std::size_t>(k);
                c.x.bits[kk] = (rng() & 1u) ? a.x.bits[kk] : b.x.bits[kk];
                if (uniform_unit(rng) < mutation_rate) c.x.bits[kk] ^= 1u;
            }
            c.eval = eval_state(net, c.x, sw, target, obj);
            ++evals;
            if (better(c, best)) best = c;
            next.push_back(std::move(c));
        }
        if (next.size() < 2) break;
        pop = std::move(next);
    }
    return best;
}

Candidate search_one(const PixelNetwork& net, const SwitchModel& sw, const UnitStateTarget& target,
                     const CellObjective& obj, const SearchOptions& opts, std::uint64_t seed) {
    if (net.q == 0) {
        Candidate only{SwitchState{}, {}};
        only.eval = eval_state(net, only.x, sw, target, obj);
        return only;
    }
    switch (opts.method) {
        case SearchMethod::Exhaustive:
            return exhaustive_search(net, sw, target, obj);
        case SearchMethod::Annealing:
            return annealing_search(net, sw, target, obj, opts.budget, seed);
        case SearchMethod::Genetic:
            return genetic_search(net, sw, target, obj, opts.budget, seed);
    }
    throw std::logic_error("search_states: unknown method");
}

}  // namespace

StateEval eval_state(const PixelNetwork& net, const SwitchState& x, const SwitchModel& sw,
                     const UnitStateTarget& target, const CellObjective& obj) {
    if (net.n_feed != 3) {
        throw std::invalid_argument("eval_state: unit-cell evaluation requires 3 feed ports");
    }
    const std::vector<std::size_t> grid = grid_of(net, obj);

    StateEval out;
    double worst_weighted = -std::numeric_limits<double>::infinity();
    double worst_refl = -std::numeric_limits<double>::infinity();
    double worst_coupling = -std::numeric_limits<double>::infinity();
    double worst_loss = -std::numeric_limits<double>::infinity();

    for (std::size_t f : grid) {
        const Eigen::MatrixXcd s = z_to_s(reduce_network(net, x, sw, f), net.z0);
        const Transmissions tr = transmissions(s);
        const double g3 = std::norm(tr.s21) + std::norm(tr.s31);

        double g1, g2;
        if (g3 > 1e-30) {
            const double root = std::sqrt(g3);
            const double a1 = std::abs(tr.s21) / root;
            const double a2 = std::abs(tr.s31) / root;
            g1 = (a1 - target.amp1) * (a1 - target.amp1) + (a2 - target.amp2) * (a2 - target.amp2);
            const double d = wrap_phase(std::arg(tr.s21) - std::arg(tr.s31) - target.dphase);
            g2 = d * d;
        } else {
            // No transmission at all: worst possible match.
            g1 = target.amp1 * target.amp1 + target.amp2 * target.amp2;
            const double d = wrap_phase(target.dphase);
            g2 = d * d;
        }

        const double weighted = obj.c1 * g1 + obj.c2 * g2;
        if (weighted > worst_weighted) {
            worst_weighted = weighted;
            out.g1 = g1;
            out.g2 = g2;
            out.g3 = g3;
            out.worst_freq_index = f;
        }
        const double refl =
            std::max({to_db(std::abs(s(0, 0))), to_db(std::abs(s(1, 1))), to_db(std::abs(s(2, 2)))});
        worst_refl = std::max(worst_refl, refl);
        worst_coupling = std::max(worst_coupling, to_db(std::abs(s(1, 2))));
        worst_loss = std::max(worst_loss, 1.0 - g3);
    }

    out.weighted = worst_weighted;
    out.margins.matching_db = obj.t_s_db - worst_refl;
    out.margins.isolation_db = obj.t_m_db - worst_coupling;
    out.margins.loss = obj.t_loss - worst_loss;
    const double violation = std::max(0.0, -out.margins.matching_db) +
                             std::max(0.0, -out.margins.isolation_db) +
                             std::max(0.0, -out.margins.loss);
    out.penalized = out.weighted + kPenaltyWeight * violation;
    return out;
}

StateSet search_states(const PixelNetwork& net, const SwitchModel& sw,
                       const std::vector<UnitStateTarget>& targets, const CellObjective& obj,
                       const SearchOptions& opts) {
    if (net.q > 64) throw std::invalid_argument("search_states: q must be <= 64");
    if (targets.empty()) throw std::invalid_argument("search_states: no targets");
    if (opts.method != SearchMethod::Exhaustive && opts.budget < 1) {
        throw std::invalid_argument("search_states: budget must be >= 1");
    }
    if (opts.design_half && opts.mirror_perm.empty()) {
        throw std::invalid_argument("search_states: design_half requires mirror_perm");
    }

    const std::size_t n = targets.size();
    const std::size_t designed = opts.design_half ? (n + 1) / 2 : n;

    StateSet set;
    set.states.resize(n);
    for (std::size_t s = 0; s < designed; ++s) {
        const Candidate c = search_one(net, sw, targets[s], obj, opts,
                                       derive_seed(opts.seed, static_cast<std::uint64_t>(s)));
        set.states[s] = {c.x, c.eval, c.eval.margins.feasible()};
    }
    for (std::size_t s = designed; s < n; ++s) {
        const SwitchState mirrored = mirror_state(set.states[n - 1 - s].x, opts.mirror_perm);
        const StateEval eval = eval_state(net, mirrored, sw, targets[s], obj);
        set.states[s] = {mirrored, eval, eval.margins.feasible()};
    }
    return set;
}

SwitchState mirror_state(const SwitchState& x, const std::vector<int>& perm) {
    if (perm.size() != x.bits.size()) {
        throw std::invalid_argument("mirror_state: permutation length mismatch");
    }
    check_involution(perm);
    SwitchState out;
    out.bits.resize(x.bits.size());
    for (std::size_t i = 0; i < x.bits.size(); ++i) {
        out.bits[i] = x.bits[static_cast<std::size_t>(perm[i])];
    }
    return out;
}

std::vector<int> group_swap_permutation(int q, int group_len) {
    if (group_len < 1 || 2 * group_len > q) {
        throw std::invalid_argument("group_swap_permutation: need 2*group_len <= q");
    }
    std::vector<int> perm(static_cast<std::size_t>(q));
    for (int i = 0; i < q; ++i) perm[static_cast<std::size_t>(i)] = i;
    for (int i = 0; i < group_len; ++i) {
        perm[static_cast<std::size_t>(i)] = i + group_len;
        perm[static_cast<std::size_t>(i + group_len)] = i;
    }
    return perm;
}

PruneReport prune_switches(const StateSet& states) {
    if (states.states.empty()) {
        throw std::invalid_argument("prune_switches: state set is empty");
    }
    const std::size_t q = states.states.front().x.bits.size();
    PruneReport rep;
    for (std::size_t k = 0; k < q; ++k) {
        bool all_off = true, all_on = true;
        for (const auto& s : states.states) {
            if (s.x.bits.size() != q) {
                throw std::invalid_argument("prune_switches: inconsistent state lengths");
            }
            (s.x.bits[k] ? all_off : all_on) = false;
        }
        if (all_off) rep.removable_open.push_back(static_cast<int>(k));
        if (all_on) rep.replace_with_wire.push_back(static_cast<int>(k));
    }
    return rep;
}

}  // namespace prbfn
