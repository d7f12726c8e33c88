#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "prbfn/cell_optimizer.hpp"
#include "prbfn/rng.hpp"

using namespace prbfn;

namespace {

constexpr double kPi = 3.14159265358979323846;

// Single-frequency 3-port with a prescribed scattering matrix.
PixelNetwork net_from_s(const Eigen::MatrixXcd& S) {
    PixelNetwork net;
    net.n_feed = 3;
    net.q = 0;
    net.freqs_hz = {2.6e9};
    net.z = {s_to_z(S, 50.0)};
    net.reciprocal = false;
    return net;
}

Eigen::MatrixXcd splitter_s(std::complex<double> s21, std::complex<double> s31) {
    Eigen::MatrixXcd S = Eigen::MatrixXcd::Zero(3, 3);
    S(1, 0) = S(0, 1) = s21;
    S(2, 0) = S(0, 2) = s31;
    return S;
}

CellObjective loose_objective() {
    CellObjective obj;
    obj.t_s_db = 60.0;  // |S| <= 1 can never violate these
    obj.t_m_db = 60.0;
    obj.t_loss = 2.0;
    return obj;
}

// Mirror-symmetric surrogate: feed ports 2 and 3 swap, internal ports swap in
// adjacent pairs.
struct SymmetricFixture {
    PixelNetwork net;
    std::vector<int> internal_perm;
};

SymmetricFixture symmetric_surrogate(int q, std::uint64_t seed, int n_freq = 1) {
    REQUIRE(q % 2 == 0);
    SurrogateParams p;
    p.q = q;
    p.n_freq = n_freq;
    std::vector<int> ports = {0, 2, 1};
    std::vector<int> internal;
    for (int k = 0; k < q; k += 2) {
        ports.push_back(3 + k + 1);
        ports.push_back(3 + k);
        internal.push_back(k + 1);
        internal.push_back(k);
    }
    return {symmetrize_network(surrogate_cell(p, seed), ports), internal};
}

SwitchState random_bits(int q, std::mt19937_64& rng) {
    SwitchState x;
    x.bits.resize(static_cast<std::size_t>(q));
    for (auto& b : x.bits) b = static_cast<std::uint8_t>(rng() & 1u);
    return x;
}

// Target manufactured from the response a chosen state actually produces, so
// that state attains G1 = G2 = 0 by construction.
UnitStateTarget planted_target(const PixelNetwork& net, const SwitchState& x,
                               const SwitchModel& sw) {
    const Transmissions t = transmissions(z_to_s(reduce_network(net, x, sw, 0), net.z0));
    const double g3 = std::norm(t.s21) + std::norm(t.s31);
    UnitStateTarget target;
    target.amp1 = std::abs(t.s21) / std::sqrt(g3);
    target.amp2 = std::abs(t.s31) / std::sqrt(g3);
    target.dphase = wrap_phase(std::arg(t.s21) - std::arg(t.s31));
    return target;
}

}  // namespace

TEST_CASE("eval_state is zero at an exactly matching response") {
    const std::complex<double> s21 = std::polar(std::sqrt(0.5), 0.4);
    const std::complex<double> s31 = std::polar(std::sqrt(0.5), 1.3);
    const PixelNetwork net = net_from_s(splitter_s(s21, s31));

    UnitStateTarget target;
    target.amp1 = std::abs(s21);
    target.amp2 = std::abs(s31);
    target.dphase = wrap_phase(std::arg(s21) - std::arg(s31));

    const CellObjective obj = loose_objective();
    const StateEval e = eval_state(net, SwitchState{}, SwitchModel{}, target, obj);
    CHECK(e.g3 == doctest::Approx(1.0).epsilon(1e-9));
    CHECK(e.g1 < 1e-12);
    CHECK(e.g2 < 1e-12);
    // Lossless: the loss margin sits exactly at the threshold.
    CHECK(e.margins.loss == doctest::Approx(obj.t_loss).epsilon(1e-9));
}

TEST_CASE("eval_state phase term uses the wrapped radian difference") {
    const std::complex<double> s21 = std::polar(0.6, 30.0 * kPi / 180.0);
    const std::complex<double> s31 = std::polar(0.7, 0.0);
    const PixelNetwork net = net_from_s(splitter_s(s21, s31));

    UnitStateTarget target;
    const double g3 = std::norm(s21) + std::norm(s31);
    target.amp1 = std::abs(s21) / std::sqrt(g3);
    target.amp2 = std::abs(s31) / std::sqrt(g3);
    target.dphase = 45.0 * kPi / 180.0;

    const StateEval e = eval_state(net, SwitchState{}, SwitchModel{}, target, loose_objective());
    CHECK(e.g1 < 1e-12);
    CHECK(e.g2 == doctest::Approx(std::pow(kPi / 12.0, 2)).epsilon(1e-9));  // 15 degrees squared
    CHECK(e.g2 == doctest::Approx(0.0685).epsilon(1e-2));
}

TEST_CASE("eval_state is invariant under a global phase rotation of the outputs") {
    const std::complex<double> s21 = std::polar(0.55, 0.9);
    const std::complex<double> s31 = std::polar(0.62, -0.3);
    UnitStateTarget target;
    target.amp1 = 0.8;
    target.amp2 = 0.6;
    target.dphase = 0.7;
    const CellObjective obj = loose_objective();

    const StateEval base = eval_state(net_from_s(splitter_s(s21, s31)), SwitchState{},
                                      SwitchModel{}, target, obj);
    const std::complex<double> rot = std::polar(1.0, 2.1);
    const StateEval rotated = eval_state(net_from_s(splitter_s(s21 * rot, s31 * rot)),
                                         SwitchState{}, SwitchModel{}, target, obj);
    CHECK(rotated.g1 == doctest::Approx(base.g1).epsilon(1e-9));
    CHECK(rotated.g2 == doctest::Approx(base.g2).epsilon(1e-9));
    CHECK(rotated.g3 == doctest::Approx(base.g3).epsilon(1e-9));
}

TEST_CASE("constraint margins flag violations and feed the penalty") {
    // Strongly reflective port 1: S11 = 0.9 (about -0.9 dB).
    Eigen::MatrixXcd S = splitter_s(std::complex<double>(0.3, 0.0), std::complex<double>(0.3, 0.0));
    S(0, 0) = 0.9;
    const PixelNetwork net = net_from_s(S);
    UnitStateTarget target{std::sqrt(0.5), std::sqrt(0.5), 0.0};

    CellObjective obj;  // default thresholds: -10 dB matching
    const StateEval e = eval_state(net, SwitchState{}, SwitchModel{}, target, obj);
    CHECK(e.margins.matching_db < 0.0);
    CHECK_FALSE(e.margins.feasible());
    CHECK(e.penalized > e.weighted + 1e3 * (-e.margins.matching_db) - 1e-9);
}

TEST_CASE("eval_state honors an explicit evaluation grid") {
    SurrogateParams p;
    p.q = 4;
    p.n_freq = 3;
    const PixelNetwork net = surrogate_cell(p, 321);
    std::mt19937_64 rng(5);
    const SwitchState x = random_bits(4, rng);
    UnitStateTarget target{0.6, 0.8, 0.2};

    CellObjective single = loose_objective();
    single.freq_indices = {1};
    const StateEval e1 = eval_state(net, x, SwitchModel{}, target, single);
    CHECK(e1.worst_freq_index == 1);

    CellObjective bad = loose_objective();
    bad.freq_indices = {9};
    CHECK_THROWS_AS(eval_state(net, x, SwitchModel{}, target, bad), std::invalid_argument);
}

TEST_CASE("stochastic searches match the exhaustive optimum on a small cell") {
    const SwitchModel sw;
    std::mt19937_64 rng(2);
    for (int trial = 0; trial < 3; ++trial) {
        SurrogateParams p;
        p.q = 8;
        p.n_freq = 1;
        const PixelNetwork net = surrogate_cell(p, 900 + static_cast<std::uint64_t>(trial));
        std::vector<UnitStateTarget> targets;
        for (int n = 0; n < 3; ++n) {
            targets.push_back(planted_target(net, random_bits(8, rng), sw));
        }
        const CellObjective obj = loose_objective();

        SearchOptions ex;
        ex.method = SearchMethod::Exhaustive;
        const StateSet ref = search_states(net, sw, targets, obj, ex);

        for (SearchMethod m : {SearchMethod::Annealing, SearchMethod::Genetic}) {
            SearchOptions so;
            so.method = m;
            so.budget = 20LL << 8;
            so.seed = 77 + trial;
            const StateSet got = search_states(net, sw, targets, obj, so);
            for (std::size_t s = 0; s < targets.size(); ++s) {
                CHECK(got.states[s].eval.penalized >=
                      ref.states[s].eval.penalized - 1e-12);  // never better than exhaustive
                CHECK(got.states[s].eval.penalized <= ref.states[s].eval.penalized + 1e-9);
            }
        }
    }
}

TEST_CASE("planted instances are recovered with objective zero") {
    const SwitchModel sw;
    std::mt19937_64 rng(44);
    SurrogateParams p;
    p.q = 10;
    p.n_freq = 1;
    const PixelNetwork net = surrogate_cell(p, 4242);
    const SwitchState star = random_bits(10, rng);
    const std::vector<UnitStateTarget> targets = {planted_target(net, star, sw)};

    for (SearchMethod m : {SearchMethod::Exhaustive, SearchMethod::Annealing, SearchMethod::Genetic}) {
        SearchOptions so;
        so.method = m;
        so.budget = 20LL << 10;
        so.seed = 5;
        const StateSet got = search_states(net, sw, targets, loose_objective(), so);
        CHECK(got.states[0].eval.weighted < 1e-18);
        CHECK(got.states[0].feasible);
    }
}

TEST_CASE("symmetric instance yields an equal-split optimum") {
    const SwitchModel sw;
    const SymmetricFixture fix = symmetric_surrogate(8, 31);
    // Plant a self-symmetric state so the optimum is an exact equal split.
    SwitchState star;
    star.bits = {1, 1, 0, 0, 1, 1, 0, 0};  // invariant under adjacent-pair swaps
    const std::vector<UnitStateTarget> targets = {planted_target(fix.net, star, sw)};
    CHECK(targets[0].amp1 == doctest::Approx(std::sqrt(0.5)).epsilon(1e-9));
    CHECK(std::abs(targets[0].dphase) < 1e-9);

    SearchOptions so;
    so.method = SearchMethod::Exhaustive;
    const StateSet got = search_states(fix.net, sw, targets, loose_objective(), so);
    CHECK(got.states[0].eval.weighted < 1e-18);

    const Transmissions t =
        transmissions(z_to_s(reduce_network(fix.net, got.states[0].x, sw, 0), fix.net.z0));
    CHECK(std::abs(std::abs(t.s21) - std::abs(t.s31)) < 1e-9);
}

TEST_CASE("search is deterministic given the seed") {
    const SwitchModel sw;
    SurrogateParams p;
    p.q = 9;
    p.n_freq = 1;
    const PixelNetwork net = surrogate_cell(p, 8);
    std::mt19937_64 rng(1);
    const std::vector<UnitStateTarget> targets = {planted_target(net, random_bits(9, rng), sw)};

    for (SearchMethod m : {SearchMethod::Annealing, SearchMethod::Genetic}) {
        SearchOptions so;
        so.method = m;
        so.budget = 4000;
        so.seed = 99;
        const StateSet a = search_states(net, sw, targets, loose_objective(), so);
        const StateSet b = search_states(net, sw, targets, loose_objective(), so);
        CHECK(a.states[0].x.bits == b.states[0].x.bits);
        CHECK(a.states[0].eval.penalized == b.states[0].eval.penalized);
    }
}

TEST_CASE("mirrored evaluation on a symmetric surrogate") {
    const SwitchModel sw;
    const SymmetricFixture fix = symmetric_surrogate(8, 61);
    std::mt19937_64 rng(3);
    for (int trial = 0; trial < 5; ++trial) {
        const SwitchState x = random_bits(8, rng);
        UnitStateTarget target;
        target.amp1 = 0.3 + 0.4 * uniform_unit(rng);
        target.amp2 = std::sqrt(1.0 - target.amp1 * target.amp1);
        target.dphase = uniform_range(rng, -kPi, kPi);

        UnitStateTarget swapped;
        swapped.amp1 = target.amp2;
        swapped.amp2 = target.amp1;
        swapped.dphase = wrap_phase(-target.dphase);

        const CellObjective obj = loose_objective();
        const StateEval direct = eval_state(fix.net, x, sw, target, obj);
        const StateEval mirrored =
            eval_state(fix.net, mirror_state(x, fix.internal_perm), sw, swapped, obj);
        CHECK(mirrored.g1 == doctest::Approx(direct.g1).epsilon(1e-9));
        CHECK(mirrored.g2 == doctest::Approx(direct.g2).epsilon(1e-9));
        CHECK(mirrored.g3 == doctest::Approx(direct.g3).epsilon(1e-9));
    }
}

TEST_CASE("designing half the states and mirroring matches the direct design") {
    const SwitchModel sw;
    const SymmetricFixture fix = symmetric_surrogate(8, 71);
    std::mt19937_64 rng(13);

    // Mirror-symmetric target family: state n pairs with state N-1-n.
    std::vector<UnitStateTarget> targets(4);
    for (int n = 0; n < 2; ++n) {
        UnitStateTarget t;
        t.amp1 = 0.4 + 0.3 * uniform_unit(rng);
        t.amp2 = std::sqrt(1.0 - t.amp1 * t.amp1);
        t.dphase = uniform_range(rng, -2.0, 2.0);
        targets[static_cast<std::size_t>(n)] = t;
        targets[static_cast<std::size_t>(3 - n)] = {t.amp2, t.amp1, wrap_phase(-t.dphase)};
    }

    SearchOptions direct;
    direct.method = SearchMethod::Exhaustive;
    const StateSet full = search_states(fix.net, sw, targets, loose_objective(), direct);

    SearchOptions half = direct;
    half.design_half = true;
    half.mirror_perm = fix.internal_perm;
    const StateSet mirrored = search_states(fix.net, sw, targets, loose_objective(), half);

    for (std::size_t s = 0; s < 4; ++s) {
        CHECK(mirrored.states[s].eval.g1 ==
              doctest::Approx(full.states[s].eval.g1).epsilon(1e-9));
        CHECK(mirrored.states[s].eval.weighted ==
              doctest::Approx(full.states[s].eval.weighted).epsilon(1e-9));
    }
}

TEST_CASE("search_states guards its preconditions") {
    SurrogateParams p;
    p.q = 4;
    p.n_freq = 1;
    const PixelNetwork net = surrogate_cell(p, 1);
    const std::vector<UnitStateTarget> targets = {{0.6, 0.8, 0.0}};

    SearchOptions so;
    so.budget = 0;
    CHECK_THROWS_AS(search_states(net, SwitchModel{}, targets, loose_objective(), so),
                    std::invalid_argument);
    so.budget = 10;
    CHECK_THROWS_AS(search_states(net, SwitchModel{}, {}, loose_objective(), so),
                    std::invalid_argument);
    so.design_half = true;  // without a mirror permutation
    CHECK_THROWS_AS(search_states(net, SwitchModel{}, targets, loose_objective(), so),
                    std::invalid_argument);

    PixelNetwork wide = net;
    wide.q = 65;  // over the supported switch count
    CHECK_THROWS_AS(search_states(wide, SwitchModel{}, targets, loose_objective(), SearchOptions{}),
                    std::invalid_argument);

    SearchOptions ex;
    ex.method = SearchMethod::Exhaustive;
    PixelNetwork big = net;
    big.q = 21;  // exhaustive limit is 20
    CHECK_THROWS_AS(search_states(big, SwitchModel{}, targets, loose_objective(), ex),
                    std::invalid_argument);
}

TEST_CASE("search with no internal ports returns the single fixed state") {
    SurrogateParams p;
    p.q = 0;
    p.n_freq = 1;
    const PixelNetwork net = surrogate_cell(p, 6);
    const std::vector<UnitStateTarget> targets = {{std::sqrt(0.5), std::sqrt(0.5), 0.0}};
    for (SearchMethod m : {SearchMethod::Exhaustive, SearchMethod::Annealing, SearchMethod::Genetic}) {
        SearchOptions so;
        so.method = m;
        so.budget = 100;
        const StateSet set = search_states(net, SwitchModel{}, targets, loose_objective(), so);
        CHECK(set.states[0].x.bits.empty());
    }
}

TEST_CASE("mirror_state applies the published group-swap layout") {
    const std::vector<int> perm = group_swap_permutation(20, 8);
    const SwitchState state1 = from_bit_string("1010 1011 0011 1001 0010");
    const SwitchState state11 = mirror_state(state1, perm);
    CHECK(to_bit_string(state11) == "0011 1001 1010 1011 0010");

    // Identity permutation leaves the state alone.
    std::vector<int> id(20);
    for (int i = 0; i < 20; ++i) id[static_cast<std::size_t>(i)] = i;
    CHECK(mirror_state(state1, id).bits == state1.bits);

    // Involution property on random vectors.
    std::mt19937_64 rng(10);
    for (int trial = 0; trial < 100; ++trial) {
        const SwitchState x = random_bits(20, rng);
        CHECK(mirror_state(mirror_state(x, perm), perm).bits == x.bits);
    }

    CHECK_THROWS_AS(mirror_state(state1, std::vector<int>(3, 0)), std::invalid_argument);
    std::vector<int> not_involution(20);
    for (int i = 0; i < 20; ++i) not_involution[static_cast<std::size_t>(i)] = (i + 1) % 20;
    CHECK_THROWS_AS(mirror_state(state1, not_involution), std::invalid_argument);
    CHECK_THROWS_AS(group_swap_permutation(10, 8), std::invalid_argument);
}

TEST_CASE("prune report marks always-off and always-on switches") {
    StateSet set;
    for (int n = 0; n < 3; ++n) {
        SearchedState s;
        s.x.bits = {0, 1, static_cast<std::uint8_t>(n & 1), 1, 0};
        set.states.push_back(s);
    }
    const PruneReport rep = prune_switches(set);
    CHECK(rep.removable_open == std::vector<int>{0, 4});
    CHECK(rep.replace_with_wire == std::vector<int>{1, 3});

    CHECK_THROWS_AS(prune_switches(StateSet{}), std::invalid_argument);
}
