#include <doctest.h>

#include "auvsim/policies.hpp"
#include "testutil.hpp"

using namespace auvsim;

TEST_CASE("strategy names round-trip and reject unknowns") {
    for (Strategy s : {Strategy::rc, Strategy::cc, Strategy::oc, Strategy::cjcc, Strategy::djcc})
        CHECK(strategy_from_name(strategy_name(s)) == s);
    CHECK_THROWS_AS(strategy_from_name("greedy"), ConfigError);
    CHECK(channel_mode_of(Strategy::oc) == ChannelMode::oc_bypass);
    CHECK(channel_mode_of(Strategy::djcc) == ChannelMode::distributed);
    CHECK(channel_mode_of(Strategy::cc) == ChannelMode::centralized);
}

TEST_CASE("rc picks areas uniformly and independently") {
    RngStream rng(17);
    const int64_t samples = 100000;
    std::vector<int64_t> counts(9, 0);
    std::vector<int> sequence;
    sequence.reserve(samples);
    for (int64_t i = 0; i < samples; ++i) {
        int a = rc_policy(rng, 9);
        counts[static_cast<size_t>(a)]++;
        sequence.push_back(a);
    }
    double p = 1.0 / 9.0, sd = std::sqrt(samples * p * (1 - p));
    for (int64_t c : counts)
        CHECK(std::abs(static_cast<double>(c) - samples * p) < 3.0 * sd + 1.0);
    CHECK(testutil::chi2_pvalue(testutil::chi2_stat(counts, std::vector<double>(9, p), samples), 8) >
          0.01);

    // lag-1 autocorrelation of the index sequence is ~0 for independent draws
    double mean = 0.0;
    for (int a : sequence) mean += a;
    mean /= static_cast<double>(samples);
    double cov = 0.0, var = 0.0;
    for (int64_t i = 0; i < samples; ++i) {
        double d = sequence[static_cast<size_t>(i)] - mean;
        var += d * d;
        if (i > 0) cov += d * (sequence[static_cast<size_t>(i - 1)] - mean);
    }
    CHECK(std::abs(cov / var) < 0.02);

    for (int i = 0; i < 20; ++i) CHECK(rc_policy(rng, 1) == 0);
}

TEST_CASE("cc picks the area with the nearest center") {
    SensorLayout lay = partition_map(12, 9);
    CHECK(cc_policy({2, 2}, lay) == 0);
    CHECK(cc_policy({6, 6}, lay) == 4);  // central block
    CHECK(cc_policy({12, 12}, lay) == 8);
    CHECK(cc_policy({5, 1}, lay) == 1);

    // oracle sweep: minimal center distance with lowest-index ties, every cell
    for (int r = 1; r <= 12; ++r) {
        for (int c = 1; c <= 12; ++c) {
            int best = 0;
            double best_d2 = 1e300;
            for (int g = 0; g < 9; ++g) {
                auto [cc, cr] = lay.area_center(g);
                double d2 = (c - cc) * (c - cc) + (r - cr) * (r - cr);
                if (d2 < best_d2) {
                    best = g;
                    best_d2 = d2;
                }
            }
            CHECK(cc_policy({c, r}, lay) == best);
        }
    }

    // determinism
    for (int rep = 0; rep < 3; ++rep) CHECK(cc_policy({7, 3}, lay) == cc_policy({7, 3}, lay));
}

TEST_CASE("greedy wrapper is a deterministic argmax with shift invariance") {
    NetSpec spec{4, 8, 4, 64};
    ValueNet net(spec, 55);
    RobotPolicy policy = greedy_policy(&net);

    RngStream rng(5);
    ObservationStack obs;
    obs.n = 8;
    obs.channels = 4;
    obs.age_denom = 101;
    obs.belief.assign(64, 1);
    obs.age.assign(64, 0);
    obs.xl_c = 3;
    obs.xl_r = 2;
    obs.xf_c = 6;
    obs.xf_r = 8;

    int first = policy(obs);
    for (int rep = 0; rep < 5; ++rep) CHECK(policy(obs) == first);

    auto q = net.forward(obs);
    CHECK(first == egreedy_action(q, 0.0, rng));

    // adding a constant to every output leaves the chosen action unchanged
    ValueNet shifted = net;
    for (int a = 0; a < 4; ++a)
        shifted.params()[shifted.bias_offset(3) + static_cast<size_t>(a)] += 3.25f;
    CHECK(greedy_policy(&shifted)(obs) == first);
}

TEST_CASE("oc with the every-slot flag keeps the belief exact between comm slots") {
    TaskConfig cfg;
    CpPomdpSpec spec = CpPomdpSpec::make(Task::debris, ChannelMode::oc_bypass, cfg, 9);
    spec.oc_every_slot = true;

    std::vector<Transition> seen;
    EpisodeHooks hooks;
    hooks.on_robot_transition = [&](const Transition& t) { seen.push_back(t); };
    RngStream env_rng(42);
    RobotPolicy stuck = [](const ObservationStack&) { return 3; };
    run_episode(spec, cfg, stuck, {}, env_rng, &hooks);

    for (int k : {1, 2, 3, 4}) {
        for (uint16_t a : seen[static_cast<size_t>(k)].obs.age) CHECK(a == 0);
        for (uint8_t b : seen[static_cast<size_t>(k)].obs.belief) CHECK(b != 0);
    }
}

TEST_CASE("oc informational dominance: its belief error never exceeds cc's") {
    // same seeds, same stuck robot; count cells where belief differs from the
    // truth at each comm slot
    TaskConfig cfg;
    cfg.steps_per_episode = 50;
    auto belief_errors = [&](ChannelMode mode) {
        CpPomdpSpec spec = CpPomdpSpec::make(Task::debris, mode, cfg, 9);
        std::vector<int> errors;
        EpisodeHooks hooks;
        std::vector<Transition> seen;
        hooks.on_robot_transition = [&](const Transition& t) { seen.push_back(t); };
        std::vector<std::vector<Cell>> maps;
        hooks.on_slot = [&](const EnvState& env, const SlotRecord&) {
            maps.push_back(env.map.cells);
        };
        RngStream env_rng(909);
        RobotPolicy stuck = [](const ObservationStack&) { return 3; };
        run_episode(spec, cfg, stuck, mode == ChannelMode::centralized ? make_cc_sensor()
                                                                       : SensorPolicy{},
                    env_rng, &hooks);
        for (size_t k = 0; k < seen.size(); ++k) {
            int err = 0;
            for (size_t i = 0; i < 144; ++i)
                if (seen[k].obs.belief[i] != static_cast<uint8_t>(maps[k][i])) ++err;
            errors.push_back(err);
        }
        return errors;
    };

    std::vector<int> oc = belief_errors(ChannelMode::oc_bypass);
    std::vector<int> cc = belief_errors(ChannelMode::centralized);
    REQUIRE(oc.size() == cc.size());
    for (size_t k = 0; k < oc.size(); ++k) CHECK(oc[k] <= cc[k]);
}
