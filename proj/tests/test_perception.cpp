#include <doctest.h>

#include <set>

#include "auvsim/perception.hpp"
#include "testutil.hpp"

using namespace auvsim;

TEST_CASE("partition_map produces row-major square blocks") {
    SensorLayout lay = partition_map(12, 9);
    CHECK(lay.block_side == 4);
    CHECK(lay.blocks_per_side == 3);
    auto a0 = lay.area(0);
    CHECK(a0.c0 == 1);
    CHECK(a0.c1 == 4);
    CHECK(a0.r0 == 1);
    CHECK(a0.r1 == 4);
    auto a5 = lay.area(5);  // block row 1, block col 2
    CHECK(a5.c0 == 9);
    CHECK(a5.r0 == 5);
    CHECK(lay.area_of({1, 1}) == 0);
    CHECK(lay.area_of({12, 12}) == 8);
    CHECK(lay.area_of({5, 1}) == 1);

    SensorLayout quad = partition_map(12, 4);
    CHECK(quad.block_side == 6);

    CHECK_THROWS_AS(partition_map(12, 5), ConfigError);
    CHECK_THROWS_AS(partition_map(10, 9), ConfigError);
}

TEST_CASE("sense_local refreshes exactly the Euclidean disk") {
    GridMap map(12);
    map.at({6, 8}) = Cell::obstacle;
    BeliefGrid belief(12);
    AgeGrid age(12, 101);

    sense_local(belief, age, map, {6, 6}, 2);
    CHECK(belief.at({6, 8}) == Cell::obstacle);  // distance 2
    CHECK(age.at({6, 8}) == 0);
    CHECK(belief.at({8, 8}) == Cell::unknown);  // distance 2.83
    CHECK(age.at({8, 8}) == 101);
    CHECK(belief.at({7, 7}) == Cell::free);  // distance 1.41
    int refreshed = 0;
    for (uint16_t a : age.age) refreshed += a == 0 ? 1 : 0;
    CHECK(refreshed == 13);  // |disk of radius 2| on the grid
}

TEST_CASE("age_tick increments observed cells and leaves the sentinel alone") {
    AgeGrid age(4, 101);
    age.at({1, 1}) = 3;
    age.at({2, 2}) = 0;
    age_tick(age);
    CHECK(age.at({1, 1}) == 4);
    CHECK(age.at({2, 2}) == 1);
    CHECK(age.at({3, 3}) == 101);
    // the sentinel is also the ceiling
    age.at({4, 4}) = 100;
    age_tick(age);
    CHECK(age.at({4, 4}) == 101);
    age_tick(age);
    CHECK(age.at({4, 4}) == 101);
}

TEST_CASE("centralized transmission refreshes exactly the chosen area") {
    GridMap map(12);
    map.at({2, 2}) = Cell::obstacle;
    SensorLayout lay = partition_map(12, 9);
    BeliefGrid belief(12);
    AgeGrid age(12, 101);

    apply_centralized_tx(belief, age, map, lay, 0);
    int refreshed = 0;
    for (uint16_t a : age.age) refreshed += a == 0 ? 1 : 0;
    CHECK(refreshed == 16);
    CHECK(belief.at({2, 2}) == Cell::obstacle);
    CHECK(belief.at({5, 5}) == Cell::unknown);

    // idempotent when the map has not changed
    BeliefGrid before = belief;
    apply_centralized_tx(belief, age, map, lay, 0);
    CHECK(belief.cells == before.cells);

    CHECK_THROWS_AS(apply_centralized_tx(belief, age, map, lay, 9), std::logic_error);
    CHECK_THROWS_AS(apply_centralized_tx(belief, age, map, lay, -1), std::logic_error);

    // every area refreshes exactly its own 16 cells
    for (int g = 0; g < 9; ++g) {
        BeliefGrid b(12);
        AgeGrid ag(12, 101);
        apply_centralized_tx(b, ag, map, lay, g);
        int count = 0;
        for (uint16_t a : ag.age) count += a == 0 ? 1 : 0;
        CHECK(count == 16);
    }
}

TEST_CASE("collision channel: delivery happens exactly for the nine one-hot vectors") {
    GridMap map(12);
    map.at({3, 3}) = Cell::obstacle;
    SensorLayout lay = partition_map(12, 9);

    for (int mask = 0; mask < (1 << 9); ++mask) {
        std::vector<uint8_t> actions(9, 0);
        int transmitters = 0;
        for (int g = 0; g < 9; ++g) {
            actions[g] = (mask >> g) & 1;
            transmitters += actions[g];
        }
        BeliefGrid belief(12);
        AgeGrid age(12, 101);
        CommOutcome out = apply_distributed_tx(belief, age, map, lay, actions);

        int refreshed = 0;
        for (uint16_t a : age.age) refreshed += a == 0 ? 1 : 0;

        if (transmitters == 1) {
            CHECK(!out.collision);
            CHECK(out.delivered_area >= 0);
            CHECK(refreshed == 16);
        } else if (transmitters == 0) {
            CHECK(!out.collision);
            CHECK(out.delivered_area == -1);
            CHECK(refreshed == 0);
        } else {
            CHECK(out.collision);
            CHECK(out.delivered_area == -1);
            CHECK(refreshed == 0);
        }
    }
}

TEST_CASE("sensor_view copies the field of view and nothing else") {
    GridMap map(12);
    map.at({2, 3}) = Cell::obstacle;
    map.at({11, 11}) = Cell::target;
    SensorLayout lay = partition_map(12, 9);

    SUBCASE("full-map sensor sees everything") {
        auto view = sensor_view(map, lay, 0, true);
        CHECK(view == map.cells);
    }
    SUBCASE("block sensor sees its 16 cells") {
        auto view = sensor_view(map, lay, 0, false);
        int known = 0;
        for (Cell c : view) known += c != Cell::unknown ? 1 : 0;
        CHECK(known == 16);
        CHECK(view[2 * 12 + 1] == Cell::obstacle);  // (2,3)
        CHECK(view[10 * 12 + 10] == Cell::unknown);  // (11,11) is outside block 0
    }
}

TEST_CASE("sensor_reward charges colliders and pays the window sum otherwise") {
    SUBCASE("two transmitters both pay the penalty") {
        std::vector<double> window{0.0, 0.0, 0.0, 0.22, 0.0, 0.0};
        auto r = sensor_reward({1, 1, 0, 0, 0, 0, 0, 0, 0}, window, 1.0, 5);
        CHECK(r[0] == doctest::Approx(-1.0));
        CHECK(r[1] == doctest::Approx(-1.0));
        CHECK(r[2] == doctest::Approx(0.22));  // silent sensors still see the robot's progress
    }
    SUBCASE("all silent: everyone gets the window sum") {
        std::vector<double> window{0.0, 0.22, 0.0, 0.0, 0.22, 0.0};
        auto r = sensor_reward(std::vector<uint8_t>(9, 0), window, 1.0, 5);
        for (double v : r) CHECK(v == doctest::Approx(0.44));
    }
    SUBCASE("a lone transmitter keeps the final reward in its window") {
        std::vector<double> window{0.0, 0.22, 0.0, 0.0, 0.0, 1.0};
        auto r = sensor_reward({0, 0, 1, 0, 0, 0, 0, 0, 0}, window, 1.0, 5);
        CHECK(r[2] >= 1.0);
    }
    SUBCASE("reward is blind to which sensor transmitted when nobody collides") {
        std::vector<double> window{0.22, 0.0, 0.0, 0.0, 0.0, 0.22};
        for (int g = 0; g < 9; ++g) {
            std::vector<uint8_t> actions(9, 0);
            actions[static_cast<size_t>(g)] = 1;
            auto r = sensor_reward(actions, window, 1.0, 5);
            for (double v : r) CHECK(v == doctest::Approx(0.44));
        }
    }
    SUBCASE("wrong window length is a contract violation") {
        CHECK_THROWS_AS(sensor_reward({0, 1}, {0.0, 0.0}, 1.0, 5), std::logic_error);
    }
}

TEST_CASE("belief soundness: every known cell matches the map at its refresh slot") {
    // replicates the episode driver's slot order with a map history on the side
    TaskConfig cfg;
    RngStream rng(31);
    SensorLayout lay = partition_map(12, 9);

    for (int ep = 0; ep < 150; ++ep) {
        Task task = ep % 2 == 0 ? Task::debris : Task::muling;
        EnvState env = new_episode(task, cfg, rng);
        BeliefGrid belief(12);
        AgeGrid age(12, static_cast<uint16_t>(cfg.steps_per_episode + 1));
        std::vector<std::vector<Cell>> history;  // sensing-time map per slot

        for (int k = 0; k < cfg.steps_per_episode; ++k) {
            age_tick(age);
            AgeGrid age_before = age;
            if (k % cfg.comm_period == 0) {
                if (k > 0) advance_dynamics(env, rng);
                history.push_back(env.map.cells);
                sense_local(belief, age, env.map, env.robot.pos, cfg.v_robot);
                std::vector<uint8_t> actions(9, 0);
                for (auto& a : actions) a = rng.bernoulli(0.2) ? 1 : 0;
                apply_distributed_tx(belief, age, env.map, lay, actions);
            } else {
                history.push_back(env.map.cells);
                sense_local(belief, age, env.map, env.robot.pos, cfg.v_robot);
            }

            for (int r = 1; r <= 12; ++r) {
                for (int c = 1; c <= 12; ++c) {
                    Coord x{c, r};
                    uint16_t a = age.at(x);
                    if (belief.at(x) == Cell::unknown) {
                        CHECK(a == age.sentinel);
                        continue;
                    }
                    REQUIRE(a <= k);
                    size_t slot = static_cast<size_t>(k - a);
                    CHECK(belief.at(x) == history[slot][static_cast<size_t>(r - 1) * 12 + (c - 1)]);
                    // age coherence: 0 iff refreshed this slot, +1 otherwise
                    if (a != 0) {
                        uint16_t prev = age_before.at(x);
                        CHECK(a == prev);
                    }
                }
            }
            step_robot(env, rng.uniform_int(0, kNumMoves - 1));
        }
    }
}
