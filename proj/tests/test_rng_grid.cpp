#include <cmath>
#include <set>

#include <doctest.h>

#include "jumprl/error.hpp"
#include "jumprl/parallel.hpp"
#include "jumprl/rng.hpp"
#include "jumprl/time_grid.hpp"

using namespace jumprl;

TEST_CASE("philox4x32-10 known-answer vectors") {
    CHECK(philox4x32_10({0, 0, 0, 0}, {0, 0}) ==
          PhiloxBlock{0x6627e8d5, 0xe169c58d, 0xbc57ac4c, 0x9b00dbd8});
    CHECK(philox4x32_10({0xffffffff, 0xffffffff, 0xffffffff, 0xffffffff},
                        {0xffffffff, 0xffffffff}) ==
          PhiloxBlock{0x408f276d, 0x41c83b0e, 0xa20bc7c6, 0x6d5451fd});
    CHECK(philox4x32_10({0x243f6a88, 0x85a308d3, 0x13198a2e, 0x03707344},
                        {0xa4093822, 0x299f31d0}) ==
          PhiloxBlock{0xd16cfe09, 0x94fdcceb, 0x5001e420, 0x24126ea1});
}

TEST_CASE("splitmix64 reference outputs") {
    // First two outputs of the SplitMix64 stream seeded with 0.
    CHECK(splitmix64(0) == 0xe220a8397b1dcdafULL);
    CHECK(splitmix64(0x9e3779b97f4a7c15ULL) == 0x6e789e6aa1b965f4ULL);
}

TEST_CASE("counter rng is addressable and keyed") {
    const CounterRng a(7, 3, 11);
    const CounterRng b(7, 3, 11);
    const CounterRng c(7, 3, 12);
    for (std::uint64_t s = 0; s < 100; ++s) {
        CHECK(a.uniform(s) == b.uniform(s));
        CHECK(a.normal(s) == b.normal(s));
    }
    CHECK(a.key64() != c.key64());
    CHECK(a.uniform(5, Lane::Diffusion) != a.uniform(5, Lane::JumpTime));
    // Order of draws does not matter.
    const double late = a.normal(99);
    (void)a.normal(0);
    CHECK(a.normal(99) == late);
}

TEST_CASE("counter rng moments") {
    const CounterRng rng(1, 0, 0);
    const int n = 200000;
    double su = 0.0, sz = 0.0, szz = 0.0;
    double umin = 1.0, umax = 0.0;
    for (int i = 0; i < n; ++i) {
        const double u = rng.uniform(static_cast<std::uint64_t>(i));
        const double z = rng.normal(static_cast<std::uint64_t>(i));
        su += u;
        sz += z;
        szz += z * z;
        umin = std::min(umin, u);
        umax = std::max(umax, u);
    }
    CHECK(umin > 0.0);
    CHECK(umax < 1.0);
    CHECK(su / n == doctest::Approx(0.5).epsilon(0.005));
    CHECK(std::abs(sz / n) < 0.01);
    CHECK(szz / n == doctest::Approx(1.0).epsilon(0.01));
}

TEST_CASE("to_open_unit stays inside the open interval") {
    CHECK(to_open_unit(0) > 0.0);
    CHECK(to_open_unit(~std::uint64_t{0}) < 1.0);
}

TEST_CASE("build_grid examples") {
    const TimeGrid g = build_grid(1.0, 1000);
    CHECK(g.dt() == doctest::Approx(0.001));
    CHECK(g[1000] == 1.0);
    CHECK(g[0] == 0.0);

    const TimeGrid two = build_grid(1.0, 2);
    CHECK(two.times() == std::vector<double>{0.0, 0.5, 1.0});

    const TimeGrid day = build_grid(1.0, 79);
    CHECK(day.dt() == doctest::Approx(0.0126582).epsilon(1e-6));
    CHECK(day.n_steps() == 79);
}

TEST_CASE("build_grid spacing is uniform to one ulp") {
    for (std::size_t n : {2u, 7u, 79u, 1000u, 10000u}) {
        for (double horizon : {0.5, 1.0, 3.0}) {
            const TimeGrid g = build_grid(horizon, n);
            REQUIRE(g.times().size() == n + 1);
            CHECK(g[n] == horizon);
            for (std::size_t i = 0; i < n; ++i) {
                const double step = g[i + 1] - g[i];
                const double ulp = std::nextafter(g[i + 1], 2.0 * horizon) - g[i + 1];
                CHECK(std::abs(step - g.dt()) <= ulp);
            }
        }
    }
}

TEST_CASE("build_grid rejects bad input") {
    CHECK_THROWS_AS(build_grid(0.0, 10), ConfigError);
    CHECK_THROWS_AS(build_grid(-1.0, 10), ConfigError);
    CHECK_THROWS_AS(build_grid(1.0, 1), ConfigError);
    CHECK_THROWS_AS(build_grid(1.0, 0), ConfigError);
}

TEST_CASE("first_index_at_or_after snaps up") {
    const TimeGrid g = build_grid(1.0, 4);
    CHECK(g.first_index_at_or_after(0.1) == 1);
    CHECK(g.first_index_at_or_after(0.25) == 1);
    CHECK(g.first_index_at_or_after(0.26) == 2);
    CHECK(g.first_index_at_or_after(0.999) == 4);
    CHECK(g.first_index_at_or_after(0.0) == 1);
}

TEST_CASE("parallel_for covers every index once") {
    std::vector<int> hits(10007, 0);
    parallel_for(hits.size(), [&](std::size_t b, std::size_t e) {
        for (std::size_t i = b; i < e; ++i) ++hits[i];
    });
    CHECK(std::set<int>(hits.begin(), hits.end()) == std::set<int>{1});
    CHECK_THROWS_AS(parallel_for(10, [](std::size_t, std::size_t) { throw ConfigError("x"); }),
                    ConfigError);
}
