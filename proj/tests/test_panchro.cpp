#include <catch2/catch_amalgamated.hpp>

#include <algorithm>
#include <numeric>

#include "test_support.hpp"
#include "vbench/panchro.hpp"

using namespace vbench;
using testutil::make_chip;
using testutil::random_chip;

TEST_CASE("panchromatic_simulate examples") {
    SECTION("identity transforms then equal-weight mean") {
        PanchroParams p;
        p.blue_gain = 1.0;
        p.red_gamma = 1.0;
        p.green_gamma = 1.0;
        p.luma_weights = {1.0 / 3, 1.0 / 3, 1.0 / 3};
        ImageChip img = make_chip(1, 1, 3, [](int, int, int c) {
            return c == 0 ? 0.3 : c == 1 ? 0.6 : 0.9;
        });
        ImageChip out = panchromatic_simulate(img, p);
        CHECK(out.at(0, 0) == Catch::Approx(0.6).margin(1e-12));
    }
    SECTION("blue_gain 0 suppresses a pure-blue pixel entirely") {
        PanchroParams p;
        p.blue_gain = 0.0;
        ImageChip img = make_chip(1, 1, 3, [](int, int, int c) { return c == 2 ? 1.0 : 0.0; });
        ImageChip out = panchromatic_simulate(img, p);
        CHECK(out.at(0, 0) == Catch::Approx(0.0).margin(1e-15));
    }
    SECTION("default params match the straight-line pipeline oracle") {
        PanchroParams p; // defaults
        ImageChip img = make_chip(1, 1, 3, [](int, int, int c) {
            return c == 0 ? 0.25 : c == 1 ? 0.5 : 0.75;
        });
        ImageChip out = panchromatic_simulate(img, p);
        CHECK(out.at(0, 0) ==
              Catch::Approx(testutil::panchro_pixel_oracle(0.25, 0.5, 0.75, p)).margin(1e-12));
    }
    SECTION("non-positive gamma rejected") {
        PanchroParams p;
        p.red_gamma = 0.0;
        ImageChip img(2, 2, 3);
        CHECK_THROWS_AS(panchromatic_simulate(img, p), std::invalid_argument);
    }
    SECTION("single-channel input rejected") {
        ImageChip img(2, 2, 1);
        CHECK_THROWS_AS(panchromatic_simulate(img, PanchroParams{}), std::invalid_argument);
    }
}

TEST_CASE("panchromatic_simulate agrees with the oracle on random pixels") {
    PanchroParams p;
    p.blue_gain = 0.45;
    p.red_gamma = 1.3;
    p.green_gamma = 0.8;
    p.luma_weights = {0.25, 0.55, 0.2};
    ImageChip img = random_chip(9, 7, 3, 321);
    ImageChip out = panchromatic_simulate(img, p);
    for (int y = 0; y < 7; ++y)
        for (int x = 0; x < 9; ++x)
            CHECK(out.at(x, y) == Catch::Approx(testutil::panchro_pixel_oracle(
                                      img.at(x, y, 0), img.at(x, y, 1), img.at(x, y, 2), p))
                                      .margin(1e-12));
}

TEST_CASE("panchromatic_simulate is pixel-local: commutes with permutation") {
    ImageChip img = random_chip(8, 6, 3, 555);
    PanchroParams p;

    // a fixed permutation of pixel indices
    std::vector<int> perm(8 * 6);
    std::iota(perm.begin(), perm.end(), 0);
    CounterRng rng(9);
    seeded_shuffle(perm, rng);

    auto permute = [&](const ImageChip& in) {
        ImageChip out(in.width(), in.height(), in.channels());
        for (int i = 0; i < static_cast<int>(perm.size()); ++i)
            for (int c = 0; c < in.channels(); ++c)
                out.data()[static_cast<std::size_t>(i) * in.channels() + c] =
                    in.data()[static_cast<std::size_t>(perm[i]) * in.channels() + c];
        return out;
    };

    ImageChip a = panchromatic_simulate(permute(img), p);
    ImageChip b = permute(panchromatic_simulate(img, p));
    CHECK(a.data() == b.data());
}

TEST_CASE("panchromatic output stays in [0,1] on random inputs") {
    for (std::uint64_t seed : {1u, 2u, 3u}) {
        PanchroParams p;
        CounterRng rng(seed);
        p.blue_gain = rng.uniform(0.0, 1.0);
        p.red_gamma = rng.uniform(0.2, 3.0);
        p.green_gamma = rng.uniform(0.2, 3.0);
        ImageChip out = panchromatic_simulate(random_chip(11, 9, 3, seed), p);
        out.validate();
    }
}
