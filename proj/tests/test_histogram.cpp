#include <catch2/catch_amalgamated.hpp>

#include "test_support.hpp"
#include "vbench/histogram.hpp"

using namespace vbench;
using testutil::make_chip;
using testutil::random_chip;

TEST_CASE("compute_histogram examples") {
    SECTION("constant zero image puts all mass in bin 0") {
        ImageChip img = make_chip(6, 4, 1, [](int, int, int) { return 0.0; });
        Histogram h = compute_histogram(img, 0, 256);
        CHECK(h.counts[0] == 24);
        CHECK(h.total() == 24);
    }
    SECTION("two-bin histogram of {0,1}") {
        ImageChip img = make_chip(2, 1, 1, [](int x, int, int) { return double(x); });
        Histogram h = compute_histogram(img, 0, 2);
        CHECK(h.counts[0] == 1);
        CHECK(h.counts[1] == 1);
    }
    SECTION("hand-binned 4x1 image under the round-half-up rule") {
        ImageChip img = ImageChip::from_data(4, 1, 1, {0.1, 0.1, 0.9, 0.3});
        Histogram h = compute_histogram(img, 0, 256);
        CHECK(h.counts[26] == 2);
        CHECK(h.counts[230] == 1);
        CHECK(h.counts[77] == 1);
        CHECK(h.total() == 4);
    }
    SECTION("channel out of range rejected") {
        ImageChip img(3, 3, 1);
        CHECK_THROWS_AS(compute_histogram(img, 1, 256), std::invalid_argument);
        CHECK_THROWS_AS(compute_histogram(img, 0, 1), std::invalid_argument);
    }
    SECTION("counts always sum to the pixel count") {
        for (std::uint64_t seed : {7u, 8u, 9u}) {
            ImageChip img = random_chip(13, 11, 3, seed);
            for (int c = 0; c < 3; ++c)
                CHECK(compute_histogram(img, c, 64).total() == 13u * 11u);
        }
    }
}

TEST_CASE("histogram_specification examples") {
    SECTION("specifying an image to its own histogram returns the quantized image") {
        ImageChip img = random_chip(8, 8, 1, 42);
        Histogram own = compute_histogram(img, 0, 256);
        ImageChip out = histogram_specification(img, own);
        for (std::size_t i = 0; i < img.data().size(); ++i) {
            double quantized = intensity_bin(img.data()[i], 256) / 255.0;
            CHECK(out.data()[i] == Catch::Approx(quantized).margin(1e-15));
        }
    }
    SECTION("uniform target equals an independently coded equalizer") {
        ImageChip img = random_chip(8, 8, 1, 4242);
        ImageChip spec = histogram_specification(img, uniform_histogram(256, 4));
        ImageChip oracle = testutil::equalize_oracle(img, 256);
        for (std::size_t i = 0; i < img.data().size(); ++i)
            CHECK(spec.data()[i] == Catch::Approx(oracle.data()[i]).margin(1e-15));
    }
    SECTION("binary image maps onto a two-spike target by CDF steps") {
        // 30% zeros, 70% ones
        ImageChip img = make_chip(10, 1, 1, [](int x, int, int) { return x < 3 ? 0.0 : 1.0; });
        Histogram target;
        target.bin_count = 256;
        target.counts.assign(256, 0);
        target.counts[100] = 30;
        target.counts[200] = 70;
        ImageChip out = histogram_specification(img, target);
        for (int x = 0; x < 10; ++x)
            CHECK(out.at(x, 0) == Catch::Approx((x < 3 ? 100 : 200) / 255.0).margin(1e-15));
    }
    SECTION("empty target rejected") {
        ImageChip img = random_chip(4, 4, 1, 1);
        Histogram empty;
        empty.bin_count = 256;
        empty.counts.assign(256, 0);
        CHECK_THROWS_AS(histogram_specification(img, empty), std::invalid_argument);
    }
    SECTION("per-channel operation on 3-channel input") {
        ImageChip img = random_chip(8, 8, 3, 77);
        ImageChip out = histogram_specification(img, uniform_histogram(256, 1));
        out.validate();
        CHECK(out.channels() == 3);
    }
}

TEST_CASE("histogram_specification CDF distance bound on random images") {
    // max_b |CDF_out - CDF_target| <= 1/bins + largest source bin mass
    for (std::uint64_t seed : {100u, 101u, 102u, 103u}) {
        CounterRng rng(seed);
        ImageChip img = random_chip(16, 16, 1, seed, 0.0, rng.uniform(0.4, 1.0));
        Histogram target;
        target.bin_count = 256;
        target.counts.assign(256, 0);
        CounterRng trng(seed ^ 0xfeed);
        for (int i = 0; i < 256; ++i)
            target.counts[i] = static_cast<std::uint64_t>(trng.uniform(0.0, 10.0));
        target.counts[40] += 50; // make it lumpy
        if (target.total() == 0) target.counts[7] = 1;

        ImageChip out = histogram_specification(img, target);

        Histogram source = compute_histogram(img, 0, 256);
        Histogram result = compute_histogram(out, 0, 256);
        double src_max = 0.0;
        for (auto c : source.counts)
            src_max = std::max(src_max, static_cast<double>(c) / source.total());
        double worst = 0.0, cum_t = 0.0, cum_o = 0.0;
        for (int b = 0; b < 256; ++b) {
            cum_t += static_cast<double>(target.counts[b]) / target.total();
            cum_o += static_cast<double>(result.counts[b]) / result.total();
            worst = std::max(worst, std::abs(cum_o - cum_t));
        }
        CHECK(worst <= 1.0 / 256 + src_max + 1e-12);
    }
}
