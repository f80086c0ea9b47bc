#include <catch2/catch_amalgamated.hpp>

#include "test_support.hpp"
#include "vbench/image.hpp"

using namespace vbench;
using testutil::bar_chip;
using testutil::make_chip;
using testutil::random_chip;

TEST_CASE("ImageChip invariants") {
    ImageChip img(4, 3, 3, 0.25);
    REQUIRE(img.data().size() == 4u * 3u * 3u);
    img.validate();

    CHECK_THROWS_AS(ImageChip(2, 2, 2), std::invalid_argument);
    CHECK_THROWS_AS(ImageChip::from_data(2, 2, 1, {0.0, 0.0, 0.0}), std::invalid_argument);

    ImageChip bad(2, 2, 1);
    bad.data()[0] = 1.5;
    CHECK_THROWS_AS(bad.validate(), std::invalid_argument);
}

TEST_CASE("to_grayscale examples") {
    SECTION("constant image stays constant under any valid weights") {
        ImageChip img = make_chip(5, 4, 3, [](int, int, int) { return 0.5; });
        ImageChip g = to_grayscale(img, {0.2, 0.5, 0.3});
        for (double v : g.data()) CHECK(v == Catch::Approx(0.5).margin(1e-12));
    }
    SECTION("weights (1,0,0) pick the red channel exactly") {
        ImageChip img = random_chip(6, 5, 3, 11);
        ImageChip g = to_grayscale(img, {1.0, 0.0, 0.0});
        for (int y = 0; y < 5; ++y)
            for (int x = 0; x < 6; ++x) CHECK(g.at(x, y) == img.at(x, y, 0));
    }
    SECTION("hand-computed luma value") {
        ImageChip img = make_chip(1, 1, 3, [](int, int, int c) {
            return c == 0 ? 0.2 : c == 1 ? 0.4 : 0.8;
        });
        ImageChip g = to_grayscale(img, {0.299, 0.587, 0.114});
        CHECK(g.at(0, 0) == Catch::Approx(0.3858).margin(1e-12));
    }
    SECTION("single-channel input rejected") {
        ImageChip img(3, 3, 1);
        CHECK_THROWS_AS(to_grayscale(img, {1.0, 0.0, 0.0}), std::invalid_argument);
    }
    SECTION("weights must sum to one") {
        ImageChip img(3, 3, 3);
        CHECK_THROWS_AS(to_grayscale(img, {0.5, 0.2, 0.2}), std::invalid_argument);
    }
}

TEST_CASE("to_grayscale is monotone in every channel") {
    CounterRng rng(99);
    ImageChip img = random_chip(8, 8, 3, 5, 0.0, 0.9);
    std::array<double, 3> w{0.3, 0.4, 0.3};
    ImageChip base = to_grayscale(img, w);
    for (int trial = 0; trial < 50; ++trial) {
        int x = rng.uniform_int(0, 7), y = rng.uniform_int(0, 7), c = rng.uniform_int(0, 2);
        ImageChip bumped = img;
        bumped.at(x, y, c) = std::min(1.0, bumped.at(x, y, c) + rng.uniform(0.0, 0.1));
        ImageChip g = to_grayscale(bumped, w);
        CHECK(g.at(x, y) >= base.at(x, y) - 1e-12);
    }
}

TEST_CASE("crop semantics") {
    ImageChip img = random_chip(10, 8, 1, 3);
    SECTION("full-image crop is the identity") {
        ImageChip c = crop(img, 0, 0, 10, 8);
        CHECK(c.data() == img.data());
    }
    SECTION("1x1 crop picks the pixel") {
        ImageChip c = crop(img, 0, 0, 1, 1);
        CHECK(c.at(0, 0) == img.at(0, 0));
    }
    SECTION("crop then paste back is bit-identical") {
        ImageChip region = crop(img, 2, 3, 5, 4);
        ImageChip pasted = img;
        for (int y = 0; y < 4; ++y)
            for (int x = 0; x < 5; ++x) pasted.at(2 + x, 3 + y) = region.at(x, y);
        CHECK(pasted.data() == img.data());
    }
    SECTION("out-of-bounds rectangle rejected") {
        CHECK_THROWS_AS(crop(img, 6, 0, 5, 8), std::invalid_argument);
        CHECK_THROWS_AS(crop(img, -1, 0, 2, 2), std::invalid_argument);
        CHECK_THROWS_AS(crop(img, 0, 0, 0, 2), std::invalid_argument);
    }
}

TEST_CASE("resize_bilinear examples") {
    SECTION("same-size resize is bit-identical") {
        ImageChip img = random_chip(7, 5, 3, 21);
        ImageChip r = resize_bilinear(img, 7, 5);
        CHECK(r.data() == img.data());
    }
    SECTION("constant image resizes to a constant") {
        ImageChip img = make_chip(5, 5, 1, [](int, int, int) { return 0.37; });
        ImageChip r = resize_bilinear(img, 13, 3);
        for (double v : r.data()) CHECK(v == Catch::Approx(0.37).margin(1e-12));
    }
    SECTION("2x1 {0,1} to 3x1 is {0, 0.5, 1} under align-corners") {
        ImageChip img = make_chip(2, 1, 1, [](int x, int, int) { return double(x); });
        ImageChip r = resize_bilinear(img, 3, 1);
        CHECK(r.at(0, 0) == Catch::Approx(0.0).margin(1e-15));
        CHECK(r.at(1, 0) == Catch::Approx(0.5).margin(1e-15));
        CHECK(r.at(2, 0) == Catch::Approx(1.0).margin(1e-15));
    }
    SECTION("zero target dimension rejected") {
        ImageChip img(4, 4, 1);
        CHECK_THROWS_AS(resize_bilinear(img, 0, 4), std::invalid_argument);
    }
}

TEST_CASE("rotate_bilinear examples") {
    SECTION("angle 0 is the identity") {
        ImageChip img = random_chip(9, 9, 1, 31);
        ImageChip r = rotate_bilinear(img, 0.0);
        for (std::size_t i = 0; i < img.data().size(); ++i)
            CHECK(r.data()[i] == Catch::Approx(img.data()[i]).margin(1e-12));
    }
    SECTION("constant image: interior pixels unchanged") {
        ImageChip img = make_chip(21, 21, 1, [](int, int, int) { return 0.6; });
        ImageChip r = rotate_bilinear(img, 0.7);
        for (int y = 8; y <= 12; ++y)
            for (int x = 8; x <= 12; ++x) CHECK(r.at(x, y) == Catch::Approx(0.6).margin(1e-12));
    }
    SECTION("round-trip interior error on a smooth gradient") {
        const int n = 33;
        ImageChip img = make_chip(n, n, 1, [&](int x, int y, int) {
            return 0.2 + 0.5 * (x + y) / (2.0 * (n - 1));
        });
        ImageChip fwd = rotate_bilinear(img, 0.5);
        ImageChip back = rotate_bilinear(fwd, -0.5);
        double err = 0.0;
        long count = 0;
        for (int y = 10; y < n - 10; ++y)
            for (int x = 10; x < n - 10; ++x) {
                err += std::abs(back.at(x, y) - img.at(x, y));
                ++count;
            }
        CHECK(err / count < 0.02);
    }
}

TEST_CASE("estimate_orientation examples") {
    SECTION("horizontal bar has angle 0") {
        ImageChip img = bar_chip(41, 25, 5);
        CHECK(std::abs(estimate_orientation(img)) < 1e-6);
    }
    SECTION("bar rotated 30 degrees reads back 30 +- 1 degree") {
        ImageChip img = bar_chip(41, 25, 5, 1.0, 0.0);
        double phi = 30.0 * M_PI / 180.0;
        ImageChip rot = rotate_bilinear(img, phi);
        double theta = estimate_orientation(rot);
        CHECK(theta == Catch::Approx(phi).margin(1.0 * M_PI / 180.0));
    }
    SECTION("vertical bar hits the +pi/2 boundary convention") {
        ImageChip img = make_chip(41, 41, 1, [](int x, int y, int) {
            return (std::abs(x - 20) <= 2 && std::abs(y - 20) <= 12) ? 1.0 : 0.0;
        });
        double theta = estimate_orientation(img);
        CHECK(std::abs(theta) == Catch::Approx(M_PI / 2).margin(1.0 * M_PI / 180.0));
        CHECK(theta > 0.0);
    }
    SECTION("constant image raises the degenerate error") {
        ImageChip img = make_chip(8, 8, 1, [](int, int, int) { return 0.3; });
        CHECK_THROWS_AS(estimate_orientation(img), DegenerateOrientationError);
    }
}

TEST_CASE("orientation equivariance under rotation") {
    // elongated shape, aspect ratio >= 3
    ImageChip img = bar_chip(63, 33, 9);
    double base = estimate_orientation(img);
    for (double phi_deg : {10.0, 25.0, 40.0, -20.0, 65.0}) {
        double phi = phi_deg * M_PI / 180.0;
        double theta = estimate_orientation(rotate_bilinear(img, phi));
        double expect = base + phi;
        double diff = std::remainder(theta - expect, M_PI);
        CHECK(std::abs(diff) < 2.0 * M_PI / 180.0);
    }
}

TEST_CASE("geometry ops keep intensities in [0,1] on random inputs") {
    for (std::uint64_t seed : {1u, 2u, 3u, 4u, 5u}) {
        ImageChip img = random_chip(17, 13, 1, seed);
        for (const ImageChip& out :
             {rotate_bilinear(img, 0.37), resize_bilinear(img, 29, 7), crop(img, 1, 1, 15, 11),
              flip_horizontal(img)}) {
            for (double v : out.data()) {
                CHECK(v >= 0.0);
                CHECK(v <= 1.0);
            }
        }
    }
}

TEST_CASE("align_chip canonicalizes rotation and flip") {
    // asymmetric elongated shape: brighter blob on one end
    ImageChip img = make_chip(63, 63, 1, [](int x, int y, int) {
        if (std::abs(y - 31) <= 4 && std::abs(x - 31) <= 15) return x > 36 ? 0.95 : 0.55;
        return 0.02;
    });
    ImageChip aligned_base = align_chip(img);
    for (double phi_deg : {15.0, 75.0, 140.0}) {
        ImageChip rotated = rotate_bilinear(img, phi_deg * M_PI / 180.0);
        ImageChip aligned = align_chip(rotated);
        double theta = estimate_orientation(aligned);
        CHECK(std::abs(std::remainder(theta, M_PI)) < 3.0 * M_PI / 180.0);
        CHECK(x_mass_skew(aligned) >= 0.0);
        // canonical form close to the directly aligned original, interior only
        double err = 0.0;
        long n = 0;
        for (int y = 20; y < 43; ++y)
            for (int x = 20; x < 43; ++x) {
                err += std::abs(aligned.at(x, y) - aligned_base.at(x, y));
                ++n;
            }
        CHECK(err / n < 0.08);
    }
}
