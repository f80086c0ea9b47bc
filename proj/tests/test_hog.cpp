#include <catch2/catch_amalgamated.hpp>

#include "test_support.hpp"
#include "vbench/hog.hpp"

using namespace vbench;
using testutil::make_chip;
using testutil::random_chip;

TEST_CASE("gradients examples") {
    SECTION("constant image has zero magnitude everywhere") {
        GradientField f = gradients(make_chip(8, 8, 1, [](int, int, int) { return 0.4; }));
        for (double m : f.magnitude) CHECK(m == 0.0);
    }
    SECTION("vertical step edge: magnitude confined to the two edge columns, orientation 0") {
        const int w = 10, h = 6;
        GradientField f =
            gradients(make_chip(w, h, 1, [&](int x, int, int) { return x < w / 2 ? 0.0 : 1.0; }));
        for (int y = 0; y < h; ++y)
            for (int x = 0; x < w; ++x) {
                double m = f.mag(x, y);
                if (x == w / 2 - 1 || x == w / 2) {
                    CHECK(m > 0.0);
                    CHECK(f.ori(x, y) == Catch::Approx(0.0).margin(1e-12));
                } else {
                    CHECK(m == Catch::Approx(0.0).margin(1e-15));
                }
            }
    }
    SECTION("linear ramp: interior gx = 1/(w-1), gy = 0") {
        const int w = 9, h = 5;
        GradientField f = gradients(
            make_chip(w, h, 1, [&](int x, int, int) { return double(x) / (w - 1); }));
        for (int y = 1; y < h - 1; ++y)
            for (int x = 1; x < w - 1; ++x) {
                CHECK(f.mag(x, y) == Catch::Approx(1.0 / (w - 1)).margin(1e-12));
                CHECK(f.ori(x, y) == Catch::Approx(0.0).margin(1e-12));
            }
    }
    SECTION("images smaller than 3x3 rejected") {
        CHECK_THROWS_AS(gradients(ImageChip(2, 5, 1)), std::invalid_argument);
    }
}

TEST_CASE("cell_histograms examples") {
    HogParams params;
    SECTION("pixels at a bin center vote into that single bin") {
        // orientation pi/2 folded is bin center? bin width 20deg, centers at 10,30,...
        // use a ramp in y: gradient direction 90deg = center of bin 4 (90 = 10+20*4)
        const int n = 8;
        GradientField f = gradients(
            make_chip(n, n, 1, [&](int, int y, int) { return double(y) / (n - 1); }));
        CellGrid g = cell_histograms(f, params);
        // interior pixels all have orientation pi/2; edge rows vote the same direction
        for (int b = 0; b < 9; ++b) {
            if (b == 4) continue;
            CHECK(g.cell(0, 0)[b] == Catch::Approx(0.0).margin(1e-15));
        }
        CHECK(g.cell(0, 0)[4] > 0.0);
    }
    SECTION("pixels midway between bins split 50/50") {
        // bin centers at 10 and 30 degrees: midway is 20 degrees
        const double theta = 20.0 * M_PI / 180.0;
        GradientField f;
        f.width = 8;
        f.height = 8;
        f.magnitude.assign(64, 2.0);
        f.orientation.assign(64, theta);
        CellGrid g = cell_histograms(f, params);
        CHECK(g.cell(0, 0)[0] == Catch::Approx(64.0).margin(1e-9));
        CHECK(g.cell(0, 0)[1] == Catch::Approx(64.0).margin(1e-9));
    }
    SECTION("random cell matches the per-pixel voting oracle") {
        for (std::uint64_t seed : {10u, 11u, 12u, 13u, 14u, 15u, 16u, 17u, 18u, 19u}) {
            ImageChip img = random_chip(8, 8, 1, seed);
            GradientField f = gradients(img);
            CellGrid g = cell_histograms(f, params);
            auto oracle = testutil::cell_vote_oracle(f, 0, 0, 8, 9);
            for (int b = 0; b < 9; ++b)
                CHECK(g.cell(0, 0)[b] == Catch::Approx(oracle[b]).margin(1e-12));
        }
    }
    SECTION("per-cell vote mass equals the sum of pixel magnitudes") {
        ImageChip img = random_chip(16, 16, 1, 77);
        GradientField f = gradients(img);
        CellGrid g = cell_histograms(f, params);
        for (int cy = 0; cy < 2; ++cy)
            for (int cx = 0; cx < 2; ++cx) {
                double mass = 0.0;
                for (int b = 0; b < 9; ++b) mass += g.cell(cx, cy)[b];
                double mag_sum = 0.0;
                for (int y = cy * 8; y < (cy + 1) * 8; ++y)
                    for (int x = cx * 8; x < (cx + 1) * 8; ++x) mag_sum += f.mag(x, y);
                CHECK(mass == Catch::Approx(mag_sum).margin(1e-9));
            }
    }
}

TEST_CASE("block_normalize examples") {
    HogParams params;
    SECTION("zero cell grid gives a zero descriptor") {
        CellGrid g;
        g.cells_x = 2;
        g.cells_y = 2;
        g.bins = 9;
        g.hist.assign(36, 0.0);
        FeatureVector v = block_normalize(g, params);
        REQUIRE(v.dim() == 36);
        for (double x : v.values) CHECK(x == 0.0);
    }
    SECTION("one-hot 5.0 normalizes, clips at 0.2, renormalizes to 1.0") {
        CellGrid g;
        g.cells_x = 2;
        g.cells_y = 2;
        g.bins = 9;
        g.hist.assign(36, 0.0);
        g.hist[3] = 5.0;
        FeatureVector v = block_normalize(g, params);
        double maxv = 0.0;
        for (double x : v.values) maxv = std::max(maxv, x);
        CHECK(maxv == Catch::Approx(1.0).margin(1e-5));
    }
    SECTION("scaling all cells by 10 leaves the descriptor unchanged") {
        ImageChip img = random_chip(16, 16, 1, 8);
        CellGrid g = cell_histograms(gradients(img), params);
        CellGrid g10 = g;
        for (double& x : g10.hist) x *= 10.0;
        FeatureVector a = block_normalize(g, params);
        FeatureVector b = block_normalize(g10, params);
        for (std::size_t i = 0; i < a.values.size(); ++i)
            CHECK(a.values[i] == Catch::Approx(b.values[i]).margin(1e-6));
    }
    SECTION("grid smaller than a block rejected") {
        CellGrid g;
        g.cells_x = 1;
        g.cells_y = 1;
        g.bins = 9;
        g.hist.assign(9, 1.0);
        CHECK_THROWS_AS(block_normalize(g, params), std::invalid_argument);
    }
}

TEST_CASE("hog_descriptor dimension and invariances") {
    HogParams params;
    SECTION("128x128 with defaults gives 8100 dimensions") {
        CHECK(hog_dimension(128, 128, params) == 8100);
        ImageChip img = random_chip(128, 128, 1, 4);
        CHECK(hog_descriptor(img, params).dim() == 8100);
    }
    SECTION("constant image maps to the zero vector") {
        ImageChip img = make_chip(32, 32, 1, [](int, int, int) { return 0.77; });
        FeatureVector v = hog_descriptor(img, params);
        CHECK(v.dim() == static_cast<std::size_t>(hog_dimension(32, 32, params)));
        for (double x : v.values) CHECK(x == 0.0);
    }
    SECTION("intensity scale invariance within 1e-6") {
        ImageChip img = random_chip(32, 32, 1, 123, 0.0, 0.5);
        FeatureVector base = hog_descriptor(img, params);
        for (double alpha : {0.25, 0.5, 2.0}) {
            ImageChip scaled = img;
            for (double& v : scaled.data()) v *= alpha;
            FeatureVector s = hog_descriptor(scaled, params);
            for (std::size_t i = 0; i < base.values.size(); ++i)
                CHECK(s.values[i] == Catch::Approx(base.values[i]).margin(1e-6));
        }
    }
    SECTION("every block sub-vector has L2 norm <= 1 + 1e-6") {
        ImageChip img = random_chip(40, 24, 1, 9);
        FeatureVector v = hog_descriptor(img, params);
        const int block_dim = params.block_cells * params.block_cells * params.bin_count;
        REQUIRE(v.dim() % block_dim == 0);
        for (std::size_t b = 0; b < v.dim() / block_dim; ++b) {
            double norm2 = 0.0;
            for (int i = 0; i < block_dim; ++i) {
                double x = v.values[b * block_dim + i];
                norm2 += x * x;
            }
            CHECK(std::sqrt(norm2) <= 1.0 + 1e-6);
        }
    }
}

TEST_CASE("hog dimension formula holds over random valid parameters") {
    CounterRng rng(2024);
    for (int trial = 0; trial < 25; ++trial) {
        HogParams p;
        p.cell_size = rng.uniform_int(2, 8);
        p.block_cells = rng.uniform_int(1, 3);
        p.block_stride = rng.uniform_int(1, p.block_cells);
        p.bin_count = rng.uniform_int(2, 12);
        // choose dims as multiples of the cell size with enough cells per block
        int cx = p.block_cells + rng.uniform_int(0, 4);
        int cy = p.block_cells + rng.uniform_int(0, 4);
        int w = cx * p.cell_size, h = cy * p.cell_size;
        if (w < 3 || h < 3) continue;
        ImageChip img = random_chip(w, h, 1, 9000ull + trial);
        FeatureVector v = hog_descriptor(img, p);
        CHECK(v.dim() == static_cast<std::size_t>(hog_dimension(w, h, p)));
    }
}
