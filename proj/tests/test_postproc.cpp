#include <doctest.h>

#include "fgd/postproc.hpp"
#include "oracles.hpp"
#include "test_util.hpp"

using namespace fgd;
using namespace fgd::postproc;

namespace {

BinaryMask random_mask(int w, int h, double p, nn::Rng& rng) {
    BinaryMask b(w, h);
    for (int y = 0; y < h; ++y)
        for (int x = 0; x < w; ++x) b.set(x, y, rng.uniform() < p);
    return b;
}

}  // namespace

TEST_CASE("binarize uses the >= convention") {
    SoftMask m(3, 1, {0.2, 0.5, 0.9});
    BinaryMask b = binarize(m, 0.5);
    CHECK_FALSE(b.at(0, 0));
    CHECK(b.at(1, 0));
    CHECK(b.at(2, 0));

    CHECK(binarize(m, 0.0).count_true() == 3);
    CHECK(binarize(m, 0.91).count_true() == 0);
}

TEST_CASE("connected_components basics") {
    SUBCASE("single filled rectangle") {
        BinaryMask b(8, 6);
        for (int y = 1; y <= 3; ++y)
            for (int x = 2; x <= 6; ++x) b.set(x, y, true);
        auto comps = connected_components(b);
        REQUIRE(comps.size() == 1);
        CHECK(comps[0].box == BoundingBox(2, 1, 6, 3));
        CHECK(comps[0].area == 15);
    }
    SUBCASE("diagonal pixels are separate under 4-connectivity") {
        BinaryMask b(4, 4);
        b.set(1, 1, true);
        b.set(2, 2, true);
        CHECK(connected_components(b).size() == 2);
    }
    SUBCASE("4x4 checkerboard has 8 single-pixel components") {
        BinaryMask b(4, 4);
        for (int y = 0; y < 4; ++y)
            for (int x = 0; x < 4; ++x) b.set(x, y, (x + y) % 2 == 0);
        auto comps = connected_components(b);
        REQUIRE(comps.size() == 8);
        for (const auto& c : comps) CHECK(c.area == 1);
    }
}

TEST_CASE("components partition the true pixels") {
    nn::Rng rng(99);
    for (int trial = 0; trial < 30; ++trial) {
        BinaryMask b = random_mask(2 + rng.below(20), 2 + rng.below(20), 0.45, rng);
        auto comps = connected_components(b);
        BinaryMask seen(b.width(), b.height());
        long long area_total = 0;
        for (const auto& c : comps) {
            area_total += c.area;
            int run_area = 0;
            for (const auto& r : c.runs) {
                for (int x = r.x_begin; x <= r.x_end; ++x) {
                    CHECK(b.at(x, r.y));
                    CHECK_FALSE(seen.at(x, r.y));  // pairwise disjoint
                    seen.set(x, r.y, true);
                    ++run_area;
                }
            }
            CHECK(run_area == c.area);
        }
        CHECK(area_total == b.count_true());
        CHECK(seen.count_true() == b.count_true());
    }
}

TEST_CASE("connected_components agrees with a recursive flood-fill oracle") {
    nn::Rng rng(1234);
    for (int trial = 0; trial < 40; ++trial) {
        int w = 2 + rng.below(63), h = 2 + rng.below(63);
        BinaryMask b = random_mask(w, h, 0.2 + 0.6 * rng.uniform(), rng);
        auto got = connected_components(b);
        auto want = fgd_test::oracle::flood_components(b);
        REQUIRE(got.size() == want.size());
        for (std::size_t i = 0; i < got.size(); ++i) {
            CHECK(got[i].area == want[i].area);
            CHECK(got[i].box == want[i].box);
        }
    }
}

TEST_CASE("fit_boxes keeps tight hulls above the area cutoff") {
    SUBCASE("empty input") { CHECK(fit_boxes({}, 0.1, 10, 10).empty()); }
    SUBCASE("3x5 component at (2,2)") {
        BinaryMask b(10, 10);
        for (int y = 2; y <= 6; ++y)
            for (int x = 2; x <= 4; ++x) b.set(x, y, true);
        auto boxes = fit_boxes(connected_components(b), 0.0, 10, 10);
        REQUIRE(boxes.size() == 1);
        CHECK(boxes[0] == BoundingBox(2, 2, 4, 6));
    }
    SUBCASE("small component dropped by the cutoff") {
        BinaryMask b(10, 10);
        for (int y = 0; y <= 4; ++y)
            for (int x = 0; x <= 4; ++x) b.set(x, y, true);
        b.set(9, 9, true);
        auto boxes = fit_boxes(connected_components(b), 0.02, 10, 10);  // cutoff 2 px
        REQUIRE(boxes.size() == 1);
        CHECK(boxes[0] == BoundingBox(0, 0, 4, 4));
    }
}

TEST_CASE("fit_boxes hulls are tight: shrinking any side drops a pixel") {
    nn::Rng rng(55);
    for (int trial = 0; trial < 20; ++trial) {
        BinaryMask b = random_mask(12, 12, 0.3, rng);
        for (const auto& c : connected_components(b)) {
            bool on_left = false, on_right = false, on_top = false, on_bottom = false;
            for (const auto& r : c.runs) {
                if (r.y == c.box.y_min) on_top = true;
                if (r.y == c.box.y_max) on_bottom = true;
                if (r.x_begin == c.box.x_min) on_left = true;
                if (r.x_end == c.box.x_max) on_right = true;
            }
            CHECK(on_left);
            CHECK(on_right);
            CHECK(on_top);
            CHECK(on_bottom);
        }
    }
}

TEST_CASE("primary_box behavior") {
    SUBCASE("all-zero mask yields none") {
        CHECK_FALSE(primary_box(SoftMask(8, 8), 0.5, 0.0, 8, 8).has_value());
    }
    SUBCASE("clean square mask yields its own box") {
        SoftMask m(16, 16);
        for (int y = 4; y <= 9; ++y)
            for (int x = 5; x <= 10; ++x) m.set(x, y, 1.0);
        auto box = primary_box(m, 0.5, 0.0, 16, 16);
        REQUIRE(box.has_value());
        CHECK(*box == BoundingBox(5, 4, 10, 9));
    }
    SUBCASE("matches the flood-fill oracle's largest box on noisy masks") {
        nn::Rng rng(77);
        for (int trial = 0; trial < 25; ++trial) {
            int w = 6 + rng.below(30), h = 6 + rng.below(30);
            SoftMask m(w, h);
            for (int y = 0; y < h; ++y)
                for (int x = 0; x < w; ++x) m.set(x, y, rng.uniform());
            auto got = primary_box(m, 0.6, 0.0, w, h);
            auto comps = fgd_test::oracle::flood_components(binarize(m, 0.6));
            if (comps.empty()) {
                CHECK_FALSE(got.has_value());
            } else {
                REQUIRE(got.has_value());
                CHECK(*got == comps[0].box);
            }
        }
    }
}
