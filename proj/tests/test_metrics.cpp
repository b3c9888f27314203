#include <doctest.h>

#include "fgd/metrics.hpp"
#include "oracles.hpp"
#include "test_util.hpp"

using namespace fgd;
using namespace fgd::metrics;

TEST_CASE("box_iou fixtures") {
    BoundingBox a(0, 0, 9, 9);
    CHECK(box_iou(a, a) == doctest::Approx(1.0));
    CHECK(box_iou(a, BoundingBox(20, 20, 25, 25)) == doctest::Approx(0.0));
    CHECK(box_iou(a, BoundingBox(0, 0, 9, 19)) == doctest::Approx(0.5));
    CHECK(box_iou(BoundingBox(0, 0, 9, 19), a) == doctest::Approx(0.5));  // symmetric
}

TEST_CASE("corloc counts the IoU=0.5 boundary as correct") {
    SoftMask dummy(2, 2);
    std::vector<EvalRecord> records;
    records.emplace_back("a", BoundingBox(0, 0, 9, 9), dummy,
                         std::vector<BoundingBox>{BoundingBox(0, 0, 9, 9)}, std::nullopt);
    records.emplace_back("b", BoundingBox(0, 0, 9, 9), dummy,
                         std::vector<BoundingBox>{BoundingBox(0, 0, 9, 19)}, std::nullopt);
    records.emplace_back("c", std::nullopt, dummy,
                         std::vector<BoundingBox>{BoundingBox(0, 0, 3, 3)}, std::nullopt);
    CHECK(corloc(records) == doctest::Approx(100.0 * 2 / 3));

    records.pop_back();
    CHECK(corloc(records) == doctest::Approx(100.0));  // boundary case is correct
    CHECK_THROWS_AS(corloc(std::vector<EvalRecord>{}), std::invalid_argument);
}

TEST_CASE("corloc extremes") {
    SoftMask dummy(2, 2);
    std::vector<EvalRecord> all_missing;
    for (int i = 0; i < 4; ++i)
        all_missing.emplace_back(std::to_string(i), std::nullopt, dummy,
                                 std::vector<BoundingBox>{BoundingBox(0, 0, 1, 1)}, std::nullopt);
    CHECK(corloc(all_missing) == doctest::Approx(0.0));
}

TEST_CASE("f_beta hand fixtures") {
    SUBCASE("pred equals gt at every threshold") {
        BinaryMask gt(4, 4);
        SoftMask pred(4, 4);
        for (int i = 0; i < 4; ++i) {
            gt.set(i, i, true);
            pred.set(i, i, 1.0);
        }
        for (int k = 0; k <= 255; ++k) {
            double t = k / 255.0;
            if (t <= 0.0) continue;  // at t=0 everything binarizes true
            CHECK(f_beta(pred, gt, t) == doctest::Approx(1.0));
        }
        CHECK(f_beta_max(pred, gt) == doctest::Approx(1.0));
    }
    SUBCASE("half coverage with perfect precision gives 0.8125") {
        BinaryMask gt(4, 1);
        for (int x = 0; x < 4; ++x) gt.set(x, 0, true);
        SoftMask pred(4, 1, {1.0, 1.0, 0.0, 0.0});
        CHECK(f_beta(pred, gt, 0.5, 0.3) == doctest::Approx(0.8125));
    }
    SUBCASE("empty gt and empty prediction score 1") {
        CHECK(f_beta(SoftMask(3, 3), BinaryMask(3, 3), 0.5) == doctest::Approx(1.0));
    }
}

TEST_CASE("f_beta weighs precision above recall for beta2 < 1") {
    // two pixel populations arranged so (P,R) and (R,P) are both realizable
    BinaryMask gt(10, 1);
    for (int x = 0; x < 5; ++x) gt.set(x, 0, true);
    SoftMask high_p(10, 1, {1, 1, 1, 0, 0, 0, 0, 0, 0, 0});   // P=1, R=0.6
    SoftMask high_r(10, 1, {1, 1, 1, 1, 1, 1, 1, 0.0, 0, 0});  // P=5/7, R=1
    double f_hp = f_beta(high_p, gt, 0.5);
    // direct formula check: swapping P and R with P > R must decrease F
    auto f_of = [](double p, double r) { return 1.3 * p * r / (0.3 * p + r); };
    CHECK(f_of(1.0, 0.6) > f_of(0.6, 1.0));
    CHECK(f_hp == doctest::Approx(f_of(1.0, 0.6)));
    CHECK(f_beta(high_r, gt, 0.5) == doctest::Approx(f_of(5.0 / 7.0, 1.0)));
}

TEST_CASE("pj fixtures") {
    SUBCASE("equal masks") {
        BinaryMask m(3, 3);
        m.set(1, 1, true);
        auto [p, j] = pj(m, m);
        CHECK(p == doctest::Approx(1.0));
        CHECK(j == doctest::Approx(1.0));
    }
    SUBCASE("complement on a half-foreground image") {
        BinaryMask gt(2, 2), pred(2, 2);
        gt.set(0, 0, true);
        gt.set(1, 0, true);
        pred.set(0, 1, true);
        pred.set(1, 1, true);
        auto [p, j] = pj(pred, gt);
        CHECK(p == doctest::Approx(0.0));
        CHECK(j == doctest::Approx(0.0));
    }
    SUBCASE("4-pixel overlap case") {
        BinaryMask gt(4, 1), pred(4, 1);
        gt.set(0, 0, true);
        gt.set(1, 0, true);
        pred.set(1, 0, true);
        pred.set(2, 0, true);
        auto [p, j] = pj(pred, gt);
        CHECK(p == doctest::Approx(0.5));
        CHECK(j == doctest::Approx(1.0 / 3.0));
    }
}

TEST_CASE("mae fixtures") {
    BinaryMask gt(2, 1);
    gt.set(1, 0, true);
    CHECK(mae(SoftMask(2, 1, {0.0, 1.0}), gt) == doctest::Approx(0.0));
    CHECK(mae(SoftMask(2, 1, {0.5, 0.5}), gt) == doctest::Approx(0.5));
    CHECK(mae(SoftMask(2, 1, {0.2, 0.9}), gt) == doctest::Approx(0.15));
}

TEST_CASE("mean_iou fixtures") {
    BinaryMask a(5, 2), b(5, 2);
    for (int x = 0; x < 5; ++x) {
        a.set(x, 0, true);
        a.set(x, 1, true);
    }
    for (int x = 0; x < 5; ++x) b.set(x, 0, true);
    CHECK(mean_iou(a, a) == doctest::Approx(1.0));
    CHECK(mean_iou(b, a) == doctest::Approx(0.5));  // 5 inside 10
    CHECK(mean_iou(a, b) == doctest::Approx(0.5));  // symmetric

    BinaryMask c(2, 2), d(2, 2);
    c.set(0, 0, true);
    d.set(1, 1, true);
    CHECK(mean_iou(c, d) == doctest::Approx(0.0));
}

TEST_CASE("metrics agree with naive pixel-loop oracles on random cases") {
    nn::Rng rng(2024);
    for (int trial = 0; trial < 1000; ++trial) {
        const int w = 16, h = 16;
        SoftMask pred(w, h);
        BinaryMask pred_bin(w, h), gt(w, h);
        for (int y = 0; y < h; ++y) {
            for (int x = 0; x < w; ++x) {
                double v = rng.uniform();
                pred.set(x, y, v);
                pred_bin.set(x, y, v >= 0.5);
                gt.set(x, y, rng.uniform() < 0.4);
            }
        }
        CHECK(f_beta_max(pred, gt) ==
              doctest::Approx(fgd_test::oracle::f_beta_max(pred, gt, 0.3)).epsilon(1e-12));
        auto [p, j] = pj(pred_bin, gt);
        auto [po, jo] = fgd_test::oracle::pj(pred_bin, gt);
        CHECK(p == doctest::Approx(po).epsilon(1e-12));
        CHECK(j == doctest::Approx(jo).epsilon(1e-12));
        CHECK(mae(pred, gt) == doctest::Approx(fgd_test::oracle::mae(pred, gt)).epsilon(1e-12));
        CHECK(mean_iou(pred_bin, gt) ==
              doctest::Approx(fgd_test::oracle::iou(pred_bin, gt)).epsilon(1e-12));

        BoundingBox ba(rng.below(10), rng.below(10), 10 + rng.below(6), 10 + rng.below(6));
        BoundingBox bb(rng.below(10), rng.below(10), 10 + rng.below(6), 10 + rng.below(6));
        CHECK(box_iou(ba, bb) ==
              doctest::Approx(fgd_test::oracle::box_iou(ba, bb)).epsilon(1e-12));
    }
}

TEST_CASE("EvalRecord requires some ground truth") {
    CHECK_THROWS_AS(EvalRecord("x", std::nullopt, SoftMask(2, 2), {}, std::nullopt),
                    std::invalid_argument);
}
