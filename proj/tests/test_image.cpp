#include <doctest.h>

#include <cmath>

#include "fgd/image.hpp"
#include "fgd/png_io.hpp"
#include "test_util.hpp"

using namespace fgd;

TEST_CASE("resize_bilinear keeps a constant mask constant") {
    SoftMask m(2, 2, {0.5, 0.5, 0.5, 0.5});
    SoftMask out = resize_bilinear(m, 4, 4);
    for (double v : out.data()) CHECK(v == doctest::Approx(0.5).epsilon(1e-12));
}

TEST_CASE("resize_bilinear to the same size is the identity") {
    nn::Rng rng(11);
    std::vector<double> data(7 * 5);
    for (double& v : data) v = rng.uniform();
    SoftMask m(7, 5, data);
    SoftMask out = resize_bilinear(m, 7, 5);
    for (std::size_t i = 0; i < data.size(); ++i) CHECK(out.data()[i] == data[i]);
}

TEST_CASE("resize_bilinear 1x2 to 1x4 interpolates with align-corners") {
    SoftMask m(2, 1, {0.0, 1.0});
    SoftMask out = resize_bilinear(m, 4, 1);
    CHECK(out.at(0, 0) == doctest::Approx(0.0));
    CHECK(out.at(1, 0) == doctest::Approx(1.0 / 3.0));
    CHECK(out.at(2, 0) == doctest::Approx(2.0 / 3.0));
    CHECK(out.at(3, 0) == doctest::Approx(1.0));
}

TEST_CASE("resize_bilinear rejects zero target dimensions") {
    SoftMask m(2, 2);
    CHECK_THROWS_AS(resize_bilinear(m, 0, 4), std::invalid_argument);
    CHECK_THROWS_AS(resize_bilinear(m, 4, 0), std::invalid_argument);
}

TEST_CASE("resize_bilinear stays in [0,1] for random masks") {
    nn::Rng rng(42);
    for (int trial = 0; trial < 20; ++trial) {
        int w = 2 + rng.below(12), h = 2 + rng.below(12);
        std::vector<double> data(static_cast<std::size_t>(w) * h);
        for (double& v : data) v = rng.uniform();
        SoftMask m(w, h, data);
        SoftMask out = resize_bilinear(m, 1 + rng.below(24), 1 + rng.below(24));
        for (double v : out.data()) {
            CHECK(v >= 0.0);
            CHECK(v <= 1.0);
        }
    }
}

TEST_CASE("up-down resize round trip deviates at most by the local oscillation") {
    nn::Rng rng(7);
    int w = 9, h = 6;
    std::vector<double> data(static_cast<std::size_t>(w) * h);
    for (double& v : data) v = rng.uniform();
    SoftMask m(w, h, data);
    SoftMask rt = resize_bilinear(resize_bilinear(m, 2 * w, 2 * h), w, h);
    for (int y = 0; y < h; ++y) {
        for (int x = 0; x < w; ++x) {
            double lo = 1.0, hi = 0.0;
            for (int dy = -2; dy <= 2; ++dy) {
                for (int dx = -2; dx <= 2; ++dx) {
                    int xx = std::clamp(x + dx, 0, w - 1);
                    int yy = std::clamp(y + dy, 0, h - 1);
                    lo = std::min(lo, m.at(xx, yy));
                    hi = std::max(hi, m.at(xx, yy));
                }
            }
            double dev = std::fabs(rt.at(x, y) - m.at(x, y));
            CHECK(dev <= hi - lo + 1e-12);
        }
    }

    SoftMask c(5, 4, std::vector<double>(20, 0.25));
    SoftMask crt = resize_bilinear(resize_bilinear(c, 10, 8), 5, 4);
    for (double v : crt.data()) CHECK(v == doctest::Approx(0.25).epsilon(1e-12));
}

TEST_CASE("to_grayscale luminance weights") {
    Frame white(2, 2);
    Frame black(2, 2);
    Frame red(2, 2);
    for (int y = 0; y < 2; ++y) {
        for (int x = 0; x < 2; ++x) {
            for (int c = 0; c < 3; ++c) white.set(x, y, c, 1.0);
            red.set(x, y, 0, 1.0);
        }
    }
    CHECK(to_grayscale(white).at(0, 0) == doctest::Approx(1.0));
    CHECK(to_grayscale(black).at(1, 1) == doctest::Approx(0.0));
    CHECK(to_grayscale(red).at(0, 1) == doctest::Approx(0.299));
}

TEST_CASE("constructors reject out-of-range and malformed values") {
    CHECK_THROWS_AS(SoftMask(2, 2, {0.0, 0.5, 1.0, 1.5}), std::invalid_argument);
    CHECK_THROWS_AS(SoftMask(2, 2, {0.0, 0.5, 1.0, -0.1}), std::invalid_argument);
    CHECK_THROWS_AS(SoftMask(2, 2, {0.0, 0.5, 1.0}), std::invalid_argument);
    CHECK_THROWS_AS(SoftMask(0, 2), std::invalid_argument);
    CHECK_THROWS_AS(Frame(2, 2, std::vector<double>(12, 1.2)), std::invalid_argument);
    CHECK_THROWS_AS(Frame(2, 2, std::vector<double>(5, 0.2)), std::invalid_argument);
    CHECK_THROWS_AS(BoundingBox(3, 0, 1, 2), std::invalid_argument);
    CHECK_THROWS_AS(VideoShot("x", {Frame(2, 2)}), std::invalid_argument);
    CHECK_THROWS_AS(VideoShot("x", {Frame(2, 2), Frame(3, 2)}), std::invalid_argument);
    CHECK_THROWS_AS(ScoredMask(SoftMask(1, 1), std::nan(""), "s", "f"), std::invalid_argument);

    // fuzz: any vector with one out-of-range entry is rejected
    nn::Rng rng(3);
    for (int trial = 0; trial < 50; ++trial) {
        int w = 1 + rng.below(6), h = 1 + rng.below(6);
        std::vector<double> data(static_cast<std::size_t>(w) * h);
        for (double& v : data) v = rng.uniform();
        data[rng.below(w * h)] = rng.uniform() < 0.5 ? -rng.uniform() - 0.001 : 1.001 + rng.uniform();
        CHECK_THROWS_AS(SoftMask(w, h, data), std::invalid_argument);
    }
}

TEST_CASE("gaussian_blur preserves constants and mass location") {
    SoftMask c(9, 9, std::vector<double>(81, 0.7));
    SoftMask out = gaussian_blur(c, 2.0);
    for (double v : out.data()) CHECK(v == doctest::Approx(0.7).epsilon(1e-9));

    SoftMask dot(9, 9);
    dot.set(4, 4, 1.0);
    SoftMask blurred = gaussian_blur(dot, 1.0);
    double best = -1.0;
    int bx = -1, by = -1;
    for (int y = 0; y < 9; ++y)
        for (int x = 0; x < 9; ++x)
            if (blurred.at(x, y) > best) {
                best = blurred.at(x, y);
                bx = x;
                by = y;
            }
    CHECK(bx == 4);
    CHECK(by == 4);
}

TEST_CASE("png round trip is exact on the 8-bit grid") {
    fgd_test::TempDir tmp("png");
    SoftMask m(3, 2, {0.0, 1.0 / 255.0, 128.0 / 255.0, 1.0, 37.0 / 255.0, 200.0 / 255.0});
    write_png(tmp.path / "m.png", m);
    SoftMask r = read_mask_png(tmp.path / "m.png");
    REQUIRE(r.width() == 3);
    REQUIRE(r.height() == 2);
    for (std::size_t i = 0; i < m.data().size(); ++i)
        CHECK(r.data()[i] == doctest::Approx(m.data()[i]).epsilon(1e-12));

    Frame f(2, 2);
    f.set(0, 0, 0, 1.0);
    f.set(1, 1, 2, 77.0 / 255.0);
    write_png(tmp.path / "f.png", f);
    Frame rf = read_frame_png(tmp.path / "f.png");
    CHECK(rf.at(0, 0, 0) == doctest::Approx(1.0));
    CHECK(rf.at(1, 1, 2) == doctest::Approx(77.0 / 255.0));

    // round-half-up on write: 0.5 -> byte 128
    SoftMask half(1, 1, {0.5});
    write_png(tmp.path / "h.png", half);
    CHECK(read_mask_png(tmp.path / "h.png").at(0, 0) == doctest::Approx(128.0 / 255.0));
}

TEST_CASE("load_shot orders frames lexicographically") {
    fgd_test::TempDir tmp("shot");
    Frame a(2, 2), b(2, 2);
    a.set(0, 0, 0, 1.0);
    b.set(0, 0, 1, 1.0);
    write_png(tmp.path / "frame_002.png", b);
    write_png(tmp.path / "frame_001.png", a);
    VideoShot shot = load_shot(tmp.path);
    CHECK(shot.id() == tmp.path.filename().string());
    REQUIRE(shot.size() == 2);
    CHECK(shot.frames()[0].at(0, 0, 0) == doctest::Approx(1.0));
    CHECK(shot.frames()[1].at(0, 0, 1) == doctest::Approx(1.0));
}
