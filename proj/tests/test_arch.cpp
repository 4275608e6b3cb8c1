#include <cstdint>
#include <limits>
#include <random>

#include <doctest.h>

#include "edgewatt/arch.hpp"

using namespace edgewatt;

TEST_CASE("clf basics") {
    CHECK(clf({1, 1}) == 1);
    CHECK(clf({1000, 500}) == 500000);
    CHECK(clf({4096, 4096}) == 16777216);
}

TEST_CASE("clf is symmetric") {
    std::mt19937_64 rng(7);
    std::uniform_int_distribution<std::uint64_t> dist(1, 1u << 20);
    for (int i = 0; i < 200; ++i) {
        std::uint64_t a = dist(rng);
        std::uint64_t b = dist(rng);
        CHECK(clf({a, b}) == clf({b, a}));
    }
}

TEST_CASE("clf overflow is detected") {
    FcLayerSpec huge{std::uint64_t(1) << 40, std::uint64_t(1) << 40};
    CHECK_THROWS_AS(clf(huge), ValidationError);
    CHECK_THROWS_AS(clf({0, 4}), ValidationError);
}

TEST_CASE("conv output side") {
    CHECK(conv_out_side({32, 1, 1, 3, 1, 0}) == 30);
    CHECK(conv_out_side({32, 1, 1, 32, 1, 0}) == 1);
    CHECK(conv_out_side({28, 1, 1, 5, 3, 0}) == 8);  // floor of a non-divisible stride
    CHECK(conv_out_side({28, 1, 1, 5, 3, 2}) == 9);  // padding widens the input
    CHECK_THROWS_AS(conv_out_side({4, 1, 1, 6, 1, 0}), ValidationError);
    CHECK(conv_out_side({4, 1, 1, 6, 1, 1}) == 1);  // fits once padded
}

TEST_CASE("kclc exact and approx") {
    ConvLayerSpec layer{32, 16, 64, 3, 1, 0};
    CHECK(kclc_exact(layer) == 129600);
    CHECK(kclc_approx(layer) == doctest::Approx(147456.0).epsilon(1e-15));
    CHECK(kclc_exact({1, 1, 1, 1, 1, 0}) == 1);

    ConvLayerSpec padded{32, 16, 64, 3, 1, 1};
    CHECK_NOTHROW(kclc_exact(padded));
    CHECK_THROWS_AS(kclc_approx(padded), ValidationError);
}

TEST_CASE("clc follows kclc * ofm") {
    ConvLayerSpec layer{32, 16, 64, 3, 1, 0};
    CHECK(clc_exact(layer) == 8294400);
    CHECK(clc_exact({28, 1, 6, 5, 1, 0}) == 86400);

    std::mt19937_64 rng(11);
    std::uniform_int_distribution<std::uint64_t> small(1, 48);
    for (int i = 0; i < 200; ++i) {
        ConvLayerSpec l;
        l.ksize = small(rng);
        l.i_size = l.ksize + small(rng);
        l.ifm = small(rng);
        l.ofm = small(rng);
        l.stride = 1 + small(rng) % 4;
        CHECK(clc_exact(l) == kclc_exact(l) * l.ofm);
        ConvLayerSpec single = l;
        single.ofm = 1;
        CHECK(clc_exact(single) == kclc_exact(single));
    }
}

TEST_CASE("clc overflow is detected") {
    ConvLayerSpec huge{std::uint64_t(1) << 33, 1 << 10, 1 << 10, 3, 1, 0};
    CHECK_THROWS_AS(clc_exact(huge), ValidationError);
}

TEST_CASE("clc monotonicity in each shape parameter") {
    std::mt19937_64 rng(23);
    std::uniform_int_distribution<std::uint64_t> small(1, 24);
    for (int i = 0; i < 300; ++i) {
        ConvLayerSpec l;
        l.ksize = 1 + small(rng) % 7;
        l.i_size = l.ksize + small(rng);
        l.ifm = small(rng);
        l.ofm = small(rng);
        l.stride = 1 + small(rng) % 4;

        ConvLayerSpec larger = l;
        larger.i_size += 1 + small(rng) % 4;
        CHECK(clc_exact(larger) >= clc_exact(l));

        larger = l;
        larger.ifm += 1;
        CHECK(clc_exact(larger) >= clc_exact(l));

        larger = l;
        larger.ofm += 1;
        CHECK(clc_exact(larger) >= clc_exact(l));

        larger = l;
        larger.ksize += 1;
        // Growing the kernel shrinks the output side, so the load only grows
        // while the input dominates the kernel.
        if ((larger.ksize) * (l.stride + 1) <= l.i_size) {
            CHECK(clc_exact(larger) >= clc_exact(l));
        }

        ConvLayerSpec slower = l;
        slower.stride += 1;
        CHECK(clc_exact(slower) <= clc_exact(l));
    }
}

TEST_CASE("exact load never exceeds the approximation when stride divides i_size") {
    std::mt19937_64 rng(29);
    std::uniform_int_distribution<std::uint64_t> small(1, 16);
    for (int i = 0; i < 300; ++i) {
        ConvLayerSpec l;
        l.stride = small(rng);
        l.i_size = l.stride * (1 + small(rng));
        l.ksize = 1 + small(rng) % std::min<std::uint64_t>(l.i_size, 9);
        l.ifm = small(rng);
        l.ofm = small(rng);
        CHECK(static_cast<double>(clc_exact(l)) <= clc_approx(l));
    }
}

TEST_CASE("exact/approx gap vanishes as i_size grows") {
    double prev_gap = 1.0;
    for (std::uint64_t i_size : {64, 256, 1024}) {
        ConvLayerSpec l{i_size, 8, 4, 3, 1, 0};
        double exact = static_cast<double>(clc_exact(l));
        double approx = clc_approx(l);
        double gap = (approx - exact) / approx;
        CHECK(gap > 0.0);
        CHECK(gap < prev_gap);
        prev_gap = gap;
    }
}

TEST_CASE("layer validation") {
    CHECK_THROWS_AS(validate(ConvLayerSpec{0, 1, 1, 1, 1, 0}), ValidationError);
    CHECK_THROWS_AS(validate(ConvLayerSpec{4, 1, 1, 1, 0, 0}), ValidationError);
    CHECK_NOTHROW(validate(ConvLayerSpec{4, 1, 1, 4, 9, 0}));  // stride may exceed the input
    CHECK_THROWS_AS(validate(NetworkArch{"empty", {}}), ValidationError);
    CHECK_THROWS_AS(validate(DeviceProfile{"d", 0.0, 0.0, std::nullopt}), ValidationError);
    CHECK_THROWS_AS(validate(DeviceProfile{"d", 1e-8, -1e-12, std::nullopt}), ValidationError);
    CHECK_THROWS_AS(validate(DeviceProfile{"d", 1e-8, 0.0, 0.0}), ValidationError);
    CHECK_NOTHROW(validate(DeviceProfile{"d", 1e-8, 0.0, std::nullopt}));
}

TEST_CASE("layer_load dispatches on kind") {
    CHECK(layer_load(make_fc(400, 120)) == 48000);
    CHECK(layer_load(make_conv(28, 1, 6, 5)) == 86400);
}
