#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <cstdio>
#include <filesystem>

#include "msseg/config.hpp"
#include "msseg/errors.hpp"
#include "msseg/image.hpp"
#include "msseg/pgm_io.hpp"
#include "msseg/phantom.hpp"
#include "msseg/rng.hpp"

using namespace msseg;

namespace {

struct TempDir {
    std::filesystem::path path;
    TempDir() {
        path = std::filesystem::temp_directory_path() /
               ("msseg_test_" + std::to_string(std::rand()));
        std::filesystem::create_directories(path);
    }
    ~TempDir() { std::filesystem::remove_all(path); }
};

double sample_std(const std::vector<float>& v, double mean) {
    double acc = 0.0;
    for (float x : v) acc += (x - mean) * (x - mean);
    return std::sqrt(acc / double(v.size() - 1));
}

} // namespace

TEST_CASE("reflect index is half-sample symmetric") {
    CHECK(reflect_index(-1, 5) == 0);
    CHECK(reflect_index(-2, 5) == 1);
    CHECK(reflect_index(5, 5) == 4);
    CHECK(reflect_index(6, 5) == 3);
    CHECK(reflect_index(3, 5) == 3);
}

TEST_CASE("phantom with no degradation equals class means exactly") {
    PhantomSpec spec;
    spec.blur_sigma = 0;
    spec.noise_sigma = 0;
    auto [img, truth] = generate_phantom(spec);
    const float means[3] = {float(spec.mean_gas), float(spec.mean_grain), float(spec.mean_fluid)};
    std::size_t exact = 0;
    for (std::size_t i = 0; i < img.size(); ++i)
        exact += img.data[i] == means[truth.labels[i]] ? 1 : 0;
    CHECK(exact == img.size());
}

TEST_CASE("phantom ground truth is independent of blur and noise") {
    PhantomSpec a;
    a.blur_sigma = 3.0;
    a.noise_sigma = 13.0; // the heavier degradation pairing
    PhantomSpec b;
    b.blur_sigma = 0.5;
    b.noise_sigma = 2.0;
    b.seed = 77;
    auto [img_a, truth_a] = generate_phantom(a);
    auto [img_b, truth_b] = generate_phantom(b);
    CHECK(truth_a == truth_b);
}

TEST_CASE("all three phantom classes occupy at least 1% of pixels") {
    PhantomSpec spec;
    auto [img, truth] = generate_phantom(spec);
    double n = double(truth.size());
    for (std::uint8_t c = 0; c < 3; ++c)
        CHECK(double(truth.count(c)) / n >= 0.01);
}

TEST_CASE("phantom per-class variance matches the injected noise") {
    PhantomSpec spec;
    spec.noise_sigma = 5.0;
    spec.seed = 123;
    auto [img, truth] = generate_phantom(spec);
    const double means[3] = {spec.mean_gas, spec.mean_grain, spec.mean_fluid};
    for (std::uint8_t c = 0; c < 3; ++c) {
        std::vector<float> vals;
        for (std::size_t i = 0; i < img.size(); ++i)
            if (truth.labels[i] == c) vals.push_back(img.data[i]);
        if (vals.size() < 500) continue; // fluid class is thin; skip tiny samples
        double var = 0.0;
        for (float v : vals) var += (v - means[c]) * (v - means[c]);
        var /= double(vals.size());
        CHECK(var == doctest::Approx(25.0).epsilon(0.10));
    }
}

TEST_CASE("phantom geometry that erases a class names the class") {
    PhantomSpec spec;
    spec.bridge_waist_frac = 1e-9; // no room for fluid pixels
    spec.validate();
    CHECK_THROWS_WITH_AS(generate_phantom(spec),
                         doctest::Contains("fluid"), config_error);
}

TEST_CASE("gaussian blur: constant image unchanged, sigma=0 identity") {
    GrayImage img(33, 17, 42.5f);
    GrayImage out = gaussian_blur(img, 2.7);
    for (float v : out.data) CHECK(v == doctest::Approx(42.5f).epsilon(1e-7));

    GrayImage noisy = add_noise(img, 9.0, 4);
    GrayImage same = gaussian_blur(noisy, 0.0);
    CHECK(same.data == noisy.data);
}

TEST_CASE("gaussian blur impulse response peaks at the 2-D gaussian value") {
    GrayImage img(41, 41, 0.0f);
    img.at(20, 20) = 1.0f;
    GrayImage out = gaussian_blur(img, 1.0);
    // analytic peak of the continuous kernel: 1/(2*pi)
    CHECK(out.at(20, 20) == doctest::Approx(1.0 / (2.0 * 3.14159265358979)).epsilon(0.02));
}

TEST_CASE("gaussian blur preserves the image mean (reflect padding)") {
    PhantomSpec spec;
    spec.noise_sigma = 14.0;
    spec.seed = 9;
    auto [img, truth] = generate_phantom(spec);
    for (double sigma : {0.8, 2.0, 3.5}) {
        GrayImage out = gaussian_blur(img, sigma);
        CHECK(out.mean_value() ==
              doctest::Approx(img.mean_value()).epsilon(1e-6));
    }
}

TEST_CASE("add_noise: sigma=0 identity, deterministic, correct scale") {
    GrayImage img(250, 400, 128.0f); // 1e5 pixels
    CHECK(add_noise(img, 0.0, 1).data == img.data);

    GrayImage n1 = add_noise(img, 14.0, 42);
    GrayImage n2 = add_noise(img, 14.0, 42);
    CHECK(n1.data == n2.data); // bit-identical for the same seed

    double std = sample_std(n1.data, 128.0);
    CHECK(std >= 13.5);
    CHECK(std <= 14.5);
}

TEST_CASE("pgm round trips") {
    TempDir tmp;
    PhantomSpec spec;
    spec.noise_sigma = 6.0;
    spec.blur_sigma = 1.0;
    auto [img, truth] = generate_phantom(spec);

    SUBCASE("8-bit image") {
        auto p = (tmp.path / "img8.pgm").string();
        write_pgm8(img, p);
        int maxval = 0;
        GrayImage back = read_pgm(p, &maxval);
        CHECK(maxval == 255);
        CHECK(back.width == img.width);
        CHECK(back.height == img.height);
        for (std::size_t i = 0; i < img.size(); ++i)
            CHECK(std::abs(back.data[i] - std::clamp(img.data[i], 0.0f, 255.0f)) <= 0.5f);
    }

    SUBCASE("16-bit image keeps sub-integer detail") {
        auto p = (tmp.path / "img16.pgm").string();
        write_pgm16(img, p);
        int maxval = 0;
        GrayImage back = read_pgm(p, &maxval);
        CHECK(maxval == 65535);
        GrayImage norm = normalize_to_nominal_range(back, maxval);
        for (std::size_t i = 0; i < img.size(); ++i)
            CHECK(std::abs(norm.data[i] - std::clamp(img.data[i], 0.0f, 255.0f)) <= 0.01f);
    }

    SUBCASE("label map") {
        auto p = (tmp.path / "labels.pgm").string();
        write_label_pgm(truth, p);
        LabelMap back = read_label_pgm(p);
        CHECK(back == truth);
    }

    SUBCASE("truncated file is an io_error") {
        auto p = (tmp.path / "bad.pgm").string();
        std::FILE* f = std::fopen(p.c_str(), "wb");
        std::fputs("P5\n100 100\n255\nxx", f);
        std::fclose(f);
        CHECK_THROWS_AS(read_pgm(p), io_error);
    }

    SUBCASE("empty file is an io_error") {
        auto p = (tmp.path / "empty.pgm").string();
        std::FILE* f = std::fopen(p.c_str(), "wb");
        std::fclose(f);
        CHECK_THROWS_AS(read_pgm(p), io_error);
    }
}

TEST_CASE("key-value config: parsing, typed getters, unknown keys") {
    KeyValueConfig cfg = KeyValueConfig::from_string(
        "# phantom\nwidth = 160\nnoise_sigma = 14.0\nseed=7\n\n");
    CHECK(cfg.get_int("width", 0) == 160);
    CHECK(cfg.get_double("noise_sigma", 0) == doctest::Approx(14.0));
    CHECK(cfg.get_u64("seed", 0) == 7);
    CHECK(cfg.get_string("missing", "fallback") == "fallback");

    CHECK_THROWS_AS(cfg.validate_keys({"width", "seed"}), config_error);
    CHECK_THROWS_AS(KeyValueConfig::from_string("not a pair\n"), config_error);
    CHECK_THROWS_AS(cfg.get_int("noise_sigma", 0), config_error);

    PhantomSpec spec = PhantomSpec::from_config(
        KeyValueConfig::from_string("width = 120\nheight = 240\nnoise_sigma = 14\n"));
    CHECK(spec.width == 120);
    CHECK(spec.noise_sigma == doctest::Approx(14.0));
    // round trip through to_config
    PhantomSpec again = PhantomSpec::from_config(spec.to_config());
    CHECK(again.width == spec.width);
    CHECK(again.mean_fluid == doctest::Approx(spec.mean_fluid));
}

TEST_CASE("phantom spec validation") {
    PhantomSpec spec;
    spec.mean_gas = spec.mean_grain; // not pairwise distinct
    CHECK_THROWS_AS(spec.validate(), config_error);

    PhantomSpec neg;
    neg.noise_sigma = -1;
    CHECK_THROWS_AS(neg.validate(), config_error);
}
