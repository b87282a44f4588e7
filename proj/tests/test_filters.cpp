#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <vector>

#include "msseg/filters.hpp"
#include "msseg/image.hpp"
#include "msseg/phantom.hpp"
#include "msseg/rng.hpp"

using namespace msseg;

namespace {

constexpr double kPi = 3.14159265358979323846;

double normal_cdf(double z) { return 0.5 * std::erfc(-z / std::sqrt(2.0)); }

// Analytic anti-aliased step: edge line at orientation phi through (cx, cy),
// intensity lo on the negative side of the normal (-sin phi, cos phi).
GrayImage oriented_step(int w, int h, double phi, double cx, double cy, double lo, double hi,
                        double edge_sigma) {
    GrayImage img(w, h);
    double nx = -std::sin(phi), ny = std::cos(phi);
    for (int y = 0; y < h; ++y)
        for (int x = 0; x < w; ++x) {
            double s = (x - cx) * nx + (y - cy) * ny;
            img.at(x, y) = float(lo + (hi - lo) * normal_cdf(s / edge_sigma));
        }
    return img;
}

double circ_dist_pi(double a, double b) {
    double d = std::fmod(std::abs(a - b), kPi);
    return std::min(d, kPi - d);
}

double circ_dist_2pi(double a, double b) {
    double d = std::fmod(std::abs(a - b), 2.0 * kPi);
    return std::min(d, 2.0 * kPi - d);
}

} // namespace

TEST_CASE("sobel on a constant image is zero") {
    GrayImage img(20, 20, 99.0f);
    GradientField g = sobel(img);
    for (std::size_t i = 0; i < img.size(); ++i) {
        CHECK(g.gx.data[i] == 0.0f);
        CHECK(g.gy.data[i] == 0.0f);
    }
}

TEST_CASE("sobel on a vertical step has magnitude 4x the step height") {
    // step of height 100 between columns 9 and 10
    GrayImage img(20, 16, 0.0f);
    for (int y = 0; y < 16; ++y)
        for (int x = 10; x < 20; ++x) img.at(x, y) = 100.0f;
    GradientField g = sobel(img);
    for (int y = 2; y < 14; ++y) {
        CHECK(std::abs(g.gx.at(9, y)) == doctest::Approx(400.0));
        CHECK(std::abs(g.gx.at(10, y)) == doctest::Approx(400.0));
        CHECK(g.gy.at(9, y) == doctest::Approx(0.0));
        CHECK(g.gx.at(5, y) == doctest::Approx(0.0));
    }
}

TEST_CASE("sobel components swap under a 90-degree rotation") {
    PhantomSpec spec;
    spec.width = 48;
    spec.height = 48;
    spec.blur_sigma = 1.0;
    auto [img, truth] = generate_phantom(spec);
    GradientField g = sobel(img);

    GrayImage rot(img.height, img.width);
    for (int y = 0; y < img.height; ++y)
        for (int x = 0; x < img.width; ++x) rot.at(img.height - 1 - y, x) = img.at(x, y);
    GradientField gr = sobel(rot);
    // (x, y) -> (H-1-y, x): d/dx' = -d/dy, d/dy' = d/dx away from borders
    for (int y = 2; y < img.height - 2; ++y)
        for (int x = 2; x < img.width - 2; ++x) {
            CHECK(gr.gx.at(img.height - 1 - y, x) == doctest::Approx(-g.gy.at(x, y)).epsilon(1e-5));
            CHECK(gr.gy.at(img.height - 1 - y, x) == doctest::Approx(g.gx.at(x, y)).epsilon(1e-5));
        }
}

TEST_CASE("directional derivative: axis angles reduce to the components") {
    GrayImage img = oriented_step(32, 32, 0.6, 16, 16, 50, 190, 1.0);
    GradientField g = sobel(img);
    GrayImage d0 = directional_derivative(g, 0.0);
    GrayImage d90 = directional_derivative(g, kPi / 2.0);
    CHECK(d0.data == g.gx.data);
    CHECK(d90.data == g.gy.data);
}

TEST_CASE("directional derivative equals convolution with the steered sobel kernel") {
    GrayImage img = oriented_step(24, 24, 1.1, 12, 12, 10, 210, 1.2);
    double theta = 0.7;
    const double sx[3][3] = {{-1, 0, 1}, {-2, 0, 2}, {-1, 0, 1}};

    // steering identity checked in double precision: cos*Kx(u) + sin*Ky(u)
    // against the explicitly built steered kernel, to 1e-10
    auto corr = [&](auto tap) {
        std::vector<double> out(img.size());
        for (int y = 0; y < img.height; ++y)
            for (int x = 0; x < img.width; ++x) {
                double acc = 0;
                for (int dy = -1; dy <= 1; ++dy)
                    for (int dx = -1; dx <= 1; ++dx)
                        acc += tap(dx, dy) * img.at_reflect(x + dx, y + dy);
                out[std::size_t(y) * img.width + x] = acc;
            }
        return out;
    };
    auto gx = corr([&](int dx, int dy) { return sx[dy + 1][dx + 1]; });
    auto gy = corr([&](int dx, int dy) { return sx[dx + 1][dy + 1]; });
    auto steered_direct = corr([&](int dx, int dy) {
        return std::cos(theta) * sx[dy + 1][dx + 1] + std::sin(theta) * sx[dx + 1][dy + 1];
    });
    for (std::size_t i = 0; i < img.size(); ++i)
        CHECK(std::abs(std::cos(theta) * gx[i] + std::sin(theta) * gy[i] -
                       steered_direct[i]) < 1e-10 * 1000.0);

    // the shipped float-image path agrees to float rounding
    GradientField g = sobel(img);
    GrayImage steered = directional_derivative(g, theta);
    for (std::size_t i = 0; i < img.size(); ++i)
        CHECK(steered.data[i] == doctest::Approx(steered_direct[i]).epsilon(1e-4));
}

TEST_CASE("morphological gradient basics") {
    GrayImage flat(10, 10, 5.0f);
    GrayImage g = morph_gradient(flat, 1);
    for (float v : g.data) CHECK(v == 0.0f);

    GrayImage impulse(11, 11, 0.0f);
    impulse.at(5, 5) = 100.0f;
    GrayImage gi = morph_gradient(impulse, 1);
    for (int y = 0; y < 11; ++y)
        for (int x = 0; x < 11; ++x) {
            bool near = std::abs(x - 5) <= 1 && std::abs(y - 5) <= 1;
            CHECK(gi.at(x, y) == (near ? 100.0f : 0.0f));
        }
}

TEST_CASE("morphological gradient on the crisp phantom equals windowed mean range") {
    PhantomSpec spec;
    auto [img, truth] = generate_phantom(spec);
    GrayImage g = morph_gradient(img, 1);
    const float means[3] = {float(spec.mean_gas), float(spec.mean_grain), float(spec.mean_fluid)};
    for (int y = 0; y < img.height; ++y)
        for (int x = 0; x < img.width; ++x) {
            float lo = 255, hi = 0;
            for (int dy = -1; dy <= 1; ++dy)
                for (int dx = -1; dx <= 1; ++dx) {
                    float m = means[truth.at(reflect_index(x + dx, img.width),
                                             reflect_index(y + dy, img.height))];
                    lo = std::min(lo, m);
                    hi = std::max(hi, m);
                }
            CHECK(g.at(x, y) == hi - lo);
        }
}

TEST_CASE("quadrature basis kernels have zero mean") {
    QuadraturePair q = QuadraturePair::make();
    for (const Kernel& k : q.g_basis) CHECK(std::abs(k.sum()) < 1e-9 * k.max_abs());
    for (const Kernel& k : q.h_basis) CHECK(std::abs(k.sum()) < 1e-9 * k.max_abs());
}

TEST_CASE("steered kernels reproduce directly discretized rotations") {
    QuadraturePair q = QuadraturePair::make();
    Rng rng(2024);
    for (int trial = 0; trial < 16; ++trial) {
        double theta = (rng.uniform() - 0.5) * 2.0 * kPi;
        Kernel sg = q.steered_g(theta), dg = q.sampled_g(theta);
        Kernel sh = q.steered_h(theta), dh = q.sampled_h(theta);
        double gmax = dg.max_abs(), hmax = dh.max_abs();
        for (std::size_t i = 0; i < sg.taps.size(); ++i) {
            CHECK(std::abs(sg.taps[i] - dg.taps[i]) < 1e-6 * gmax);
            CHECK(std::abs(sh.taps[i] - dh.taps[i]) < 1e-6 * hmax);
        }
    }
}

TEST_CASE("quadrature responses: constant image gives zero, theta=0 collapses to basis") {
    QuadraturePair q = QuadraturePair::make();
    GrayImage flat(24, 24, 200.0f);
    QuadratureResponses r = quadrature_responses(flat, q);
    for (int i = 0; i < 3; ++i)
        for (float v : r.g[std::size_t(i)].data) CHECK(std::abs(v) < 1e-6);
    for (int i = 0; i < 4; ++i)
        for (float v : r.h[std::size_t(i)].data) CHECK(std::abs(v) < 1e-6);

    auto gw = q.g_weights(0.0);
    CHECK(gw[0] == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(std::abs(gw[1]) < 1e-12);
    CHECK(std::abs(gw[2]) < 1e-12);
    auto hw = q.h_weights(0.0);
    CHECK(hw[0] == doctest::Approx(1.0).epsilon(1e-12));
    for (int i = 1; i < 4; ++i) CHECK(std::abs(hw[std::size_t(i)]) < 1e-12);
}

TEST_CASE("steered response at an arbitrary angle matches the rotated-kernel oracle") {
    QuadraturePair q = QuadraturePair::make();
    GrayImage img = oriented_step(40, 40, 0.4, 20, 20, 50, 190, 1.5);
    QuadratureResponses r = quadrature_responses(img, q);
    double theta = 0.7;
    GrayImage direct_g = correlate(img, q.sampled_g(theta));
    GrayImage direct_h = correlate(img, q.sampled_h(theta));
    auto gw = q.g_weights(theta);
    auto hw = q.h_weights(theta);
    float range_g = direct_g.max_value() - direct_g.min_value();
    float range_h = direct_h.max_value() - direct_h.min_value();
    for (std::size_t i = 0; i < img.size(); ++i) {
        CHECK(std::abs(r.steered_g_at(i, gw) - direct_g.data[i]) < 1e-3 * range_g);
        CHECK(std::abs(r.steered_h_at(i, hw) - direct_h.data[i]) < 1e-3 * range_h);
    }
}

TEST_CASE("orientation recovers the edge angle and flags flat pixels") {
    QuadraturePair q = QuadraturePair::make();
    double phi = 30.0 * kPi / 180.0;
    GrayImage img = oriented_step(64, 64, phi, 32, 32, 50, 190, 1.0);
    QuadratureResponses r = quadrature_responses(img, q);
    OrientationField f = orientation_energy(r);

    double nx = -std::sin(phi), ny = std::cos(phi);
    int checked = 0;
    for (int y = 10; y < 54; ++y)
        for (int x = 10; x < 54; ++x) {
            double s = (x - 32) * nx + (y - 32) * ny;
            if (std::abs(s) > 0.7) continue; // pixels on the edge
            std::size_t i = std::size_t(y) * 64 + x;
            REQUIRE(f.reliable[i]);
            CHECK(circ_dist_pi(f.theta[i], phi) < 2.0 * kPi / 180.0);
            ++checked;
        }
    CHECK(checked > 30);

    // isotropic interior regions of a real image: negligible C2/C3, flagged
    // low-energy, theta = 0 by convention
    PhantomSpec spec;
    spec.blur_sigma = 2.0;
    auto [phantom, truth] = generate_phantom(spec);
    QuadratureResponses rf = quadrature_responses(phantom, q);
    OrientationField ff = orientation_energy(rf);
    std::size_t center_grain = std::size_t(100) * phantom.width + 80; // deep inside grain 0
    REQUIRE(truth.labels[center_grain] == kClassGrain);
    CHECK(!ff.reliable[center_grain]);
    CHECK(ff.theta[center_grain] == 0.0f);
    CHECK(std::abs(ff.c2[center_grain]) < ff.energy_threshold);
    CHECK(std::abs(ff.c3[center_grain]) < ff.energy_threshold);
}

TEST_CASE("C1 equals the angular mean of the 8 sampled energies") {
    QuadraturePair q = QuadraturePair::make();
    GrayImage img = oriented_step(40, 40, 1.2, 20, 20, 60, 200, 1.0);
    QuadratureResponses r = quadrature_responses(img, q);
    OrientationField f = orientation_energy(r);
    for (std::size_t i = 0; i < img.size(); i += 7) {
        double acc = 0.0;
        for (int k = 0; k < 8; ++k) {
            double theta = k * kPi / 8.0;
            double gs = r.steered_g_at(i, q.g_weights(theta));
            double hs = r.steered_h_at(i, q.h_weights(theta));
            acc += gs * gs + hs * hs;
        }
        acc /= 8.0;
        CHECK(f.c1[i] == doctest::Approx(acc).epsilon(1e-8));
    }
}

TEST_CASE("theta* matches the brute-force energy argmax within the grid spacing") {
    QuadraturePair q = QuadraturePair::make();
    const int grid = 720;
    std::vector<std::array<double, 3>> gw(grid);
    std::vector<std::array<double, 4>> hw(grid);
    for (int k = 0; k < grid; ++k) {
        gw[std::size_t(k)] = q.g_weights(k * kPi / grid);
        hw[std::size_t(k)] = q.h_weights(k * kPi / grid);
    }
    for (int a = 0; a < 8; ++a) {
        double phi = (a * 22.5 + 7.0) * kPi / 180.0;
        GrayImage img = oriented_step(48, 48, phi, 24, 24, 50, 190, 1.0);
        QuadratureResponses r = quadrature_responses(img, q);
        OrientationField f = orientation_energy(r);
        for (int y = 10; y < 38; ++y)
            for (int x = 10; x < 38; ++x) {
                std::size_t i = std::size_t(y) * 48 + x;
                if (!f.reliable[i]) continue;
                int best = 0;
                double beste = -1.0;
                for (int k = 0; k < grid; ++k) {
                    double gs = r.steered_g_at(i, gw[std::size_t(k)]);
                    double hs = r.steered_h_at(i, hw[std::size_t(k)]);
                    double e = gs * gs + hs * hs;
                    if (e > beste) {
                        beste = e;
                        best = k;
                    }
                }
                CHECK(circ_dist_pi(f.theta[i], best * kPi / grid) <= kPi / grid + 1e-9);
            }
    }
}

TEST_CASE("orientation estimate is rotation-equivariant") {
    QuadraturePair q = QuadraturePair::make();
    double base = 0.35;
    for (double delta : {0.15, 0.4, 0.9}) {
        GrayImage img0 = oriented_step(48, 48, base, 24, 24, 50, 190, 1.0);
        GrayImage img1 = oriented_step(48, 48, base + delta, 24, 24, 50, 190, 1.0);
        QuadratureResponses r0 = quadrature_responses(img0, q);
        QuadratureResponses r1 = quadrature_responses(img1, q);
        OrientationField f0 = orientation_energy(r0);
        OrientationField f1 = orientation_energy(r1);
        std::size_t center = std::size_t(24) * 48 + 24;
        REQUIRE(f0.reliable[center]);
        REQUIRE(f1.reliable[center]);
        double shift = circ_dist_pi(f1.theta[center], f0.theta[center]);
        CHECK(circ_dist_pi(shift, std::fmod(delta, kPi)) < 2.0 * kPi / 180.0);
    }
}

TEST_CASE("phase: zero/pi on the edge, odd across it, monotone near the crossing") {
    QuadraturePair q = QuadraturePair::make();
    // horizontal edge exactly through the pixel row y=24
    GrayImage img = oriented_step(48, 48, 0.0, 24.0, 24.0, 50, 190, 1.2);
    QuadratureResponses r = quadrature_responses(img, q);
    OrientationField f = orientation_energy(r);
    GrayImage ph = phase(r, f);

    // on-edge pixels: pure odd response -> phase at 0 or pi
    for (int x = 8; x < 40; ++x) {
        double v = ph.at(x, 24);
        CHECK(std::min(std::abs(v), kPi - std::abs(v)) < 0.05);
    }

    // odd symmetry: mirrored offsets give opposite phases (mod 2pi)
    for (int d = 1; d <= 3; ++d) {
        double above = ph.at(24, 24 - d);
        double below = ph.at(24, 24 + d);
        CHECK(circ_dist_2pi(above, -below) < 0.08);
    }

    // strict monotonicity of the unwrapped phase within +/-2 px of the edge
    std::vector<double> track;
    for (int y = 21; y <= 27; ++y) track.push_back(ph.at(24, y));
    std::vector<double> unwrapped{track[0]};
    for (std::size_t i = 1; i < track.size(); ++i) {
        double d = track[i] - track[i - 1];
        while (d > kPi) d -= 2.0 * kPi;
        while (d < -kPi) d += 2.0 * kPi;
        unwrapped.push_back(unwrapped.back() + d);
    }
    bool increasing = unwrapped[1] > unwrapped[0];
    for (std::size_t i = 1; i < unwrapped.size(); ++i) {
        if (increasing)
            CHECK(unwrapped[i] > unwrapped[i - 1]);
        else
            CHECK(unwrapped[i] < unwrapped[i - 1]);
    }
}
