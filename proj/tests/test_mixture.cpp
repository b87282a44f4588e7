#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <algorithm>
#include <cmath>
#include <vector>

#include "msseg/errors.hpp"
#include "msseg/mixture.hpp"
#include "msseg/rng.hpp"

using namespace msseg;

namespace {

// Simpson quadrature on a uniform grid (n panels, n even).
double integrate(double lo, double hi, int n, auto f) {
    double h = (hi - lo) / n;
    double acc = f(lo) + f(hi);
    for (int i = 1; i < n; ++i) acc += f(lo + i * h) * (i % 2 ? 4.0 : 2.0);
    return acc * h / 3.0;
}

// Samples one transition-pixel intensity: y*(mu_j-mu_i)+mu_i+eps.
double sample_transition(Rng& rng, double mu_i, double mu_j, double sigma_ij) {
    return rng.uniform() * (mu_j - mu_i) + mu_i + sigma_ij * rng.normal();
}

// The planted three-phase mixture used across the fitting tests.
NonGaussianMixture planted_mixture() {
    NonGaussianMixture m;
    m.base.mean = {50.0, 130.0, 190.0};
    m.base.var = {64.0, 64.0, 64.0};
    m.base.weight = {0.3, 0.3, 0.3};
    m.trans_var = {36.0, 36.0, 36.0};
    m.trans_weight = {0.1 / 3, 0.1 / 3, 0.1 / 3};
    return m;
}

std::vector<float> sample_from(const NonGaussianMixture& m, std::size_t n, std::uint64_t seed) {
    Rng rng(seed);
    std::vector<double> w;
    for (double v : m.base.weight) w.push_back(v);
    for (double v : m.trans_weight) w.push_back(v);
    int nb = m.base.size();
    std::vector<float> out(n);
    for (std::size_t s = 0; s < n; ++s) {
        int c = rng.categorical(w, 1.0);
        if (c < nb) {
            out[s] = float(rng.normal(m.base.mean[std::size_t(c)],
                                      std::sqrt(m.base.var[std::size_t(c)])));
        } else {
            auto [i, j] = NonGaussianMixture::pair_members(c - nb, nb);
            out[s] = float(sample_transition(rng, m.base.mean[std::size_t(i)],
                                             m.base.mean[std::size_t(j)],
                                             std::sqrt(m.trans_var[std::size_t(c - nb)])));
        }
    }
    return out;
}

} // namespace

TEST_CASE("pair indexing is lexicographic and invertible") {
    CHECK(NonGaussianMixture::pair_index(0, 1, 3) == 0);
    CHECK(NonGaussianMixture::pair_index(0, 2, 3) == 1);
    CHECK(NonGaussianMixture::pair_index(1, 2, 3) == 2);
    for (int n : {2, 3, 5}) {
        int p = 0;
        for (int i = 0; i < n - 1; ++i)
            for (int j = i + 1; j < n; ++j, ++p) {
                CHECK(NonGaussianMixture::pair_index(i, j, n) == p);
                auto [a, b] = NonGaussianMixture::pair_members(p, n);
                CHECK(a == i);
                CHECK(b == j);
            }
    }
}

TEST_CASE("kmeans on exactly-N-valued data recovers the values") {
    std::vector<float> samples;
    for (int i = 0; i < 300; ++i) samples.push_back(float(40 + 10 * (i % 3)));
    GaussianMixture m = kmeans_init(samples, 3, 7);
    CHECK(m.mean[0] == doctest::Approx(40.0));
    CHECK(m.mean[1] == doctest::Approx(50.0));
    CHECK(m.mean[2] == doctest::Approx(60.0));
    for (double v : m.var) CHECK(v == doctest::Approx(1e-4)); // zero-variance floor
    for (double w : m.weight) CHECK(w == doctest::Approx(1.0 / 3));
}

TEST_CASE("kmeans separates two clean blobs") {
    Rng rng(99);
    std::vector<float> samples;
    for (int i = 0; i < 5000; ++i) samples.push_back(float(rng.normal(50.0, 5.0)));
    for (int i = 0; i < 5000; ++i) samples.push_back(float(rng.normal(190.0, 5.0)));
    GaussianMixture m = kmeans_init(samples, 2, 1);
    CHECK(std::abs(m.mean[0] - 50.0) < 1.0);
    CHECK(std::abs(m.mean[1] - 190.0) < 1.0);

    GaussianMixture again = kmeans_init(samples, 2, 1);
    CHECK(again.mean == m.mean); // deterministic
    CHECK(again.var == m.var);
}

TEST_CASE("kmeans rejects data with fewer distinct values than clusters") {
    std::vector<float> samples(200, 5.0f);
    samples[0] = 6.0f;
    CHECK_THROWS_AS(kmeans_init(samples, 3, 0), numeric_error);
}

TEST_CASE("transition density: normalization, plateau, and sign safety") {
    double mu_i = 50, mu_j = 190, sigma = 8;
    double mass = integrate(mu_i - 6 * sigma, mu_j + 6 * sigma, 4000, [&](double u) {
        return transition_density(u, mu_i, mu_j, sigma);
    });
    CHECK(mass == doctest::Approx(1.0).epsilon(1e-4));

    // plateau value 1/(mu_j - mu_i) in the well-separated middle
    double mid = transition_density(0.5 * (mu_i + mu_j), mu_i, mu_j, sigma);
    CHECK(mid == doctest::Approx(1.0 / (mu_j - mu_i)).epsilon(0.01));

    // symmetric under swapping the pair order; equal means rejected
    CHECK(transition_density(100, mu_j, mu_i, sigma) ==
          doctest::Approx(transition_density(100, mu_i, mu_j, sigma)).epsilon(1e-12));
    CHECK_THROWS_AS(transition_density(100, 80, 80, sigma), config_error);
    CHECK(transition_density(1000.0, mu_i, mu_j, sigma) >= 0.0);
}

TEST_CASE("transition density matches a Monte-Carlo histogram of the sampled model") {
    double mu_i = 50, mu_j = 130, sigma_ij = 6;
    Rng rng(12345);
    const int n = 200000, bins = 20;
    double lo = mu_i - 15, hi = mu_j + 15;
    std::vector<double> counts(bins, 0.0);
    for (int s = 0; s < n; ++s) {
        double u = sample_transition(rng, mu_i, mu_j, sigma_ij);
        int b = int((u - lo) / (hi - lo) * bins);
        if (b >= 0 && b < bins) counts[std::size_t(b)] += 1.0;
    }
    double bin_w = (hi - lo) / bins;
    for (int b = 0; b < bins; ++b) {
        double density = integrate(lo + b * bin_w, lo + (b + 1) * bin_w, 64, [&](double u) {
                             return transition_density(u, mu_i, mu_j, sigma_ij);
                         }) / bin_w;
        double expected = density * bin_w * n;
        double se = std::sqrt(std::max(expected, 1.0));
        CHECK(std::abs(counts[std::size_t(b)] - expected) <= 3.0 * se);
    }
}

TEST_CASE("ngmm density: reduction, normalization, non-negativity") {
    NonGaussianMixture m = planted_mixture();

    SUBCASE("zero transition weights reduce to the gaussian mixture") {
        NonGaussianMixture g = m;
        g.trans_weight = {0.0, 0.0, 0.0};
        double rescale = 0.0;
        for (double w : g.base.weight) rescale += w;
        for (double& w : g.base.weight) w /= rescale;
        for (double u = 0; u <= 250; u += 2.5) {
            double direct = 0.0;
            for (int i = 0; i < 3; ++i)
                direct += g.base.weight[std::size_t(i)] *
                          gaussian_density(u, g.base.mean[std::size_t(i)], g.base.var[std::size_t(i)]);
            CHECK(ngmm_density(g, u) == doctest::Approx(direct).epsilon(1e-12));
        }
    }

    SUBCASE("full density integrates to one and is non-negative") {
        double mass = integrate(-50, 300, 10000, [&](double u) { return ngmm_density(m, u); });
        CHECK(mass == doctest::Approx(1.0).epsilon(1e-4));
        for (int i = 0; i <= 10000; ++i) CHECK(ngmm_density(m, -50 + i * 0.035) >= 0.0);
    }
}

TEST_CASE("fit_ngmm recovers planted parameters") {
    NonGaussianMixture truth = planted_mixture();
    std::vector<float> samples = sample_from(truth, 50000, 2023);

    EmSettings s;
    s.seed = 11;
    s.gibbs_sweeps = 16;
    s.max_iterations = 60;
    NgmmFitResult fit = fit_ngmm(samples, 3, s);

    for (int i = 0; i < 3; ++i) {
        CHECK(std::abs(fit.mixture.base.mean[std::size_t(i)] - truth.base.mean[std::size_t(i)]) < 2.0);
        CHECK(std::abs(fit.mixture.base.weight[std::size_t(i)] - 0.3) < 0.03);
    }
    double wsum = 0.0;
    for (double w : fit.mixture.base.weight) wsum += w;
    for (double w : fit.mixture.trans_weight) wsum += w;
    CHECK(wsum == doctest::Approx(1.0).epsilon(1e-9));

    // determinism
    NgmmFitResult again = fit_ngmm(samples, 3, s);
    CHECK(again.mixture.base.mean == fit.mixture.base.mean);
    CHECK(again.mixture.trans_var == fit.mixture.trans_var);
    CHECK(again.loglik_trace == fit.loglik_trace);
}

TEST_CASE("fit_ngmm on transition-free data drives transition weights down") {
    NonGaussianMixture truth = planted_mixture();
    truth.trans_weight = {0.0, 0.0, 0.0};
    for (double& w : truth.base.weight) w = 1.0 / 3;
    std::vector<float> samples = sample_from(truth, 30000, 5);

    EmSettings s;
    s.seed = 3;
    NgmmFitResult fit = fit_ngmm(samples, 3, s);
    for (double w : fit.mixture.trans_weight) CHECK(w < 0.01);
}

TEST_CASE("gibbs log-likelihood trace decreases only within Monte-Carlo noise") {
    NonGaussianMixture truth = planted_mixture();
    std::vector<float> samples = sample_from(truth, 20000, 77);

    EmSettings s;
    s.seed = 21;
    s.gibbs_sweeps = 16;
    s.max_iterations = 30;
    s.tolerance = 1e-12; // run all iterations to expose the full trace
    NgmmFitResult fit = fit_ngmm(samples, 3, s);
    REQUIRE(fit.loglik_trace.size() > 10);

    // Monte-Carlo scale of the trace: std of successive differences over the
    // converged tail
    std::size_t tail_start = fit.loglik_trace.size() * 2 / 3;
    std::vector<double> tail_diffs;
    for (std::size_t i = tail_start + 1; i < fit.loglik_trace.size(); ++i)
        tail_diffs.push_back(fit.loglik_trace[i] - fit.loglik_trace[i - 1]);
    double mean = 0, var = 0;
    for (double d : tail_diffs) mean += d;
    mean /= double(tail_diffs.size());
    for (double d : tail_diffs) var += (d - mean) * (d - mean);
    double noise_sd = std::sqrt(var / double(tail_diffs.size() - 1));

    for (std::size_t i = 1; i < fit.loglik_trace.size(); ++i) {
        double change = fit.loglik_trace[i] - fit.loglik_trace[i - 1];
        CHECK(change >= -std::max(3.0 * noise_sd, 1e-9 * std::abs(fit.loglik_trace[i])));
    }
}

TEST_CASE("exact EM log-likelihood trace is non-decreasing") {
    NonGaussianMixture truth = planted_mixture();
    std::vector<float> samples = sample_from(truth, 20000, 31);
    EmSettings s;
    s.seed = 4;
    s.exact_estep = true;
    s.max_iterations = 40;
    NgmmFitResult fit = fit_ngmm(samples, 3, s);
    for (std::size_t i = 1; i < fit.loglik_trace.size(); ++i)
        CHECK(fit.loglik_trace[i] >= fit.loglik_trace[i - 1] - 1e-9 * std::abs(fit.loglik_trace[i]));
}

TEST_CASE("gibbs responsibilities converge to the exact posteriors") {
    NonGaussianMixture m = planted_mixture();
    std::vector<float> samples = sample_from(m, 100, 55);

    EmSettings exact;
    exact.exact_estep = true;
    auto truth = estep_responsibilities(m, samples, exact);

    EmSettings gibbs;
    gibbs.gibbs_sweeps = 512;
    gibbs.seed = 1234;
    auto approx = estep_responsibilities(m, samples, gibbs);

    double max_dev = 0.0;
    for (std::size_t i = 0; i < samples.size(); ++i)
        for (std::size_t c = 0; c < truth[i].size(); ++c)
            max_dev = std::max(max_dev, std::abs(truth[i][c] - approx[i][c]));
    CHECK(max_dev < 0.05);
}

TEST_CASE("moment-matching identity: var - delta^2/12 estimates sigma_ij^2") {
    // delta^2/12 must not dwarf sigma^2 or the subtraction's own sampling
    // noise exceeds the 10% band at 1e4 samples
    double mu_i = 50, mu_j = 90, sigma_ij = 8;
    Rng rng(8);
    const int n = 10000;
    double sum = 0, sum2 = 0;
    for (int s = 0; s < n; ++s) {
        double u = sample_transition(rng, mu_i, mu_j, sigma_ij);
        sum += u;
        sum2 += u * u;
    }
    double mean = sum / n;
    double var = sum2 / n - mean * mean;
    double delta = mu_j - mu_i;
    double est = var - delta * delta / 12.0;
    CHECK(est == doctest::Approx(sigma_ij * sigma_ij).epsilon(0.10));
}

TEST_CASE("classify_gaussian: argmax, crossings, weight-rescaling invariance") {
    NonGaussianMixture m = planted_mixture();
    CHECK(classify_gaussian(m, 50.0) == 0);
    CHECK(classify_gaussian(m, 130.0) == 1);
    CHECK(classify_gaussian(m, 190.0) == 2);

    // numeric crossing of components 0 and 1 (equal weights/vars: midpoint)
    double lo = 50, hi = 130;
    for (int it = 0; it < 200; ++it) {
        double mid = 0.5 * (lo + hi);
        double d0 = m.base.weight[0] * gaussian_density(mid, m.base.mean[0], m.base.var[0]);
        double d1 = m.base.weight[1] * gaussian_density(mid, m.base.mean[1], m.base.var[1]);
        (d0 > d1 ? lo : hi) = mid;
    }
    double crossing = 0.5 * (lo + hi);
    CHECK(classify_gaussian(m, crossing - 0.01) == 0);
    CHECK(classify_gaussian(m, crossing + 0.01) == 1);

    NonGaussianMixture scaled = m;
    for (double& w : scaled.base.weight) w *= 7.5; // argmax unchanged
    for (double u = 0; u < 250; u += 1.7)
        CHECK(classify_gaussian(scaled, u) == classify_gaussian(m, u));
}

TEST_CASE("fit_gmm collapses loudly, fits cleanly otherwise") {
    Rng rng(17);
    std::vector<float> samples;
    for (int i = 0; i < 4000; ++i) samples.push_back(float(rng.normal(60, 6)));
    for (int i = 0; i < 4000; ++i) samples.push_back(float(rng.normal(180, 6)));

    EmSettings s;
    s.seed = 2;
    GmmFitResult fit = fit_gmm(samples, 2, s);
    CHECK(std::abs(fit.mixture.mean[0] - 60) < 1.0);
    CHECK(std::abs(fit.mixture.mean[1] - 180) < 1.0);
    CHECK(fit.mixture.weight[0] == doctest::Approx(0.5).epsilon(0.05));
}

TEST_CASE("mixture json round trip") {
    NgmmFitResult fit;
    fit.mixture = planted_mixture();
    fit.iterations = 12;
    fit.loglik_trace = {-1000.0, -950.0};
    std::string text = mixture_to_json(fit);
    NonGaussianMixture back = mixture_from_json(text);
    CHECK(back.base.mean == fit.mixture.base.mean);
    CHECK(back.base.var == fit.mixture.base.var);
    CHECK(back.trans_var == fit.mixture.trans_var);
    CHECK(back.trans_weight == fit.mixture.trans_weight);
}
