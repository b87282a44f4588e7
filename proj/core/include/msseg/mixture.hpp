#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

namespace msseg {

/// Gaussian mixture with components sorted by ascending mean.
struct GaussianMixture {
    std::vector<double> mean;
    std::vector<double> var;
    std::vector<double> weight;

    int size() const { return int(mean.size()); }
    void validate() const;
};

/// Mixture of Gaussian phase components plus one uniform-convolved-Gaussian
/// transition component per pair i<j (pairs in lexicographic order). The
/// transition component means are tied to (mu_i, mu_j); only sigma_ij and
/// w_ij are free.
struct NonGaussianMixture {
    GaussianMixture base;
    std::vector<double> trans_var;    // sigma_ij^2, one per pair
    std::vector<double> trans_weight; // w_ij, one per pair

    static int pair_index(int i, int j, int n); // requires i < j
    static std::pair<int, int> pair_members(int p, int n);
    int pair_count() const { return int(trans_var.size()); }
    int n_components() const { return base.size() + pair_count(); }
    void validate() const;
};

struct EmSettings {
    int gibbs_sweeps = 8;
    int max_iterations = 40;
    double tolerance = 1e-5;
    std::uint64_t seed = 0;
    bool exact_estep = false;          // analytic posteriors (test oracle mode)
    std::size_t max_samples = 200000;  // larger inputs are subsampled, seeded

    void validate() const;
};

/// Lloyd's iterations from quantile-seeded centers until the assignment
/// fixpoint (or 100 iterations). Empty clusters are re-seeded at the sample
/// farthest from its center. Variances are floored at 1e-4.
GaussianMixture kmeans_init(std::span<const float> samples, int n, std::uint64_t seed);

/// Transition component density psi_ij(u): the density of
/// u = y*(mu_j - mu_i) + mu_i + eps with y ~ U[0,1], eps ~ N(0, sigma_ij^2).
double transition_density(double u, double mu_i, double mu_j, double sigma_ij);

double gaussian_density(double u, double mean, double var);

/// Full mixture density: all transition and Gaussian terms.
double ngmm_density(const NonGaussianMixture& m, double u);

struct NgmmFitResult {
    NonGaussianMixture mixture;
    std::vector<double> loglik_trace;
    int iterations = 0;
    std::vector<std::string> warnings;
};

/// EM fit of the non-Gaussian mixture. The E-step approximates posteriors by
/// categorical Gibbs draws (exact analytic posteriors in exact_estep mode);
/// the M-step uses closed-form Gaussian updates and moment matching for
/// sigma_ij^2 (Var[u_ij] = (mu_j-mu_i)^2/12 + sigma_ij^2).
NgmmFitResult fit_ngmm(std::span<const float> samples, int n, const EmSettings& s);

/// Per-sample posterior responsibilities over all components for the given
/// mixture, one row per sample (Gibbs-averaged unless exact). Exposed for the
/// convergence oracle.
std::vector<std::vector<double>> estep_responsibilities(const NonGaussianMixture& m,
                                                        std::span<const float> samples,
                                                        const EmSettings& s);

/// argmax over the Gaussian components only of w_j * phi_j(u); ties break
/// toward the lower index.
int classify_gaussian(const NonGaussianMixture& m, double u);
int classify_gaussian(const GaussianMixture& m, double u);

struct GmmFitResult {
    GaussianMixture mixture;
    int iterations = 0;
    double final_loglik = 0.0;
};

/// Exact-EM fit of a plain Gaussian mixture (used on the single-class pixel
/// group). Throws numeric_error if a component collapses below weight 1e-4.
GmmFitResult fit_gmm(std::span<const float> samples, int n, const EmSettings& s);

std::string mixture_to_json(const NgmmFitResult& fit);
NonGaussianMixture mixture_from_json(const std::string& text);

} // namespace msseg
