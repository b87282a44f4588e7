#include "msseg/mixture.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "json.hpp"

#include "msseg/errors.hpp"
#include "msseg/rng.hpp"

namespace msseg {

namespace {

constexpr double kTwoPi = 6.283185307179586476925286766559;
constexpr double kVarFloor = 1e-4;

double normal_cdf(double z) { return 0.5 * std::erfc(-z / std::sqrt(2.0)); }

} // namespace

void GaussianMixture::validate() const {
    if (mean.size() != var.size() || mean.size() != weight.size())
        throw config_error("mixture: parameter arrays differ in length");
    if (mean.empty()) throw config_error("mixture: no components");
    double wsum = 0.0;
    for (std::size_t i = 0; i < mean.size(); ++i) {
        if (var[i] <= 0) throw config_error("mixture: variances must be positive");
        if (i > 0 && mean[i] < mean[i - 1])
            throw config_error("mixture: means must be sorted ascending");
        wsum += weight[i];
    }
    if (std::abs(wsum - 1.0) > 1e-9)
        throw config_error("mixture: weights must sum to 1");
}

int NonGaussianMixture::pair_index(int i, int j, int n) {
    return i * n - i * (i + 1) / 2 + (j - i - 1);
}

std::pair<int, int> NonGaussianMixture::pair_members(int p, int n) {
    for (int i = 0; i < n - 1; ++i) {
        int row = n - 1 - i;
        if (p < row) return {i, i + 1 + p};
        p -= row;
    }
    throw config_error("mixture: pair index out of range");
}

void NonGaussianMixture::validate() const {
    int n = base.size();
    if (int(trans_var.size()) != n * (n - 1) / 2 || trans_var.size() != trans_weight.size())
        throw config_error("mixture: transition component count must be N(N-1)/2");
    for (double v : trans_var)
        if (v <= 0) throw config_error("mixture: transition variances must be positive");
    if (base.mean.size() != base.var.size() || base.mean.size() != base.weight.size())
        throw config_error("mixture: parameter arrays differ in length");
    for (std::size_t i = 1; i < base.mean.size(); ++i)
        if (base.mean[i] < base.mean[i - 1])
            throw config_error("mixture: means must be sorted ascending");
    double wsum = std::accumulate(base.weight.begin(), base.weight.end(), 0.0) +
                  std::accumulate(trans_weight.begin(), trans_weight.end(), 0.0);
    if (std::abs(wsum - 1.0) > 1e-9)
        throw config_error("mixture: weights (incl. transitions) must sum to 1");
}

void EmSettings::validate() const {
    if (gibbs_sweeps < 1) throw config_error("em: gibbs sweeps must be >= 1");
    if (max_iterations < 1) throw config_error("em: max iterations must be >= 1");
    if (tolerance <= 0) throw config_error("em: tolerance must be > 0");
    if (max_samples < 100) throw config_error("em: max_samples must be >= 100");
}

double gaussian_density(double u, double mean, double var) {
    double d = u - mean;
    return std::exp(-0.5 * d * d / var) / std::sqrt(kTwoPi * var);
}

double transition_density(double u, double mu_i, double mu_j, double sigma_ij) {
    if (mu_i == mu_j) throw config_error("transition_density: means must differ");
    if (sigma_ij <= 0) throw config_error("transition_density: sigma must be positive");
    // Density of y*(mu_j-mu_i) + mu_i + N(0, sigma^2), y ~ U[0,1]; the form is
    // symmetric under swapping (i, j).
    return (normal_cdf((u - mu_i) / sigma_ij) - normal_cdf((u - mu_j) / sigma_ij)) /
           (mu_j - mu_i);
}

double ngmm_density(const NonGaussianMixture& m, double u) {
    int n = m.base.size();
    double acc = 0.0;
    for (int i = 0; i < n - 1; ++i)
        for (int j = i + 1; j < n; ++j) {
            int p = NonGaussianMixture::pair_index(i, j, n);
            acc += m.trans_weight[std::size_t(p)] *
                   transition_density(u, m.base.mean[std::size_t(i)], m.base.mean[std::size_t(j)],
                                      std::sqrt(m.trans_var[std::size_t(p)]));
        }
    for (int i = 0; i < n; ++i)
        acc += m.base.weight[std::size_t(i)] *
               gaussian_density(u, m.base.mean[std::size_t(i)], m.base.var[std::size_t(i)]);
    return acc;
}

GaussianMixture kmeans_init(std::span<const float> samples, int n, std::uint64_t /*seed*/) {
    if (n < 1) throw config_error("kmeans: cluster count must be >= 1");
    std::vector<double> sorted(samples.begin(), samples.end());
    std::sort(sorted.begin(), sorted.end());
    std::size_t distinct = 1;
    for (std::size_t i = 1; i < sorted.size(); ++i)
        if (sorted[i] != sorted[i - 1]) ++distinct;
    if (sorted.empty() || distinct < std::size_t(n))
        throw numeric_error("kmeans: fewer distinct sample values than clusters");

    // quantile seeding keeps the run deterministic; the seed parameter exists
    // for interface symmetry with the other fitters
    std::vector<double> centers(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) {
        std::size_t idx = std::size_t((i + 0.5) * double(sorted.size()) / n);
        centers[std::size_t(i)] = sorted[std::min(idx, sorted.size() - 1)];
    }

    std::vector<int> assign(samples.size(), -1);
    for (int iter = 0; iter < 100; ++iter) {
        bool changed = false;
        for (std::size_t s = 0; s < samples.size(); ++s) {
            int best = 0;
            double bestd = std::abs(samples[s] - centers[0]);
            for (int c = 1; c < n; ++c) {
                double d = std::abs(samples[s] - centers[std::size_t(c)]);
                if (d < bestd) {
                    bestd = d;
                    best = c;
                }
            }
            if (assign[s] != best) {
                assign[s] = best;
                changed = true;
            }
        }
        std::vector<double> sum(std::size_t(n), 0.0);
        std::vector<std::size_t> count(std::size_t(n), 0);
        for (std::size_t s = 0; s < samples.size(); ++s) {
            sum[std::size_t(assign[s])] += samples[s];
            ++count[std::size_t(assign[s])];
        }
        for (int c = 0; c < n; ++c) {
            if (count[std::size_t(c)] == 0) {
                // re-seed at the sample farthest from its current center
                std::size_t far = 0;
                double fard = -1.0;
                for (std::size_t s = 0; s < samples.size(); ++s) {
                    double d = std::abs(samples[s] - centers[std::size_t(assign[s])]);
                    if (d > fard) {
                        fard = d;
                        far = s;
                    }
                }
                centers[std::size_t(c)] = samples[far];
                changed = true;
            } else {
                centers[std::size_t(c)] = sum[std::size_t(c)] / double(count[std::size_t(c)]);
            }
        }
        if (!changed) break;
    }

    GaussianMixture m;
    m.mean.assign(std::size_t(n), 0.0);
    m.var.assign(std::size_t(n), 0.0);
    m.weight.assign(std::size_t(n), 0.0);
    std::vector<std::size_t> count(std::size_t(n), 0);
    for (std::size_t s = 0; s < samples.size(); ++s) {
        m.mean[std::size_t(assign[s])] += samples[s];
        ++count[std::size_t(assign[s])];
    }
    for (int c = 0; c < n; ++c) m.mean[std::size_t(c)] /= double(std::max<std::size_t>(1, count[std::size_t(c)]));
    for (std::size_t s = 0; s < samples.size(); ++s) {
        double d = samples[s] - m.mean[std::size_t(assign[s])];
        m.var[std::size_t(assign[s])] += d * d;
    }
    for (int c = 0; c < n; ++c) {
        m.var[std::size_t(c)] = std::max(m.var[std::size_t(c)] / double(std::max<std::size_t>(1, count[std::size_t(c)])), kVarFloor);
        m.weight[std::size_t(c)] = double(count[std::size_t(c)]) / double(samples.size());
    }

    std::vector<int> order(static_cast<std::size_t>(n));
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(),
              [&](int a, int b) { return m.mean[std::size_t(a)] < m.mean[std::size_t(b)]; });
    GaussianMixture out;
    for (int c : order) {
        out.mean.push_back(m.mean[std::size_t(c)]);
        out.var.push_back(m.var[std::size_t(c)]);
        out.weight.push_back(m.weight[std::size_t(c)]);
    }
    return out;
}

int classify_gaussian(const GaussianMixture& m, double u) {
    int best = 0;
    double bestv = m.weight[0] * gaussian_density(u, m.mean[0], m.var[0]);
    for (int i = 1; i < m.size(); ++i) {
        double v = m.weight[std::size_t(i)] *
                   gaussian_density(u, m.mean[std::size_t(i)], m.var[std::size_t(i)]);
        if (v > bestv) {
            bestv = v;
            best = i;
        }
    }
    return best;
}

int classify_gaussian(const NonGaussianMixture& m, double u) {
    return classify_gaussian(m.base, u);
}

namespace {

std::vector<float> maybe_subsample(std::span<const float> samples, std::size_t cap,
                                   std::uint64_t seed) {
    std::vector<float> v(samples.begin(), samples.end());
    if (v.size() <= cap) return v;
    Rng rng(Rng::derive(seed, 0x5ab5a3b1e));
    // partial Fisher-Yates: first `cap` entries become a uniform subsample
    for (std::size_t i = 0; i < cap; ++i) {
        std::size_t j = i + std::size_t(rng.uniform_int(v.size() - i));
        std::swap(v[i], v[j]);
    }
    v.resize(cap);
    return v;
}

// Unnormalized component weights*densities at u, components ordered
// [gaussians..., pairs lexicographic...].
void component_densities(const NonGaussianMixture& m, double u, std::vector<double>& dens) {
    int n = m.base.size();
    for (int i = 0; i < n; ++i)
        dens[std::size_t(i)] = m.base.weight[std::size_t(i)] *
                               gaussian_density(u, m.base.mean[std::size_t(i)], m.base.var[std::size_t(i)]);
    int p = 0;
    for (int i = 0; i < n - 1; ++i)
        for (int j = i + 1; j < n; ++j, ++p)
            dens[std::size_t(n + p)] =
                m.trans_weight[std::size_t(p)] *
                transition_density(u, m.base.mean[std::size_t(i)], m.base.mean[std::size_t(j)],
                                   std::sqrt(m.trans_var[std::size_t(p)]));
}

int nearest_gaussian(const NonGaussianMixture& m, double u) {
    int best = 0;
    double bestd = std::abs(u - m.base.mean[0]);
    for (int i = 1; i < m.base.size(); ++i) {
        double d = std::abs(u - m.base.mean[std::size_t(i)]);
        if (d < bestd) {
            bestd = d;
            best = i;
        }
    }
    return best;
}

// One E-step pass. Fills resp (n_samples x C, row-major) and returns the
// log-likelihood of the samples under m.
double estep_pass(const NonGaussianMixture& m, std::span<const float> samples,
                  const EmSettings& s, std::uint64_t pass_stream, std::vector<double>& resp) {
    int c_total = m.n_components();
    std::vector<double> dens(static_cast<std::size_t>(c_total));
    double ll = 0.0;
    for (std::size_t idx = 0; idx < samples.size(); ++idx) {
        component_densities(m, samples[idx], dens);
        double total = std::accumulate(dens.begin(), dens.end(), 0.0);
        double* row = &resp[idx * std::size_t(c_total)];
        std::fill(row, row + c_total, 0.0);
        if (!(total > 1e-300)) {
            row[nearest_gaussian(m, samples[idx])] = 1.0;
            ll += -690.0; // log(1e-300); degenerate tail sample
            continue;
        }
        ll += std::log(total);
        if (s.exact_estep) {
            for (int c = 0; c < c_total; ++c) row[c] = dens[std::size_t(c)] / total;
        } else {
            Rng rng(Rng::derive(s.seed, pass_stream * (samples.size() + 1) + idx));
            double inc = 1.0 / double(s.gibbs_sweeps);
            for (int sweep = 0; sweep < s.gibbs_sweeps; ++sweep)
                row[rng.categorical(dens, total)] += inc;
        }
    }
    return ll;
}

} // namespace

std::vector<std::vector<double>> estep_responsibilities(const NonGaussianMixture& m,
                                                        std::span<const float> samples,
                                                        const EmSettings& s) {
    s.validate();
    m.validate();
    int c_total = m.n_components();
    std::vector<double> flat(samples.size() * std::size_t(c_total));
    estep_pass(m, samples, s, 1, flat);
    std::vector<std::vector<double>> rows(samples.size());
    for (std::size_t i = 0; i < samples.size(); ++i)
        rows[i].assign(flat.begin() + long(i) * c_total, flat.begin() + long(i + 1) * c_total);
    return rows;
}

namespace {

// Sorts Gaussian components by mean and remaps the pair-indexed arrays.
void sort_components(NonGaussianMixture& m) {
    int n = m.base.size();
    std::vector<int> order(static_cast<std::size_t>(n));
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(), [&](int a, int b) {
        return m.base.mean[std::size_t(a)] < m.base.mean[std::size_t(b)];
    });
    if (std::is_sorted(order.begin(), order.end())) return;

    NonGaussianMixture out = m;
    for (int i = 0; i < n; ++i) {
        out.base.mean[std::size_t(i)] = m.base.mean[std::size_t(order[std::size_t(i)])];
        out.base.var[std::size_t(i)] = m.base.var[std::size_t(order[std::size_t(i)])];
        out.base.weight[std::size_t(i)] = m.base.weight[std::size_t(order[std::size_t(i)])];
    }
    for (int i = 0; i < n - 1; ++i)
        for (int j = i + 1; j < n; ++j) {
            int oi = order[std::size_t(i)], oj = order[std::size_t(j)];
            int from = NonGaussianMixture::pair_index(std::min(oi, oj), std::max(oi, oj), n);
            int to = NonGaussianMixture::pair_index(i, j, n);
            out.trans_var[std::size_t(to)] = m.trans_var[std::size_t(from)];
            out.trans_weight[std::size_t(to)] = m.trans_weight[std::size_t(from)];
        }
    m = out;
}

} // namespace

NgmmFitResult fit_ngmm(std::span<const float> samples_in, int n, const EmSettings& s) {
    s.validate();
    if (n < 2) throw config_error("fit_ngmm: at least two classes required");
    if (samples_in.size() < 100) throw config_error("fit_ngmm: at least 100 samples required");

    std::vector<float> samples = maybe_subsample(samples_in, s.max_samples, s.seed);
    const std::size_t n_samples = samples.size();
    const int pairs = n * (n - 1) / 2;
    const int c_total = n + pairs;

    NgmmFitResult result;
    NonGaussianMixture& m = result.mixture;
    m.base = kmeans_init(samples, n, s.seed);
    m.trans_weight.assign(std::size_t(pairs), 0.02);
    m.trans_var.assign(std::size_t(pairs), 0.0);
    double scale = 1.0 - 0.02 * pairs;
    for (double& w : m.base.weight) w *= scale;
    for (int i = 0; i < n - 1; ++i)
        for (int j = i + 1; j < n; ++j) {
            double sij = 0.5 * (std::sqrt(m.base.var[std::size_t(i)]) + std::sqrt(m.base.var[std::size_t(j)]));
            m.trans_var[std::size_t(NonGaussianMixture::pair_index(i, j, n))] =
                std::max(sij * sij, kVarFloor);
        }

    std::vector<double> resp(n_samples * std::size_t(c_total));
    std::vector<bool> warned(std::size_t(c_total), false);
    double prev_ll = -std::numeric_limits<double>::infinity();

    for (int iter = 0;; ++iter) {
        double ll = estep_pass(m, samples, s, std::uint64_t(iter) + 1, resp);
        result.loglik_trace.push_back(ll);
        if (iter > 0 && std::abs(ll - prev_ll) < s.tolerance * std::abs(prev_ll)) break;
        if (iter >= s.max_iterations) break;
        prev_ll = ll;

        // M-step: weights for everything; closed-form Gaussian updates;
        // moment matching for the transition variances.
        std::vector<double> wsum(std::size_t(c_total), 0.0), usum(std::size_t(c_total), 0.0);
        for (std::size_t idx = 0; idx < n_samples; ++idx) {
            const double* row = &resp[idx * std::size_t(c_total)];
            for (int c = 0; c < c_total; ++c) {
                wsum[std::size_t(c)] += row[c];
                usum[std::size_t(c)] += row[c] * samples[idx];
            }
        }
        auto degenerate = [&](int c) {
            if (wsum[std::size_t(c)] / double(n_samples) >= 1e-6) return false;
            if (!warned[std::size_t(c)]) {
                warned[std::size_t(c)] = true;
                result.warnings.push_back("component " + std::to_string(c) +
                                          " weight degenerate; parameters frozen");
            }
            return true;
        };

        std::vector<double> new_mean = m.base.mean;
        for (int c = 0; c < n; ++c)
            if (!degenerate(c)) new_mean[std::size_t(c)] = usum[std::size_t(c)] / wsum[std::size_t(c)];

        std::vector<double> vsum(std::size_t(c_total), 0.0);
        for (std::size_t idx = 0; idx < n_samples; ++idx) {
            const double* row = &resp[idx * std::size_t(c_total)];
            for (int c = 0; c < n; ++c) {
                double d = samples[idx] - new_mean[std::size_t(c)];
                vsum[std::size_t(c)] += row[c] * d * d;
            }
            for (int p = 0; p < pairs; ++p) {
                double mhat = wsum[std::size_t(n + p)] > 0 ? usum[std::size_t(n + p)] / wsum[std::size_t(n + p)] : 0.0;
                double d = samples[idx] - mhat;
                vsum[std::size_t(n + p)] += row[n + p] * d * d;
            }
        }

        for (int c = 0; c < n; ++c) {
            m.base.weight[std::size_t(c)] = wsum[std::size_t(c)] / double(n_samples);
            if (degenerate(c)) continue;
            m.base.mean[std::size_t(c)] = new_mean[std::size_t(c)];
            m.base.var[std::size_t(c)] = std::max(vsum[std::size_t(c)] / wsum[std::size_t(c)], kVarFloor);
        }
        int p = 0;
        for (int i = 0; i < n - 1; ++i)
            for (int j = i + 1; j < n; ++j, ++p) {
                int c = n + p;
                m.trans_weight[std::size_t(p)] = wsum[std::size_t(c)] / double(n_samples);
                if (degenerate(c)) continue;
                double var_hat = vsum[std::size_t(c)] / wsum[std::size_t(c)];
                double delta = m.base.mean[std::size_t(j)] - m.base.mean[std::size_t(i)];
                // Var[u_ij] = delta^2/12 + sigma_ij^2
                m.trans_var[std::size_t(p)] = std::max(var_hat - delta * delta / 12.0, kVarFloor);
            }
        sort_components(m);
        result.iterations = iter + 1;
    }
    return result;
}

GmmFitResult fit_gmm(std::span<const float> samples_in, int n, const EmSettings& s) {
    s.validate();
    if (n < 1) throw config_error("fit_gmm: at least one class required");
    std::vector<float> samples = maybe_subsample(samples_in, s.max_samples, s.seed);
    if (samples.size() < std::size_t(4 * n))
        throw numeric_error("fit_gmm: not enough samples for the requested class count");

    GmmFitResult result;
    GaussianMixture& m = result.mixture;
    m = kmeans_init(samples, n, s.seed);

    const std::size_t n_samples = samples.size();
    std::vector<double> dens(static_cast<std::size_t>(n));
    std::vector<double> wsum, usum, vsum;
    double prev_ll = -std::numeric_limits<double>::infinity();

    for (int iter = 0;; ++iter) {
        wsum.assign(std::size_t(n), 0.0);
        usum.assign(std::size_t(n), 0.0);
        double ll = 0.0;
        std::vector<double> resp(n_samples * std::size_t(n));
        for (std::size_t idx = 0; idx < n_samples; ++idx) {
            double total = 0.0;
            for (int c = 0; c < n; ++c) {
                dens[std::size_t(c)] = m.weight[std::size_t(c)] *
                                       gaussian_density(samples[idx], m.mean[std::size_t(c)], m.var[std::size_t(c)]);
                total += dens[std::size_t(c)];
            }
            double* row = &resp[idx * std::size_t(n)];
            if (!(total > 1e-300)) {
                int c = 0;
                double bd = std::abs(samples[idx] - m.mean[0]);
                for (int k = 1; k < n; ++k)
                    if (std::abs(samples[idx] - m.mean[std::size_t(k)]) < bd) {
                        bd = std::abs(samples[idx] - m.mean[std::size_t(k)]);
                        c = k;
                    }
                row[c] = 1.0;
                ll += -690.0;
            } else {
                ll += std::log(total);
                for (int c = 0; c < n; ++c) row[c] = dens[std::size_t(c)] / total;
            }
            for (int c = 0; c < n; ++c) {
                wsum[std::size_t(c)] += row[c];
                usum[std::size_t(c)] += row[c] * samples[idx];
            }
        }
        result.final_loglik = ll;
        if (iter > 0 && std::abs(ll - prev_ll) < s.tolerance * std::abs(prev_ll)) break;
        if (iter >= s.max_iterations) break;
        prev_ll = ll;

        for (int c = 0; c < n; ++c)
            if (wsum[std::size_t(c)] / double(n_samples) < 1e-4)
                throw numeric_error("fit_gmm: a component collapsed (weight < 1e-4); "
                                    "consider a smaller class count");

        std::vector<double> new_mean(static_cast<std::size_t>(n));
        for (int c = 0; c < n; ++c) new_mean[std::size_t(c)] = usum[std::size_t(c)] / wsum[std::size_t(c)];
        vsum.assign(std::size_t(n), 0.0);
        for (std::size_t idx = 0; idx < n_samples; ++idx) {
            const double* row = &resp[idx * std::size_t(n)];
            for (int c = 0; c < n; ++c) {
                double d = samples[idx] - new_mean[std::size_t(c)];
                vsum[std::size_t(c)] += row[c] * d * d;
            }
        }
        for (int c = 0; c < n; ++c) {
            m.weight[std::size_t(c)] = wsum[std::size_t(c)] / double(n_samples);
            m.mean[std::size_t(c)] = new_mean[std::size_t(c)];
            m.var[std::size_t(c)] = std::max(vsum[std::size_t(c)] / wsum[std::size_t(c)], kVarFloor);
        }
        // keep ascending-mean ordering
        std::vector<int> order(static_cast<std::size_t>(n));
        std::iota(order.begin(), order.end(), 0);
        std::sort(order.begin(), order.end(), [&](int a, int b) {
            return m.mean[std::size_t(a)] < m.mean[std::size_t(b)];
        });
        GaussianMixture sorted;
        for (int c : order) {
            sorted.mean.push_back(m.mean[std::size_t(c)]);
            sorted.var.push_back(m.var[std::size_t(c)]);
            sorted.weight.push_back(m.weight[std::size_t(c)]);
        }
        m = sorted;
        result.iterations = iter + 1;
    }
    return result;
}

std::string mixture_to_json(const NgmmFitResult& fit) {
    nlohmann::json j;
    j["components"] = fit.mixture.base.size();
    j["means"] = fit.mixture.base.mean;
    j["variances"] = fit.mixture.base.var;
    j["weights"] = fit.mixture.base.weight;
    nlohmann::json trans = nlohmann::json::array();
    int n = fit.mixture.base.size();
    for (int i = 0; i < n - 1; ++i)
        for (int j2 = i + 1; j2 < n; ++j2) {
            int p = NonGaussianMixture::pair_index(i, j2, n);
            trans.push_back({{"i", i},
                             {"j", j2},
                             {"variance", fit.mixture.trans_var[std::size_t(p)]},
                             {"weight", fit.mixture.trans_weight[std::size_t(p)]}});
        }
    j["transitions"] = trans;
    j["iterations"] = fit.iterations;
    j["final_loglik"] = fit.loglik_trace.empty() ? 0.0 : fit.loglik_trace.back();
    j["warnings"] = fit.warnings;
    return j.dump(2);
}

NonGaussianMixture mixture_from_json(const std::string& text) {
    nlohmann::json j = nlohmann::json::parse(text);
    NonGaussianMixture m;
    m.base.mean = j.at("means").get<std::vector<double>>();
    m.base.var = j.at("variances").get<std::vector<double>>();
    m.base.weight = j.at("weights").get<std::vector<double>>();
    int n = m.base.size();
    m.trans_var.assign(std::size_t(n * (n - 1) / 2), kVarFloor);
    m.trans_weight.assign(std::size_t(n * (n - 1) / 2), 0.0);
    for (const auto& t : j.at("transitions")) {
        int p = NonGaussianMixture::pair_index(t.at("i").get<int>(), t.at("j").get<int>(), n);
        m.trans_var[std::size_t(p)] = t.at("variance").get<double>();
        m.trans_weight[std::size_t(p)] = t.at("weight").get<double>();
    }
    m.validate();
    return m;
}

} // namespace msseg
