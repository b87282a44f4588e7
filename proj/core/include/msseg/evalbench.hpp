#pragma once

#include <cstdint>
#include <ostream>
#include <span>
#include <string>
#include <vector>

#include "msseg/image.hpp"
#include "msseg/phantom.hpp"
#include "msseg/pipeline.hpp"

namespace msseg {

/// Fraction of pixels whose labels differ (mismatch convention: identical
/// maps give 0, fully disjoint labelings give 1).
double misclassification_error(const LabelMap& truth, const LabelMap& pred);

/// Per-class pixel share; always sums to 1 over the returned classes.
std::vector<double> area_fractions(const LabelMap& m, int n_classes = 3);

struct SweepCell {
    double blur = 0.0;
    double noise = 0.0;
    TransitionMethod method = TransitionMethod::gradient;
    int rep = 0;
    std::uint64_t seed = 0;
    double me = 0.0;
    std::vector<double> frac_diff; // per class, segmented minus truth
    double seconds = 0.0;
    bool failed = false;
    std::string error;
};

struct SweepReport {
    std::vector<SweepCell> rows;

    void write_csv(std::ostream& out) const;
    std::string to_json() const;
};

/// Full cross product blur x noise x method x repetition. Each cell generates
/// the phantom with a seed derived from (base seed, cell coordinates), runs
/// the pipeline, and records ME and per-class area-fraction differences.
/// Pipeline failures are recorded per cell and the sweep continues.
SweepReport sweep(const PhantomSpec& base, std::span<const double> blurs,
                  std::span<const double> noises, std::span<const TransitionMethod> methods,
                  int repetitions, std::uint64_t seed, const PipelineConfig& pcfg);

} // namespace msseg
