#include "msseg/evalbench.hpp"

#include <chrono>

#include "json.hpp"

#include "msseg/errors.hpp"
#include "msseg/rng.hpp"

namespace msseg {

double misclassification_error(const LabelMap& truth, const LabelMap& pred) {
    if (!truth.same_shape(pred))
        throw config_error("misclassification_error: label maps differ in shape");
    std::size_t mismatches = 0;
    for (std::size_t i = 0; i < truth.size(); ++i)
        if (truth.labels[i] != pred.labels[i]) ++mismatches;
    return double(mismatches) / double(truth.size());
}

std::vector<double> area_fractions(const LabelMap& m, int n_classes) {
    std::vector<double> frac(std::size_t(n_classes), 0.0);
    for (std::uint8_t l : m.labels)
        if (l < frac.size()) frac[l] += 1.0;
    for (double& f : frac) f /= double(m.size());
    return frac;
}

SweepReport sweep(const PhantomSpec& base, std::span<const double> blurs,
                  std::span<const double> noises, std::span<const TransitionMethod> methods,
                  int repetitions, std::uint64_t seed, const PipelineConfig& pcfg) {
    if (blurs.empty() || noises.empty() || methods.empty() || repetitions < 1)
        throw config_error("sweep: blur/noise/method lists must be non-empty");

    SweepReport report;
    std::uint64_t cell_counter = 0;
    for (double blur : blurs) {
        for (double noise : noises) {
            for (TransitionMethod method : methods) {
                for (int rep = 0; rep < repetitions; ++rep, ++cell_counter) {
                    SweepCell cell;
                    cell.blur = blur;
                    cell.noise = noise;
                    cell.method = method;
                    cell.rep = rep;
                    cell.seed = Rng::derive(seed, cell_counter);

                    PhantomSpec spec = base;
                    spec.blur_sigma = blur;
                    spec.noise_sigma = noise;
                    spec.seed = cell.seed;

                    auto t0 = std::chrono::steady_clock::now();
                    try {
                        auto [img, truth] = generate_phantom(spec);
                        PipelineConfig cfg = pcfg;
                        cfg.method = method;
                        cfg.seed = cell.seed;
                        RunResult res = run(img, cfg);
                        cell.me = misclassification_error(truth, res.labels);
                        std::vector<double> ft = area_fractions(truth, cfg.classes);
                        std::vector<double> fp = area_fractions(res.labels, cfg.classes);
                        cell.frac_diff.resize(ft.size());
                        for (std::size_t c = 0; c < ft.size(); ++c)
                            cell.frac_diff[c] = fp[c] - ft[c];
                    } catch (const std::exception& e) {
                        cell.failed = true;
                        cell.error = e.what();
                    }
                    cell.seconds =
                        std::chrono::duration<double>(std::chrono::steady_clock::now() - t0)
                            .count();
                    report.rows.push_back(std::move(cell));
                }
            }
        }
    }
    return report;
}

void SweepReport::write_csv(std::ostream& out) const {
    out << "blur,noise,method,rep,seed,me";
    std::size_t n_classes = 0;
    for (const SweepCell& c : rows) n_classes = std::max(n_classes, c.frac_diff.size());
    for (std::size_t c = 0; c < n_classes; ++c) out << ",frac_diff_" << c;
    out << ",seconds,failed\n";
    for (const SweepCell& cell : rows) {
        out << cell.blur << "," << cell.noise << "," << to_string(cell.method) << ","
            << cell.rep << "," << cell.seed << "," << cell.me;
        for (std::size_t c = 0; c < n_classes; ++c)
            out << "," << (c < cell.frac_diff.size() ? cell.frac_diff[c] : 0.0);
        out << "," << cell.seconds << "," << (cell.failed ? 1 : 0) << "\n";
    }
}

std::string SweepReport::to_json() const {
    nlohmann::json j = nlohmann::json::array();
    for (const SweepCell& cell : rows) {
        nlohmann::json r;
        r["blur"] = cell.blur;
        r["noise"] = cell.noise;
        r["method"] = to_string(cell.method);
        r["rep"] = cell.rep;
        r["seed"] = cell.seed;
        r["me"] = cell.me;
        r["frac_diff"] = cell.frac_diff;
        r["seconds"] = cell.seconds;
        if (cell.failed) r["error"] = cell.error;
        j.push_back(r);
    }
    return nlohmann::json{{"cells", j}}.dump(2);
}

} // namespace msseg
