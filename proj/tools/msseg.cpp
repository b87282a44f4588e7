// msseg: synthetic phantoms, multiphase segmentation, and the blur/noise
// sweep harness on top of the msseg core library.

#include <algorithm>
#include <atomic>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <mutex>
#include <set>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"

#include "msseg/config.hpp"
#include "msseg/deconv.hpp"
#include "msseg/errors.hpp"
#include "msseg/evalbench.hpp"
#include "msseg/pgm_io.hpp"
#include "msseg/phantom.hpp"
#include "msseg/pipeline.hpp"
#include "msseg/rng.hpp"
#include "msseg/transition.hpp"

namespace fs = std::filesystem;
using namespace msseg;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitConfig = 2;
constexpr int kExitIo = 3;
constexpr int kExitNumeric = 4;

const std::set<std::string> kPhantomKeys = {
    "width", "height", "grain_radius_frac", "grain_gap_frac", "bridge_waist_frac",
    "bridge_flare_frac", "mean_gas", "mean_grain", "mean_fluid", "blur_sigma",
    "noise_sigma", "seed"};

const std::set<std::string> kPipelineKeys = {
    "method", "smoother", "labeling", "classes", "tau_difference", "tau_gradient",
    "gradient_radius", "nlm_h", "nlm_patch_radius", "nlm_search_radius", "nlm_sigma_patch",
    "adf_iterations", "adf_dt", "adf_kappa", "adf_sigma", "em_sweeps", "em_max_iterations",
    "em_tolerance", "em_exact", "em_max_samples", "sigma_cal", "filter_sigma",
    "filter_radius", "energy_threshold_frac", "seed"};

std::set<std::string> all_keys() {
    std::set<std::string> keys = kPhantomKeys;
    keys.insert(kPipelineKeys.begin(), kPipelineKeys.end());
    return keys;
}

KeyValueConfig load_config(const std::string& path) {
    if (path.empty()) return KeyValueConfig{};
    KeyValueConfig cfg = KeyValueConfig::from_file(path);
    cfg.validate_keys(all_keys());
    return cfg;
}

PipelineConfig pipeline_from_config(const KeyValueConfig& cfg) {
    PipelineConfig p;
    p.smoother = smoother_from_string(cfg.get_string("smoother", "nlm"));
    p.method = transition_method_from_string(cfg.get_string("method", "classification"));
    std::string lab = cfg.get_string("labeling", "spatial");
    if (lab == "spatial")
        p.labeling = TransitionLabeling::spatial;
    else if (lab == "intensity")
        p.labeling = TransitionLabeling::intensity;
    else
        throw config_error("unknown labeling mode: " + lab);
    p.classes = cfg.get_int("classes", p.classes);
    p.tau_difference = cfg.get_double("tau_difference", p.tau_difference);
    p.tau_gradient = cfg.get_double("tau_gradient", p.tau_gradient);
    p.gradient_radius = cfg.get_int("gradient_radius", p.gradient_radius);
    double nh = cfg.get_double("nlm_h", 0.0);
    if (nh > 0) {
        p.nlm.h = nh;
        p.nlm_auto_h = false;
    }
    p.nlm.patch_radius = cfg.get_int("nlm_patch_radius", p.nlm.patch_radius);
    p.nlm.search_radius = cfg.get_int("nlm_search_radius", p.nlm.search_radius);
    p.nlm.sigma_patch = cfg.get_double("nlm_sigma_patch", p.nlm.sigma_patch);
    p.adf.iterations = cfg.get_int("adf_iterations", p.adf.iterations);
    p.adf.dt = cfg.get_double("adf_dt", p.adf.dt);
    p.adf.kappa = cfg.get_double("adf_kappa", p.adf.kappa);
    p.adf.sigma = cfg.get_double("adf_sigma", p.adf.sigma);
    p.em.gibbs_sweeps = cfg.get_int("em_sweeps", p.em.gibbs_sweeps);
    p.em.max_iterations = cfg.get_int("em_max_iterations", p.em.max_iterations);
    p.em.tolerance = cfg.get_double("em_tolerance", p.em.tolerance);
    p.em.exact_estep = cfg.get_int("em_exact", p.em.exact_estep ? 1 : 0) != 0;
    p.em.max_samples = std::size_t(cfg.get_u64("em_max_samples", p.em.max_samples));
    p.sigma_cal = cfg.get_double("sigma_cal", p.sigma_cal);
    p.filter_sigma = cfg.get_double("filter_sigma", p.filter_sigma);
    p.filter_radius = cfg.get_int("filter_radius", p.filter_radius);
    p.energy_threshold_frac = cfg.get_double("energy_threshold_frac", p.energy_threshold_frac);
    p.seed = cfg.get_u64("seed", p.seed);
    return p;
}

void write_manifest(const fs::path& outdir, const std::string& command,
                    const std::vector<std::string>& outputs) {
    nlohmann::json j;
    j["command"] = command;
    j["outputs"] = outputs;
    std::ofstream out(outdir / "manifest.json");
    if (!out) throw io_error("cannot write manifest in " + outdir.string());
    out << j.dump(2) << "\n";
}

void ensure_outdir(const fs::path& outdir) {
    std::error_code ec;
    fs::create_directories(outdir, ec);
    if (ec) throw io_error("cannot create output directory: " + outdir.string());
}

GrayImage read_input_raster(const std::string& path) {
    int maxval = 0;
    GrayImage img = read_pgm(path, &maxval);
    return normalize_to_nominal_range(img, maxval);
}

// ---------------------------------------------------------------- synth ----

struct SynthArgs {
    std::string config_path, outdir;
    PhantomSpec spec;
};

int run_synth(const SynthArgs& a) {
    PhantomSpec spec = a.spec; // config + flag overrides already merged
    spec.validate();

    auto [img, truth] = generate_phantom(spec);

    fs::path outdir(a.outdir);
    ensure_outdir(outdir);
    write_pgm16(img, (outdir / "phantom.pgm").string());
    write_label_pgm(truth, (outdir / "truth.pgm").string());
    std::ofstream cfg_out(outdir / "phantom.cfg");
    cfg_out << spec.to_config().to_string();
    write_manifest(outdir, "synth", {"phantom.pgm", "truth.pgm", "phantom.cfg"});
    std::cout << "phantom " << spec.width << "x" << spec.height << " written to " << a.outdir
              << "\n";
    return kExitOk;
}

// -------------------------------------------------------------- segment ----

struct SegmentArgs {
    std::string input, outdir, config_path, calibration_path;
    bool dump_deconv = false;
    PipelineConfig cfg;
};

void write_segment_outputs(const fs::path& outdir, const std::string& stem,
                           const RunResult& res, std::vector<std::string>& outputs,
                           std::mutex& mtx) {
    std::string labels_name = stem + "labels.pgm";
    std::string overlay_name = stem + "overlay.ppm";
    std::string report_name = stem + "report.json";
    write_label_pgm(res.labels, (outdir / labels_name).string());
    write_label_overlay_ppm(res.labels, (outdir / overlay_name).string());
    std::ofstream rep(outdir / report_name);
    rep << res.report.to_json() << "\n";
    std::lock_guard<std::mutex> lock(mtx);
    outputs.push_back(labels_name);
    outputs.push_back(overlay_name);
    outputs.push_back(report_name);
}

void dump_deconv_rasters(const fs::path& outdir, const std::string& stem, const GrayImage& img,
                         const PipelineConfig& cfg, std::vector<std::string>& outputs,
                         std::mutex& mtx) {
    GrayImage smoothed = img;
    if (cfg.smoother == Smoother::nlm) {
        NlmParams p = cfg.nlm;
        if (cfg.nlm_auto_h) p.h = std::max(0.8 * estimate_noise_sigma(img), 1e-3);
        smoothed = nlm(img, p);
    } else if (cfg.smoother == Smoother::adf) {
        smoothed = adf(img, cfg.adf);
    }
    QuadraturePair q = QuadraturePair::make(cfg.filter_sigma, cfg.filter_radius);
    DeconvCalibration cal;
    if (cfg.fixed_calibration)
        cal = *cfg.fixed_calibration;
    else
        cal = calibrate(cfg.sigma_cal, q, estimate_noise_sigma(smoothed),
                        Rng::derive(cfg.seed, 0xca1));
    DeconvField field = deconvolve(smoothed, q, cal, cfg.energy_threshold_frac);
    GrayImage absdiff(field.width, field.height);
    for (std::size_t i = 0; i < absdiff.size(); ++i)
        absdiff.data[i] = std::abs(field.a.data[i] - field.b.data[i]);
    write_pfm(field.a, (outdir / (stem + "deconv_a.pfm")).string());
    write_pfm(field.b, (outdir / (stem + "deconv_b.pfm")).string());
    write_pfm(absdiff, (outdir / (stem + "deconv_absdiff.pfm")).string());
    std::lock_guard<std::mutex> lock(mtx);
    outputs.push_back(stem + "deconv_a.pfm");
    outputs.push_back(stem + "deconv_b.pfm");
    outputs.push_back(stem + "deconv_absdiff.pfm");
}

int run_segment(const SegmentArgs& a) {
    PipelineConfig cfg = a.cfg;
    if (!a.calibration_path.empty()) {
        std::ifstream in(a.calibration_path);
        if (!in) throw io_error("cannot open calibration file: " + a.calibration_path);
        std::stringstream ss;
        ss << in.rdbuf();
        cfg.fixed_calibration =
            std::make_shared<DeconvCalibration>(DeconvCalibration::from_json(ss.str()));
    }
    cfg.validate();

    fs::path input(a.input);
    fs::path outdir(a.outdir);
    std::vector<std::string> outputs;
    std::mutex mtx;

    if (fs::is_directory(input)) {
        std::vector<fs::path> slices;
        for (const auto& e : fs::directory_iterator(input))
            if (e.is_regular_file() && e.path().extension() == ".pgm")
                slices.push_back(e.path());
        std::sort(slices.begin(), slices.end());
        if (slices.empty()) throw io_error("no .pgm slices in directory: " + a.input);

        // read everything up front so a corrupt slice fails before any output
        std::vector<GrayImage> images;
        images.reserve(slices.size());
        for (const auto& s : slices) images.push_back(read_input_raster(s.string()));

        ensure_outdir(outdir);
        unsigned workers = std::max(1u, std::min<unsigned>(std::thread::hardware_concurrency(),
                                                           unsigned(slices.size())));
        std::atomic<std::size_t> next{0};
        std::vector<std::thread> pool;
        std::vector<std::string> errors;
        for (unsigned t = 0; t < workers; ++t) {
            pool.emplace_back([&]() {
                for (;;) {
                    std::size_t i = next.fetch_add(1);
                    if (i >= slices.size()) return;
                    try {
                        PipelineConfig slice_cfg = cfg;
                        slice_cfg.seed = Rng::derive(cfg.seed, i);
                        RunResult res = run(images[i], slice_cfg);
                        std::string stem = slices[i].stem().string() + "_";
                        write_segment_outputs(outdir, stem, res, outputs, mtx);
                        if (a.dump_deconv && cfg.method != TransitionMethod::gradient)
                            dump_deconv_rasters(outdir, stem, images[i], slice_cfg, outputs, mtx);
                    } catch (const std::exception& e) {
                        std::lock_guard<std::mutex> lock(mtx);
                        errors.push_back(slices[i].filename().string() + ": " + e.what());
                    }
                }
            });
        }
        for (auto& th : pool) th.join();
        if (!errors.empty()) {
            for (const auto& e : errors) std::cerr << "error: " << e << "\n";
            throw numeric_error("segmentation failed for " + std::to_string(errors.size()) +
                                " slice(s)");
        }
        std::sort(outputs.begin(), outputs.end());
        write_manifest(outdir, "segment", outputs);
    } else {
        GrayImage img = read_input_raster(a.input);
        RunResult res = run(img, cfg);
        ensure_outdir(outdir);
        write_segment_outputs(outdir, "", res, outputs, mtx);
        if (a.dump_deconv && cfg.method != TransitionMethod::gradient)
            dump_deconv_rasters(outdir, "", img, cfg, outputs, mtx);
        write_manifest(outdir, "segment", outputs);
        std::cout << "labels written to " << (outdir / "labels.pgm").string() << "\n";
    }
    return kExitOk;
}

// ---------------------------------------------------------------- sweep ----

struct SweepArgs {
    std::string config_path, outdir;
    std::vector<double> blurs{1.0, 2.0, 3.0};
    std::vector<double> noises{10.0, 14.0, 18.0};
    std::vector<std::string> methods{"classification", "difference", "gradient"};
    int reps = 5;
    std::uint64_t seed = 1;
};

int run_sweep(const SweepArgs& a, const KeyValueConfig& cfg) {
    PhantomSpec base = PhantomSpec::from_config(cfg);
    PipelineConfig pcfg = pipeline_from_config(cfg);
    std::vector<TransitionMethod> methods;
    for (const auto& m : a.methods) methods.push_back(transition_method_from_string(m));

    SweepReport report = sweep(base, a.blurs, a.noises, methods, a.reps, a.seed, pcfg);

    fs::path outdir(a.outdir);
    ensure_outdir(outdir);
    std::ofstream csv(outdir / "sweep.csv");
    if (!csv) throw io_error("cannot write sweep.csv");
    report.write_csv(csv);
    std::ofstream js(outdir / "sweep.json");
    js << report.to_json() << "\n";
    write_manifest(outdir, "sweep", {"sweep.csv", "sweep.json"});

    std::size_t failed = 0;
    for (const auto& r : report.rows) failed += r.failed ? 1 : 0;
    std::cout << report.rows.size() << " cells, " << failed << " failed\n";
    return failed == 0 ? kExitOk : kExitNumeric;
}

// ----------------------------------------------------------------- hist ----

struct HistArgs {
    std::string input, outdir, source = "absdiff";
    PipelineConfig cfg;
};

int run_hist(const HistArgs& a) {
    GrayImage img = read_input_raster(a.input);
    const PipelineConfig& cfg = a.cfg;

    GrayImage smoothed = img;
    if (cfg.smoother == Smoother::nlm) {
        NlmParams p = cfg.nlm;
        if (cfg.nlm_auto_h) p.h = std::max(0.8 * estimate_noise_sigma(img), 1e-3);
        smoothed = nlm(img, p);
    } else if (cfg.smoother == Smoother::adf) {
        smoothed = adf(img, cfg.adf);
    }

    std::vector<float> values;
    if (a.source == "absdiff") {
        QuadraturePair q = QuadraturePair::make(cfg.filter_sigma, cfg.filter_radius);
        DeconvCalibration cal = calibrate(cfg.sigma_cal, q, estimate_noise_sigma(smoothed),
                                          Rng::derive(cfg.seed, 0xca1));
        DeconvField field = deconvolve(smoothed, q, cal, cfg.energy_threshold_frac);
        values.resize(field.a.size());
        for (std::size_t i = 0; i < values.size(); ++i)
            values[i] = std::abs(field.a.data[i] - field.b.data[i]);
    } else if (a.source == "gradient") {
        GrayImage grad = morph_gradient(smoothed, cfg.gradient_radius);
        values = grad.data;
    } else {
        throw config_error("hist: source must be 'absdiff' or 'gradient'");
    }

    Histogram h = threshold_histogram(values);
    fs::path outdir(a.outdir);
    ensure_outdir(outdir);
    std::ofstream csv(outdir / "hist.csv");
    if (!csv) throw io_error("cannot write hist.csv");
    write_histogram_csv(h, csv);
    write_manifest(outdir, "hist", {"hist.csv"});
    if (h.suggested_tau)
        std::cout << "suggested tau: " << *h.suggested_tau << "\n";
    else
        std::cout << "no clear bimodal structure; inspect hist.csv\n";
    return kExitOk;
}

// ------------------------------------------------------------ calibrate ----

struct CalibrateArgs {
    std::string outdir;
    double sigma_cal = 2.0;
    double noise = 0.0;
    double filter_sigma = 1.6;
    int filter_radius = 4;
    std::uint64_t seed = 0x5ca1ab1e;
};

int run_calibrate(const CalibrateArgs& a) {
    QuadraturePair q = QuadraturePair::make(a.filter_sigma, a.filter_radius);
    DeconvCalibration cal = calibrate(a.sigma_cal, q, a.noise, a.seed);
    fs::path outdir(a.outdir);
    ensure_outdir(outdir);
    std::ofstream out(outdir / "calibration.json");
    if (!out) throw io_error("cannot write calibration.json");
    out << cal.to_json() << "\n";
    write_manifest(outdir, "calibrate", {"calibration.json"});
    std::cout << "calibration written (sigma_cal=" << a.sigma_cal << ", noise=" << a.noise
              << ")\n";
    return kExitOk;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"multiphase image segmentation workflow"};
    app.require_subcommand(1);

    // ---- synth
    SynthArgs synth_args;
    auto* synth = app.add_subcommand("synth", "generate a phantom image + ground-truth labels");
    synth->add_option("--config", synth_args.config_path, "phantom key=value config file");
    synth->add_option("-o,--out", synth_args.outdir, "output directory")->required();
    auto* so_w = synth->add_option("--width", synth_args.spec.width);
    auto* so_h = synth->add_option("--height", synth_args.spec.height);
    auto* so_b = synth->add_option("--blur", synth_args.spec.blur_sigma);
    auto* so_n = synth->add_option("--noise", synth_args.spec.noise_sigma);
    auto* so_s = synth->add_option("--seed", synth_args.spec.seed);
    auto* so_mg = synth->add_option("--mean-gas", synth_args.spec.mean_gas);
    auto* so_mr = synth->add_option("--mean-grain", synth_args.spec.mean_grain);
    auto* so_mf = synth->add_option("--mean-fluid", synth_args.spec.mean_fluid);
    auto* so_rf = synth->add_option("--grain-radius-frac", synth_args.spec.grain_radius_frac);
    auto* so_gf = synth->add_option("--grain-gap-frac", synth_args.spec.grain_gap_frac);
    auto* so_wf = synth->add_option("--bridge-waist-frac", synth_args.spec.bridge_waist_frac);
    auto* so_ff = synth->add_option("--bridge-flare-frac", synth_args.spec.bridge_flare_frac);

    // ---- segment
    SegmentArgs seg_args;
    std::string seg_method, seg_smoother, seg_labeling;
    auto* seg = app.add_subcommand("segment", "segment a raster (or a directory of slices)");
    seg->add_option("-i,--input", seg_args.input, "input PGM or directory")->required();
    seg->add_option("-o,--out", seg_args.outdir, "output directory")->required();
    seg->add_option("--config", seg_args.config_path, "pipeline key=value config file");
    seg->add_option("--calibration", seg_args.calibration_path,
                    "reuse a calibration.json instead of self-calibrating");
    seg->add_flag("--dump-deconv", seg_args.dump_deconv, "also write a/b/|a-b| float rasters");
    auto* sg_m = seg->add_option("--method", seg_method, "classification|difference|gradient");
    auto* sg_s = seg->add_option("--smoother", seg_smoother, "nlm|adf|none");
    auto* sg_l = seg->add_option("--labeling", seg_labeling, "spatial|intensity");
    double sg_tau_d = 0, sg_tau_g = 0, sg_nlm_h = 0, sg_sigma_cal = 0, sg_filter_sigma = 0;
    int sg_classes = 0, sg_grad_r = 0, sg_sweeps = 0, sg_em_iters = 0;
    std::uint64_t sg_seed = 0;
    auto* o_tau_d = seg->add_option("--tau-difference", sg_tau_d);
    auto* o_tau_g = seg->add_option("--tau,--tau-gradient", sg_tau_g);
    auto* o_nlm_h = seg->add_option("--nlm-h", sg_nlm_h);
    auto* o_scal = seg->add_option("--sigma-cal", sg_sigma_cal);
    auto* o_fsig = seg->add_option("--filter-sigma", sg_filter_sigma);
    auto* o_cls = seg->add_option("--classes", sg_classes);
    auto* o_grad_r = seg->add_option("--gradient-radius", sg_grad_r);
    auto* o_sweeps = seg->add_option("--em-sweeps", sg_sweeps);
    auto* o_em_it = seg->add_option("--em-max-iterations", sg_em_iters);
    auto* o_seed = seg->add_option("--seed", sg_seed);

    // ---- sweep
    SweepArgs sweep_args;
    auto* sw = app.add_subcommand("sweep", "blur x noise x method benchmark grid on phantoms");
    sw->add_option("--config", sweep_args.config_path, "phantom/pipeline config file");
    sw->add_option("-o,--out", sweep_args.outdir, "output directory")->required();
    sw->add_option("--blur", sweep_args.blurs, "blur sigmas")->delimiter(',');
    sw->add_option("--noise", sweep_args.noises, "noise sigmas")->delimiter(',');
    sw->add_option("--methods", sweep_args.methods, "transition methods")->delimiter(',');
    sw->add_option("--reps", sweep_args.reps, "repetitions per cell");
    sw->add_option("--seed", sweep_args.seed, "base seed");

    // ---- hist
    HistArgs hist_args;
    std::string hist_config, hist_smoother;
    std::uint64_t hist_seed = 0;
    auto* hs = app.add_subcommand("hist", "threshold-selection histogram (|a-b| or gradient)");
    hs->add_option("-i,--input", hist_args.input, "input PGM")->required();
    hs->add_option("-o,--out", hist_args.outdir, "output directory")->required();
    hs->add_option("--source", hist_args.source, "absdiff|gradient");
    hs->add_option("--config", hist_config, "pipeline config file");
    auto* hs_sm = hs->add_option("--smoother", hist_smoother, "nlm|adf|none");
    auto* hs_seed = hs->add_option("--seed", hist_seed);

    // ---- calibrate
    CalibrateArgs cal_args;
    auto* ca = app.add_subcommand("calibrate", "build a reusable deconvolution calibration");
    ca->add_option("-o,--out", cal_args.outdir, "output directory")->required();
    ca->add_option("--sigma-cal", cal_args.sigma_cal, "step blur sigma");
    ca->add_option("--noise", cal_args.noise, "noise sigma for the covariance estimate");
    ca->add_option("--filter-sigma", cal_args.filter_sigma);
    ca->add_option("--filter-radius", cal_args.filter_radius);
    ca->add_option("--seed", cal_args.seed);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        int rc = app.exit(e);
        return rc == 0 ? kExitOk : kExitConfig;
    }

    try {
        if (synth->parsed()) {
            KeyValueConfig cfg = load_config(synth_args.config_path);
            PhantomSpec spec =
                cfg.values().empty() ? PhantomSpec{} : PhantomSpec::from_config(cfg);
            if (so_w->count()) spec.width = synth_args.spec.width;
            if (so_h->count()) spec.height = synth_args.spec.height;
            if (so_b->count()) spec.blur_sigma = synth_args.spec.blur_sigma;
            if (so_n->count()) spec.noise_sigma = synth_args.spec.noise_sigma;
            if (so_s->count()) spec.seed = synth_args.spec.seed;
            if (so_mg->count()) spec.mean_gas = synth_args.spec.mean_gas;
            if (so_mr->count()) spec.mean_grain = synth_args.spec.mean_grain;
            if (so_mf->count()) spec.mean_fluid = synth_args.spec.mean_fluid;
            if (so_rf->count()) spec.grain_radius_frac = synth_args.spec.grain_radius_frac;
            if (so_gf->count()) spec.grain_gap_frac = synth_args.spec.grain_gap_frac;
            if (so_wf->count()) spec.bridge_waist_frac = synth_args.spec.bridge_waist_frac;
            if (so_ff->count()) spec.bridge_flare_frac = synth_args.spec.bridge_flare_frac;
            SynthArgs merged = synth_args;
            merged.spec = spec;
            return run_synth(merged);
        }
        if (seg->parsed()) {
            KeyValueConfig cfg = load_config(seg_args.config_path);
            seg_args.cfg = pipeline_from_config(cfg);
            if (sg_m->count()) seg_args.cfg.method = transition_method_from_string(seg_method);
            if (sg_s->count()) seg_args.cfg.smoother = smoother_from_string(seg_smoother);
            if (sg_l->count()) {
                if (seg_labeling == "spatial")
                    seg_args.cfg.labeling = TransitionLabeling::spatial;
                else if (seg_labeling == "intensity")
                    seg_args.cfg.labeling = TransitionLabeling::intensity;
                else
                    throw config_error("unknown labeling mode: " + seg_labeling);
            }
            if (o_tau_d->count()) seg_args.cfg.tau_difference = sg_tau_d;
            if (o_tau_g->count()) seg_args.cfg.tau_gradient = sg_tau_g;
            if (o_nlm_h->count()) {
                seg_args.cfg.nlm.h = sg_nlm_h;
                seg_args.cfg.nlm_auto_h = false;
            }
            if (o_scal->count()) seg_args.cfg.sigma_cal = sg_sigma_cal;
            if (o_fsig->count()) seg_args.cfg.filter_sigma = sg_filter_sigma;
            if (o_cls->count()) seg_args.cfg.classes = sg_classes;
            if (o_grad_r->count()) seg_args.cfg.gradient_radius = sg_grad_r;
            if (o_sweeps->count()) seg_args.cfg.em.gibbs_sweeps = sg_sweeps;
            if (o_em_it->count()) seg_args.cfg.em.max_iterations = sg_em_iters;
            if (o_seed->count()) seg_args.cfg.seed = sg_seed;
            return run_segment(seg_args);
        }
        if (sw->parsed()) {
            KeyValueConfig cfg = load_config(sweep_args.config_path);
            return run_sweep(sweep_args, cfg);
        }
        if (hs->parsed()) {
            KeyValueConfig cfg = load_config(hist_config);
            hist_args.cfg = pipeline_from_config(cfg);
            if (hs_sm->count()) hist_args.cfg.smoother = smoother_from_string(hist_smoother);
            if (hs_seed->count()) hist_args.cfg.seed = hist_seed;
            return run_hist(hist_args);
        }
        if (ca->parsed()) return run_calibrate(cal_args);
    } catch (const config_error& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return kExitConfig;
    } catch (const io_error& e) {
        std::cerr << "i/o error: " << e.what() << "\n";
        return kExitIo;
    } catch (const numeric_error& e) {
        std::cerr << "numeric error: " << e.what() << "\n";
        return kExitNumeric;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return kExitConfig;
}
