#include "msseg/deconv.hpp"

#include <algorithm>
#include <cmath>

#include "json.hpp"

#include "msseg/errors.hpp"
#include "msseg/rng.hpp"

namespace msseg {

namespace {

constexpr double kPi = 3.14159265358979323846;
constexpr double kCondLimit = 1e6;
constexpr double kSigmaFloor = 1e-6;

double wrap_phase(double r) {
    while (r > kPi) r -= 2.0 * kPi;
    while (r <= -kPi) r += 2.0 * kPi;
    return r;
}

double normal_cdf(double z) { return 0.5 * std::erfc(-z / std::sqrt(2.0)); }

// One measurement of the horizontal-edge probe: the image is constant along
// rows, so kernel responses reduce to row-sum dot products with the profile.
struct ProbeKernels {
    int radius;
    std::vector<double> g_rowsum, h_rowsum;

    explicit ProbeKernels(const QuadraturePair& q) : radius(q.radius) {
        const Kernel& g0 = q.g_basis[0]; // theta = 0: variation along +y
        const Kernel& h0 = q.h_basis[0];
        g_rowsum.assign(std::size_t(2 * radius + 1), 0.0);
        h_rowsum.assign(std::size_t(2 * radius + 1), 0.0);
        for (int dy = -radius; dy <= radius; ++dy)
            for (int dx = -radius; dx <= radius; ++dx) {
                g_rowsum[std::size_t(dy + radius)] += g0.at(dx, dy);
                h_rowsum[std::size_t(dy + radius)] += h0.at(dx, dy);
            }
    }

    // Responses at offset t from the edge for a unit step blurred by sigma:
    // profile(dy) = Phi(-(t+dy)/sigma), value 1 on the a side (t < 0).
    void measure(double t, double sigma, double& u, double& g, double& h) const {
        u = normal_cdf(-t / sigma);
        g = 0.0;
        h = 0.0;
        for (int dy = -radius; dy <= radius; ++dy) {
            double p = normal_cdf(-(t + dy) / sigma);
            g += g_rowsum[std::size_t(dy + radius)] * p;
            h += h_rowsum[std::size_t(dy + radius)] * p;
        }
    }
};

struct Mat3 {
    std::array<double, 9> m{};
    double& at(int r, int c) { return m[std::size_t(3 * r + c)]; }
    double at(int r, int c) const { return m[std::size_t(3 * r + c)]; }
};

std::array<double, 9> invert3(const std::array<double, 9>& a) {
    double det = a[0] * (a[4] * a[8] - a[5] * a[7]) - a[1] * (a[3] * a[8] - a[5] * a[6]) +
                 a[2] * (a[3] * a[7] - a[4] * a[6]);
    if (!(std::abs(det) > 0))
        throw numeric_error("deconv: singular noise covariance");
    double inv = 1.0 / det;
    return {
        (a[4] * a[8] - a[5] * a[7]) * inv, (a[2] * a[7] - a[1] * a[8]) * inv,
        (a[1] * a[5] - a[2] * a[4]) * inv, (a[5] * a[6] - a[3] * a[8]) * inv,
        (a[0] * a[8] - a[2] * a[6]) * inv, (a[2] * a[3] - a[0] * a[5]) * inv,
        (a[3] * a[7] - a[4] * a[6]) * inv, (a[1] * a[6] - a[0] * a[7]) * inv,
        (a[0] * a[4] - a[1] * a[3]) * inv,
    };
}

} // namespace

bool DeconvCalibration::lookup(double r, std::array<double, 6>& w) const {
    double fb = (wrap_phase(r) + kPi) / (2.0 * kPi) * n_bins - 0.5;
    int b0 = int(std::floor(fb));
    double frac = fb - b0;
    int b1 = b0 + 1;
    // circular wrap
    b0 = (b0 % n_bins + n_bins) % n_bins;
    b1 = (b1 % n_bins + n_bins) % n_bins;
    if (!valid[std::size_t(b0)] || !valid[std::size_t(b1)]) return false;
    auto lerp = [&](const std::vector<double>& t) {
        return (1.0 - frac) * t[std::size_t(b0)] + frac * t[std::size_t(b1)];
    };
    w = {lerp(w_ua), lerp(w_ub), lerp(w_ga), lerp(w_gb), lerp(w_ha), lerp(w_hb)};
    return true;
}

DeconvCalibration calibrate(double sigma_cal, const QuadraturePair& q, double noise_sigma,
                            std::uint64_t seed) {
    if (sigma_cal <= 0) throw config_error("calibrate: sigma_cal must be > 0");
    if (noise_sigma < 0) throw config_error("calibrate: noise sigma must be >= 0");

    DeconvCalibration cal;
    cal.sigma_cal = sigma_cal;
    cal.noise_sigma = noise_sigma;
    cal.filter_sigma = q.sigma;
    cal.filter_radius = q.radius;

    ProbeKernels probe(q);

    // Probe window: the step must reach both plateaus inside it. The window is
    // capped, so an oversized blur is reported instead of silently extrapolated.
    constexpr double kMaxHalfWindow = 40.0;
    double half_window = std::min(4.0 * (sigma_cal + q.sigma) + 2.0, kMaxHalfWindow);
    if (normal_cdf(-half_window / sigma_cal) > 1e-3)
        throw numeric_error("calibrate: sigma_cal too large, step never reaches plateau "
                            "within the calibration window");

    const double dt = 0.05;
    const int steps = int(half_window / dt);

    struct Row {
        double r, ua, ub, ga, gb, ha, hb;
    };
    std::vector<Row> rows;

    // Sweep outward from the edge; stop a side when the odd response changes
    // sign (the phase key stops being injective/polarity-safe there).
    double u0, g0, h0;
    probe.measure(0.0, sigma_cal, u0, g0, h0);
    double h_sign = h0 >= 0 ? 1.0 : -1.0;

    auto sweep_side = [&](double dir) {
        double prev_r = std::atan2(g0, h0);
        for (int i = (dir > 0 ? 1 : 0); i <= steps; ++i) {
            double t = dir * i * dt;
            double u, g, h;
            probe.measure(t, sigma_cal, u, g, h);
            if (h * h_sign <= 0.0) break;
            double r = std::atan2(g, h);
            if (i > 1 && std::abs(wrap_phase(r - prev_r)) > 0.5 * kPi) break; // key wrapped
            prev_r = r;
            // complementary step (a=0, b=1) at the same offset: u -> 1-u,
            // g,h -> -g,-h (zero-sum kernels)
            rows.push_back(Row{r, u, 1.0 - u, g, -g, h, -h});
        }
    };
    sweep_side(-1.0);
    sweep_side(+1.0);
    if (rows.size() < 8)
        throw numeric_error("calibrate: degenerate calibration sweep");

    // Polarity completion: a pixel on an a<b edge at the same geometry
    // measures phase r+pi with the same observation model.
    std::vector<Row> all = rows;
    for (const Row& row : rows) {
        Row flipped = row;
        flipped.r = wrap_phase(row.r + kPi);
        all.push_back(flipped);
    }
    std::sort(all.begin(), all.end(), [](const Row& a, const Row& b) { return a.r < b.r; });

    cal.w_ua.assign(std::size_t(cal.n_bins), 0.0);
    cal.w_ub.assign(std::size_t(cal.n_bins), 0.0);
    cal.w_ga.assign(std::size_t(cal.n_bins), 0.0);
    cal.w_gb.assign(std::size_t(cal.n_bins), 0.0);
    cal.w_ha.assign(std::size_t(cal.n_bins), 0.0);
    cal.w_hb.assign(std::size_t(cal.n_bins), 0.0);
    cal.valid.assign(std::size_t(cal.n_bins), 0);

    // Resample measured rows onto the uniform phase grid; bins between two
    // consecutive measurements closer than one sweep step stay connected,
    // larger gaps separate the arcs.
    const double bin_width = 2.0 * kPi / cal.n_bins;
    auto bin_center = [&](int b) { return -kPi + (b + 0.5) * bin_width; };
    std::size_t j = 0;
    for (int b = 0; b < cal.n_bins; ++b) {
        double r = bin_center(b);
        while (j + 1 < all.size() && all[j + 1].r < r) ++j;
        if (all[j].r > r || j + 1 >= all.size()) continue;
        const Row& lo = all[j];
        const Row& hi = all[j + 1];
        double gap = hi.r - lo.r;
        if (gap > 0.2) continue; // between arcs
        double f = gap > 0 ? (r - lo.r) / gap : 0.0;
        cal.w_ua[std::size_t(b)] = lo.ua + f * (hi.ua - lo.ua);
        cal.w_ub[std::size_t(b)] = lo.ub + f * (hi.ub - lo.ub);
        cal.w_ga[std::size_t(b)] = lo.ga + f * (hi.ga - lo.ga);
        cal.w_gb[std::size_t(b)] = lo.gb + f * (hi.gb - lo.gb);
        cal.w_ha[std::size_t(b)] = lo.ha + f * (hi.ha - lo.ha);
        cal.w_hb[std::size_t(b)] = lo.hb + f * (hi.hb - lo.hb);
        cal.valid[std::size_t(b)] = 1;
    }

    // Sigma: empirical covariance of (u, G, H) responses to pure noise at the
    // probe pixel (the responses are linear, so the step contribution cancels
    // in the residual).
    if (noise_sigma <= 0) {
        cal.sigma = {kSigmaFloor, 0, 0, 0, kSigmaFloor, 0, 0, 0, kSigmaFloor};
        cal.sigma_floored = true;
    } else {
        const std::size_t reps = 10000;
        const int r = q.radius, side = 2 * r + 1;
        const Kernel& gk = q.g_basis[0];
        const Kernel& hk = q.h_basis[0];
        std::vector<double> patch(std::size_t(side) * side);
        Rng rng(seed);
        double mean[3] = {0, 0, 0};
        std::vector<std::array<double, 3>> obs(reps);
        for (std::size_t rep = 0; rep < reps; ++rep) {
            for (double& v : patch) v = noise_sigma * rng.normal();
            double nu = patch[std::size_t(side) * r + r];
            double ng = 0.0, nh = 0.0;
            for (std::size_t i = 0; i < patch.size(); ++i) {
                ng += gk.taps[i] * patch[i];
                nh += hk.taps[i] * patch[i];
            }
            obs[rep] = {nu, ng, nh};
            mean[0] += nu;
            mean[1] += ng;
            mean[2] += nh;
        }
        for (double& m : mean) m /= double(reps);
        Mat3 cov;
        for (const auto& o : obs)
            for (int a = 0; a < 3; ++a)
                for (int b = 0; b < 3; ++b)
                    cov.at(a, b) += (o[std::size_t(a)] - mean[a]) * (o[std::size_t(b)] - mean[b]);
        for (double& v : cov.m) v /= double(reps - 1);
        cal.sigma = cov.m;
    }
    cal.sigma_inv = invert3(cal.sigma);
    return cal;
}

PixelSolve solve_pixel(double u, double g, double h, double r, const DeconvCalibration& cal) {
    std::array<double, 6> w{};
    if (!cal.lookup(r, w)) return {u, u, false};

    const double W[3][2] = {{w[0], w[1]}, {w[2], w[3]}, {w[4], w[5]}};

    // condition number of W from the 2x2 Gram matrix
    double gaa = 0, gab = 0, gbb = 0;
    for (int i = 0; i < 3; ++i) {
        gaa += W[i][0] * W[i][0];
        gab += W[i][0] * W[i][1];
        gbb += W[i][1] * W[i][1];
    }
    double tr = gaa + gbb;
    double disc = std::sqrt(std::max(0.0, (gaa - gbb) * (gaa - gbb) + 4.0 * gab * gab));
    double lmax = 0.5 * (tr + disc), lmin = 0.5 * (tr - disc);
    if (!(lmin > 0.0) || std::sqrt(lmax / lmin) > kCondLimit) return {u, u, false};

    // A = W^T Sigma^-1 W, rhs = W^T Sigma^-1 y
    const auto& si = cal.sigma_inv;
    double siW[3][2];
    for (int i = 0; i < 3; ++i)
        for (int c = 0; c < 2; ++c)
            siW[i][c] = si[std::size_t(3 * i)] * W[0][c] + si[std::size_t(3 * i + 1)] * W[1][c] +
                        si[std::size_t(3 * i + 2)] * W[2][c];
    double a00 = 0, a01 = 0, a11 = 0, r0 = 0, r1 = 0;
    const double y[3] = {u, g, h};
    for (int i = 0; i < 3; ++i) {
        a00 += W[i][0] * siW[i][0];
        a01 += W[i][0] * siW[i][1];
        a11 += W[i][1] * siW[i][1];
        r0 += siW[i][0] * y[i];
        r1 += siW[i][1] * y[i];
    }
    double det = a00 * a11 - a01 * a01;
    if (!(std::abs(det) > 1e-300)) return {u, u, false};
    double a = (a11 * r0 - a01 * r1) / det;
    double b = (a00 * r1 - a01 * r0) / det;
    if (!std::isfinite(a) || !std::isfinite(b)) return {u, u, false};
    return {a, b, true};
}

DeconvField deconvolve(const GrayImage& img, const QuadraturePair& q,
                       const DeconvCalibration& cal, double energy_threshold_frac) {
    if (std::abs(cal.filter_sigma - q.sigma) > 1e-12 || cal.filter_radius != q.radius)
        throw config_error("deconvolve: calibration was built for a different quadrature pair");

    QuadratureResponses resp = quadrature_responses(img, q);
    // Pixels whose energy is explainable by residual noise alone are interior:
    // the floor is the expected noise energy of the quadrature pair times a
    // safety factor, using the noise level the calibration was built for.
    double g_norm2 = 0.0, h_norm2 = 0.0;
    for (double t : q.g_basis[0].taps) g_norm2 += t * t;
    for (double t : q.h_basis[0].taps) h_norm2 += t * t;
    double noise_floor =
        6.0 * cal.noise_sigma * cal.noise_sigma * (g_norm2 + h_norm2);
    OrientationField field = orientation_energy(resp, energy_threshold_frac, noise_floor);
    GrayImage r = phase(resp, field);

    DeconvField out;
    out.width = img.width;
    out.height = img.height;
    out.a = GrayImage(img.width, img.height);
    out.b = GrayImage(img.width, img.height);
    out.phase_map = r;
    out.theta = GrayImage(img.width, img.height);
    out.reliable.assign(img.size(), 0);

    for (std::size_t i = 0; i < img.size(); ++i) {
        out.theta.data[i] = field.theta[i];
        double u = img.data[i];
        if (!field.reliable[i]) {
            out.a.data[i] = float(u);
            out.b.data[i] = float(u);
            continue;
        }
        auto gw = q.g_weights(field.theta[i]);
        auto hw = q.h_weights(field.theta[i]);
        double g = resp.steered_g_at(i, gw);
        double h = resp.steered_h_at(i, hw);
        PixelSolve s = solve_pixel(u, g, h, r.data[i], cal);
        out.a.data[i] = float(s.a);
        out.b.data[i] = float(s.b);
        out.reliable[i] = s.reliable ? 1 : 0;
    }
    return out;
}

std::string DeconvCalibration::to_json() const {
    nlohmann::json j;
    j["sigma_cal"] = sigma_cal;
    j["noise_sigma"] = noise_sigma;
    j["filter_sigma"] = filter_sigma;
    j["filter_radius"] = filter_radius;
    j["n_bins"] = n_bins;
    j["w_ua"] = w_ua;
    j["w_ub"] = w_ub;
    j["w_ga"] = w_ga;
    j["w_gb"] = w_gb;
    j["w_ha"] = w_ha;
    j["w_hb"] = w_hb;
    j["valid"] = valid;
    j["sigma"] = sigma;
    j["sigma_floored"] = sigma_floored;
    return j.dump();
}

DeconvCalibration DeconvCalibration::from_json(const std::string& text) {
    nlohmann::json j = nlohmann::json::parse(text);
    DeconvCalibration c;
    c.sigma_cal = j.at("sigma_cal").get<double>();
    c.noise_sigma = j.at("noise_sigma").get<double>();
    c.filter_sigma = j.at("filter_sigma").get<double>();
    c.filter_radius = j.at("filter_radius").get<int>();
    c.n_bins = j.at("n_bins").get<int>();
    c.w_ua = j.at("w_ua").get<std::vector<double>>();
    c.w_ub = j.at("w_ub").get<std::vector<double>>();
    c.w_ga = j.at("w_ga").get<std::vector<double>>();
    c.w_gb = j.at("w_gb").get<std::vector<double>>();
    c.w_ha = j.at("w_ha").get<std::vector<double>>();
    c.w_hb = j.at("w_hb").get<std::vector<double>>();
    c.valid = j.at("valid").get<std::vector<std::uint8_t>>();
    c.sigma = j.at("sigma").get<std::array<double, 9>>();
    c.sigma_floored = j.at("sigma_floored").get<bool>();
    if (int(c.w_ua.size()) != c.n_bins || int(c.valid.size()) != c.n_bins)
        throw io_error("calibration file is inconsistent");
    c.sigma_inv = invert3(c.sigma);
    return c;
}

} // namespace msseg
