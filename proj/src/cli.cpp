#include "arraymem/cli.hpp"

#include <chrono>
#include <cmath>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "arraymem/dynamics.hpp"
#include "arraymem/error.hpp"
#include "arraymem/io.hpp"
#include "arraymem/studies.hpp"

namespace arraymem {

namespace {

using nlohmann::json;
namespace fs = std::filesystem;

Contraction contraction_of(const RunConfig& c) {
    return c.study.contraction == "x-only" ? Contraction::XOnly : Contraction::Full;
}

StudyOptions study_options(const RunConfig& c) { return {c.study.workers, c.tolerances.quadrature}; }

Geometry configured_geometry(const RunConfig& c) {
    Geometry g = build_square_array(c.geometry.N, c.geometry.d);
    if (!c.geometry.holes.empty()) g = remove_holes(g, c.geometry.holes);
    if (c.geometry.sigma > 0.0) g = apply_position_disorder(g, c.geometry.sigma, c.study.seed);
    return g;
}

std::vector<double> waist_list(const RunConfig& c) {
    if (!c.study.w0_list.empty()) return c.study.w0_list;
    std::vector<double> out;
    const int n = c.study.w0_steps;
    for (int k = 0; k < n; ++k) out.push_back(c.study.w0_min + (c.study.w0_max - c.study.w0_min) * k / (n - 1));
    return out;
}

std::vector<double> sigma_list(const RunConfig& c) {
    std::vector<double> rel = c.study.sigma_over_d;
    if (rel.empty())
        for (int k = 0; k < 6; ++k) rel.push_back(0.01 * std::pow(10.0, k / 5.0));
    for (double& s : rel) s *= c.geometry.d;
    return rel;
}

std::string timestamp() {
    const std::time_t now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
    std::tm utc{};
    gmtime_r(&now, &utc);
    char buf[32];
    std::strftime(buf, sizeof buf, "%Y%m%dT%H%M%SZ", &utc);
    return buf;
}

// Collects artifacts for one run; every file carries the resolved config.
class Artifacts {
public:
    explicit Artifacts(const RunConfig& c) : config_(c) {
        to_json(config_json_, c);
        stem_ = c.command + "_" + std::to_string(c.geometry.N) + "_" + format_double(c.geometry.d) + "_" + timestamp();
    }

    std::string comment() const { return "config: " + config_json_.dump(); }

    void csv(const std::function<void(std::ostream&, const std::string&)>& writer) {
        if (!config_.output.write_files) return;
        const fs::path path = open(".csv");
        std::ofstream out(path);
        writer(out, comment());
        finish(out, path);
    }

    void json_file(json result) {
        if (!config_.output.write_files) return;
        const fs::path path = open(".json");
        std::ofstream out(path);
        json doc = {{"config", config_json_}, {"result", std::move(result)}};
        out << doc.dump(2) << '\n';
        finish(out, path);
    }

    std::vector<std::string> paths;

private:
    fs::path open(const char* ext) {
        fs::create_directories(config_.output.directory);
        return fs::path(config_.output.directory) / (stem_ + ext);
    }
    void finish(std::ostream& out, const fs::path& path) {
        if (!out) throw Error("failed to write " + path.string());
        paths.push_back(path.string());
    }

    const RunConfig& config_;
    json config_json_;
    std::string stem_;
};

std::string fmt(double v, const char* spec = "%.6g") {
    char buf[64];
    std::snprintf(buf, sizeof buf, spec, v);
    return buf;
}

struct Resolved {
    RetrievalProblem problem;
    double w0;
    std::optional<OptimalWaist> optimum;
};

Resolved resolve_waist(const RunConfig& c) {
    bool retried = false;
    RetrievalProblem problem =
        make_problem(configured_geometry(c), model_from_string(c.geometry.model), c.study.seed, retried,
                     contraction_of(c));
    if (!c.mode.optimize_waist) return {std::move(problem), c.mode.w0, std::nullopt};
    OptimalWaist opt = optimal_waist(problem, c.tolerances.waist, study_options(c));
    const double w0 = opt.w0;
    return {std::move(problem), w0, std::move(opt)};
}

std::string run_efficiency(const RunConfig& c, Artifacts& files) {
    Resolved r = resolve_waist(c);
    const DetectionMode mode(r.w0, 1.0, c.mode.two_sided, c.tolerances.quadrature);
    const auto ev = r.problem.evaluate(mode);
    json result = solution_json(ev.solution, ev.k, ev.samples, r.problem.geometry());
    if (r.optimum) result["optimization"] = summary_json(*r.optimum);
    files.json_file(result);
    return "eta_max=" + fmt(ev.solution.eta_max, "%.10f") + " epsilon=" + fmt(1.0 - ev.solution.eta_max, "%.4e") +
           " w0=" + fmt(r.w0) + " N=" + std::to_string(c.geometry.N) + " d=" + fmt(c.geometry.d);
}

std::string run_scan(const RunConfig& c, Artifacts& files) {
    bool retried = false;
    const RetrievalProblem problem = make_problem(configured_geometry(c), model_from_string(c.geometry.model),
                                                  c.study.seed, retried, contraction_of(c));
    const WaistScan scan = scan_waist(problem, waist_list(c), study_options(c));
    json result = summary_json(scan);
    std::string fit_text = "fit unavailable";
    try {
        const FitResult cfit = fit_error_model(scan, c.tolerances.fit_clip_fraction);
        const FitResult slope = fit_waist_slope(scan, c.tolerances.fit_clip_fraction);
        result["fit_C"] = cfit;
        result["fit_slope"] = slope;
        fit_text = "C=" + fmt(cfit.value, "%.4e") + " slope=" + fmt(slope.value, "%.3f") + "+-" +
                   fmt(slope.standard_error, "%.3f") + " window=[" + fmt(slope.window_lo) + ", " +
                   fmt(slope.window_hi) + "]";
    } catch (const FitWindowError& e) {
        result["fit_error"] = e.what();
    }
    files.csv([&](std::ostream& out, const std::string& comment) { write_csv(out, scan, comment); });
    files.json_file(result);
    const auto best = std::min_element(scan.points.begin(), scan.points.end(),
                                       [](const auto& a, const auto& b) { return a.epsilon < b.epsilon; });
    return "scan " + std::to_string(scan.points.size()) + " waists: min epsilon=" + fmt(best->epsilon, "%.4e") +
           " at w0=" + fmt(best->w0) + " " + fit_text + (scan.unimodal() ? "" : " (not unimodal)");
}

std::string run_optimal(const RunConfig& c, Artifacts& files) {
    RunConfig copy = c;
    copy.mode.optimize_waist = true;
    Resolved r = resolve_waist(copy);
    const OptimalWaist& opt = *r.optimum;
    json result = summary_json(opt);
    result["estimate"] = scaling_estimate(c.geometry.N);
    files.json_file(result);
    return "optimal w0=" + fmt(opt.w0, "%.4f") + " epsilon=" + fmt(opt.epsilon, "%.4e") +
           " estimate=" + fmt(scaling_estimate(c.geometry.N), "%.4e") +
           (opt.fallback ? " (grid fallback)" : "");
}

std::string run_holes(const RunConfig& c, Artifacts& files) {
    std::vector<int> counts = c.study.hole_counts;
    if (counts.empty())
        for (int h = 1; 5 * h <= c.geometry.N * c.geometry.N; ++h) counts.push_back(h);
    double w0 = c.mode.w0;
    if (c.mode.optimize_waist) {
        RunConfig perfect = c;
        perfect.geometry.holes.clear();
        perfect.geometry.sigma = 0.0;
        w0 = resolve_waist(perfect).w0;
    }
    const HoleStudy study = hole_study(c.geometry.N, c.geometry.d, w0, counts, c.study.samples, c.study.seed,
                                       study_options(c));
    files.csv([&](std::ostream& out, const std::string& comment) { write_csv(out, study, comment); });
    files.json_file(summary_json(study));
    return "holes: alpha=" + fmt(study.alpha.value, "%.4f") + "+-" + fmt(study.alpha.standard_error, "%.4f") +
           " samples=" + std::to_string(study.samples.size()) + " violations=" + std::to_string(study.violations) +
           " w0=" + fmt(w0);
}

std::string run_disorder(const RunConfig& c, Artifacts& files) {
    std::vector<int> sizes = c.study.sizes;
    if (sizes.empty()) sizes.push_back(c.geometry.N);
    std::vector<double> w0_list = c.study.w0_list;
    if (!w0_list.empty() && w0_list.size() != sizes.size())
        throw ConfigError("study.w0_list", "disorder needs one waist per size (or none for the optimum)");
    const DisorderStudy study = position_disorder_study(sizes, c.geometry.d, sigma_list(c), c.study.samples,
                                                        c.study.seed, w0_list, study_options(c));
    files.csv([&](std::ostream& out, const std::string& comment) { write_csv(out, study, comment); });
    files.json_file(summary_json(study));
    std::string text = "disorder:";
    for (std::size_t k = 0; k < sizes.size(); ++k)
        text += " N=" + std::to_string(sizes[k]) + " slope=" + fmt(study.slopes[k].value, "%.3f") + "+-" +
                fmt(study.slopes[k].standard_error, "%.3f");
    return text;
}

std::string run_finite_time(const RunConfig& c, Artifacts& files) {
    Resolved r = resolve_waist(c);
    const DetectionMode mode(r.w0, 1.0, c.mode.two_sided, c.tolerances.quadrature);
    const auto ev = r.problem.evaluate(mode);
    std::vector<double> windows = c.study.Td_list;
    windows.push_back(c.study.Td);
    std::sort(windows.begin(), windows.end());
    windows.erase(std::unique(windows.begin(), windows.end()), windows.end());
    const FiniteTimeCurve curve =
        finite_time_curve(r.problem.decomposition(), ev.samples, ev.solution.spin_wave, windows);
    const auto at = std::find(curve.windows.begin(), curve.windows.end(), c.study.Td) - curve.windows.begin();
    const double eta_td = curve.eta[static_cast<std::size_t>(at)];
    const double loss = 1.0 - eta_td / curve.eta_infinite;
    files.csv([&](std::ostream& out, const std::string& comment) { write_finite_time_csv(out, curve, comment); });
    json rows = json::array();
    for (std::size_t k = 0; k < curve.windows.size(); ++k)
        rows.push_back({{"Td", curve.windows[k]},
                        {"eta_Td", curve.eta[k]},
                        {"relative_loss", 1.0 - curve.eta[k] / curve.eta_infinite}});
    files.json_file({{"w0", r.w0}, {"eta", curve.eta_infinite}, {"Td", c.study.Td}, {"eta_Td", eta_td},
                     {"relative_loss", loss}, {"curve", rows}});
    return "finite-time: eta=" + fmt(curve.eta_infinite, "%.10f") + " eta_Td=" + fmt(eta_td, "%.10f") +
           " 1-eta_Td/eta=" + fmt(loss, "%.4e") + " at Td=" + fmt(c.study.Td) + " w0=" + fmt(r.w0);
}

std::string run_isotropic(const RunConfig& c, Artifacts& files) {
    std::vector<int> sizes = c.study.sizes;
    if (sizes.empty()) sizes = {6, 10, 14};
    const IsotropicComparison cmp = isotropic_comparison(sizes, c.geometry.d, contraction_of(c), study_options(c));
    files.csv([&](std::ostream& out, const std::string& comment) { write_csv(out, cmp, comment); });
    files.json_file(summary_json(cmp));
    std::string text = "isotropic:";
    for (const auto& row : cmp.rows)
        text += " N=" + std::to_string(row.n) + " increase=" + fmt(row.relative_increase, "%.3f") +
                " waist_ratio=" + fmt(row.waist_ratio, "%.3f");
    return text;
}

struct Check {
    std::string name;
    bool pass;
    std::string detail;
};

std::vector<Check> run_checks(const RunConfig& c) {
    std::vector<Check> checks;
    auto record = [&](const std::string& name, const std::function<std::pair<bool, std::string>()>& fn) {
        try {
            auto [ok, detail] = fn();
            checks.push_back({name, ok, detail});
        } catch (const Error& e) {
            checks.push_back({name, false, e.what()});
        }
    };

    const double tol = c.tolerances.quadrature;
    record("projection_on_axis", [&] {
        const auto p = validate_projection(DetectionMode(2.0, 1.0, true, tol), Vec3::Zero(), Vec3::UnitX(), 5.0);
        return std::pair{p.relative_discrepancy < 1e-4, "relative=" + fmt(p.relative_discrepancy, "%.3e")};
    });
    record("projection_cross_polarized", [&] {
        const DetectionMode m(2.0, 1.0, true, tol);
        const auto p = validate_projection(m, Vec3::Zero(), Vec3::UnitY(), 5.0);
        const double ref = m.focus_value() / (2.0 * kWaveNumber);
        return std::pair{std::abs(p.numeric) < 1e-6 * ref, "abs=" + fmt(std::abs(p.numeric), "%.3e")};
    });
    record("projection_displaced", [&] {
        const DetectionMode m(2.0, 1.0, true, tol);
        const auto p = validate_projection(m, Vec3(5.0 * m.w0(), 0.0, 0.0), Vec3::UnitX(), 5.0);
        const double ref = m.focus_value() / (2.0 * kWaveNumber);
        return std::pair{std::abs(p.numeric) < 1e-3 * ref && p.absolute_discrepancy < 1e-6 * ref,
                         "ratio=" + fmt(std::abs(p.numeric) / ref, "%.3e")};
    });
    record("mode_norm_planes", [&] {
        const DetectionMode m(c.mode.w0, 1.0, true, tol);
        const double f = m.norm();
        const double f0 = mode_norm_real_space(m, 0.0);
        const double f5 = mode_norm_real_space(m, 5.0);
        const double dev = std::max(std::abs(f0 - f), std::abs(f5 - f)) / f;
        return std::pair{dev < 1e-6, "relative=" + fmt(dev, "%.3e")};
    });

    struct Case {
        std::string name;
        Geometry geometry;
        Model model;
    };
    std::vector<Case> cases;
    cases.push_back({"configured", configured_geometry(c), model_from_string(c.geometry.model)});
    cases.push_back({"holes_4x4", remove_holes(build_square_array(4, 0.6), {1, 6, 11}), Model::TwoLevel});
    cases.push_back({"disorder_5x5", apply_position_disorder(build_square_array(5, 0.5), 0.05, c.study.seed),
                     Model::TwoLevel});
    cases.push_back({"isotropic_3x3", build_square_array(3, 0.7), Model::Isotropic});
    for (const auto& cs : cases) {
        record("spectral_" + cs.name, [&] {
            const InteractionMatrix m = interaction_matrix(cs.geometry, cs.model);
            const SpectralDecomposition dec = eigendecompose(m);
            const double recon = (reconstruct(dec) - m.entries).cwiseAbs().maxCoeff();
            const bool ok = dec.bilinear_condition < 1e-8 && dec.completeness_residual < 1e-8 &&
                            dec.trace_residual < 1e-9 && dec.min_decay > -1e-10 && recon < 1e-9;
            return std::pair{ok, describe(dec) + " reconstruction=" + fmt(recon, "%.3e")};
        });
        record("efficiency_" + cs.name, [&] {
            const RetrievalProblem problem(cs.geometry, cs.model, contraction_of(c));
            const auto ev = problem.evaluate(DetectionMode(c.mode.w0, 1.0, c.mode.two_sided, tol));
            const bool ok = ev.k.hermiticity < 1e-10 && ev.solution.eta_max <= 1.0 + 1e-9 &&
                            ev.solution.eta_max >= 0.0;
            return std::pair{ok, "hermiticity=" + fmt(ev.k.hermiticity, "%.3e") +
                                     " eta_max=" + fmt(ev.solution.eta_max, "%.10f")};
        });
    }
    return checks;
}

std::string run_validate(const RunConfig& c, Artifacts& files, std::ostream& out, int& exit_code) {
    const auto checks = run_checks(c);
    int failed = 0;
    json rows = json::array();
    for (const auto& ch : checks) {
        out << (ch.pass ? "PASS " : "FAIL ") << ch.name << ' ' << ch.detail << '\n';
        rows.push_back({{"name", ch.name}, {"pass", ch.pass}, {"detail", ch.detail}});
        failed += ch.pass ? 0 : 1;
    }
    files.json_file({{"checks", rows}, {"failed", failed}});
    if (failed > 0) exit_code = 1;
    return "validate: " + std::to_string(checks.size() - failed) + "/" + std::to_string(checks.size()) + " passed";
}

} // namespace

RunOutcome run(const RunConfig& config, std::ostream& out) {
    validate(config);
    RunOutcome outcome;
    Artifacts files(config);
    const auto start = std::chrono::steady_clock::now();
    try {
        const std::string& cmd = config.command;
        if (cmd == "efficiency") outcome.summary = run_efficiency(config, files);
        else if (cmd == "scan-waist") outcome.summary = run_scan(config, files);
        else if (cmd == "optimal-waist") outcome.summary = run_optimal(config, files);
        else if (cmd == "holes") outcome.summary = run_holes(config, files);
        else if (cmd == "disorder") outcome.summary = run_disorder(config, files);
        else if (cmd == "finite-time") outcome.summary = run_finite_time(config, files);
        else if (cmd == "isotropic") outcome.summary = run_isotropic(config, files);
        else outcome.summary = run_validate(config, files, out, outcome.exit_code);
    } catch (const ConfigError&) {
        throw;
    } catch (const InvalidArgument&) {
        throw;
    } catch (const Error& e) {
        outcome.exit_code = 1;
        outcome.summary = std::string("error: ") + e.what();
    }
    const double seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    outcome.artifacts = files.paths;
    out << outcome.summary << " (" << fmt(seconds, "%.1f") << " s)";
    for (const auto& p : outcome.artifacts) out << " -> " << p;
    out << '\n';
    return outcome;
}

int cli_main(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
    CLI::App app{"Maximum photon retrieval efficiency of atomic arrays"};
    app.set_help_flag("-h,--help");
    std::string command;
    std::string config_path;
    app.add_option("command", command,
                   "efficiency | scan-waist | optimal-waist | holes | disorder | finite-time | isotropic | validate");
    app.add_option("-c,--config", config_path, "JSON config file");

    RunConfig flags;
    std::string model;
    std::string contraction;
    std::string output;
    auto* o_n = app.add_option("--N", flags.geometry.N, "array side length");
    auto* o_d = app.add_option("--d", flags.geometry.d, "lattice constant (wavelengths)");
    auto* o_model = app.add_option("--model", model, "two-level | isotropic");
    auto* o_holes = app.add_option("--holes", flags.geometry.holes, "vacant site indices")->delimiter(',');
    auto* o_sigma = app.add_option("--sigma", flags.geometry.sigma, "position disorder (wavelengths)");
    auto* o_w0 = app.add_option("--w0", flags.mode.w0, "beam waist (wavelengths)");
    auto* o_one = app.add_flag("--one-sided", "collect on the +z side only");
    auto* o_opt = app.add_flag("--optimize-waist", "optimize the beam waist");
    auto* o_w0s = app.add_option("--w0-list", flags.study.w0_list, "waists for scans")->delimiter(',');
    auto* o_w0min = app.add_option("--w0-min", flags.study.w0_min);
    auto* o_w0max = app.add_option("--w0-max", flags.study.w0_max);
    auto* o_steps = app.add_option("--w0-steps", flags.study.w0_steps);
    auto* o_counts = app.add_option("--hole-counts", flags.study.hole_counts)->delimiter(',');
    auto* o_samples = app.add_option("--samples", flags.study.samples, "random samples per point");
    auto* o_seed = app.add_option("--seed", flags.study.seed, "random seed");
    auto* o_sizes = app.add_option("--sizes", flags.study.sizes)->delimiter(',');
    auto* o_sig = app.add_option("--sigma-over-d", flags.study.sigma_over_d)->delimiter(',');
    auto* o_td = app.add_option("--Td", flags.study.Td, "detection window (1/Gamma0)");
    auto* o_tds = app.add_option("--Td-list", flags.study.Td_list)->delimiter(',');
    auto* o_con = app.add_option("--contraction", contraction, "full | x-only");
    auto* o_workers = app.add_option("--workers", flags.study.workers, "worker threads (0 = all cores)");
    auto* o_large = app.add_flag("--allow-large", "lift the default size caps");
    auto* o_outdir = app.add_option("-o,--output", output, "output directory");
    auto* o_nofiles = app.add_flag("--no-files", "print the summary only");
    auto* o_quad = app.add_option("--tolerance", flags.tolerances.quadrature, "quadrature tolerance");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        out << app.help();
        return 0;
    } catch (const CLI::ParseError& e) {
        err << "error: " << e.what() << '\n';
        return 2;
    }

    try {
        RunConfig c;
        if (!config_path.empty()) c = load_config(config_path, c);
        if (!command.empty()) c.command = command;
        if (o_n->count()) c.geometry.N = flags.geometry.N;
        if (o_d->count()) c.geometry.d = flags.geometry.d;
        if (o_model->count()) c.geometry.model = model;
        if (o_holes->count()) c.geometry.holes = flags.geometry.holes;
        if (o_sigma->count()) c.geometry.sigma = flags.geometry.sigma;
        if (o_w0->count()) c.mode.w0 = flags.mode.w0;
        if (o_one->count()) c.mode.two_sided = false;
        if (o_opt->count()) c.mode.optimize_waist = true;
        if (o_w0s->count()) c.study.w0_list = flags.study.w0_list;
        if (o_w0min->count()) c.study.w0_min = flags.study.w0_min;
        if (o_w0max->count()) c.study.w0_max = flags.study.w0_max;
        if (o_steps->count()) c.study.w0_steps = flags.study.w0_steps;
        if (o_counts->count()) c.study.hole_counts = flags.study.hole_counts;
        if (o_samples->count()) c.study.samples = flags.study.samples;
        if (o_seed->count()) c.study.seed = flags.study.seed;
        if (o_sizes->count()) c.study.sizes = flags.study.sizes;
        if (o_sig->count()) c.study.sigma_over_d = flags.study.sigma_over_d;
        if (o_td->count()) c.study.Td = flags.study.Td;
        if (o_tds->count()) c.study.Td_list = flags.study.Td_list;
        if (o_con->count()) c.study.contraction = contraction;
        if (o_workers->count()) c.study.workers = flags.study.workers;
        if (o_large->count()) c.study.allow_large = true;
        if (o_outdir->count()) c.output.directory = output;
        if (o_nofiles->count()) c.output.write_files = false;
        if (o_quad->count()) c.tolerances.quadrature = flags.tolerances.quadrature;
        return run(c, out).exit_code;
    } catch (const ConfigError& e) {
        err << "config error: " << e.what() << '\n';
        return 2;
    } catch (const InvalidArgument& e) {
        err << "config error: " << e.what() << '\n';
        return 2;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << '\n';
        return 1;
    }
}

} // namespace arraymem
