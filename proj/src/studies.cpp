#include "arraymem/studies.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>
#include <ostream>

#include <nlohmann/json.hpp>

#include "arraymem/error.hpp"
#include "arraymem/io.hpp"
#include "arraymem/parallel.hpp"

namespace arraymem {

namespace {

constexpr double kGolden = 0.6180339887498949;

double evaluate_error(const RetrievalProblem& p, double w0, double tolerance) {
    return 1.0 - p.evaluate(DetectionMode(w0, 1.0, true, tolerance)).solution.eta_max;
}

// Golden-section minimum of f on [a, b] to interval width tol.
template <typename F>
double golden_section(F&& f, double a, double b, double tol) {
    double c = b - kGolden * (b - a);
    double d = a + kGolden * (b - a);
    double fc = f(c), fd = f(d);
    while (b - a > tol) {
        if (fc < fd) {
            b = d;
            d = c;
            fd = fc;
            c = b - kGolden * (b - a);
            fc = f(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + kGolden * (b - a);
            fd = f(d);
        }
    }
    return fc < fd ? c : d;
}

int count_local_minima(const std::vector<double>& y) {
    int count = 0;
    for (std::size_t k = 0; k < y.size(); ++k) {
        const bool left = k == 0 || y[k] < y[k - 1];
        const bool right = k + 1 == y.size() || y[k] < y[k + 1];
        if (left && right) ++count;
    }
    return count;
}

int lattice_size(const RetrievalProblem& p) {
    const int n = p.geometry().linear_size();
    if (n < 2) throw InvalidArgument("waist optimization needs a lattice with N >= 2");
    return n;
}

std::string str(std::int64_t v) { return std::to_string(v); }

// Origin-constrained regression y = alpha x.
FitResult fit_through_origin(const std::vector<double>& x, const std::vector<double>& y) {
    if (x.size() < 2) throw FitWindowError("regression needs at least two samples");
    double sxx = 0.0, sxy = 0.0;
    for (std::size_t k = 0; k < x.size(); ++k) {
        sxx += x[k] * x[k];
        sxy += x[k] * y[k];
    }
    if (sxx == 0.0) throw FitWindowError("regressor is identically zero");
    FitResult fit;
    fit.model = "relative_loss = alpha * intensity_fraction";
    fit.value = sxy / sxx;
    double rss = 0.0;
    for (std::size_t k = 0; k < x.size(); ++k) rss += std::pow(y[k] - fit.value * x[k], 2);
    fit.standard_error = std::sqrt(rss / static_cast<double>(x.size() - 1) / sxx);
    fit.points = x.size();
    fit.residual_norm = std::sqrt(rss / static_cast<double>(x.size()));
    fit.window_lo = *std::min_element(x.begin(), x.end());
    fit.window_hi = *std::max_element(x.begin(), x.end());
    return fit;
}

} // namespace

double clipping_term(int n, double d, double w0) {
    const double e = std::erf(n * d / (std::sqrt(2.0) * w0));
    return 1.0 - e * e;
}

double error_model(double c, int n, double d, double w0) { return c / std::pow(w0, 4) + clipping_term(n, d, w0); }

double scaling_estimate(int n) {
    const double atoms = static_cast<double>(n) * n;
    const double l = std::log(atoms);
    return l * l / (4.0 * atoms * atoms);
}

FitResult fit_power_law(const std::vector<double>& x, const std::vector<double>& y) {
    if (x.size() != y.size()) throw InvalidArgument("fit inputs differ in length");
    if (x.size() < 2) throw FitWindowError("power-law fit needs at least two points");
    std::vector<double> lx, ly;
    for (std::size_t k = 0; k < x.size(); ++k) {
        if (!(x[k] > 0.0) || !(y[k] > 0.0)) throw InvalidArgument("power-law fit needs positive data");
        lx.push_back(std::log(x[k]));
        ly.push_back(std::log(y[k]));
    }
    const double n = static_cast<double>(lx.size());
    const double mx = std::accumulate(lx.begin(), lx.end(), 0.0) / n;
    const double my = std::accumulate(ly.begin(), ly.end(), 0.0) / n;
    double sxx = 0.0, sxy = 0.0;
    for (std::size_t k = 0; k < lx.size(); ++k) {
        sxx += (lx[k] - mx) * (lx[k] - mx);
        sxy += (lx[k] - mx) * (ly[k] - my);
    }
    if (sxx == 0.0) throw FitWindowError("power-law fit needs distinct abscissae");
    FitResult fit;
    fit.model = "log y = slope * log x + intercept";
    fit.value = sxy / sxx;
    fit.intercept = my - fit.value * mx;
    double rss = 0.0;
    for (std::size_t k = 0; k < lx.size(); ++k) rss += std::pow(ly[k] - fit.intercept - fit.value * lx[k], 2);
    fit.standard_error = lx.size() > 2 ? std::sqrt(rss / (n - 2.0) / sxx) : 0.0;
    fit.points = lx.size();
    fit.residual_norm = std::sqrt(rss / n);
    fit.window_lo = *std::min_element(x.begin(), x.end());
    fit.window_hi = *std::max_element(x.begin(), x.end());
    return fit;
}

WaistScan scan_waist(const RetrievalProblem& problem, const std::vector<double>& w0_list,
                     const StudyOptions& options) {
    if (w0_list.empty()) throw InvalidArgument("empty waist list");
    for (std::size_t k = 0; k < w0_list.size(); ++k) {
        if (!(w0_list[k] > 0.0)) throw InvalidArgument("waists must be positive");
        if (k && !(w0_list[k] > w0_list[k - 1])) throw InvalidArgument("waists must be strictly increasing");
    }
    WaistScan scan;
    scan.n = problem.geometry().linear_size();
    scan.d = problem.geometry().lattice_constant();
    scan.model = problem.model();
    scan.points = parallel_map<WaistPoint>(w0_list.size(), options.workers, [&](std::size_t k) {
        WaistPoint p;
        p.w0 = w0_list[k];
        p.eta = 1.0 - evaluate_error(problem, p.w0, options.tolerance);
        p.epsilon = 1.0 - p.eta;
        p.clipping = clipping_term(scan.n, scan.d, p.w0);
        return p;
    });
    std::vector<double> eps;
    for (const auto& p : scan.points) eps.push_back(p.epsilon);
    scan.local_minima = count_local_minima(eps);
    return scan;
}

WaistScan scan_waist(int n, double d, const std::vector<double>& w0_list, Model model, const StudyOptions& options) {
    return scan_waist(RetrievalProblem(build_square_array(n, d), model), w0_list, options);
}

FitResult fit_error_model(const WaistScan& scan, double clip_fraction) {
    std::vector<double> w, c;
    double max_w = 0.0, min_w = 0.0;
    for (const auto& p : scan.points) {
        const double power = p.epsilon - p.clipping;
        if (p.clipping < clip_fraction * p.epsilon && power > 0.0) {
            if (w.empty()) min_w = p.w0;
            max_w = p.w0;
            w.push_back(p.w0);
            c.push_back(std::log(power * std::pow(p.w0, 4)));
        }
    }
    if (w.empty()) throw FitWindowError("no scan point has a clipping term below the window threshold");
    const double n = static_cast<double>(c.size());
    const double mean = std::accumulate(c.begin(), c.end(), 0.0) / n;
    double rss = 0.0;
    for (double v : c) rss += (v - mean) * (v - mean);
    FitResult fit;
    fit.model = "epsilon = C / w0^4 + 1 - erf^2(N d / (sqrt(2) w0))";
    fit.value = std::exp(mean);
    fit.standard_error = c.size() > 1 ? fit.value * std::sqrt(rss / (n - 1.0) / n) : 0.0;
    fit.window_lo = min_w;
    fit.window_hi = max_w;
    fit.points = c.size();
    fit.residual_norm = std::sqrt(rss / n);
    return fit;
}

FitResult fit_waist_slope(const WaistScan& scan, double clip_fraction) {
    std::vector<double> w, e;
    for (const auto& p : scan.points)
        if (p.clipping < clip_fraction * p.epsilon) {
            w.push_back(p.w0);
            e.push_back(p.epsilon);
        }
    if (w.size() < 2) throw FitWindowError("fewer than two points in the power-law window");
    return fit_power_law(w, e);
}

OptimalWaist optimal_waist(const RetrievalProblem& problem, double tolerance, const StudyOptions& options,
                           double model_c) {
    const int n = lattice_size(problem);
    const double d = problem.geometry().lattice_constant();
    if (!(tolerance > 0.0)) throw InvalidArgument("waist tolerance must be positive");

    OptimalWaist out;
    out.seed_w0 = golden_section([&](double w) { return error_model(model_c, n, d, w); }, 0.05 * n * d, 2.0 * n * d,
                                 1e-6);
    std::map<double, double> cache;
    auto f = [&](double w) {
        auto it = cache.find(w);
        if (it != cache.end()) return it->second;
        ++out.evaluations;
        return cache[w] = evaluate_error(problem, w, options.tolerance);
    };

    // Coarse bracket around the seed, widened until the minimum is interior.
    std::vector<double> grid;
    for (double r : {0.7, 0.85, 1.0, 1.18, 1.4}) grid.push_back(r * out.seed_w0);
    auto coarse = parallel_map<double>(grid.size(), options.workers,
                                       [&](std::size_t k) { return evaluate_error(problem, grid[k], options.tolerance); });
    out.evaluations += static_cast<int>(grid.size());
    for (int expand = 0; expand < 12; ++expand) {
        const auto best = std::min_element(coarse.begin(), coarse.end()) - coarse.begin();
        if (best != 0 && best + 1 != static_cast<long>(coarse.size())) break;
        if (best == 0) {
            grid.insert(grid.begin(), grid.front() / 1.2);
            coarse.insert(coarse.begin(), evaluate_error(problem, grid.front(), options.tolerance));
        } else {
            grid.push_back(grid.back() * 1.2);
            coarse.push_back(evaluate_error(problem, grid.back(), options.tolerance));
        }
        ++out.evaluations;
    }
    for (std::size_t k = 0; k < grid.size(); ++k) cache[grid[k]] = coarse[k];

    auto best = std::min_element(coarse.begin(), coarse.end()) - coarse.begin();
    double lo = grid[std::max<long>(best - 1, 0)];
    double hi = grid[std::min<long>(best + 1, static_cast<long>(grid.size()) - 1)];
    if (count_local_minima(coarse) != 1 || best == 0 || best + 1 == static_cast<long>(grid.size())) {
        out.fallback = true;
        const int points = 41;
        std::vector<double> fine(points);
        for (int k = 0; k < points; ++k) fine[k] = grid.front() + (grid.back() - grid.front()) * k / (points - 1);
        auto values = parallel_map<double>(fine.size(), options.workers, [&](std::size_t k) {
            return evaluate_error(problem, fine[k], options.tolerance);
        });
        out.evaluations += points;
        for (int k = 0; k < points; ++k) cache[fine[k]] = values[k];
        const auto fb = std::min_element(values.begin(), values.end()) - values.begin();
        lo = fine[std::max<long>(fb - 1, 0)];
        hi = fine[std::min<long>(fb + 1, points - 1)];
    }
    out.w0 = golden_section(f, lo, hi, tolerance);
    auto ev = problem.evaluate(DetectionMode(out.w0, 1.0, true, options.tolerance));
    ++out.evaluations;
    out.eta = ev.solution.eta_max;
    out.epsilon = 1.0 - out.eta;
    out.spin_wave = ev.solution.spin_wave;
    return out;
}

RetrievalProblem make_problem(const Geometry& geometry, Model model, std::uint64_t jitter_seed, bool& retried,
                              Contraction contraction) {
    retried = false;
    try {
        return RetrievalProblem(geometry, model, contraction);
    } catch (const DefectiveSpectrum&) {
        retried = true;
        const double scale = 1e-8 * (geometry.lattice_constant() > 0.0 ? geometry.lattice_constant() : 1.0);
        auto z = standard_normal_displacements(geometry.size(), jitter_seed);
        for (auto& v : z) v *= scale;
        return RetrievalProblem(apply_displacements(geometry, z), model, contraction);
    }
}

HoleStudy hole_study(int n, double d, double w0, const std::vector<int>& hole_counts, int samples_per_count,
                     std::uint64_t seed, const StudyOptions& options) {
    if (samples_per_count < 1) throw InvalidArgument("need at least one sample per hole count");
    const int sites = n * n;
    for (int h : hole_counts)
        if (h < 0 || 5 * h > sites) throw InvalidArgument("hole counts must lie in [0, 20% of the sites]");

    HoleStudy study;
    study.n = n;
    study.d = d;
    study.w0 = w0;
    study.seed = seed;
    const Geometry perfect = build_square_array(n, d);
    const DetectionMode mode(w0, 1.0, true, options.tolerance);
    const RetrievalProblem base(perfect, Model::TwoLevel);
    const auto base_eval = base.evaluate(mode);
    study.eta_perfect = base_eval.solution.eta_max;
    const Eigen::VectorXd intensity = base_eval.samples.values.cwiseAbs2();
    const double total_intensity = intensity.sum();

    struct Outcome {
        HoleSample sample;
        bool retried = false;
    };
    const std::size_t per = static_cast<std::size_t>(samples_per_count);
    auto outcomes = parallel_map<Outcome>(hole_counts.size() * per, options.workers, [&](std::size_t task) {
        Outcome o;
        HoleSample& s = o.sample;
        s.holes = hole_counts[task / per];
        s.sample = static_cast<int>(task % per);
        s.seed = derive_seed(seed, (static_cast<std::uint64_t>(s.holes) << 32) | static_cast<std::uint64_t>(s.sample));
        if (s.holes == 0) {
            s.eta = study.eta_perfect;
            return o;
        }
        const auto holes = random_holes(sites, s.holes, s.seed);
        double lost = 0.0;
        for (int site : holes) lost += intensity[site];
        s.intensity_fraction = lost / total_intensity;
        const auto problem = make_problem(remove_holes(perfect, holes), Model::TwoLevel, s.seed, o.retried);
        s.eta = problem.evaluate(mode).solution.eta_max;
        s.relative_loss = 1.0 - s.eta / study.eta_perfect;
        return o;
    });

    std::vector<double> x, y;
    for (const auto& o : outcomes) {
        study.samples.push_back(o.sample);
        if (o.retried) ++study.jitter_retries;
        const double excess = o.sample.eta - study.eta_perfect;
        if (excess > 1e-10) ++study.violations;
        study.worst_excess = std::max(study.worst_excess, excess);
        x.push_back(o.sample.intensity_fraction);
        y.push_back(o.sample.relative_loss);
    }
    study.alpha = fit_through_origin(x, y);
    return study;
}

DisorderStudy position_disorder_study(const std::vector<int>& sizes, double d, const std::vector<double>& sigmas,
                                      int samples_per_sigma, std::uint64_t seed, const std::vector<double>& w0_list,
                                      const StudyOptions& options) {
    if (samples_per_sigma < 1) throw InvalidArgument("need at least one sample per sigma");
    if (!w0_list.empty() && w0_list.size() != sizes.size()) throw InvalidArgument("one waist per array size required");
    for (std::size_t k = 0; k < sigmas.size(); ++k) {
        if (!(sigmas[k] >= 0.0)) throw InvalidArgument("sigma must be non-negative");
        if (k && !(sigmas[k] > sigmas[k - 1])) throw InvalidArgument("sigmas must be strictly increasing");
    }

    DisorderStudy study;
    study.d = d;
    study.seed = seed;
    study.sizes = sizes;
    for (std::size_t si = 0; si < sizes.size(); ++si) {
        const int n = sizes[si];
        const Geometry perfect = build_square_array(n, d);
        const RetrievalProblem base(perfect, Model::TwoLevel);
        double w0 = 0.0;
        Eigen::VectorXcd spin_wave;
        double eta = 0.0;
        if (w0_list.empty()) {
            const auto opt = optimal_waist(base, 1e-3, options);
            w0 = opt.w0;
            spin_wave = opt.spin_wave;
            eta = opt.eta;
        } else {
            w0 = w0_list[si];
            const auto ev = base.evaluate(DetectionMode(w0, 1.0, true, options.tolerance));
            spin_wave = ev.solution.spin_wave;
            eta = ev.solution.eta_max;
        }
        study.w0.push_back(w0);
        study.eta_perfect.push_back(eta);
        const DetectionMode mode(w0, 1.0, true, options.tolerance);

        struct Outcome {
            double eta = 0.0;
            bool retried = false;
        };
        const std::size_t per = static_cast<std::size_t>(samples_per_sigma);
        auto outcomes = parallel_map<Outcome>(sigmas.size() * per, options.workers, [&](std::size_t task) {
            Outcome o;
            const double sigma = sigmas[task / per];
            const std::size_t config = task % per;
            if (sigma == 0.0) {
                o.eta = eta;
                return o;
            }
            const double sign = config % 2 == 0 ? 1.0 : -1.0;
            auto z = standard_normal_displacements(n * n, derive_seed(seed, config / 2));
            for (auto& v : z) v *= sign * sigma;
            const Geometry g = apply_displacements(perfect, z);
            const auto problem = make_problem(g, Model::TwoLevel, derive_seed(~seed, task), o.retried);
            const auto samples = sample_mode(mode, problem.geometry(), Model::TwoLevel);
            o.eta = efficiency_of_spin_wave(k_matrix(problem.decomposition(), samples), spin_wave);
            return o;
        });

        std::vector<double> fit_sigma, fit_loss;
        for (std::size_t k = 0; k < sigmas.size(); ++k) {
            DisorderPoint p;
            p.n = n;
            p.sigma = sigmas[k];
            p.samples = samples_per_sigma;
            // Antithetic pairs are averaged first; the pair means are independent.
            std::vector<double> units;
            double sum = 0.0;
            for (std::size_t c = 0; c < per; ++c) {
                const auto& o = outcomes[k * per + c];
                if (o.retried) ++study.jitter_retries;
                sum += o.eta;
                if (c % 2 == 1) units.push_back(0.5 * (outcomes[k * per + c - 1].eta + o.eta));
            }
            if (per % 2 == 1) units.push_back(outcomes[k * per + per - 1].eta);
            p.eta_mean = sum / static_cast<double>(per);
            p.loss = eta - p.eta_mean;
            if (units.size() > 1) {
                const double m = std::accumulate(units.begin(), units.end(), 0.0) / static_cast<double>(units.size());
                double var = 0.0;
                for (double u : units) var += (u - m) * (u - m);
                var /= static_cast<double>(units.size() - 1);
                p.standard_error = std::sqrt(var / static_cast<double>(units.size()));
            }
            if (p.sigma > 0.0 && p.loss > 0.0) {
                fit_sigma.push_back(p.sigma);
                fit_loss.push_back(p.loss);
            }
            study.points.push_back(p);
        }
        FitResult slope;
        if (fit_sigma.size() >= 2) slope = fit_power_law(fit_sigma, fit_loss);
        else slope.model = "insufficient points";
        study.slopes.push_back(slope);
    }
    return study;
}

IsotropicComparison isotropic_comparison(const std::vector<int>& sizes, double d, Contraction contraction,
                                         const StudyOptions& options) {
    IsotropicComparison cmp;
    cmp.d = d;
    cmp.contraction = contraction;
    std::vector<double> atoms, eps_tl, eps_iso;
    for (int n : sizes) {
        const Geometry g = build_square_array(n, d);
        const auto tl = optimal_waist(RetrievalProblem(g, Model::TwoLevel), 1e-3, options);
        const auto iso = optimal_waist(RetrievalProblem(g, Model::Isotropic, contraction), 1e-3, options);
        IsotropicRow row;
        row.n = n;
        row.w0_two_level = tl.w0;
        row.epsilon_two_level = tl.epsilon;
        row.w0_isotropic = iso.w0;
        row.epsilon_isotropic = iso.epsilon;
        row.relative_increase = (iso.epsilon - tl.epsilon) / tl.epsilon;
        row.waist_ratio = iso.w0 / tl.w0;
        cmp.rows.push_back(row);
        atoms.push_back(static_cast<double>(n) * n);
        eps_tl.push_back(tl.epsilon);
        eps_iso.push_back(iso.epsilon);
    }
    if (sizes.size() >= 2) {
        cmp.exponent_two_level = fit_power_law(atoms, eps_tl);
        cmp.exponent_isotropic = fit_power_law(atoms, eps_iso);
    }
    return cmp;
}

void write_csv(std::ostream& out, const WaistScan& scan, const std::string& comment) {
    CsvWriter csv(out, {"w0", "eta", "epsilon", "clipping_term"});
    if (!comment.empty()) csv.comment(comment);
    for (const auto& p : scan.points) csv.row({p.w0, p.eta, p.epsilon, p.clipping});
}

void write_csv(std::ostream& out, const HoleStudy& study, const std::string& comment) {
    CsvWriter csv(out, {"holes", "sample", "seed", "intensity_fraction", "eta", "relative_loss"});
    if (!comment.empty()) csv.comment(comment);
    for (const auto& s : study.samples)
        csv.cells({str(s.holes), str(s.sample), std::to_string(s.seed), format_double(s.intensity_fraction),
                   format_double(s.eta), format_double(s.relative_loss)});
}

void write_csv(std::ostream& out, const DisorderStudy& study, const std::string& comment) {
    CsvWriter csv(out, {"N", "sigma", "sigma_over_d", "samples", "eta_mean", "loss", "standard_error"});
    if (!comment.empty()) csv.comment(comment);
    for (const auto& p : study.points)
        csv.cells({str(p.n), format_double(p.sigma), format_double(p.sigma / study.d), str(p.samples),
                   format_double(p.eta_mean), format_double(p.loss), format_double(p.standard_error)});
}

void write_csv(std::ostream& out, const IsotropicComparison& cmp, const std::string& comment) {
    CsvWriter csv(out, {"N", "w0_two_level", "epsilon_two_level", "w0_isotropic", "epsilon_isotropic",
                        "relative_increase", "waist_ratio"});
    if (!comment.empty()) csv.comment(comment);
    for (const auto& r : cmp.rows)
        csv.cells({str(r.n), format_double(r.w0_two_level), format_double(r.epsilon_two_level),
                   format_double(r.w0_isotropic), format_double(r.epsilon_isotropic),
                   format_double(r.relative_increase), format_double(r.waist_ratio)});
}

void to_json(nlohmann::json& j, const FitResult& fit) {
    j = {{"model", fit.model},
         {"value", fit.value},
         {"standard_error", fit.standard_error},
         {"intercept", fit.intercept},
         {"window", {fit.window_lo, fit.window_hi}},
         {"points", fit.points},
         {"residual_norm", fit.residual_norm}};
}

nlohmann::json summary_json(const WaistScan& scan) {
    nlohmann::json j = {{"N", scan.n},
                        {"d", scan.d},
                        {"model", std::string(to_string(scan.model))},
                        {"points", scan.points.size()},
                        {"local_minima", scan.local_minima},
                        {"unimodal", scan.unimodal()}};
    if (!scan.points.empty()) {
        const auto best = std::min_element(scan.points.begin(), scan.points.end(),
                                           [](const auto& a, const auto& b) { return a.epsilon < b.epsilon; });
        j["best"] = {{"w0", best->w0}, {"epsilon", best->epsilon}};
    }
    try {
        j["fit_C"] = fit_error_model(scan);
        j["fit_slope"] = fit_waist_slope(scan);
    } catch (const FitWindowError& e) {
        j["fit_error"] = e.what();
    }
    return j;
}

nlohmann::json summary_json(const OptimalWaist& opt) {
    return {{"w0", opt.w0},
            {"epsilon", opt.epsilon},
            {"eta", opt.eta},
            {"seed_w0", opt.seed_w0},
            {"evaluations", opt.evaluations},
            {"fallback_grid", opt.fallback},
            {"spin_wave", complex_to_json(opt.spin_wave)}};
}

nlohmann::json summary_json(const HoleStudy& study) {
    return {{"N", study.n},
            {"d", study.d},
            {"w0", study.w0},
            {"seed", study.seed},
            {"eta_perfect", study.eta_perfect},
            {"samples", study.samples.size()},
            {"alpha", study.alpha},
            {"violations", study.violations},
            {"worst_excess", study.worst_excess},
            {"jitter_retries", study.jitter_retries}};
}

nlohmann::json summary_json(const DisorderStudy& study) {
    nlohmann::json sizes = nlohmann::json::array();
    for (std::size_t k = 0; k < study.sizes.size(); ++k)
        sizes.push_back({{"N", study.sizes[k]},
                         {"w0", study.w0[k]},
                         {"eta_perfect", study.eta_perfect[k]},
                         {"slope", study.slopes[k]}});
    return {{"d", study.d}, {"seed", study.seed}, {"sizes", sizes}, {"jitter_retries", study.jitter_retries}};
}

nlohmann::json summary_json(const IsotropicComparison& cmp) {
    nlohmann::json rows = nlohmann::json::array();
    for (const auto& r : cmp.rows)
        rows.push_back({{"N", r.n},
                        {"relative_increase", r.relative_increase},
                        {"waist_ratio", r.waist_ratio},
                        {"epsilon_two_level", r.epsilon_two_level},
                        {"epsilon_isotropic", r.epsilon_isotropic}});
    nlohmann::json j = {{"d", cmp.d},
                        {"contraction", cmp.contraction == Contraction::Full ? "full" : "x-only"},
                        {"rows", rows}};
    if (cmp.rows.size() >= 2) {
        j["exponent_two_level"] = cmp.exponent_two_level;
        j["exponent_isotropic"] = cmp.exponent_isotropic;
    }
    return j;
}

} // namespace arraymem
