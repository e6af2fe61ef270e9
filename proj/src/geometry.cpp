#include "arraymem/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <random>
#include <string>

#include <nlohmann/json.hpp>

#include "arraymem/error.hpp"

namespace arraymem {

namespace {

constexpr double kMinSeparation = 1e-9;

} // namespace

Model model_from_string(std::string_view name) {
    if (name == "two-level" || name == "two_level" || name == "tl") return Model::TwoLevel;
    if (name == "isotropic" || name == "iso") return Model::Isotropic;
    throw InvalidArgument("unknown model '" + std::string(name) + "'");
}

int Geometry::atom_of_site(int site) const {
    if (site < 0 || site >= site_count()) throw InvalidArgument("site index out of range");
    auto it = std::lower_bound(site_of_atom_.begin(), site_of_atom_.end(), site);
    if (it == site_of_atom_.end() || *it != site) return -1;
    return static_cast<int>(it - site_of_atom_.begin());
}

double Geometry::min_separation() const {
    double best = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < positions_.size(); ++i)
        for (std::size_t j = i + 1; j < positions_.size(); ++j)
            best = std::min(best, (positions_[i] - positions_[j]).norm());
    return best;
}

void Geometry::validate() const {
    if (dipoles_.size() != positions_.size())
        throw InvalidArgument("dipole count does not match atom count");
    for (const auto& dp : dipoles_)
        if (std::abs(dp.norm() - 1.0) > 1e-12) throw InvalidArgument("dipole orientation is not a unit vector");
    if (linear_size_ > 0 &&
        static_cast<int>(positions_.size()) != site_count() - static_cast<int>(holes_.size()))
        throw InvalidArgument("atom count does not match lattice minus holes");
    if (positions_.size() > 1 && min_separation() <= kMinSeparation)
        throw SingularGeometry("atoms closer than 1e-9 wavelengths");
}

Geometry Geometry::with_dipoles(const Vec3& orientation) const {
    if (orientation.norm() == 0.0) throw InvalidArgument("zero dipole orientation");
    Geometry out = *this;
    std::fill(out.dipoles_.begin(), out.dipoles_.end(), orientation.normalized());
    return out;
}

Geometry build_square_array(int n, double d) {
    if (n < 1) throw InvalidArgument("array size N must be positive");
    if (!(d > 0.0) || !std::isfinite(d)) throw InvalidArgument("lattice constant d must be positive");
    Geometry g;
    g.linear_size_ = n;
    g.lattice_constant_ = d;
    const double centre = 0.5 * (n - 1);
    g.positions_.reserve(static_cast<std::size_t>(n) * n);
    for (int ix = 0; ix < n; ++ix)
        for (int iy = 0; iy < n; ++iy)
            g.positions_.emplace_back((ix - centre) * d, (iy - centre) * d, 0.0);
    g.dipoles_.assign(g.positions_.size(), Vec3::UnitX());
    g.site_of_atom_.resize(g.positions_.size());
    std::iota(g.site_of_atom_.begin(), g.site_of_atom_.end(), 0);
    return g;
}

Geometry remove_holes(const Geometry& g, const std::vector<int>& holes) {
    std::vector<int> sorted = holes;
    std::sort(sorted.begin(), sorted.end());
    if (std::adjacent_find(sorted.begin(), sorted.end()) != sorted.end())
        throw InvalidArgument("hole indices must be distinct");
    const int sites = g.linear_size_ > 0 ? g.site_count() : g.size();
    for (int h : sorted)
        if (h < 0 || h >= sites) throw InvalidArgument("hole index " + std::to_string(h) + " out of range");

    Geometry out;
    out.linear_size_ = g.linear_size_;
    out.lattice_constant_ = g.lattice_constant_;
    out.sigma_ = g.sigma_;
    out.seed_ = g.seed_;
    std::merge(g.holes_.begin(), g.holes_.end(), sorted.begin(), sorted.end(), std::back_inserter(out.holes_));
    if (std::adjacent_find(out.holes_.begin(), out.holes_.end()) != out.holes_.end())
        throw InvalidArgument("site is already a hole");
    for (int a = 0; a < g.size(); ++a) {
        const int site = g.site_of_atom_[a];
        if (std::binary_search(sorted.begin(), sorted.end(), site)) continue;
        out.positions_.push_back(g.positions_[a]);
        out.dipoles_.push_back(g.dipoles_[a]);
        out.site_of_atom_.push_back(site);
    }
    if (static_cast<int>(out.positions_.size()) != g.size() - static_cast<int>(sorted.size()))
        throw InvalidArgument("hole index refers to a site that is already empty");
    return out;
}

std::vector<Vec3> standard_normal_displacements(int count, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> normal(0.0, 1.0);
    std::vector<Vec3> out(static_cast<std::size_t>(count));
    for (auto& v : out) {
        const double dx = normal(rng);
        const double dy = normal(rng);
        v = Vec3(dx, dy, 0.0);
    }
    return out;
}

Geometry apply_displacements(const Geometry& g, const std::vector<Vec3>& displacements) {
    if (static_cast<int>(displacements.size()) != g.size())
        throw InvalidArgument("one displacement per atom required");
    Geometry out = g;
    for (int a = 0; a < g.size(); ++a) {
        out.positions_[a].x() += displacements[a].x();
        out.positions_[a].y() += displacements[a].y();
    }
    return out;
}

Geometry apply_position_disorder(const Geometry& g, double sigma, std::uint64_t seed) {
    if (!(sigma >= 0.0)) throw InvalidArgument("disorder sigma must be non-negative");
    Geometry out = g;
    out.sigma_ = sigma;
    out.seed_ = seed;
    if (sigma == 0.0) return out;
    auto z = standard_normal_displacements(g.size(), seed);
    for (int a = 0; a < g.size(); ++a) {
        out.positions_[a].x() += sigma * z[a].x();
        out.positions_[a].y() += sigma * z[a].y();
    }
    return out;
}

Geometry geometry_from_points(std::vector<Vec3> positions, std::vector<Vec3> dipoles) {
    if (dipoles.size() != positions.size()) throw InvalidArgument("dipole count does not match atom count");
    Geometry g;
    g.positions_ = std::move(positions);
    g.dipoles_.reserve(dipoles.size());
    for (const auto& dp : dipoles) {
        if (dp.norm() == 0.0) throw InvalidArgument("zero dipole orientation");
        g.dipoles_.push_back(dp.normalized());
    }
    g.site_of_atom_.resize(g.positions_.size());
    std::iota(g.site_of_atom_.begin(), g.site_of_atom_.end(), 0);
    return g;
}

std::uint64_t derive_seed(std::uint64_t base, std::uint64_t stream) {
    std::uint64_t z = base + 0x9e3779b97f4a7c15ULL * (stream + 1);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

std::vector<int> random_holes(int site_count, int count, std::uint64_t seed) {
    if (count < 0 || count > site_count) throw InvalidArgument("hole count out of range");
    std::vector<int> sites(static_cast<std::size_t>(site_count));
    std::iota(sites.begin(), sites.end(), 0);
    std::mt19937_64 rng(seed);
    // Partial Fisher-Yates: the first `count` entries are a uniform sample.
    for (int i = 0; i < count; ++i) {
        std::uniform_int_distribution<int> pick(i, site_count - 1);
        std::swap(sites[i], sites[pick(rng)]);
    }
    sites.resize(static_cast<std::size_t>(count));
    std::sort(sites.begin(), sites.end());
    return sites;
}

void to_json(nlohmann::json& j, const Geometry& g) {
    j = nlohmann::json::object();
    j["N"] = g.linear_size();
    j["d"] = g.lattice_constant();
    j["holes"] = g.holes();
    j["sigma"] = g.sigma();
    if (g.disorder_seed()) j["seed"] = *g.disorder_seed();
    else j["seed"] = nullptr;
    auto& pos = j["positions"] = nlohmann::json::array();
    for (const auto& p : g.positions()) pos.push_back({p.x(), p.y(), p.z()});
}

Geometry geometry_from_json(const nlohmann::json& j) {
    for (const auto& [key, _] : j.items())
        if (key != "N" && key != "d" && key != "holes" && key != "sigma" && key != "seed" && key != "positions")
            throw InvalidArgument("unknown geometry key '" + key + "'");
    Geometry g = build_square_array(j.at("N").get<int>(), j.at("d").get<double>());
    if (j.contains("holes")) g = remove_holes(g, j["holes"].get<std::vector<int>>());
    const double sigma = j.value("sigma", 0.0);
    if (j.contains("seed") && !j["seed"].is_null())
        g = apply_position_disorder(g, sigma, j["seed"].get<std::uint64_t>());
    else if (sigma != 0.0)
        throw InvalidArgument("disordered geometry requires a seed");
    if (j.contains("positions") && !j["positions"].is_null()) {
        const auto& pos = j["positions"];
        if (static_cast<int>(pos.size()) != g.size())
            throw InvalidArgument("positions do not match lattice metadata");
        for (std::size_t a = 0; a < pos.size(); ++a) {
            const auto xyz = pos[a].get<std::vector<double>>();
            if (xyz.size() != 3) throw InvalidArgument("position must have 3 components");
            if (xyz[2] != g.positions_[a].z()) throw InvalidArgument("positions must lie in the lattice plane");
            g.positions_[a] = Vec3(xyz[0], xyz[1], xyz[2]);
        }
    }
    g.validate();
    return g;
}

} // namespace arraymem
