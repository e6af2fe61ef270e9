#include "arraymem/greens.hpp"

#include <array>
#include <bit>
#include <cstdint>
#include <cstring>
#include <istream>
#include <ostream>

#include "arraymem/error.hpp"

namespace arraymem {

namespace {

constexpr double kCoupling = 3.0 * std::numbers::pi / kWaveNumber;
constexpr double kMinSeparation = 1e-9;

static_assert(std::endian::native == std::endian::little, "binary dump assumes a little-endian host");

template <typename T>
void put(std::ostream& out, T value) {
    out.write(reinterpret_cast<const char*>(&value), sizeof(T));
}

template <typename T>
T get(std::istream& in) {
    T value{};
    in.read(reinterpret_cast<char*>(&value), sizeof(T));
    if (!in) throw InvalidArgument("truncated interaction matrix dump");
    return value;
}

} // namespace

GreensTensor greens_tensor(const Vec3& r, const Vec3& r_prime) {
    const Vec3 sep = r - r_prime;
    const double dist = sep.norm();
    if (dist < kMinSeparation) throw SingularPoint("Green's tensor evaluated at coincident points");
    const double kr = kWaveNumber * dist;
    const cdouble i(0.0, 1.0);
    const cdouble phase = std::exp(i * kr) / (4.0 * std::numbers::pi * dist);
    const cdouble transverse = 1.0 + (i * kr - 1.0) / (kr * kr);
    const cdouble longitudinal = (3.0 - 3.0 * i * kr - kr * kr) / (kr * kr);
    const Vec3 unit = sep / dist;
    GreensTensor g = longitudinal * (unit * unit.transpose()).cast<cdouble>();
    g.diagonal().array() += transverse;
    return phase * g;
}

InteractionMatrix interaction_matrix(const Geometry& g, Model model) {
    if (g.size() > 1 && g.min_separation() < kMinSeparation)
        throw SingularGeometry("duplicate atom positions");
    const int n = g.size();
    const auto& pos = g.positions();
    const cdouble self(0.0, 0.5);
    InteractionMatrix m;
    m.model = model;
    if (model == Model::TwoLevel) {
        const auto& dip = g.dipoles();
        m.entries.resize(n, n);
        for (int j = 0; j < n; ++j) {
            m.entries(j, j) = self;
            for (int l = j + 1; l < n; ++l) {
                const GreensTensor gt = greens_tensor(pos[j], pos[l]);
                // Dipoles are real, so d_j^* = d_j.
                const cdouble v = kCoupling * dip[j].cast<cdouble>().dot(gt * dip[l].cast<cdouble>());
                m.entries(j, l) = v;
                m.entries(l, j) = v;
            }
        }
    } else {
        m.entries.resize(3 * n, 3 * n);
        for (int j = 0; j < n; ++j) {
            m.entries.block<3, 3>(3 * j, 3 * j) = self * Eigen::Matrix3cd::Identity();
            for (int l = j + 1; l < n; ++l) {
                GreensTensor gt = kCoupling * greens_tensor(pos[j], pos[l]);
                // Symmetrize so M == M^T holds bitwise.
                gt = (0.5 * (gt + gt.transpose())).eval();
                m.entries.block<3, 3>(3 * j, 3 * l) = gt;
                m.entries.block<3, 3>(3 * l, 3 * j) = gt.transpose();
            }
        }
    }
    return m;
}

void write_interaction_matrix(std::ostream& out, const InteractionMatrix& m) {
    out.write("AMIM", 4);
    put<std::uint32_t>(out, 1);
    put<std::uint32_t>(out, m.model == Model::TwoLevel ? 0u : 1u);
    put<std::uint64_t>(out, static_cast<std::uint64_t>(m.size()));
    for (int r = 0; r < m.size(); ++r)
        for (int c = 0; c < m.size(); ++c) {
            put<double>(out, m.entries(r, c).real());
            put<double>(out, m.entries(r, c).imag());
        }
}

InteractionMatrix read_interaction_matrix(std::istream& in) {
    std::array<char, 4> magic{};
    in.read(magic.data(), 4);
    if (!in || std::memcmp(magic.data(), "AMIM", 4) != 0) throw InvalidArgument("not an interaction matrix dump");
    if (get<std::uint32_t>(in) != 1) throw InvalidArgument("unsupported dump version");
    const auto model = get<std::uint32_t>(in);
    if (model > 1) throw InvalidArgument("unknown model tag in dump");
    const auto size = get<std::uint64_t>(in);
    InteractionMatrix m;
    m.model = model == 0 ? Model::TwoLevel : Model::Isotropic;
    m.entries.resize(static_cast<Eigen::Index>(size), static_cast<Eigen::Index>(size));
    for (std::uint64_t r = 0; r < size; ++r)
        for (std::uint64_t c = 0; c < size; ++c) {
            const double re = get<double>(in);
            const double im = get<double>(in);
            m.entries(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)) = cdouble(re, im);
        }
    return m;
}

} // namespace arraymem
