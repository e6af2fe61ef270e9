#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <random>

#include "arraymem/error.hpp"
#include "arraymem/spectral.hpp"

using namespace arraymem;

namespace {

void check_identities(const SpectralDecomposition& dec, const InteractionMatrix& m) {
    CHECK(dec.bilinear_condition < 1e-8);
    CHECK(dec.completeness_residual < 1e-8);
    CHECK(dec.min_decay > -1e-10);
    CHECK(dec.trace_residual < 1e-9);
    const double scale = m.entries.cwiseAbs().maxCoeff();
    CHECK((reconstruct(dec) - m.entries).cwiseAbs().maxCoeff() < 1e-9 * scale);
    for (int a = 0; a < dec.size(); ++a) {
        Eigen::Index k = 0;
        dec.eigenvectors.col(a).cwiseAbs().maxCoeff(&k);
        CHECK(dec.eigenvectors(k, a).real() >= 0.0);
    }
}

} // namespace

TEST_CASE("single atom") {
    auto m = interaction_matrix(build_square_array(1, 0.6), Model::TwoLevel);
    auto dec = eigendecompose(m);
    REQUIRE(dec.size() == 1);
    CHECK(std::abs(dec.eigenvalues[0] - cdouble(0.0, 0.5)) < 1e-15);
    CHECK(std::abs(dec.eigenvectors(0, 0) - 1.0) < 1e-15);
}

TEST_CASE("two atoms split into symmetric and antisymmetric modes") {
    auto g = geometry_from_points({Vec3(-0.25, 0, 0), Vec3(0.25, 0, 0)}, {Vec3::UnitX(), Vec3::UnitX()});
    auto m = interaction_matrix(g, Model::TwoLevel);
    auto dec = eigendecompose(m);
    const cdouble m12 = m.entries(0, 1);
    const double r = 1.0 / std::sqrt(2.0);
    int found = 0;
    for (int a = 0; a < 2; ++a) {
        const cdouble lambda = dec.eigenvalues[a];
        const Eigen::Vector2cd v = dec.eigenvectors.col(a);
        if (std::abs(lambda - (cdouble(0, 0.5) + m12)) < 1e-13) {
            CHECK(std::abs(v[0] - r) < 1e-13);
            CHECK(std::abs(v[1] - r) < 1e-13);
            ++found;
        } else if (std::abs(lambda - (cdouble(0, 0.5) - m12)) < 1e-13) {
            CHECK(std::abs(std::abs(v[0]) - r) < 1e-13);
            CHECK(std::abs(v[0] + v[1]) < 1e-13);
            ++found;
        }
    }
    CHECK(found == 2);
}

TEST_CASE("identities for perfect, defective and disordered arrays") {
    std::vector<Geometry> cases = {
        build_square_array(10, 0.6),
        remove_holes(build_square_array(8, 0.6), random_holes(64, 9, 3)),
        apply_position_disorder(build_square_array(7, 0.5), 0.04, 17),
    };
    for (const auto& g : cases) {
        auto m = interaction_matrix(g, Model::TwoLevel);
        check_identities(eigendecompose(m), m);
    }
    auto iso = interaction_matrix(build_square_array(4, 0.6), Model::Isotropic);
    auto dec = eigendecompose(iso);
    CHECK(dec.size() == 48);
    CHECK(dec.model == Model::Isotropic);
    check_identities(dec, iso);
}

TEST_CASE("symmetric lattices produce degenerate clusters that are still orthonormal") {
    // The fourfold-symmetric isotropic problem has doubly degenerate E-type modes.
    auto g = build_square_array(4, 0.55).with_dipoles(Vec3::UnitZ());
    auto m = interaction_matrix(g, Model::TwoLevel);
    auto dec = eigendecompose(m);
    CHECK(dec.degenerate_clusters > 0);
    check_identities(dec, m);
}

TEST_CASE("eigenvalues do not depend on atom labels") {
    auto g = apply_position_disorder(build_square_array(5, 0.6), 0.03, 8);
    std::vector<Vec3> pos = g.positions();
    std::mt19937_64 rng(4);
    std::shuffle(pos.begin(), pos.end(), rng);
    auto shuffled = geometry_from_points(pos, std::vector<Vec3>(pos.size(), Vec3::UnitX()));
    auto a = eigendecompose(interaction_matrix(g, Model::TwoLevel)).eigenvalues;
    auto b = eigendecompose(interaction_matrix(shuffled, Model::TwoLevel)).eigenvalues;
    auto key = [](cdouble x, cdouble y) { return x.real() < y.real(); };
    std::vector<cdouble> va(a.data(), a.data() + a.size()), vb(b.data(), b.data() + b.size());
    std::sort(va.begin(), va.end(), key);
    std::sort(vb.begin(), vb.end(), key);
    for (std::size_t k = 0; k < va.size(); ++k) CHECK(std::abs(va[k] - vb[k]) < 1e-10);
}

TEST_CASE("input validation and defective spectra") {
    InteractionMatrix asym;
    asym.entries = Eigen::MatrixXcd::Zero(2, 2);
    asym.entries(0, 1) = 1.0;
    CHECK_THROWS_AS(eigendecompose(asym), InvalidArgument);

    InteractionMatrix nan;
    nan.entries = Eigen::MatrixXcd::Constant(1, 1, cdouble(std::nan(""), 0.0));
    CHECK_THROWS_AS(eigendecompose(nan), InvalidArgument);

    // Complex-symmetric Jordan block: its only eigenvector (1, i) is self-orthogonal.
    InteractionMatrix jordan;
    jordan.entries.resize(2, 2);
    jordan.entries << 1.0, cdouble(0, 1), cdouble(0, 1), -1.0;
    try {
        eigendecompose(jordan);
        FAIL("expected a defective spectrum");
    } catch (const DefectiveSpectrum& e) {
        CHECK_FALSE(e.indices().empty());
    }
}

TEST_CASE("describe lists diagnostics") {
    auto dec = eigendecompose(interaction_matrix(build_square_array(2, 0.6), Model::TwoLevel));
    const auto text = describe(dec);
    CHECK(text.find("bilinear_condition") != std::string::npos);
    CHECK(text.find("size=4") != std::string::npos);
}
