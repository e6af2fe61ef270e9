#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <numeric>

#include <nlohmann/json.hpp>

#include "arraymem/error.hpp"
#include "arraymem/geometry.hpp"

using namespace arraymem;

TEST_CASE("square array layout") {
    auto one = build_square_array(1, 0.6);
    REQUIRE(one.size() == 1);
    CHECK(one.positions()[0].norm() == 0.0);

    auto two = build_square_array(2, 0.6);
    REQUIRE(two.size() == 4);
    for (const auto& p : two.positions()) {
        CHECK(std::abs(std::abs(p.x()) - 0.3) < 1e-15);
        CHECK(std::abs(std::abs(p.y()) - 0.3) < 1e-15);
        CHECK(p.z() == 0.0);
    }

    auto ten = build_square_array(10, 0.6);
    CHECK(ten.size() == 100);
    double max_coord = 0.0;
    for (const auto& p : ten.positions()) max_coord = std::max(max_coord, p.cwiseAbs().maxCoeff());
    CHECK(max_coord == doctest::Approx(2.7).epsilon(1e-14));
    CHECK(ten.min_separation() == doctest::Approx(0.6));
    for (const auto& dp : ten.dipoles()) CHECK(dp == Vec3::UnitX());
    // site = ix * N + iy
    CHECK(ten.positions()[1].x() == ten.positions()[0].x());
    CHECK(ten.positions()[10].y() == ten.positions()[0].y());
    CHECK_NOTHROW(ten.validate());
}

TEST_CASE("invalid lattice parameters") {
    CHECK_THROWS_AS(build_square_array(0, 0.6), InvalidArgument);
    CHECK_THROWS_AS(build_square_array(3, 0.0), InvalidArgument);
    CHECK_THROWS_AS(build_square_array(3, -1.0), InvalidArgument);
}

TEST_CASE("holes") {
    auto g = build_square_array(10, 0.6);
    auto same = remove_holes(g, {});
    CHECK(same.positions() == g.positions());

    auto holes = random_holes(100, 20, 7);
    auto h = remove_holes(g, holes);
    CHECK(h.size() == 80);
    CHECK(h.holes() == holes);
    for (int s : holes) CHECK(h.atom_of_site(s) == -1);
    for (int a = 0; a < h.size(); ++a) CHECK(h.atom_of_site(h.site_of_atom()[a]) == a);
    CHECK_NOTHROW(h.validate());

    CHECK_THROWS_AS(remove_holes(g, {3, 3}), InvalidArgument);
    CHECK_THROWS_AS(remove_holes(h, {holes[0]}), InvalidArgument);
    CHECK_THROWS_AS(remove_holes(g, {100}), InvalidArgument);
    CHECK_THROWS_AS(remove_holes(g, {-1}), InvalidArgument);
}

TEST_CASE("random holes are distinct, sorted and reproducible") {
    auto a = random_holes(100, 20, 42);
    auto b = random_holes(100, 20, 42);
    CHECK(a == b);
    CHECK(std::is_sorted(a.begin(), a.end()));
    CHECK(std::adjacent_find(a.begin(), a.end()) == a.end());
    CHECK(a != random_holes(100, 20, 43));
    CHECK(random_holes(5, 5, 1) == std::vector<int>{0, 1, 2, 3, 4});
    CHECK_THROWS_AS(random_holes(5, 6, 1), InvalidArgument);
}

TEST_CASE("build, remove, rebuild round trip") {
    auto g = build_square_array(6, 0.7);
    auto once = remove_holes(g, {0, 17});
    auto j = nlohmann::json(once);
    auto again = geometry_from_json(j);
    CHECK(again.positions() == once.positions());
    CHECK(again.holes() == once.holes());
    CHECK(again.site_of_atom() == once.site_of_atom());
}

TEST_CASE("position disorder") {
    auto g = build_square_array(10, 0.6);
    auto zero = apply_position_disorder(g, 0.0, 99);
    CHECK(zero.positions() == g.positions());

    auto a = apply_position_disorder(g, 0.03, 5);
    auto b = apply_position_disorder(g, 0.03, 5);
    CHECK(a.positions() == b.positions());
    CHECK(a.positions() != apply_position_disorder(g, 0.03, 6).positions());
    for (const auto& p : a.positions()) CHECK(p.z() == 0.0);
    CHECK(a.sigma() == 0.03);
    CHECK(a.disorder_seed() == 5u);

    auto j = nlohmann::json(a);
    CHECK(geometry_from_json(j).positions() == a.positions());
    CHECK_THROWS_AS(apply_position_disorder(g, -0.1, 1), InvalidArgument);
}

TEST_CASE("disorder draws have the requested spread") {
    const double sigma = 0.05 * 0.6;
    auto g = build_square_array(100, 0.6);  // 10^4 atoms
    auto dis = apply_position_disorder(g, sigma, 2024);
    double sx = 0.0, sy = 0.0;
    for (int i = 0; i < g.size(); ++i) {
        const Vec3 delta = dis.positions()[i] - g.positions()[i];
        sx += delta.x() * delta.x();
        sy += delta.y() * delta.y();
    }
    CHECK(std::sqrt(sx / g.size()) == doctest::Approx(sigma).epsilon(0.02));
    CHECK(std::sqrt(sy / g.size()) == doctest::Approx(sigma).epsilon(0.02));
}

TEST_CASE("json rejects unknown keys and bad metadata") {
    nlohmann::json j = {{"N", 3}, {"d", 0.6}, {"colour", 1}};
    CHECK_THROWS_AS(geometry_from_json(j), InvalidArgument);
    nlohmann::json k = {{"N", 3}, {"d", 0.6}, {"sigma", 0.1}};
    CHECK_THROWS_AS(geometry_from_json(k), InvalidArgument);
    nlohmann::json p = {{"N", 2}, {"d", 0.6}, {"positions", {{0, 0, 0}}}};
    CHECK_THROWS_AS(geometry_from_json(p), InvalidArgument);
}

TEST_CASE("validate catches coincident atoms and bad dipoles") {
    auto g = geometry_from_points({Vec3(0, 0, 0), Vec3(0, 0, 0)}, {Vec3::UnitX(), Vec3::UnitX()});
    CHECK_THROWS_AS(g.validate(), SingularGeometry);
    auto rotated = build_square_array(2, 0.5).with_dipoles(Vec3(1, 1, 0));
    for (const auto& dp : rotated.dipoles()) CHECK(dp.norm() == doctest::Approx(1.0).epsilon(1e-15));
    CHECK_THROWS_AS(geometry_from_points({Vec3::Zero()}, {Vec3::Zero()}), InvalidArgument);
}

TEST_CASE("derived seeds differ per stream") {
    std::vector<std::uint64_t> seeds;
    for (std::uint64_t s = 0; s < 1000; ++s) seeds.push_back(derive_seed(1, s));
    std::sort(seeds.begin(), seeds.end());
    CHECK(std::adjacent_find(seeds.begin(), seeds.end()) == seeds.end());
    CHECK(derive_seed(1, 3) == derive_seed(1, 3));
    CHECK(derive_seed(1, 3) != derive_seed(2, 3));
}
