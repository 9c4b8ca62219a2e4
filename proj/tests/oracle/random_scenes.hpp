// SPDX-License-Identifier: Apache-2.0
//
// Seeded random scenes for oracle comparisons.

#pragma once

#include "mmrt/scene.hpp"

#include <cmath>
#include <random>

namespace oracle {

struct RandomCase {
    mmrt::Scene scene;
    mmrt::Point3 tx;
    mmrt::Point3 rx;
};

namespace detail {

inline mmrt::Point3 uniform_point(std::mt19937_64& rng, double lo, double hi, double zlo, double zhi)
{
    std::uniform_real_distribution<double> xy(lo, hi), z(zlo, zhi);
    const double x = xy(rng);
    const double y = xy(rng);
    return {x, y, z(rng)};
}

// Keeps nodes clear of every triangle plane so that no path starts or ends
// on a surface.
inline bool well_separated(const mmrt::Scene& s, const mmrt::Point3& p)
{
    for (const auto& t : s.triangles) {
        const auto n = mmrt::cross(t.vertices[1] - t.vertices[0], t.vertices[2] - t.vertices[0]);
        if (std::abs(mmrt::dot(mmrt::normalized(n), p - t.vertices[0])) < 0.05)
            return false;
    }
    return true;
}

} // namespace detail

// Even seeds: a room corner (floor and two walls, 6 triangles) plus up to
// two loose triangles. Odd seeds: 3..max_triangles loose triangles.
inline RandomCase random_case(std::uint64_t seed, int max_triangles = 8)
{
    std::mt19937_64 rng(seed * 7919 + 17);
    std::uniform_real_distribution<double> loss(7.0, 25.0);
    RandomCase c;
    c.scene.name = "random-" + std::to_string(seed);
    c.scene.materials = {{"a", loss(rng)}, {"b", loss(rng)}, {"c", loss(rng)}};
    std::uniform_int_distribution<int> mat(0, 2);

    auto add_triangle = [&](const mmrt::Point3& a, const mmrt::Point3& b, const mmrt::Point3& d) {
        mmrt::Triangle t;
        t.vertices = {a, b, d};
        t.id = static_cast<int>(c.scene.triangles.size());
        t.material_id = mat(rng);
        c.scene.triangles.push_back(t);
    };
    auto loose_triangle = [&] {
        for (;;) {
            const auto center = detail::uniform_point(rng, 1.0, 9.0, 0.5, 4.5);
            std::uniform_real_distribution<double> off(-3.0, 3.0);
            const mmrt::Point3 a = center + mmrt::Vec3{off(rng), off(rng), off(rng)};
            const mmrt::Point3 b = center + mmrt::Vec3{off(rng), off(rng), off(rng)};
            const mmrt::Point3 d = center + mmrt::Vec3{off(rng), off(rng), off(rng)};
            if (mmrt::norm(mmrt::cross(b - a, d - a)) > 0.5) {
                add_triangle(a, b, d);
                return;
            }
        }
    };

    if (seed % 2 == 0) {
        const double w = 10.0, h = 5.0;
        mmrt::add_quad(c.scene, {0, 0, 0}, {w, 0, 0}, {w, w, 0}, {0, w, 0}, mat(rng));
        mmrt::add_quad(c.scene, {0, 0, 0}, {0, w, 0}, {0, w, h}, {0, 0, h}, mat(rng));
        mmrt::add_quad(c.scene, {0, 0, 0}, {0, 0, h}, {w, 0, h}, {w, 0, 0}, mat(rng));
        std::uniform_int_distribution<int> extra(0, std::max(0, max_triangles - 6));
        for (int k = extra(rng); k > 0; --k)
            loose_triangle();
    } else {
        std::uniform_int_distribution<int> count(3, std::max(3, max_triangles));
        for (int k = count(rng); k > 0; --k)
            loose_triangle();
    }

    for (;;) {
        c.tx = detail::uniform_point(rng, 0.5, 9.5, 0.5, 4.5);
        c.rx = detail::uniform_point(rng, 0.5, 9.5, 0.5, 4.5);
        if (mmrt::distance(c.tx, c.rx) > 1.0 && detail::well_separated(c.scene, c.tx) &&
            detail::well_separated(c.scene, c.rx))
            break;
    }
    return c;
}

} // namespace oracle
