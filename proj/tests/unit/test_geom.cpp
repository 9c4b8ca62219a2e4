// SPDX-License-Identifier: Apache-2.0

#include "mmrt/errors.hpp"
#include "mmrt/geom.hpp"

#include <gtest/gtest.h>

#include <random>

using namespace mmrt;

namespace {

Triangle unit_xy()
{
    Triangle t;
    t.vertices = {Point3{0, 0, 0}, Point3{1, 0, 0}, Point3{0, 1, 0}};
    return t;
}

Point3 random_point(std::mt19937_64& rng, double r = 10.0)
{
    std::uniform_real_distribution<double> u(-r, r);
    const double x = u(rng), y = u(rng);
    return {x, y, u(rng)};
}

} // namespace

TEST(Plane, FromPointsIsUnitNormalAndContainsVertices)
{
    const auto p = Plane::from_points({1, 0, 0}, {0, 2, 0}, {0, 0, 3});
    EXPECT_NEAR(norm(p.normal), 1.0, 1e-15);
    EXPECT_NEAR(p.signed_distance({1, 0, 0}), 0.0, 1e-15);
    EXPECT_NEAR(p.signed_distance({0, 2, 0}), 0.0, 1e-15);
    EXPECT_NEAR(p.signed_distance({0, 0, 3}), 0.0, 1e-15);
}

TEST(Mirror, AcrossAxisPlanes)
{
    const Plane y0{{0, 1, 0}, 0.0};
    const Plane x0{{1, 0, 0}, 0.0};
    const Point3 a = mirror_point({7, 2, 0}, y0);
    EXPECT_EQ(a, (Point3{7, -2, 0}));
    EXPECT_EQ(mirror_point(a, x0), (Point3{-7, -2, 0}));
    const Plane offset{{0, 0, 1}, 3.0};
    EXPECT_EQ(mirror_point({1, 1, 1}, offset), (Point3{1, 1, 5}));
}

TEST(Mirror, IsAnInvolutionAndAnIsometry)
{
    std::mt19937_64 rng(1);
    for (int i = 0; i < 500; ++i) {
        const auto pl = Plane::from_points(random_point(rng), random_point(rng), random_point(rng));
        const Point3 p = random_point(rng), q = random_point(rng);
        const Point3 mp = mirror_point(p, pl), mq = mirror_point(q, pl);
        EXPECT_LT(distance(mirror_point(mp, pl), p), 1e-9);
        EXPECT_NEAR(distance(mp, mq), distance(p, q), 1e-9);
        EXPECT_NEAR(pl.signed_distance(mp), -pl.signed_distance(p), 1e-9);
    }
}

TEST(TriangleFrame, BarycentricReconstructsPoint)
{
    std::mt19937_64 rng(2);
    for (int i = 0; i < 200; ++i) {
        Triangle t;
        t.vertices = {random_point(rng), random_point(rng), random_point(rng)};
        if (t.area() < 1e-3)
            continue;
        const TriangleFrame f(t);
        std::uniform_real_distribution<double> u(-0.5, 1.5);
        const double b1 = u(rng), b2 = u(rng);
        const Point3 p = t.vertices[0] * (1 - b1 - b2) + t.vertices[1] * b1 + t.vertices[2] * b2;
        const auto [w0, w1, w2] = f.barycentric(p);
        EXPECT_NEAR(w0, 1 - b1 - b2, 1e-9);
        EXPECT_NEAR(w1, b1, 1e-9);
        EXPECT_NEAR(w2, b2, 1e-9);
        EXPECT_EQ(f.contains(p, 0.0), b1 >= 0 && b2 >= 0 && b1 + b2 <= 1);
    }
}

TEST(TriangleFrame, EdgesAndVerticesAreInside)
{
    const TriangleFrame f(unit_xy());
    EXPECT_TRUE(f.contains({0, 0, 0}, 1e-9));
    EXPECT_TRUE(f.contains({0.5, 0.5, 0}, 1e-9));
    EXPECT_TRUE(f.contains({0.5, 0, 0}, 1e-9));
    EXPECT_FALSE(f.contains({0.6, 0.6, 0}, 1e-9));
    EXPECT_FALSE(f.contains({-1e-6, 0.5, 0}, 1e-9));
}

TEST(TriangleFrame, DegenerateThrows)
{
    Triangle t;
    t.vertices = {Point3{0, 0, 0}, Point3{1, 1, 1}, Point3{2, 2, 2}};
    EXPECT_THROW(TriangleFrame{t}, GeometryError);
    t.vertices = {Point3{0, 0, 0}, Point3{1e-7, 0, 0}, Point3{0, 1e-7, 0}};
    EXPECT_THROW(TriangleFrame{t}, GeometryError);
}

TEST(SegmentPlane, InteriorHitOnly)
{
    const Plane z0{{0, 0, 1}, 0.0};
    const auto hit = segment_plane_intersection({0, 0, -1}, {2, 0, 1}, z0);
    ASSERT_TRUE(hit);
    EXPECT_EQ(*hit, (Point3{1, 0, 0}));
    EXPECT_FALSE(segment_plane_intersection({0, 0, 1}, {2, 0, 3}, z0));
    EXPECT_FALSE(segment_plane_intersection({0, 0, 0}, {2, 0, 3}, z0));
    EXPECT_FALSE(segment_plane_intersection({0, 0, 1}, {2, 0, 1}, z0));
}

TEST(SegmentTriangle, CrossingInsideBlocks)
{
    const Triangle t = unit_xy();
    EXPECT_TRUE(segment_triangle_intersect({0.2, 0.2, -1}, {0.2, 0.2, 1}, t));
    EXPECT_FALSE(segment_triangle_intersect({0.8, 0.8, -1}, {0.8, 0.8, 1}, t));
    EXPECT_FALSE(segment_triangle_intersect({0.2, 0.2, 0.5}, {0.2, 0.2, 1}, t));
}

TEST(SegmentTriangle, TouchingDoesNotBlock)
{
    const Triangle t = unit_xy();
    // Ends on the surface.
    EXPECT_FALSE(segment_triangle_intersect({0.2, 0.2, 1}, {0.2, 0.2, 0}, t));
    // Starts on the surface.
    EXPECT_FALSE(segment_triangle_intersect({0.2, 0.2, 0}, {0.3, 0.3, -2}, t));
    // Lies in the plane.
    EXPECT_FALSE(segment_triangle_intersect({-1, 0.2, 0}, {2, 0.2, 0}, t));
    // Endpoint closer than plane_distance_m after trimming.
    EXPECT_FALSE(segment_triangle_intersect({0.2, 0.2, 5e-10}, {0.2, 0.2, -1}, t));
}

TEST(SegmentTriangle, EdgeHitBlocks)
{
    const Triangle t = unit_xy();
    EXPECT_TRUE(segment_triangle_intersect({0.5, 0.5, -1}, {0.5, 0.5, 1}, t));
    EXPECT_TRUE(segment_triangle_intersect({0, 0, -1}, {0, 0, 1}, t));
}

TEST(SegmentTriangle, SymmetricInEndpoints)
{
    std::mt19937_64 rng(3);
    Triangle t;
    t.vertices = {Point3{-3, -2, 0.5}, Point3{4, -1, -0.5}, Point3{0, 5, 1}};
    int hits = 0;
    for (int i = 0; i < 2000; ++i) {
        const Point3 a = random_point(rng, 6), b = random_point(rng, 6);
        const bool ab = segment_triangle_intersect(a, b, t);
        EXPECT_EQ(ab, segment_triangle_intersect(b, a, t));
        hits += ab ? 1 : 0;
    }
    EXPECT_GT(hits, 100);
}
