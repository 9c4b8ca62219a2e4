// SPDX-License-Identifier: Apache-2.0

#include "mmrt/geom.hpp"

#include "mmrt/errors.hpp"

#include <string>

namespace mmrt {

Plane Plane::from_points(const Point3& a, const Point3& b, const Point3& c)
{
    const Vec3 n = cross(b - a, c - a);
    const double len = norm(n);
    if (!(len > 0.0))
        throw GeometryError("cannot build a plane from collinear points");
    Plane p;
    p.normal = n / len;
    p.offset = dot(p.normal, a);
    return p;
}

double Triangle::area() const
{
    return 0.5 * norm(cross(vertices[1] - vertices[0], vertices[2] - vertices[0]));
}

Plane Triangle::plane() const
{
    return Plane::from_points(vertices[0], vertices[1], vertices[2]);
}

TriangleFrame::TriangleFrame(const Triangle& t, const Tolerances& tol) : tri_(t)
{
    if (!(t.area() > tol.min_triangle_area_m2))
        throw GeometryError("degenerate triangle " + std::to_string(t.id));
    plane_ = t.plane();
    e0_ = t.vertices[1] - t.vertices[0];
    e1_ = t.vertices[2] - t.vertices[0];
    d00_ = dot(e0_, e0_);
    d01_ = dot(e0_, e1_);
    d11_ = dot(e1_, e1_);
    inv_denom_ = 1.0 / (d00_ * d11_ - d01_ * d01_);
}

std::array<double, 3> TriangleFrame::barycentric(const Point3& p) const
{
    const Vec3 e2 = p - tri_.vertices[0];
    const double d20 = dot(e2, e0_);
    const double d21 = dot(e2, e1_);
    const double v = (d11_ * d20 - d01_ * d21) * inv_denom_;
    const double w = (d00_ * d21 - d01_ * d20) * inv_denom_;
    return {1.0 - v - w, v, w};
}

bool TriangleFrame::contains(const Point3& p, double barycentric_slack) const
{
    const auto [u, v, w] = barycentric(p);
    return u >= -barycentric_slack && v >= -barycentric_slack && w >= -barycentric_slack;
}

Point3 mirror_point(const Point3& p, const Plane& plane)
{
    return p - plane.normal * (2.0 * plane.signed_distance(p));
}

std::optional<Point3> segment_plane_intersection(const Point3& a, const Point3& b, const Plane& plane,
                                                 const Tolerances& tol)
{
    const double da = plane.signed_distance(a);
    const double db = plane.signed_distance(b);
    const double denom = da - db;
    if (denom == 0.0)
        return std::nullopt;
    const double t = da / denom;
    if (!(t > tol.segment_shrink && t < 1.0 - tol.segment_shrink))
        return std::nullopt;
    return a + (b - a) * t;
}

bool point_in_triangle(const Point3& p, const Triangle& t, const Tolerances& tol)
{
    return TriangleFrame(t, tol).contains(p, tol.barycentric);
}

bool segment_triangle_intersect(const Point3& a, const Point3& b, const TriangleFrame& t, const Tolerances& tol)
{
    const Vec3 ab = b - a;
    const Point3 s0 = a + ab * tol.segment_shrink;
    const Point3 s1 = b - ab * tol.segment_shrink;
    const double d0 = t.plane().signed_distance(s0);
    const double d1 = t.plane().signed_distance(s1);
    // Touching or in-plane segments do not obstruct.
    const double eps = tol.plane_distance_m;
    if (!((d0 < -eps && d1 > eps) || (d0 > eps && d1 < -eps)))
        return false;
    const double s = d0 / (d0 - d1);
    return t.contains(s0 + (s1 - s0) * s, tol.barycentric);
}

bool segment_triangle_intersect(const Point3& a, const Point3& b, const Triangle& t, const Tolerances& tol)
{
    return segment_triangle_intersect(a, b, TriangleFrame(t, tol), tol);
}

} // namespace mmrt
