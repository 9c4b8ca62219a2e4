// SPDX-License-Identifier: Apache-2.0
//
// Geometric kernel for the image-method tracer: points, planes, triangles,
// mirroring and the segment/triangle predicates used for reflection and
// obstruction tests.

#pragma once

#include <array>
#include <cmath>
#include <optional>

namespace mmrt {

struct Vec3 {
    double x = 0.0;
    double y = 0.0;
    double z = 0.0;

    constexpr Vec3 operator+(const Vec3& o) const { return {x + o.x, y + o.y, z + o.z}; }
    constexpr Vec3 operator-(const Vec3& o) const { return {x - o.x, y - o.y, z - o.z}; }
    constexpr Vec3 operator-() const { return {-x, -y, -z}; }
    constexpr Vec3 operator*(double s) const { return {x * s, y * s, z * s}; }
    constexpr Vec3 operator/(double s) const { return {x / s, y / s, z / s}; }
    constexpr Vec3& operator+=(const Vec3& o)
    {
        x += o.x, y += o.y, z += o.z;
        return *this;
    }
    constexpr bool operator==(const Vec3&) const = default;
};

using Point3 = Vec3;

constexpr Vec3 operator*(double s, const Vec3& v) { return v * s; }
constexpr double dot(const Vec3& a, const Vec3& b) { return a.x * b.x + a.y * b.y + a.z * b.z; }
constexpr Vec3 cross(const Vec3& a, const Vec3& b)
{
    return {a.y * b.z - a.z * b.y, a.z * b.x - a.x * b.z, a.x * b.y - a.y * b.x};
}
inline double norm(const Vec3& v) { return std::sqrt(dot(v, v)); }
inline double distance(const Vec3& a, const Vec3& b) { return norm(a - b); }
inline Vec3 normalized(const Vec3& v) { return v / norm(v); }
inline bool is_finite(const Vec3& v) { return std::isfinite(v.x) && std::isfinite(v.y) && std::isfinite(v.z); }

// Numerical slack used by every predicate. Defaults are the project-wide
// contract; callers override them through TraceConfig.
struct Tolerances {
    double min_triangle_area_m2 = 1e-12; // below this a triangle is degenerate
    double plane_distance_m = 1e-9;      // endpoints this close to a plane touch it rather than cross
    double duplicate_path_m = 1e-6;      // reflection points closer than this describe the same path
    double barycentric = 1e-9;           // edges and vertices count as inside
    double segment_shrink = 1e-6;        // parametric trim at both ends of a tested segment
};

// Plane in Hessian normal form: dot(normal, x) == offset, |normal| == 1.
struct Plane {
    Vec3 normal;
    double offset = 0.0;

    static Plane from_points(const Point3& a, const Point3& b, const Point3& c);
    double signed_distance(const Point3& p) const { return dot(normal, p) - offset; }
};

struct Triangle {
    std::array<Point3, 3> vertices;
    int id = 0;
    int material_id = 0;

    double area() const;
    Plane plane() const;
    Point3 centroid() const { return (vertices[0] + vertices[1] + vertices[2]) / 3.0; }
};

// Precomputed per-triangle data for repeated barycentric tests.
class TriangleFrame {
public:
    // Throws GeometryError when the triangle area is below tol.min_triangle_area_m2.
    explicit TriangleFrame(const Triangle& t, const Tolerances& tol = {});

    const Plane& plane() const { return plane_; }
    const Triangle& triangle() const { return tri_; }

    // Barycentric coordinates (u, v, w) of the orthogonal projection of p
    // onto the triangle plane, weights for vertices 0, 1, 2.
    std::array<double, 3> barycentric(const Point3& p) const;
    bool contains(const Point3& p, double barycentric_slack) const;

private:
    Triangle tri_;
    Plane plane_;
    Vec3 e0_, e1_;
    double d00_, d01_, d11_, inv_denom_;
};

Point3 mirror_point(const Point3& p, const Plane& plane);

// Crossing point of the open segment (a, b) with the plane, restricted to
// parametric t in (shrink, 1 - shrink). Parallel and in-plane segments give
// nothing.
std::optional<Point3> segment_plane_intersection(const Point3& a, const Point3& b, const Plane& plane,
                                                 const Tolerances& tol = {});

// Boundary counts as inside. Throws GeometryError for degenerate triangles.
bool point_in_triangle(const Point3& p, const Triangle& t, const Tolerances& tol = {});

// True iff the segment, trimmed by tol.segment_shrink at both ends, properly
// crosses the triangle plane inside (or on the boundary of) the triangle.
bool segment_triangle_intersect(const Point3& a, const Point3& b, const TriangleFrame& t,
                                const Tolerances& tol = {});
bool segment_triangle_intersect(const Point3& a, const Point3& b, const Triangle& t, const Tolerances& tol = {});

} // namespace mmrt
