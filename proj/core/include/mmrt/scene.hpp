// SPDX-License-Identifier: Apache-2.0
//
// Scenario representation: triangle meshes with per-material reflection
// loss, static transmitters and sampled receiver trajectories, plus the
// plain-text scene/trajectory file formats (see docs/formats.md).

#pragma once

#include "mmrt/geom.hpp"

#include <filesystem>
#include <functional>
#include <iosfwd>
#include <string>
#include <vector>

namespace mmrt {

inline constexpr double kDefaultReflectionLossDb = 10.0;
inline constexpr double kMinTypicalReflectionLossDb = 7.0;
inline constexpr double kMaxTypicalReflectionLossDb = 25.0;

struct Material {
    std::string name;
    double reflection_loss_db = kDefaultReflectionLossDb;

    bool operator==(const Material&) const = default;
};

struct Scene {
    std::string name;
    std::vector<Material> materials;
    std::vector<Triangle> triangles;

    // Throws SceneError on dangling material references, non-dense ids,
    // non-finite or degenerate triangles. Returns soft warnings (reflection
    // losses outside the typical 7..25 dB range).
    std::vector<std::string> validate(const Tolerances& tol = {}) const;

    const Material& material_of(const Triangle& t) const { return materials[static_cast<std::size_t>(t.material_id)]; }
};

bool operator==(const Scene& a, const Scene& b);

struct Trajectory {
    double sample_interval_s = 0.005;
    std::vector<Point3> positions;

    std::size_t size() const { return positions.size(); }
    bool empty() const { return positions.empty(); }
    double time_of(std::size_t i) const { return static_cast<double>(i) * sample_interval_s; }

    // First n samples (all of them if n >= size()).
    Trajectory truncated(std::size_t n) const;

    bool operator==(const Trajectory&) const = default;
};

enum class NodeRole { Tx, Rx };

struct NodeConfig {
    NodeRole role = NodeRole::Tx;
    Point3 position;
};

using WarningSink = std::function<void(const std::string&)>;

// Scene text format. Triangle ids follow record order.
Scene parse_scene(std::istream& in, const std::string& source = "<scene>", const WarningSink& warn = {});
Scene load_scene(const std::filesystem::path& path, const WarningSink& warn = {});
void write_scene(std::ostream& out, const Scene& scene);
void save_scene(const std::filesystem::path& path, const Scene& scene);

Trajectory parse_trajectory(std::istream& in, const std::string& source = "<trajectory>");
Trajectory load_trajectory(const std::filesystem::path& path);
void write_trajectory(std::ostream& out, const Trajectory& traj);
void save_trajectory(const std::filesystem::path& path, const Trajectory& traj);

// Single "x y z" line.
Point3 load_position(const std::filesystem::path& path);
void save_position(const std::filesystem::path& path, const Point3& p);

// Appends an axis-aligned rectangle as two triangles sharing the diagonal
// from corner a to corner c (a, b, c, d in cyclic order).
void add_quad(Scene& scene, const Point3& a, const Point3& b, const Point3& c, const Point3& d, int material_id);

// Closed axis-aligned box [lo, hi] as 12 triangles; open_top drops the two
// triangles of the z = hi.z face, open_bottom those of z = lo.z.
void add_box(Scene& scene, const Point3& lo, const Point3& hi, int material_id, bool open_top = false,
             bool open_bottom = false);

} // namespace mmrt
