// SPDX-License-Identifier: Apache-2.0
//
// Specular ray tracer based on the method of images.
//
// For every ordered sequence of reflecting triangles (S_1 .. S_N, listed in
// propagation order from TX to RX) the receiver is mirrored successively
// across S_N, S_N-1, ..., S_1, and the reflection points are recovered by
// intersecting the segment from the previous interaction point with the
// matching image. A path survives when each reflection point lies inside its
// triangle and none of its N+1 segments is blocked by the scene.
//
// Sequences are enumerated as a reflection tree of bounded depth
// (max_reflection_order); no triangle is followed by itself. A relative
// threshold drops paths whose gain falls more than |relative_threshold_db|
// below the strongest path found so far, which skips their obstruction test.

#pragma once

#include "mmrt/geom.hpp"
#include "mmrt/scene.hpp"

#include <cstdint>
#include <limits>
#include <optional>
#include <span>
#include <vector>

namespace mmrt {

inline constexpr double kSpeedOfLight = 299792458.0;

struct TraceConfig {
    int max_reflection_order = 4;
    // <= 0 dB; -infinity disables thresholding.
    double relative_threshold_db = -std::numeric_limits<double>::infinity();
    double carrier_frequency_hz = 60e9;
    Tolerances tolerances{};

    double wavelength_m() const { return kSpeedOfLight / carrier_frequency_hz; }
    // Throws Error when a field is out of range.
    void validate() const;
};

struct Direction {
    double azimuth_rad = 0.0;   // [-pi, pi), from +x toward +y
    double elevation_rad = 0.0; // [-pi/2, pi/2], from the xy-plane

    Vec3 unit_vector() const;
    static Direction from_vector(const Vec3& v);
};

// One multipath component. surface_ids and reflection_points are in
// propagation order (first bounce after the TX first).
struct Mpc {
    int order = 0;
    std::vector<int> surface_ids;
    std::vector<Point3> reflection_points;
    double path_length_m = 0.0;
    double delay_s = 0.0;
    double gain_db = 0.0;
    double phase_rad = 0.0;
    // Departure direction at the TX along the first segment.
    Direction aod;
    // Arrival direction seen from the RX, pointing back along the last segment.
    Direction aoa;
};

struct TraceResult {
    std::size_t timestep = 0;
    std::vector<Mpc> mpcs;
    // Reflection-tree nodes visited (LOS excluded). Every examined sequence
    // ends up in exactly one of the five buckets below:
    //   examined == rejected_by_geometry + pruned_by_threshold
    //             + pruned_by_obstruction + duplicates_merged + kept reflections
    std::uint64_t candidates_examined = 0;
    std::uint64_t rejected_by_geometry = 0;
    std::uint64_t pruned_by_threshold = 0;
    std::uint64_t pruned_by_obstruction = 0;
    std::uint64_t duplicates_merged = 0;
    bool los_obstructed = false;
    double elapsed_s = 0.0;

    std::uint64_t kept_reflections() const;
};

// 20*log10(lambda / (4*pi*d)). Throws Error unless d > 0 and lambda > 0.
double free_space_gain_db(double distance_m, double wavelength_m);

double path_gain_db(double distance_m, std::span<const double> losses_db, double wavelength_m);

// (-2*pi*d/lambda + order*pi) wrapped to [0, 2*pi).
double mpc_phase(double distance_m, int order, double wavelength_m);

// Sum over k = 1..max_order of M*(M-1)^(k-1).
std::uint64_t reflection_tree_candidate_count(std::uint64_t num_triangles, int max_order);

// Scene with per-triangle precomputation. Construction validates the scene.
class PreparedScene {
public:
    explicit PreparedScene(const Scene& scene, const Tolerances& tol = {});

    const Scene& scene() const { return *scene_; }
    std::size_t size() const { return frames_.size(); }
    const TriangleFrame& frame(std::size_t i) const { return frames_[i]; }
    double reflection_loss_db(std::size_t i) const { return losses_[i]; }
    const Tolerances& tolerances() const { return tol_; }

    // True when any triangle blocks the segment (a, b).
    bool obstructed(const Point3& a, const Point3& b) const;

private:
    const Scene* scene_;
    Tolerances tol_;
    std::vector<TriangleFrame> frames_;
    std::vector<double> losses_;
};

std::optional<Mpc> trace_los(const PreparedScene& scene, const Point3& tx, const Point3& rx, const TraceConfig& cfg);

// surface_sequence in propagation order. Returns nullopt for any invalid
// sequence or blocked path.
std::optional<Mpc> trace_reflection(const PreparedScene& scene, const Point3& tx, const Point3& rx,
                                    std::span<const int> surface_sequence, const TraceConfig& cfg);

// Output sorted by (order, surface_ids); independent of enumeration order.
TraceResult trace_timestep(const PreparedScene& scene, const Point3& tx, const Point3& rx, const TraceConfig& cfg);

// One result per sample, in trajectory order. `workers` <= 1 runs inline;
// results do not depend on the worker count. Errors are rethrown as Error
// tagged with the failing timestep.
std::vector<TraceResult> trace_trajectory(const PreparedScene& scene, const Point3& tx, const Trajectory& rx,
                                          const TraceConfig& cfg, unsigned workers = 1);

// Convenience overloads that prepare the scene on the fly.
TraceResult trace_timestep(const Scene& scene, const Point3& tx, const Point3& rx, const TraceConfig& cfg);
std::vector<TraceResult> trace_trajectory(const Scene& scene, const Point3& tx, const Trajectory& rx,
                                          const TraceConfig& cfg, unsigned workers = 1);

} // namespace mmrt
