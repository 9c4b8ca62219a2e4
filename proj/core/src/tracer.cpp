// SPDX-License-Identifier: Apache-2.0

#include "mmrt/tracer.hpp"

#include "mmrt/errors.hpp"
#include "mmrt/text.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <exception>
#include <numbers>
#include <thread>

namespace mmrt {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

// Working state of one reflection-tree traversal.
struct TreeWalk {
    TreeWalk(const PreparedScene& s, const TraceConfig& c, const Point3& t, const Point3& r, double lam, TraceResult& res,
             std::vector<Mpc>& out)
        : scene(s), cfg(c), tx(t), rx(r), lambda(lam), result(res), kept(out)
    {
    }

    const PreparedScene& scene;
    const TraceConfig& cfg;
    const Point3 tx;
    const Point3 rx;
    const double lambda;
    TraceResult& result;
    std::vector<Mpc>& kept;
    bool have_max = false;
    double pg_max = -std::numeric_limits<double>::infinity();

    // sequence[k] is S_{k+1}: index 0 is the surface closest to the RX.
    std::vector<int> sequence;
    // images[k] is RX^(k); images[0] == rx.
    std::vector<Point3> images;
    // points[k] is P^(k+1).
    std::vector<Point3> points;

    void descend(int depth)
    {
        const int n_tri = static_cast<int>(scene.size());
        const int prev = depth > 0 ? sequence[static_cast<std::size_t>(depth - 1)] : -1;
        for (int id = 0; id < n_tri; ++id) {
            if (id == prev)
                continue;
            const auto d = static_cast<std::size_t>(depth);
            sequence[d] = id;
            images[d + 1] = mirror_point(images[d], scene.frame(static_cast<std::size_t>(id)).plane());
            examine(depth + 1);
            if (depth + 1 < cfg.max_reflection_order)
                descend(depth + 1);
        }
    }

    void examine(int order)
    {
        ++result.candidates_examined;
        const auto n = static_cast<std::size_t>(order);
        const auto& tol = scene.tolerances();

        // Back-trace from the TX towards successively shallower images.
        Point3 from = tx;
        for (std::size_t k = n; k-- > 0;) {
            const auto& frame = scene.frame(static_cast<std::size_t>(sequence[k]));
            const auto hit = segment_plane_intersection(from, images[k + 1], frame.plane(), tol);
            if (!hit || !frame.contains(*hit, tol.barycentric)) {
                ++result.rejected_by_geometry;
                return;
            }
            points[k] = *hit;
            from = *hit;
        }

        double length = distance(tx, points[n - 1]);
        double losses = 0.0;
        for (std::size_t k = n; k-- > 0;) {
            losses += scene.reflection_loss_db(static_cast<std::size_t>(sequence[k]));
            length += distance(points[k], k > 0 ? points[k - 1] : rx);
        }
        const double pg = free_space_gain_db(length, lambda) - losses;

        if (have_max && pg - pg_max < cfg.relative_threshold_db) {
            ++result.pruned_by_threshold;
            return;
        }

        if (scene.obstructed(tx, points[n - 1])) {
            ++result.pruned_by_obstruction;
            return;
        }
        for (std::size_t k = n - 1; k-- > 0;) {
            if (scene.obstructed(points[k + 1], points[k])) {
                ++result.pruned_by_obstruction;
                return;
            }
        }
        if (scene.obstructed(points[0], rx)) {
            ++result.pruned_by_obstruction;
            return;
        }

        Mpc m;
        m.order = order;
        m.surface_ids.reserve(n);
        m.reflection_points.reserve(n);
        for (std::size_t k = n; k-- > 0;) {
            m.surface_ids.push_back(sequence[k]);
            m.reflection_points.push_back(points[k]);
        }
        m.path_length_m = length;
        m.delay_s = length / kSpeedOfLight;
        m.gain_db = pg;
        m.phase_rad = mpc_phase(length, order, lambda);
        m.aod = Direction::from_vector(m.reflection_points.front() - tx);
        m.aoa = Direction::from_vector(m.reflection_points.back() - rx);
        kept.push_back(std::move(m));

        if (!have_max || pg > pg_max) {
            pg_max = pg;
            have_max = true;
        }
    }
};

bool mpc_less(const Mpc& a, const Mpc& b)
{
    if (a.order != b.order)
        return a.order < b.order;
    return a.surface_ids < b.surface_ids;
}

bool same_path(const Mpc& a, const Mpc& b, double tol_m)
{
    if (a.order != b.order)
        return false;
    for (std::size_t k = 0; k < a.reflection_points.size(); ++k)
        if (distance(a.reflection_points[k], b.reflection_points[k]) > tol_m)
            return false;
    return true;
}

void require_distinct(const Point3& tx, const Point3& rx)
{
    if (!is_finite(tx) || !is_finite(rx))
        throw Error("TX and RX positions must be finite");
    if (tx == rx)
        throw Error("TX and RX positions coincide");
}

} // namespace

void TraceConfig::validate() const
{
    if (max_reflection_order < 0)
        throw Error("max_reflection_order must be >= 0");
    if (std::isnan(relative_threshold_db) || relative_threshold_db > 0.0)
        throw Error("relative_threshold_db must be <= 0 dB or -inf");
    if (!(carrier_frequency_hz > 0.0) || !std::isfinite(carrier_frequency_hz))
        throw Error("carrier_frequency_hz must be positive");
}

Vec3 Direction::unit_vector() const
{
    const double ce = std::cos(elevation_rad);
    return {ce * std::cos(azimuth_rad), ce * std::sin(azimuth_rad), std::sin(elevation_rad)};
}

Direction Direction::from_vector(const Vec3& v)
{
    double az = std::atan2(v.y, v.x);
    if (az >= std::numbers::pi)
        az = -std::numbers::pi;
    return {az, std::atan2(v.z, std::hypot(v.x, v.y))};
}

std::uint64_t TraceResult::kept_reflections() const
{
    std::uint64_t n = 0;
    for (const auto& m : mpcs)
        n += m.order > 0 ? 1 : 0;
    return n;
}

double free_space_gain_db(double distance_m, double wavelength_m)
{
    if (!(distance_m > 0.0))
        throw Error("path length must be positive (coincident nodes?)");
    if (!(wavelength_m > 0.0))
        throw Error("wavelength must be positive");
    return 20.0 * std::log10(wavelength_m / (4.0 * std::numbers::pi * distance_m));
}

double path_gain_db(double distance_m, std::span<const double> losses_db, double wavelength_m)
{
    double g = free_space_gain_db(distance_m, wavelength_m);
    for (double l : losses_db)
        g -= l;
    return g;
}

double mpc_phase(double distance_m, int order, double wavelength_m)
{
    // Reduce the propagation term to a fractional cycle before scaling so
    // that long paths keep full precision.
    const double cycles = distance_m / wavelength_m;
    const double frac = cycles - std::floor(cycles);
    double half_turns = static_cast<double>(order % 2);
    double phase = kTwoPi * (0.5 * half_turns - frac);
    phase = std::fmod(phase, kTwoPi);
    if (phase < 0.0)
        phase += kTwoPi;
    if (phase >= kTwoPi)
        phase = 0.0;
    return phase;
}

std::uint64_t reflection_tree_candidate_count(std::uint64_t num_triangles, int max_order)
{
    if (num_triangles == 0)
        throw Error("reflection tree needs at least one triangle");
    std::uint64_t total = 0;
    std::uint64_t level = num_triangles;
    for (int k = 1; k <= max_order; ++k) {
        total += level;
        level *= num_triangles - 1;
    }
    return total;
}

PreparedScene::PreparedScene(const Scene& scene, const Tolerances& tol) : scene_(&scene), tol_(tol)
{
    scene.validate(tol);
    frames_.reserve(scene.triangles.size());
    losses_.reserve(scene.triangles.size());
    for (const auto& t : scene.triangles) {
        frames_.emplace_back(t, tol);
        losses_.push_back(scene.material_of(t).reflection_loss_db);
    }
}

bool PreparedScene::obstructed(const Point3& a, const Point3& b) const
{
    for (const auto& f : frames_)
        if (segment_triangle_intersect(a, b, f, tol_))
            return true;
    return false;
}

std::optional<Mpc> trace_los(const PreparedScene& scene, const Point3& tx, const Point3& rx, const TraceConfig& cfg)
{
    require_distinct(tx, rx);
    if (scene.obstructed(tx, rx))
        return std::nullopt;
    const double lambda = cfg.wavelength_m();
    Mpc m;
    m.order = 0;
    m.path_length_m = distance(tx, rx);
    m.delay_s = m.path_length_m / kSpeedOfLight;
    m.gain_db = free_space_gain_db(m.path_length_m, lambda);
    m.phase_rad = mpc_phase(m.path_length_m, 0, lambda);
    m.aod = Direction::from_vector(rx - tx);
    m.aoa = Direction::from_vector(tx - rx);
    return m;
}

std::optional<Mpc> trace_reflection(const PreparedScene& scene, const Point3& tx, const Point3& rx,
                                    std::span<const int> surface_sequence, const TraceConfig& cfg)
{
    require_distinct(tx, rx);
    const std::size_t n = surface_sequence.size();
    if (n == 0)
        return std::nullopt;
    for (std::size_t k = 0; k < n; ++k) {
        const int id = surface_sequence[k];
        if (id < 0 || static_cast<std::size_t>(id) >= scene.size())
            return std::nullopt;
        if (k > 0 && surface_sequence[k - 1] == id)
            return std::nullopt;
    }

    TraceConfig unthresholded = cfg;
    unthresholded.relative_threshold_db = -std::numeric_limits<double>::infinity();
    TraceResult scratch;
    std::vector<Mpc> kept;
    TreeWalk walk{scene, unthresholded, tx, rx, cfg.wavelength_m(), scratch, kept};
    walk.sequence.assign(n, 0);
    walk.images.assign(n + 1, rx);
    walk.points.assign(n, rx);
    // The walk indexes surfaces from the RX side.
    for (std::size_t k = 0; k < n; ++k) {
        walk.sequence[k] = surface_sequence[n - 1 - k];
        walk.images[k + 1] = mirror_point(walk.images[k], scene.frame(static_cast<std::size_t>(walk.sequence[k])).plane());
    }
    walk.examine(static_cast<int>(n));
    if (kept.empty())
        return std::nullopt;
    return std::move(kept.front());
}

TraceResult trace_timestep(const PreparedScene& scene, const Point3& tx, const Point3& rx, const TraceConfig& cfg)
{
    const auto start = std::chrono::steady_clock::now();
    cfg.validate();
    require_distinct(tx, rx);

    TraceResult result;
    std::vector<Mpc> kept;
    const double lambda = cfg.wavelength_m();

    TreeWalk walk{scene, cfg, tx, rx, lambda, result, kept};
    if (auto los = trace_los(scene, tx, rx, cfg)) {
        walk.pg_max = los->gain_db;
        walk.have_max = true;
        kept.push_back(std::move(*los));
    } else {
        result.los_obstructed = true;
    }

    if (cfg.max_reflection_order > 0 && scene.size() > 0) {
        const auto depth = static_cast<std::size_t>(cfg.max_reflection_order);
        walk.sequence.assign(depth, -1);
        walk.images.assign(depth + 1, rx);
        walk.points.assign(depth, rx);
        walk.descend(0);
    }

    // Final pass against the settled maximum so the output does not depend
    // on the order in which the tree was walked.
    if (walk.have_max && std::isfinite(cfg.relative_threshold_db)) {
        const double floor_db = walk.pg_max + cfg.relative_threshold_db;
        const auto before = kept.size();
        std::erase_if(kept, [&](const Mpc& m) { return m.order > 0 && m.gain_db < floor_db; });
        result.pruned_by_threshold += before - kept.size();
    }

    std::sort(kept.begin(), kept.end(), mpc_less);

    // A reflection landing on the shared edge of two coplanar triangles is
    // found once per triangle; keep the lexicographically smallest sequence.
    result.mpcs.reserve(kept.size());
    std::size_t order_begin = 0;
    for (auto& m : kept) {
        if (!result.mpcs.empty() && result.mpcs.back().order != m.order)
            order_begin = result.mpcs.size();
        bool dup = false;
        for (std::size_t i = order_begin; i < result.mpcs.size() && !dup; ++i)
            dup = same_path(result.mpcs[i], m, scene.tolerances().duplicate_path_m);
        if (dup)
            ++result.duplicates_merged;
        else
            result.mpcs.push_back(std::move(m));
    }

    result.elapsed_s = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    return result;
}

std::vector<TraceResult> trace_trajectory(const PreparedScene& scene, const Point3& tx, const Trajectory& rx,
                                          const TraceConfig& cfg, unsigned workers)
{
    cfg.validate();
    const std::size_t n = rx.size();
    std::vector<TraceResult> results(n);
    std::vector<std::exception_ptr> errors(n);

    auto run_one = [&](std::size_t i) {
        try {
            results[i] = trace_timestep(scene, tx, rx.positions[i], cfg);
            results[i].timestep = i;
        } catch (...) {
            errors[i] = std::current_exception();
        }
    };

    const unsigned n_workers = static_cast<unsigned>(std::min<std::size_t>(std::max(workers, 1u), std::max<std::size_t>(n, 1)));
    if (n_workers <= 1) {
        for (std::size_t i = 0; i < n; ++i)
            run_one(i);
    } else {
        std::atomic<std::size_t> next{0};
        std::vector<std::jthread> pool;
        pool.reserve(n_workers);
        for (unsigned w = 0; w < n_workers; ++w)
            pool.emplace_back([&] {
                for (std::size_t i = next++; i < n; i = next++)
                    run_one(i);
            });
    }

    for (std::size_t i = 0; i < n; ++i) {
        if (!errors[i])
            continue;
        try {
            std::rethrow_exception(errors[i]);
        } catch (const std::exception& e) {
            throw Error("timestep " + std::to_string(i) + ": " + e.what());
        }
    }
    return results;
}

TraceResult trace_timestep(const Scene& scene, const Point3& tx, const Point3& rx, const TraceConfig& cfg)
{
    return trace_timestep(PreparedScene(scene, cfg.tolerances), tx, rx, cfg);
}

std::vector<TraceResult> trace_trajectory(const Scene& scene, const Point3& tx, const Trajectory& rx,
                                          const TraceConfig& cfg, unsigned workers)
{
    return trace_trajectory(PreparedScene(scene, cfg.tolerances), tx, rx, cfg, workers);
}

} // namespace mmrt
