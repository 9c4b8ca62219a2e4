// SPDX-License-Identifier: Apache-2.0

#include "mmrt/scenarios.hpp"

#include "mmrt/errors.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

namespace mmrt {

std::vector<Point3> walk_polyline(const std::vector<Point3>& vertices, bool closed, double step,
                                  std::size_t samples)
{
    if (vertices.size() < 2)
        throw Error("walk_polyline needs at least two vertices");
    if (!(step > 0.0))
        throw Error("walk_polyline needs a positive step");

    const std::size_t n_seg = closed ? vertices.size() : vertices.size() - 1;
    auto seg_a = [&](std::size_t i) -> const Point3& { return vertices[i % vertices.size()]; };
    auto seg_b = [&](std::size_t i) -> const Point3& { return vertices[(i + 1) % vertices.size()]; };

    std::vector<Point3> out;
    out.reserve(samples);
    if (samples == 0)
        return out;

    Point3 p = vertices.front();
    std::size_t seg = 0;
    double t0 = 0.0;
    out.push_back(p);

    while (out.size() < samples) {
        bool found = false;
        // Walk forward until the sphere of radius `step` around p is left.
        // The start of every examined segment is strictly inside the sphere,
        // so the exit root is the larger one.
        for (std::size_t hops = 0; hops <= n_seg + 1; ++hops) {
            if (!closed && seg >= n_seg)
                return out;
            const Point3& a = seg_a(seg);
            const Vec3 d = seg_b(seg) - a;
            const double A = dot(d, d);
            if (A > 0.0) {
                const Vec3 ap = a - p;
                const double B = 2.0 * dot(d, ap);
                const double C = dot(ap, ap) - step * step;
                const double disc = B * B - 4.0 * A * C;
                if (disc >= 0.0) {
                    const double t = (-B + std::sqrt(disc)) / (2.0 * A);
                    if (t >= t0 && t <= 1.0) {
                        p = a + d * t;
                        t0 = t;
                        found = true;
                        break;
                    }
                }
            }
            seg = closed ? (seg + 1) % n_seg : seg + 1;
            t0 = 0.0;
        }
        if (!found)
            throw Error("walk_polyline: step exceeds the polyline extent");
        out.push_back(p);
    }
    return out;
}

namespace {

std::vector<Point3> archimedean_spiral(const Point3& center, double r0, double r_max, double needed_length,
                                       double resolution)
{
    // r = r0 + b*theta, with b chosen so that the curve reaches r_max after
    // roughly needed_length of arc.
    const double b = (r_max * r_max - r0 * r0) / (2.0 * needed_length);
    std::vector<Point3> pts;
    double theta = 0.0;
    double length = 0.0;
    Point3 prev{center.x + r0, center.y, center.z};
    pts.push_back(prev);
    while (length < needed_length + 1.0) {
        const double r = r0 + b * theta;
        theta += resolution / std::sqrt(r * r + b * b);
        const double rn = r0 + b * theta;
        const Point3 q{center.x + rn * std::cos(theta), center.y + rn * std::sin(theta), center.z};
        length += distance(prev, q);
        pts.push_back(q);
        prev = q;
    }
    return pts;
}

} // namespace

ScenarioBundle make_indoor1(const Indoor1Params& p)
{
    ScenarioBundle out;
    out.scene.name = "indoor1";
    out.scene.materials.push_back({"default", p.reflection_loss_db});
    add_box(out.scene, {0.0, 0.0, 0.0}, p.room_size, 0);

    out.tx = {NodeRole::Tx, p.tx_position};
    out.rx_speed_mps = p.rx_speed_mps;
    out.rx.sample_interval_s = p.sample_interval_s;

    const double step = p.rx_speed_mps * p.sample_interval_s;
    const double needed = step * static_cast<double>(p.samples > 0 ? p.samples - 1 : 0);
    const Point3 center{p.room_size.x / 2.0, p.room_size.y / 2.0, p.rx_height_m};
    const double r_limit = std::min(p.room_size.x, p.room_size.y) / 2.0 - p.wall_clearance_m;
    const double r_max = std::min(p.spiral_max_radius_m, r_limit);
    const auto spiral = archimedean_spiral(center, p.spiral_start_radius_m, r_max, needed, step / 16.0);
    out.rx.positions = walk_polyline(spiral, false, step, p.samples);

    for (auto& q : out.rx.positions) {
        q.x = std::clamp(q.x, p.wall_clearance_m, p.room_size.x - p.wall_clearance_m);
        q.y = std::clamp(q.y, p.wall_clearance_m, p.room_size.y - p.wall_clearance_m);
    }
    return out;
}

ScenarioBundle make_lroom(const LRoomParams& p)
{
    const double L = p.leg_length_m;
    const double W = p.leg_width_m;
    const double H = p.height_m;
    if (!(W > 0.0 && L > W && H > 0.0))
        throw Error("L-room needs leg_length > leg_width > 0 and positive height");

    ScenarioBundle out;
    Scene& s = out.scene;
    s.name = "lroom";
    s.materials = {{"floor", p.floor_loss_db}, {"ceiling", p.ceiling_loss_db}, {"wall", p.wall_loss_db}};

    // Leg A runs along +x over y in [0, W]; leg B runs along +y over
    // x in [L - W, L]. The two share the corner square.
    const double xi = L - W;
    for (const auto& [z, mat] : {std::pair{0.0, 0}, std::pair{H, 1}}) {
        add_quad(s, {0, 0, z}, {xi, 0, z}, {xi, W, z}, {0, W, z}, mat);
        add_quad(s, {xi, 0, z}, {L, 0, z}, {L, L, z}, {xi, L, z}, mat);
    }
    const std::vector<Point3> outline{{0, 0, 0}, {L, 0, 0}, {L, L, 0}, {xi, L, 0}, {xi, W, 0}, {0, W, 0}};
    for (std::size_t i = 0; i < outline.size(); ++i) {
        const Point3 a = outline[i];
        const Point3 b = outline[(i + 1) % outline.size()];
        add_quad(s, a, b, {b.x, b.y, H}, {a.x, a.y, H}, 2);
    }

    out.tx = {NodeRole::Tx, p.tx_position};
    out.rx_speed_mps = p.rx_speed_mps;
    out.rx.sample_interval_s = p.sample_interval_s;

    // Two-lane loop: out along leg A, up leg B, back down and home.
    const double z = p.rx_height_m;
    const double lane1 = W / 3.0, lane2 = 2.0 * W / 3.0;
    const double start_x = std::min(0.6, xi / 2.0);
    const std::vector<Point3> loop{{start_x, lane1, z},     {L - lane1, lane1, z}, {L - lane1, L - lane1, z},
                                   {L - lane2, L - lane1, z}, {L - lane2, lane2, z}, {start_x, lane2, z}};
    out.rx.positions = walk_polyline(loop, true, p.rx_speed_mps * p.sample_interval_s, p.samples);
    return out;
}

ScenarioBundle make_parking_lot(const ParkingLotParams& p)
{
    const double X = p.lot_length_m;
    const double Y = p.lot_width_m;

    ScenarioBundle out;
    Scene& s = out.scene;
    s.name = "parking";
    s.materials = {{"asphalt", p.ground_loss_db}, {"facade", p.facade_loss_db}};

    add_quad(s, {-20, -20, 0}, {X + 20, -20, 0}, {X + 20, Y + 20, 0}, {-20, Y + 20, 0}, 0);
    // Buildings lining the lot; the ground plane already closes their bottoms.
    add_box(s, {0, Y + 2, 0}, {X, Y + 12, 10}, 1, false, true);
    add_box(s, {0, -12, 0}, {X, -2, 8}, 1, false, true);
    add_box(s, {-12, 0, 0}, {-2, Y, 6}, 1, false, true);
    add_box(s, {X + 2, 10, 0}, {X + 12, Y - 10, 12}, 1, false, true);
    // Low building in the middle of the lot carrying the TX.
    const Point3 c{X / 2.0, Y / 2.0, 0.0};
    add_box(s, {c.x - 3, c.y - 2, 0}, {c.x + 3, c.y + 2, p.kiosk_height_m}, 1, false, true);

    out.tx = {NodeRole::Tx, {c.x, c.y, p.kiosk_height_m + p.tx_mast_m}};
    out.rx_speed_mps = p.rx_speed_mps;
    out.rx.sample_interval_s = p.sample_interval_s;

    const double z = p.rx_height_m;
    const double x0 = p.loop_inset_x_m, x1 = X - p.loop_inset_x_m;
    const double y0 = p.loop_inset_y_m, y1 = Y - p.loop_inset_y_m;
    const std::vector<Point3> loop{{x0, y0, z}, {x1, y0, z}, {x1, y1, z}, {x0, y1, z}};
    out.rx.positions = walk_polyline(loop, true, p.rx_speed_mps * p.sample_interval_s, p.samples);
    return out;
}

std::optional<ScenarioBundle> make_builtin_scenario(std::string_view name)
{
    if (name == "indoor1")
        return make_indoor1();
    if (name == "lroom")
        return make_lroom();
    if (name == "parking")
        return make_parking_lot();
    return std::nullopt;
}

const std::vector<std::string_view>& builtin_scenario_names()
{
    static const std::vector<std::string_view> names{"indoor1", "lroom", "parking"};
    return names;
}

} // namespace mmrt
