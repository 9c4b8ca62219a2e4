// SPDX-License-Identifier: Apache-2.0
//
// Built-in scenario generators: the Indoor1 box room, the L-shaped hallway
// and the outdoor parking lot. Geometry that is not pinned down by a known
// layout is exposed as parameters with documented defaults.

#pragma once

#include "mmrt/scene.hpp"

#include <optional>
#include <string_view>
#include <vector>

namespace mmrt {

struct ScenarioBundle {
    Scene scene;
    NodeConfig tx;
    Trajectory rx;
    double rx_speed_mps = 0.0;
};

struct Indoor1Params {
    Point3 room_size{10.0, 19.0, 3.0};
    Point3 tx_position{5.0, 0.1, 2.9};
    double rx_height_m = 1.5;
    double rx_speed_mps = 1.2;
    double sample_interval_s = 0.005;
    std::size_t samples = 9000;
    double wall_clearance_m = 0.1;
    double spiral_start_radius_m = 0.3;
    // Outermost spiral radius; must leave wall_clearance_m to the walls.
    double spiral_max_radius_m = 4.4;
    double reflection_loss_db = kDefaultReflectionLossDb;
};

struct LRoomParams {
    double leg_length_m = 10.0;
    double leg_width_m = 3.0;
    double height_m = 3.0;
    Point3 tx_position{0.2, 1.5, 2.9};
    double rx_height_m = 1.5;
    double rx_speed_mps = 1.2;
    double sample_interval_s = 0.005;
    std::size_t samples = 12500;
    double floor_loss_db = 10.0;
    double ceiling_loss_db = 10.0;
    double wall_loss_db = 20.0;
};

struct ParkingLotParams {
    double lot_length_m = 120.0;
    double lot_width_m = 70.0;
    double kiosk_height_m = 3.0;
    double tx_mast_m = 0.5;
    double rx_height_m = 1.5;
    double rx_speed_mps = 4.17;
    double sample_interval_s = 0.005;
    std::size_t samples = 15000;
    // Inset of the driving loop from the lot edge, metres.
    double loop_inset_x_m = 35.0;
    double loop_inset_y_m = 20.0;
    double ground_loss_db = 10.0;
    double facade_loss_db = 10.0;
};

ScenarioBundle make_indoor1(const Indoor1Params& p = {});
ScenarioBundle make_lroom(const LRoomParams& p = {});
ScenarioBundle make_parking_lot(const ParkingLotParams& p = {});

// "indoor1", "lroom" or "parking"; nullopt for anything else.
std::optional<ScenarioBundle> make_builtin_scenario(std::string_view name);
const std::vector<std::string_view>& builtin_scenario_names();

// Constant-speed walk along a polyline: consecutive samples are exactly
// `step` apart (Euclidean chord). A closed polyline is traversed cyclically;
// an open one stops early when its end is reached.
std::vector<Point3> walk_polyline(const std::vector<Point3>& vertices, bool closed, double step,
                                  std::size_t samples);

} // namespace mmrt
