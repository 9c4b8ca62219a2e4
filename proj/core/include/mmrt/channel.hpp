// SPDX-License-Identifier: Apache-2.0
//
// Narrowband MIMO channel assembly from traced multipath components and the
// single-stream SVD beamforming link budget.

#pragma once

#include "mmrt/geom.hpp"
#include "mmrt/tracer.hpp"

#include <Eigen/Dense>

#include <complex>
#include <span>

namespace mmrt {

// Uniform planar array of omnidirectional elements. Elements sit on a
// rows x cols grid in the plane orthogonal to `boresight`, columns along
// cross(up, boresight) and rows along `up`; element 0 is the phase reference.
struct ArrayConfig {
    int rows = 1;
    int cols = 1;
    double element_spacing_wavelengths = 0.5;
    Vec3 boresight{0.0, 1.0, 0.0};
    Vec3 up{0.0, 0.0, 1.0};

    int size() const { return rows * cols; }
    // Throws Error on empty arrays, non-positive spacing or a degenerate frame.
    void validate() const;
    // Element positions in metres relative to element 0.
    std::vector<Vec3> element_positions(double wavelength_m) const;
};

struct LinkBudget {
    double tx_power_dbm = 30.0;
    double noise_figure_db = 5.0;
    double bandwidth_hz = 400e6;
    double carrier_frequency_hz = 60e9;

    double wavelength_m() const { return kSpeedOfLight / carrier_frequency_hz; }
};

inline constexpr double kThermalNoiseDbmPerHz = -174.0;

// kTB at 290 K plus the receiver noise figure, dBm.
double noise_power_dbm(const LinkBudget& budget);

struct ChannelMatrix {
    // rx_elements x tx_elements, unitless amplitude gain.
    Eigen::MatrixXcd entries;

    Eigen::Index rx_elements() const { return entries.rows(); }
    Eigen::Index tx_elements() const { return entries.cols(); }
};

// exp(j*2*pi/lambda * <element position, direction>) per element.
Eigen::VectorXcd steering_vector(const ArrayConfig& array, const Direction& direction, double wavelength_m);

// H = sum_k alpha_k a_rx(aoa_k) a_tx(aod_k)^H with
// alpha_k = 10^(gain_db/20) * exp(j*phase).
ChannelMatrix assemble_channel(std::span<const Mpc> mpcs, const ArrayConfig& tx_array, const ArrayConfig& rx_array,
                               double wavelength_m);

double largest_singular_value(const ChannelMatrix& h);

// P_TX + 20 log10(sigma_1) - N0; -inf when H is identically zero.
double beamforming_snr_db(const ChannelMatrix& h, const LinkBudget& budget);

} // namespace mmrt
