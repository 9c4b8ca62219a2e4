// SPDX-License-Identifier: Apache-2.0

#include "mmrt/channel.hpp"

#include "mmrt/errors.hpp"

#include <cmath>
#include <limits>
#include <numbers>

namespace mmrt {

void ArrayConfig::validate() const
{
    if (rows < 1 || cols < 1)
        throw Error("array needs at least one row and one column");
    if (!(element_spacing_wavelengths > 0.0))
        throw Error("element spacing must be positive");
    if (!(norm(cross(up, boresight)) > 1e-12))
        throw Error("array boresight and up vectors must not be parallel");
}

std::vector<Vec3> ArrayConfig::element_positions(double wavelength_m) const
{
    validate();
    const Vec3 col_axis = normalized(cross(up, boresight));
    const Vec3 row_axis = normalized(cross(boresight, col_axis));
    const double d = element_spacing_wavelengths * wavelength_m;
    std::vector<Vec3> pos;
    pos.reserve(static_cast<std::size_t>(size()));
    for (int r = 0; r < rows; ++r)
        for (int c = 0; c < cols; ++c)
            pos.push_back(col_axis * (c * d) + row_axis * (r * d));
    return pos;
}

double noise_power_dbm(const LinkBudget& budget)
{
    if (!(budget.bandwidth_hz > 0.0))
        throw Error("bandwidth must be positive");
    return kThermalNoiseDbmPerHz + 10.0 * std::log10(budget.bandwidth_hz) + budget.noise_figure_db;
}

Eigen::VectorXcd steering_vector(const ArrayConfig& array, const Direction& direction, double wavelength_m)
{
    const auto pos = array.element_positions(wavelength_m);
    const Vec3 u = direction.unit_vector();
    const double k = 2.0 * std::numbers::pi / wavelength_m;
    Eigen::VectorXcd a(static_cast<Eigen::Index>(pos.size()));
    for (std::size_t m = 0; m < pos.size(); ++m)
        a(static_cast<Eigen::Index>(m)) = std::polar(1.0, k * dot(pos[m], u));
    return a;
}

ChannelMatrix assemble_channel(std::span<const Mpc> mpcs, const ArrayConfig& tx_array, const ArrayConfig& rx_array,
                               double wavelength_m)
{
    ChannelMatrix h;
    h.entries = Eigen::MatrixXcd::Zero(rx_array.size(), tx_array.size());
    for (const auto& m : mpcs) {
        const std::complex<double> alpha = std::polar(std::pow(10.0, m.gain_db / 20.0), m.phase_rad);
        const Eigen::VectorXcd a_rx = steering_vector(rx_array, m.aoa, wavelength_m);
        const Eigen::VectorXcd a_tx = steering_vector(tx_array, m.aod, wavelength_m);
        h.entries.noalias() += alpha * a_rx * a_tx.adjoint();
    }
    return h;
}

double largest_singular_value(const ChannelMatrix& h)
{
    if (h.entries.size() == 0)
        return 0.0;
    Eigen::JacobiSVD<Eigen::MatrixXcd> svd(h.entries);
    return svd.singularValues()(0);
}

double beamforming_snr_db(const ChannelMatrix& h, const LinkBudget& budget)
{
    const double sigma1 = largest_singular_value(h);
    if (!(sigma1 > 0.0))
        return -std::numeric_limits<double>::infinity();
    return budget.tx_power_dbm + 20.0 * std::log10(sigma1) - noise_power_dbm(budget);
}

} // namespace mmrt
