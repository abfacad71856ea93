#pragma once

#include "mmwave/types.hpp"

#include <span>
#include <vector>

namespace mmwave {

/// Uniform linear array of one terminal, wired as equal contiguous subarrays
/// that each share a single RF chain through switches.
struct ArrayGeometry {
    int num_antennas = 1;
    int num_rf_chains = 1;
    /// Adjacent-element spacing d expressed in wavelengths (d / lambda).
    double element_spacing = 0.5;
    /// Per-element phase error gamma_i in radians; all zero for an ideal array.
    std::vector<double> phase_errors;

    /// Ideal array: zero phase errors.
    static ArrayGeometry ideal(int num_antennas, int num_rf_chains,
                               double element_spacing = 0.5);

    int subarray_size() const { return num_antennas / num_rf_chains; }
    bool is_ideal() const;

    /// Throws std::invalid_argument when an invariant is violated.
    void validate() const;
};

/// Returns a copy of `geometry` whose phase errors are i.i.d. U[-gamma_max, gamma_max].
/// The draw is gamma_max * u with u ~ U[-1, 1] from `seed`, so sweeping gamma_max with
/// a fixed seed rescales one error pattern and gamma_max = 0 is exactly ideal.
ArrayGeometry with_phase_errors(ArrayGeometry geometry, double gamma_max, Seed seed);

struct PathSet {
    std::vector<double> aoas;     ///< theta_l, radians
    std::vector<double> aods;     ///< phi_l, radians
    std::vector<Complex> gains;   ///< alpha_l before the sqrt(N_BS N_MS / L) scaling
    double gain_variance = 1.0;

    int count() const { return static_cast<int>(gains.size()); }
    void validate() const;
};

struct ChannelInstance {
    CMatrix matrix;  ///< N_MS x N_BS
    PathSet paths;
    ArrayGeometry ms_geometry;
    ArrayGeometry bs_geometry;
};

/// Array response to a plane wave at `angle` in [-pi/2, pi/2], including the
/// geometry's phase errors. Unit Euclidean norm.
CVector steering_vector(const ArrayGeometry& geometry, double angle);

/// Columns are steering_vector(geometry, angles[l]).
CMatrix steering_matrix(const ArrayGeometry& geometry, std::span<const double> angles);

/// Angles i.i.d. U[-pi/2, pi/2], gains i.i.d. CN(0, gain_variance).
PathSet sample_paths(int count, double gain_variance, Seed seed);

/// H = A_MS diag(sqrt(N_BS N_MS / L) alpha) A_BS^H.
ChannelInstance assemble_channel(const PathSet& paths, const ArrayGeometry& ms_geometry,
                                 const ArrayGeometry& bs_geometry);

}  // namespace mmwave
