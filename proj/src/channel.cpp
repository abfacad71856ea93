#include "mmwave/channel.hpp"

#include "mmwave/random.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

namespace mmwave {

namespace {

bool angle_in_range(double angle) {
    return std::isfinite(angle) && angle >= -kPi / 2 && angle <= kPi / 2;
}

}  // namespace

ArrayGeometry ArrayGeometry::ideal(int num_antennas, int num_rf_chains, double element_spacing) {
    ArrayGeometry g;
    g.num_antennas = num_antennas;
    g.num_rf_chains = num_rf_chains;
    g.element_spacing = element_spacing;
    g.phase_errors.assign(static_cast<std::size_t>(std::max(num_antennas, 0)), 0.0);
    g.validate();
    return g;
}

bool ArrayGeometry::is_ideal() const {
    return std::all_of(phase_errors.begin(), phase_errors.end(),
                       [](double g) { return g == 0.0; });
}

void ArrayGeometry::validate() const {
    if (num_antennas < 1) throw std::invalid_argument("ArrayGeometry: num_antennas must be positive");
    if (num_rf_chains < 1) throw std::invalid_argument("ArrayGeometry: num_rf_chains must be positive");
    if (num_antennas % num_rf_chains != 0) {
        throw std::invalid_argument("ArrayGeometry: num_rf_chains (" + std::to_string(num_rf_chains) +
                                    ") must divide num_antennas (" + std::to_string(num_antennas) + ")");
    }
    if (!(element_spacing > 0) || !std::isfinite(element_spacing))
        throw std::invalid_argument("ArrayGeometry: element_spacing must be positive");
    if (phase_errors.size() != static_cast<std::size_t>(num_antennas))
        throw std::invalid_argument("ArrayGeometry: phase_errors must have num_antennas entries");
}

ArrayGeometry with_phase_errors(ArrayGeometry geometry, double gamma_max, Seed seed) {
    if (!(gamma_max >= 0)) throw std::invalid_argument("with_phase_errors: gamma_max must be >= 0");
    Rng rng(seed);
    std::uniform_real_distribution<double> unit(-1.0, 1.0);
    geometry.phase_errors.resize(static_cast<std::size_t>(geometry.num_antennas));
    for (auto& g : geometry.phase_errors) g = gamma_max * unit(rng);
    return geometry;
}

void PathSet::validate() const {
    if (gains.empty()) throw std::invalid_argument("PathSet: at least one path required");
    if (aoas.size() != gains.size() || aods.size() != gains.size())
        throw std::invalid_argument("PathSet: aoas, aods and gains must have equal length");
    if (!(gain_variance > 0)) throw std::invalid_argument("PathSet: gain_variance must be positive");
    for (std::size_t l = 0; l < gains.size(); ++l) {
        if (!angle_in_range(aoas[l]) || !angle_in_range(aods[l]))
            throw std::invalid_argument("PathSet: angles must lie in [-pi/2, pi/2]");
    }
}

CVector steering_vector(const ArrayGeometry& geometry, double angle) {
    if (!angle_in_range(angle)) throw std::invalid_argument("steering_vector: angle outside [-pi/2, pi/2]");
    geometry.validate();
    const Index n = geometry.num_antennas;
    const double phase_step = 2.0 * kPi * geometry.element_spacing * std::sin(angle);
    const double scale = 1.0 / std::sqrt(static_cast<double>(n));
    CVector a(n);
    for (Index i = 0; i < n; ++i) {
        const double phase = static_cast<double>(i) * phase_step + geometry.phase_errors[static_cast<std::size_t>(i)];
        a(i) = scale * std::polar(1.0, phase);
    }
    return a;
}

CMatrix steering_matrix(const ArrayGeometry& geometry, std::span<const double> angles) {
    CMatrix a(geometry.num_antennas, static_cast<Index>(angles.size()));
    for (std::size_t l = 0; l < angles.size(); ++l) a.col(static_cast<Index>(l)) = steering_vector(geometry, angles[l]);
    return a;
}

PathSet sample_paths(int count, double gain_variance, Seed seed) {
    if (count < 1) throw std::invalid_argument("sample_paths: count must be >= 1");
    if (!(gain_variance > 0)) throw std::invalid_argument("sample_paths: gain_variance must be positive");
    Rng rng(seed);
    std::uniform_real_distribution<double> angle(-kPi / 2, kPi / 2);
    PathSet paths;
    paths.gain_variance = gain_variance;
    for (int l = 0; l < count; ++l) {
        paths.aoas.push_back(angle(rng));
        paths.aods.push_back(angle(rng));
        paths.gains.push_back(complex_gaussian(rng, gain_variance));
    }
    return paths;
}

ChannelInstance assemble_channel(const PathSet& paths, const ArrayGeometry& ms_geometry,
                                 const ArrayGeometry& bs_geometry) {
    paths.validate();
    ms_geometry.validate();
    bs_geometry.validate();
    const CMatrix a_ms = steering_matrix(ms_geometry, paths.aoas);
    const CMatrix a_bs = steering_matrix(bs_geometry, paths.aods);
    const double scale = std::sqrt(static_cast<double>(ms_geometry.num_antennas) * bs_geometry.num_antennas /
                                   paths.count());
    CVector scaled(paths.count());
    for (int l = 0; l < paths.count(); ++l) scaled(l) = scale * paths.gains[static_cast<std::size_t>(l)];

    ChannelInstance channel;
    channel.matrix = a_ms * scaled.asDiagonal() * a_bs.adjoint();
    channel.paths = paths;
    channel.ms_geometry = ms_geometry;
    channel.bs_geometry = bs_geometry;
    return channel;
}

}  // namespace mmwave
