#pragma once

#include "mmwave/evaluation.hpp"
#include "mmwave/svp.hpp"
#include "mmwave/types.hpp"

#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

namespace mmwave {

enum class MismatchTerminals { both, ms, bs };

/// One miss-probability case: N_MS, N_BS, N_RF_MS and sample count M.
struct MissCase {
    int num_ms = 64;
    int num_bs = 64;
    int num_rf_ms = 4;
    Index num_samples = 2048;
};

/// Everything a study needs. Loaded from an INI file ([section] key = value);
/// list values are comma separated. Angles in the config are multiples of pi.
struct ExperimentConfig {
    // [dimensions]
    int num_ms = 64;
    int num_bs = 64;
    int num_rf_ms = 4;
    int num_rf_bs = 4;
    double element_spacing = 0.5;

    // [channel]
    int paths = 4;
    double gain_variance = 1.0;
    double gamma_max_ms = 0.0;  ///< radians
    double gamma_max_bs = 0.0;  ///< radians

    // [sampling]
    double density = 0.5;
    std::optional<Index> num_samples;  ///< overrides density when set
    double pilot = 1.0;

    // [svp]
    std::optional<double> step_size;  ///< default_step_size(density) when unset
    double tolerance_floor = 1e-3;
    int max_iterations = 100;
    ProjectionMethod projection = ProjectionMethod::gram_eigendecomposition;

    // [omp]
    bool redundant = true;
    int redundant_grid_ms = 128;
    int redundant_grid_bs = 128;
    std::optional<int> omp_iterations;  ///< overrides the PNR-matched schedule

    // [sweep]
    std::vector<double> pnr_db{5, 10, 15, 20, 25};
    std::vector<double> densities{0.25, 0.5, 0.75};
    std::vector<double> step_sizes{0.6, 1.4, 1.8, 2.4};
    std::vector<double> gamma_max;  ///< radians; default 0, 0.05 pi, ..., 0.5 pi
    MismatchTerminals mismatch = MismatchTerminals::both;
    std::vector<double> snr_db{-10, -5, 0, 5, 10, 15, 20};

    // [convergence]
    double convergence_pnr_db = 25.0;
    int convergence_iterations = 30;

    // [se]
    double se_pnr_db = 10.0;
    SelectionSetting se_setting = SelectionSetting::A;

    // [missprob]
    std::vector<MissCase> miss_cases{{64, 64, 4, 2048}, {8, 8, 2, 16}, {64, 64, 4, 4096}};
    long long miss_trials = 100000;

    // [run]
    std::optional<int> trials;  ///< per-study default when unset
    Seed master_seed = 1;

    ExperimentConfig();

    /// M for the base density (or the explicit num_samples).
    Index sample_count() const;
    Index sample_count(double p) const;
    double step_size_or_default() const;
    int trials_or(int fallback) const { return trials.value_or(fallback); }

    /// Every violated constraint, empty when the config is usable.
    std::vector<std::string> validate() const;

    /// Stable text rendering of every field; the digest hashes this.
    std::string canonical_text() const;
    /// 64-bit FNV-1a of canonical_text(), hex.
    std::string digest() const;
};

/// Throws std::runtime_error with the offending key on parse errors.
ExperimentConfig load_config(const std::string& path);
ExperimentConfig parse_config(std::istream& in);

/// Unsigned 64-bit seed; throws std::runtime_error on malformed text.
Seed parse_seed(const std::string& text);

/// PNR (dB) -> sigma^2 with |s| = pilot and sigma_alpha^2 = gain_variance.
double noise_variance_for_pnr(double pnr_db, double gain_variance = 1.0, double pilot = 1.0);

}  // namespace mmwave
