#pragma once

#include "mmwave/channel.hpp"
#include "mmwave/config.hpp"
#include "mmwave/evaluation.hpp"
#include "mmwave/sampling.hpp"

#include <iosfwd>
#include <map>
#include <optional>
#include <string>
#include <vector>

namespace mmwave::study {

/// Independent RNG streams of one Monte-Carlo trial, a pure function of
/// (master seed, trial index). Sweep points reuse a trial's streams, so every
/// axis value sees the same paths, phase-error pattern, switch draws and
/// normalized noise.
struct TrialStreams {
    Seed trial = 0;
    Seed paths = 0;
    Seed phase_ms = 0;
    Seed phase_bs = 0;
    Seed schedule = 0;
    Seed noise = 0;
};

TrialStreams trial_streams(Seed master_seed, int trial_index);

/// Full-size channel of one trial with phase errors of the given magnitudes.
ChannelInstance trial_channel(const ExperimentConfig& config, const TrialStreams& streams, double gamma_ms,
                              double gamma_bs);

// ---------------------------------------------------------------- convergence

struct ConvergenceCurve {
    double step_size = 0;
    double density = 0;
    int trials = 0;
    int diverged_trials = 0;
    /// Trials whose residual trace never increased.
    int monotone_trials = 0;
    /// Trials whose final residual is below their first.
    int decreasing_trials = 0;
    /// Indexed by iteration - 1, averaged over the trials still running.
    std::vector<double> mean_nmse;
    std::vector<double> mean_residual;
    std::vector<int> active_trials;
};

struct ConvergenceStudy {
    std::vector<ConvergenceCurve> curves;

    const ConvergenceCurve& curve(double step_size, double density) const;
};

ConvergenceStudy run_convergence_study(const ExperimentConfig& config);
void write_csv(std::ostream& out, const ExperimentConfig& config, const ConvergenceStudy& study);

// ---------------------------------------------------------------- stopping

struct StoppingPoint {
    double pnr_db = 0;
    std::vector<int> iterations;  ///< per trial
    std::map<int, int> histogram;
    int unconverged = 0;

    double mean() const;
};

struct StoppingStudy {
    std::vector<StoppingPoint> points;
};

StoppingStudy run_stopping_study(const ExperimentConfig& config);
void write_csv(std::ostream& out, const ExperimentConfig& config, const StoppingStudy& study);

// ---------------------------------------------------------------- NMSE comparison

inline constexpr const char* kSvp = "svp";
inline constexpr const char* kOmpUnitary = "omp_unitary";
inline constexpr const char* kOmpRedundant = "omp_redundant";

struct ExperimentRecord {
    int trial = 0;
    Seed seed = 0;
    double pnr_db = 0;
    double gamma_max = 0;
    double nmse_svp = 0;
    double nmse_omp_unitary = 0;
    std::optional<double> nmse_omp_redundant;
    int svp_iterations = 0;
};

struct NmsePoint {
    double pnr_db = 0;
    double gamma_max = 0;
    std::string estimator;
    int iterations = 0;
    int trials = 0;
    double mean = 0;
    double std_error = 0;
};

struct NmseStudy {
    std::vector<ExperimentRecord> records;
    std::vector<NmsePoint> points;

    const NmsePoint& point(double pnr_db, double gamma_max, const std::string& estimator) const;
};

NmseStudy run_nmse_comparison(const ExperimentConfig& config);
void write_csv(std::ostream& out, const ExperimentConfig& config, const NmseStudy& study);
void write_records_csv(std::ostream& out, const ExperimentConfig& config, const NmseStudy& study);

// ---------------------------------------------------------------- spectral efficiency

inline constexpr const char* kPerfect = "perfect";
inline constexpr const char* kNoAs = "no_as";

struct SeRecord {
    int trial = 0;
    double snr_db = 0;
    std::map<std::string, double> se;  ///< scheme -> bits/s/Hz
};

struct SePoint {
    double snr_db = 0;
    std::string scheme;
    int trials = 0;
    double mean = 0;
    double std_error = 0;
};

struct SeStudy {
    SelectionSetting setting = SelectionSetting::A;
    std::vector<std::string> schemes;
    std::vector<SeRecord> records;
    std::vector<SePoint> points;

    const SePoint& point(double snr_db, const std::string& scheme) const;
};

SeStudy run_se_study(const ExperimentConfig& config, SelectionSetting setting);
void write_csv(std::ostream& out, const ExperimentConfig& config, const SeStudy& study);

// ---------------------------------------------------------------- miss probability

/// Empirical validation only runs when the analytic value is at least this.
inline constexpr double kMissEstimableThreshold = 1e-4;

struct MissRow {
    MissCase setup;
    double analytic = 0;
    std::optional<MissFrequency> empirical;
};

struct MissStudy {
    std::vector<MissRow> rows;
};

MissStudy run_miss_prob(const ExperimentConfig& config);
void write_csv(std::ostream& out, const ExperimentConfig& config, const MissStudy& study);

/// "%.10g"
std::string format_number(double value);

}  // namespace mmwave::study
