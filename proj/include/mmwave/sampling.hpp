#pragma once

#include "mmwave/channel.hpp"
#include "mmwave/types.hpp"

#include <iosfwd>
#include <vector>

namespace mmwave {

/// The observed index set Omega of an n_rows x n_cols matrix.
class SamplingMask {
public:
    SamplingMask(Index rows, Index cols);
    SamplingMask(Index rows, Index cols, std::vector<Entry> entries);

    static SamplingMask full(Index rows, Index cols);

    Index rows() const { return indicator_.rows(); }
    Index cols() const { return indicator_.cols(); }
    Index size() const { return static_cast<Index>(entries_.size()); }
    bool contains(Index row, Index col) const { return indicator_(row, col) != 0.0; }

    /// Sorted column-major, distinct.
    const std::vector<Entry>& entries() const { return entries_; }
    /// 1 on Omega, 0 elsewhere.
    const Eigen::MatrixXd& indicator() const { return indicator_; }

    /// Number of sampled entries per row / column.
    Eigen::VectorXi row_counts() const;
    Eigen::VectorXi col_counts() const;

private:
    std::vector<Entry> entries_;
    Eigen::MatrixXd indicator_;
};

/// P_Omega: copies entries on Omega, zeroes the rest.
CMatrix apply_mask(const CMatrix& matrix, const SamplingMask& omega);

struct SampleSet {
    SamplingMask omega;
    CMatrix observed;  ///< Y on Omega, exact zeros elsewhere
    double density = 1.0;
    double noise_variance = 0.0;
};

struct TrainingStage {
    int bs_antenna = 0;               ///< zero-based j_t
    std::vector<int> ms_antennas;     ///< zero-based i_k, one per MS subarray, in subarray order
};

struct TrainingSchedule {
    int num_ms = 0;
    int num_bs = 0;
    int num_rf_ms = 0;
    std::vector<TrainingStage> stages;

    Index num_samples() const { return static_cast<Index>(stages.size()) * num_rf_ms; }
    SamplingMask mask() const;
};

/// Closest M to `requested` that satisfies the USS constraints, i.e. a multiple of
/// N_RF_MS * N_BS with at most N_sub samples per column per subarray (and at least one).
Index nearest_valid_sample_count(int num_ms, int num_bs, int num_rf_ms, Index requested);

/// Returns an empty string when M is admissible, otherwise a diagnostic that names
/// the nearest valid M.
std::string check_sample_count(int num_ms, int num_bs, int num_rf_ms, Index num_samples);

/// round(p * N_MS * N_BS).
Index sample_count_for_density(int num_ms, int num_bs, double density);

/// USS switch protocol: N_s = M / N_RF_MS stages; stage t drives BS antenna
/// t mod N_BS and switches every MS subarray to a not-yet-used antenna for
/// that column, chosen uniformly.
TrainingSchedule build_uss_schedule(const ArrayGeometry& ms_geometry, const ArrayGeometry& bs_geometry,
                                    Index num_samples, Seed seed);

/// Y[i_k, j_t] = r / s with r = H[i_k, j_t] s + n, n ~ CN(0, noise_variance).
SampleSet observe(const CMatrix& channel, const TrainingSchedule& schedule, Complex pilot,
                  double noise_variance, Seed seed);
SampleSet observe(const ChannelInstance& channel, const TrainingSchedule& schedule, Complex pilot,
                  double noise_variance, Seed seed);

/// Probability that one given MS row receives no sample: ((N_MS - M/N_BS) / N_MS)^N_BS.
double miss_probability(int num_ms, int num_bs, Index num_samples, int num_rf_ms);

struct MissFrequency {
    long long trials = 0;
    long long row_misses = 0;      ///< schedules in which row 0 is unsampled
    long long any_row_misses = 0;  ///< schedules in which some row is unsampled

    double row_frequency() const { return trials ? static_cast<double>(row_misses) / trials : 0.0; }
    double any_row_frequency() const { return trials ? static_cast<double>(any_row_misses) / trials : 0.0; }
};

/// Monte-Carlo row-miss frequencies over `trials` independently seeded USS schedules.
MissFrequency empirical_miss_frequency(int num_ms, int num_bs, Index num_samples, int num_rf_ms,
                                       long long trials, Seed seed);

/// CSV: stage,bs_antenna,ms_antenna_1..ms_antenna_N (one-based antenna indices).
void write_schedule_csv(std::ostream& out, const TrainingSchedule& schedule);

}  // namespace mmwave
