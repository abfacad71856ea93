#pragma once

#include "mmwave/types.hpp"

#include <optional>
#include <span>
#include <vector>

namespace mmwave {

/// ||H - H_hat||_F^2 / ||H||_F^2. Throws on shape mismatch or an all-zero truth.
double nmse(const CMatrix& truth, const CMatrix& estimate);

/// Top-`streams` right singular vectors of `estimate` (N_BS x streams, orthonormal columns).
CMatrix svd_precoder(const CMatrix& estimate, int streams);

/// log2 det(I + (snr / L) H_eff H_eff^H), H_eff = rows `selected_ms` of H P,
/// L = number of precoder columns. `snr` is linear.
double spectral_efficiency(const CMatrix& channel, const CMatrix& precoder, std::span<const int> selected_ms,
                           double snr);

/// Partition of an array into equal contiguous groups, one RF chain each.
struct SubarrayPartition {
    int num_antennas = 1;
    int num_groups = 1;

    int group_size() const { return num_antennas / num_groups; }
    int first(int group) const { return group * group_size(); }
    int group_of(int antenna) const { return antenna / group_size(); }
    void validate() const;
};

enum class SelectionSide { ms_only, joint };
enum class SelectionSetting { A, B };

struct SelectionConstraint {
    SelectionSide side = SelectionSide::ms_only;
    SubarrayPartition ms;
    std::optional<SubarrayPartition> bs;

    void validate() const;
};

/// Antenna choice made from a channel estimate, plus the precoder built from it.
struct AntennaSelection {
    std::vector<int> selected_ms;
    std::optional<std::vector<int>> selected_bs;
    /// N_BS x L for setting A; |selected_bs| x L for setting B.
    CMatrix precoder;
    int sweeps = 0;
};

struct SeResult {
    std::vector<int> selected_ms;
    std::optional<std::vector<int>> selected_bs;
    double spectral_efficiency = 0;
};

/// Greedy one-antenna-per-subarray selection on the channel estimate.
/// Setting A: fixed SVD precoder from the full estimate; MS subarrays are filled in
/// order, each with the antenna that maximizes the SE of the partial selection.
/// Setting B: alternating sweeps over BS subarrays (precoder recomputed from the
/// selected columns of the estimate) and MS subarrays until the selection repeats
/// or `max_sweeps` is reached.
AntennaSelection greedy_selection(const CMatrix& estimate, const SelectionConstraint& constraint, int streams,
                                  double snr, SelectionSetting setting, int max_sweeps = 8);

/// SE of `selection` on the true channel.
double evaluate_selection(const CMatrix& truth, const AntennaSelection& selection, double snr);

/// greedy_selection on `estimate`, evaluated on `truth`.
SeResult select_and_evaluate(const CMatrix& truth, const CMatrix& estimate, const SelectionConstraint& constraint,
                             int streams, double snr, SelectionSetting setting);

}  // namespace mmwave
