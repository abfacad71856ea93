#include "mmwave/evaluation.hpp"

#include <Eigen/Cholesky>
#include <Eigen/SVD>

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

namespace mmwave {

double nmse(const CMatrix& truth, const CMatrix& estimate) {
    if (truth.rows() != estimate.rows() || truth.cols() != estimate.cols())
        throw std::invalid_argument("nmse: shape mismatch");
    const double power = truth.squaredNorm();
    if (!(power > 0)) throw std::invalid_argument("nmse: truth must be nonzero");
    return (truth - estimate).squaredNorm() / power;
}

CMatrix svd_precoder(const CMatrix& estimate, int streams) {
    if (streams < 1 || streams > std::min(estimate.rows(), estimate.cols()))
        throw std::invalid_argument("svd_precoder: streams must be in [1, min(rows, cols)]");
    Eigen::JacobiSVD<CMatrix> svd(estimate, Eigen::ComputeThinV);
    return svd.matrixV().leftCols(streams);
}

namespace {

// log2 det(I + c A A^H) through the smaller Gram matrix.
double log2_det_identity_plus(const CMatrix& a, double c) {
    if (a.size() == 0 || c == 0.0) return 0.0;
    const CMatrix gram = a.rows() <= a.cols() ? CMatrix(a * a.adjoint()) : CMatrix(a.adjoint() * a);
    const CMatrix m = CMatrix::Identity(gram.rows(), gram.cols()) + c * gram;
    Eigen::LLT<CMatrix> llt(m);
    const auto diag = llt.matrixLLT().diagonal();
    double log_det = 0;
    for (Index k = 0; k < diag.size(); ++k) log_det += 2.0 * std::log(std::real(diag(k)));
    return log_det / std::log(2.0);
}

CMatrix rows_of(const CMatrix& m, std::span<const int> rows) {
    CMatrix out(static_cast<Index>(rows.size()), m.cols());
    for (std::size_t k = 0; k < rows.size(); ++k) out.row(static_cast<Index>(k)) = m.row(rows[k]);
    return out;
}

CMatrix cols_of(const CMatrix& m, std::span<const int> cols) {
    CMatrix out(m.rows(), static_cast<Index>(cols.size()));
    for (std::size_t k = 0; k < cols.size(); ++k) out.col(static_cast<Index>(k)) = m.col(cols[k]);
    return out;
}

double se_of(const CMatrix& channel_times_precoder, std::span<const int> rows, Index streams, double snr) {
    return log2_det_identity_plus(rows_of(channel_times_precoder, rows), snr / static_cast<double>(streams));
}

// Setting A step: fill each MS subarray in order given a fixed H P.
std::vector<int> greedy_rows(const CMatrix& hp, const SubarrayPartition& ms, Index streams, double snr) {
    std::vector<int> chosen;
    for (int g = 0; g < ms.num_groups; ++g) {
        int best_antenna = ms.first(g);
        double best = -1;
        chosen.push_back(best_antenna);
        for (int a = ms.first(g); a < ms.first(g) + ms.group_size(); ++a) {
            chosen.back() = a;
            const double se = se_of(hp, chosen, streams, snr);
            if (se > best) {
                best = se;
                best_antenna = a;
            }
        }
        chosen.back() = best_antenna;
    }
    return chosen;
}

int precoder_streams(int streams, const CMatrix& sub) {
    return static_cast<int>(std::min<Index>(streams, std::min(sub.rows(), sub.cols())));
}

// SE (on `channel`) of the MS rows / BS columns with the precoder taken from the
// selected columns of `estimate`.
double joint_se(const CMatrix& channel, const CMatrix& estimate, std::span<const int> ms_rows,
                std::span<const int> bs_cols, int streams, double snr) {
    const CMatrix sub_est = cols_of(estimate, bs_cols);
    const CMatrix p = svd_precoder(sub_est, precoder_streams(streams, sub_est));
    const CMatrix hp = rows_of(cols_of(channel, bs_cols), ms_rows) * p;
    return log2_det_identity_plus(hp, snr / static_cast<double>(p.cols()));
}

// Chooses, for one subarray, the antenna maximizing `score` with the rest of `chosen` held fixed.
template <typename Score>
bool refine_group(std::vector<int>& chosen, std::size_t slot, const SubarrayPartition& part, int group,
                  Score&& score) {
    const int before = chosen[slot];
    int best_antenna = before;
    double best = -1;
    for (int a = part.first(group); a < part.first(group) + part.group_size(); ++a) {
        chosen[slot] = a;
        const double s = score(chosen);
        if (s > best) {
            best = s;
            best_antenna = a;
        }
    }
    chosen[slot] = best_antenna;
    return best_antenna != before;
}

std::vector<int> all_antennas(int n) {
    std::vector<int> v(static_cast<std::size_t>(n));
    std::iota(v.begin(), v.end(), 0);
    return v;
}

}  // namespace

double spectral_efficiency(const CMatrix& channel, const CMatrix& precoder, std::span<const int> selected_ms,
                           double snr) {
    if (precoder.rows() != channel.cols()) throw std::invalid_argument("spectral_efficiency: precoder rows != N_BS");
    if (!(snr >= 0)) throw std::invalid_argument("spectral_efficiency: snr must be >= 0");
    for (int i : selected_ms)
        if (i < 0 || i >= channel.rows()) throw std::invalid_argument("spectral_efficiency: MS index out of range");
    if (precoder.cols() == 0) return 0.0;
    return se_of(channel * precoder, selected_ms, precoder.cols(), snr);
}

void SubarrayPartition::validate() const {
    if (num_antennas < 1 || num_groups < 1 || num_antennas % num_groups != 0)
        throw std::invalid_argument("SubarrayPartition: groups must be equal-sized and cover all antennas");
}

void SelectionConstraint::validate() const {
    ms.validate();
    if (side == SelectionSide::joint) {
        if (!bs) throw std::invalid_argument("SelectionConstraint: joint selection needs a BS partition");
        bs->validate();
    }
}

AntennaSelection greedy_selection(const CMatrix& estimate, const SelectionConstraint& constraint, int streams,
                                  double snr, SelectionSetting setting, int max_sweeps) {
    constraint.validate();
    if (constraint.ms.num_antennas != estimate.rows())
        throw std::invalid_argument("greedy_selection: MS partition does not match estimate rows");
    if (streams < 1) throw std::invalid_argument("greedy_selection: streams must be >= 1");

    AntennaSelection sel;
    if (setting == SelectionSetting::A) {
        sel.precoder = svd_precoder(estimate, precoder_streams(streams, estimate));
        sel.selected_ms = greedy_rows(estimate * sel.precoder, constraint.ms, sel.precoder.cols(), snr);
        sel.sweeps = 1;
        return sel;
    }

    if (constraint.side != SelectionSide::joint || !constraint.bs)
        throw std::invalid_argument("greedy_selection: setting B requires a joint constraint");
    const auto& bs_part = *constraint.bs;
    if (bs_part.num_antennas != estimate.cols())
        throw std::invalid_argument("greedy_selection: BS partition does not match estimate columns");

    // Initial BS pass against every MS antenna, then the first MS pass.
    const std::vector<int> every_ms = all_antennas(constraint.ms.num_antennas);
    std::vector<int> bs_sel;
    for (int g = 0; g < bs_part.num_groups; ++g) {
        bs_sel.push_back(bs_part.first(g));
        refine_group(bs_sel, bs_sel.size() - 1, bs_part, g, [&](const std::vector<int>& cols) {
            return joint_se(estimate, estimate, every_ms, cols, streams, snr);
        });
    }
    std::vector<int> ms_sel;
    for (int g = 0; g < constraint.ms.num_groups; ++g) {
        ms_sel.push_back(constraint.ms.first(g));
        refine_group(ms_sel, ms_sel.size() - 1, constraint.ms, g, [&](const std::vector<int>& rows) {
            return joint_se(estimate, estimate, rows, bs_sel, streams, snr);
        });
    }
    sel.sweeps = 1;

    while (sel.sweeps < max_sweeps) {
        bool changed = false;
        for (int g = 0; g < bs_part.num_groups; ++g) {
            changed |= refine_group(bs_sel, static_cast<std::size_t>(g), bs_part, g, [&](const std::vector<int>& cols) {
                return joint_se(estimate, estimate, ms_sel, cols, streams, snr);
            });
        }
        for (int g = 0; g < constraint.ms.num_groups; ++g) {
            changed |= refine_group(ms_sel, static_cast<std::size_t>(g), constraint.ms, g,
                                    [&](const std::vector<int>& rows) {
                                        return joint_se(estimate, estimate, rows, bs_sel, streams, snr);
                                    });
        }
        ++sel.sweeps;
        if (!changed) break;
    }

    const CMatrix sub_est = cols_of(estimate, bs_sel);
    sel.precoder = svd_precoder(sub_est, precoder_streams(streams, sub_est));
    sel.selected_ms = std::move(ms_sel);
    sel.selected_bs = std::move(bs_sel);
    return sel;
}

double evaluate_selection(const CMatrix& truth, const AntennaSelection& selection, double snr) {
    if (selection.selected_bs) {
        const CMatrix sub = cols_of(truth, *selection.selected_bs);
        return spectral_efficiency(sub, selection.precoder, selection.selected_ms, snr);
    }
    return spectral_efficiency(truth, selection.precoder, selection.selected_ms, snr);
}

SeResult select_and_evaluate(const CMatrix& truth, const CMatrix& estimate, const SelectionConstraint& constraint,
                             int streams, double snr, SelectionSetting setting) {
    const auto sel = greedy_selection(estimate, constraint, streams, snr, setting);
    return {sel.selected_ms, sel.selected_bs, evaluate_selection(truth, sel, snr)};
}

}  // namespace mmwave
