#pragma once

#include "mmwave/types.hpp"

#include <iosfwd>
#include <string_view>

namespace mmwave {

/// Tightest constants in the strong-incoherence bounds for the rank-L singular subspaces:
///   |[P_U]_{a,a'} - (L/N_MS) 1_{a=a'}| <= mu_u sqrt(L) / N_MS
///   |[P_V]_{b,b'} - (L/N_BS) 1_{b=b'}| <= mu_v sqrt(L) / N_BS
///   |E_{ab}|                          <= mu_e sqrt(L) / sqrt(N_MS N_BS)
struct IncoherenceReport {
    double mu_u = 0;
    double mu_v = 0;
    double mu_e = 0;
    double mu = 0;  ///< max of the three
    int rank_used = 0;
    /// (sigma_L - sigma_{L+1}) / sigma_1; +inf when L is the full rank.
    double relative_gap = 0;
    /// Set when relative_gap < 1e-8: the rank-L subspace is not well defined.
    bool degenerate = false;
};

IncoherenceReport incoherence_mu(const CMatrix& matrix, int rank);

void write_incoherence_csv_header(std::ostream& out);
/// One row: label,rank,mu_u,mu_v,mu_e,mu,relative_gap,degenerate
void write_incoherence_csv_row(std::ostream& out, std::string_view label, const IncoherenceReport& report);

}  // namespace mmwave
