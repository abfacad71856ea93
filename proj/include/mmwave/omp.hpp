#pragma once

#include "mmwave/sampling.hpp"
#include "mmwave/types.hpp"

#include <cstdint>
#include <iosfwd>
#include <vector>

namespace mmwave {

/// Ideal steering vectors on the uniform sine grid
/// (2 pi d / lambda) sin(theta_g) = (2 pi / G)(g - 1) - pi, g = 1..G.
struct AtomGrid {
    CMatrix atoms;               ///< N x G
    std::vector<double> angles;  ///< theta_g, radians
};

/// Throws std::invalid_argument when G < N or the grid is not realizable for the
/// given spacing (|(2/G)(g-1) - 1| > lambda / (2 d) for some g).
AtomGrid build_grid(int num_antennas, int grid_size, double element_spacing = 0.5);

struct Dictionary {
    CMatrix ms_atoms;  ///< N_MS x G_r
    CMatrix bs_atoms;  ///< N_BS x G_t
    std::vector<double> grid_angles_ms;
    std::vector<double> grid_angles_bs;

    Index grid_ms() const { return ms_atoms.cols(); }
    Index grid_bs() const { return bs_atoms.cols(); }
};

Dictionary build_dictionary(int num_ms, int grid_ms, int num_bs, int grid_bs, double element_spacing = 0.5);

struct GridPair {
    Index ms = 0;  ///< index into grid_angles_ms
    Index bs = 0;  ///< index into grid_angles_bs

    auto operator<=>(const GridPair&) const = default;
};

struct SparseEstimate {
    std::vector<GridPair> support;
    std::vector<Complex> coefficients;
    CMatrix reconstructed;
    /// ||y - Phi Psi x||_2 after each iteration.
    std::vector<double> residual_norms;
    /// Set when some least-squares refit had a rank-deficient system (solved min-norm).
    bool rank_deficient = false;
};

/// sum_k c_k a_MS(g_r^k) a_BS(g_t^k)^H
CMatrix synthesize(const Dictionary& dictionary, const std::vector<GridPair>& support,
                   const std::vector<Complex>& coefficients);

/// Orthogonal matching pursuit on y = Phi Psi x + z with Psi = conj(A_BSD) kron A_MSD and
/// Phi selecting the sampled entries of vec(H); Psi is never formed. Correlations for
/// all G_r G_t pairs are A_MSD^H R A_BSD on the masked residual R. Ties go to the lowest
/// linear index g_r + G_r g_t.
SparseEstimate omp_estimate(const SampleSet& samples, const Dictionary& dictionary, int num_iterations);

/// Iteration schedule shared by both estimators: 2 at 5 dB, 3 at 10 dB, 4 at 15 dB,
/// 5 at 20 dB, 6 at 25 dB; other PNRs snap to the nearest listed point.
int matched_iterations_for_pnr(double pnr_db);

/// 8 M G_t G_r.
std::int64_t omp_flops_per_iteration(std::int64_t num_samples, std::int64_t grid_bs, std::int64_t grid_ms);

/// 16 N_MS^2 N_BS + 23 N_MS^3 + 8 N_MS^2 L.
std::int64_t svp_flops_per_iteration(std::int64_t num_ms, std::int64_t num_bs, std::int64_t rank);

/// CSV: k,ms_grid_index,bs_grid_index,aoa,aod,coefficient_re,coefficient_im
void write_support_csv(std::ostream& out, const Dictionary& dictionary, const SparseEstimate& estimate);

}  // namespace mmwave
