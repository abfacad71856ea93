#include "mmwave/omp.hpp"

#include "mmwave/channel.hpp"

#include <Eigen/QR>

#include <algorithm>
#include <array>
#include <cmath>
#include <ostream>
#include <stdexcept>
#include <string>

namespace mmwave {

AtomGrid build_grid(int num_antennas, int grid_size, double element_spacing) {
    if (num_antennas < 1) throw std::invalid_argument("build_grid: num_antennas must be positive");
    if (grid_size < num_antennas) throw std::invalid_argument("build_grid: grid size must be >= number of antennas");
    if (!(element_spacing > 0)) throw std::invalid_argument("build_grid: element spacing must be positive");

    const auto geometry = ArrayGeometry::ideal(num_antennas, 1, element_spacing);
    AtomGrid grid;
    grid.atoms.resize(num_antennas, grid_size);
    grid.angles.reserve(static_cast<std::size_t>(grid_size));
    for (int g = 0; g < grid_size; ++g) {
        const double spatial = 2.0 * g / grid_size - 1.0;  // in [-1, 1)
        const double sine = spatial / (2.0 * element_spacing);
        if (std::abs(sine) > 1.0 + 1e-12)
            throw std::invalid_argument("build_grid: grid point " + std::to_string(g + 1) +
                                        " has no physical angle for d/lambda = " + std::to_string(element_spacing));
        const double angle = std::asin(std::clamp(sine, -1.0, 1.0));
        grid.angles.push_back(angle);
        grid.atoms.col(g) = steering_vector(geometry, angle);
    }
    return grid;
}

Dictionary build_dictionary(int num_ms, int grid_ms, int num_bs, int grid_bs, double element_spacing) {
    auto ms = build_grid(num_ms, grid_ms, element_spacing);
    auto bs = build_grid(num_bs, grid_bs, element_spacing);
    return {std::move(ms.atoms), std::move(bs.atoms), std::move(ms.angles), std::move(bs.angles)};
}

CMatrix synthesize(const Dictionary& dictionary, const std::vector<GridPair>& support,
                   const std::vector<Complex>& coefficients) {
    if (support.size() != coefficients.size()) throw std::invalid_argument("synthesize: support/coefficient size mismatch");
    CMatrix h = CMatrix::Zero(dictionary.ms_atoms.rows(), dictionary.bs_atoms.rows());
    for (std::size_t k = 0; k < support.size(); ++k) {
        h.noalias() += coefficients[k] * dictionary.ms_atoms.col(support[k].ms) *
                       dictionary.bs_atoms.col(support[k].bs).adjoint();
    }
    return h;
}

SparseEstimate omp_estimate(const SampleSet& samples, const Dictionary& dictionary, int num_iterations) {
    if (num_iterations < 1) throw std::invalid_argument("omp_estimate: num_iterations must be >= 1");
    const auto& entries = samples.omega.entries();
    if (entries.empty()) throw std::invalid_argument("omp_estimate: no samples");
    const auto& a_ms = dictionary.ms_atoms;
    const auto& a_bs = dictionary.bs_atoms;
    if (a_ms.rows() != samples.observed.rows() || a_bs.rows() != samples.observed.cols())
        throw std::invalid_argument("omp_estimate: dictionary does not match channel dimensions");

    const Index m = static_cast<Index>(entries.size());
    const Index grid_r = a_ms.cols();
    const Index grid_t = a_bs.cols();
    const int iterations = static_cast<int>(std::min<Index>(num_iterations, std::min<Index>(m, grid_r * grid_t)));

    CVector y(m);
    for (Index k = 0; k < m; ++k) y(k) = samples.observed(entries[k].row, entries[k].col);

    SparseEstimate est;
    CMatrix sensed(m, 0);  // Phi Psi restricted to the support
    CVector coeffs;
    CVector residual = y;
    Eigen::Matrix<bool, Eigen::Dynamic, Eigen::Dynamic> used =
        Eigen::Matrix<bool, Eigen::Dynamic, Eigen::Dynamic>::Constant(grid_r, grid_t, false);
    CMatrix residual_matrix = CMatrix::Zero(samples.observed.rows(), samples.observed.cols());

    for (int it = 0; it < iterations; ++it) {
        for (Index k = 0; k < m; ++k) residual_matrix(entries[k].row, entries[k].col) = residual(k);
        // <Phi psi_(r,t), residual> over every grid pair
        const CMatrix corr = a_ms.adjoint() * residual_matrix * a_bs;

        double best = -1.0;
        GridPair pick;
        for (Index t = 0; t < grid_t; ++t) {
            for (Index r = 0; r < grid_r; ++r) {
                if (used(r, t)) continue;
                const double mag = std::abs(corr(r, t));
                if (mag > best) {
                    best = mag;
                    pick = {r, t};
                }
            }
        }
        used(pick.ms, pick.bs) = true;
        est.support.push_back(pick);

        sensed.conservativeResize(m, sensed.cols() + 1);
        for (Index k = 0; k < m; ++k)
            sensed(k, sensed.cols() - 1) =
                a_ms(entries[k].row, pick.ms) * std::conj(a_bs(entries[k].col, pick.bs));

        Eigen::CompleteOrthogonalDecomposition<CMatrix> ls(sensed);
        if (ls.rank() < sensed.cols()) est.rank_deficient = true;
        coeffs = ls.solve(y);
        residual = y - sensed * coeffs;
        est.residual_norms.push_back(residual.norm());
    }

    est.coefficients.assign(coeffs.data(), coeffs.data() + coeffs.size());
    est.reconstructed = synthesize(dictionary, est.support, est.coefficients);
    return est;
}

int matched_iterations_for_pnr(double pnr_db) {
    constexpr std::array<double, 5> pnr{5, 10, 15, 20, 25};
    constexpr std::array<int, 5> iters{2, 3, 4, 5, 6};
    std::size_t best = 0;
    for (std::size_t k = 1; k < pnr.size(); ++k)
        if (std::abs(pnr[k] - pnr_db) < std::abs(pnr[best] - pnr_db)) best = k;
    return iters[best];
}

std::int64_t omp_flops_per_iteration(std::int64_t num_samples, std::int64_t grid_bs, std::int64_t grid_ms) {
    return 8 * num_samples * grid_bs * grid_ms;
}

std::int64_t svp_flops_per_iteration(std::int64_t num_ms, std::int64_t num_bs, std::int64_t rank) {
    return 16 * num_ms * num_ms * num_bs + 23 * num_ms * num_ms * num_ms + 8 * num_ms * num_ms * rank;
}

void write_support_csv(std::ostream& out, const Dictionary& dictionary, const SparseEstimate& estimate) {
    const auto old_precision = out.precision(12);
    out << "k,ms_grid_index,bs_grid_index,aoa,aod,coefficient_re,coefficient_im\n";
    for (std::size_t k = 0; k < estimate.support.size(); ++k) {
        const auto& p = estimate.support[k];
        out << (k + 1) << ',' << (p.ms + 1) << ',' << (p.bs + 1) << ','
            << dictionary.grid_angles_ms[static_cast<std::size_t>(p.ms)] << ','
            << dictionary.grid_angles_bs[static_cast<std::size_t>(p.bs)] << ','
            << estimate.coefficients[k].real() << ',' << estimate.coefficients[k].imag() << '\n';
    }
    out.precision(old_precision);
}

}  // namespace mmwave
