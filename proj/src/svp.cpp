#include "mmwave/svp.hpp"

#include <Eigen/Eigenvalues>
#include <Eigen/SVD>

#include <algorithm>
#include <cmath>
#include <limits>
#include <ostream>
#include <stdexcept>

namespace mmwave {

void SvpConfig::validate() const {
    if (rank_budget < 1) throw std::invalid_argument("SvpConfig: rank_budget must be >= 1");
    if (!(step_size > 0) || !std::isfinite(step_size)) throw std::invalid_argument("SvpConfig: step_size must be > 0");
    if (!(tolerance_floor >= 0)) throw std::invalid_argument("SvpConfig: tolerance_floor must be >= 0");
    if (!(noise_variance >= 0)) throw std::invalid_argument("SvpConfig: noise_variance must be >= 0");
    if (max_iterations < 1) throw std::invalid_argument("SvpConfig: max_iterations must be >= 1");
}

double default_step_size(double density) { return density >= 0.5 ? 1.8 : 1.4; }

double rip_step_size(double density, double rip_constant) {
    if (!(density > 0 && density <= 1)) throw std::invalid_argument("rip_step_size: density must be in (0, 1]");
    if (!(rip_constant >= 0 && rip_constant < 1.0 / 3.0))
        throw std::invalid_argument("rip_step_size: RIP constant must be in [0, 1/3)");
    return 1.0 / (density * (1.0 + rip_constant));
}

double stopping_tolerance(const SampleSet& samples, const SvpConfig& config) {
    const double entries = static_cast<double>(samples.observed.rows()) * samples.observed.cols();
    return samples.density * entries * config.noise_variance + config.tolerance_floor;
}

namespace {

// U_L U_L^H Z from the top-L eigenvectors of Z Z^H (Z with rows <= cols).
CMatrix gram_projection_wide(const CMatrix& z, Index rank) {
    const CMatrix gram = z * z.adjoint();
    Eigen::SelfAdjointEigenSolver<CMatrix> eig(gram);
    // eigenvalues ascending: the dominant subspace is the trailing block
    const CMatrix u = eig.eigenvectors().rightCols(rank);
    return u * (u.adjoint() * z);
}

}  // namespace

CMatrix rank_projection(const CMatrix& matrix, int rank, ProjectionMethod method) {
    if (rank < 1) throw std::invalid_argument("rank_projection: rank must be >= 1");
    const Index r = rank;
    if (r >= std::min(matrix.rows(), matrix.cols())) return matrix;

    if (method == ProjectionMethod::direct_svd) {
        Eigen::BDCSVD<CMatrix> svd(matrix, Eigen::ComputeThinU | Eigen::ComputeThinV);
        return svd.matrixU().leftCols(r) * svd.singularValues().head(r).asDiagonal() *
               svd.matrixV().leftCols(r).adjoint();
    }
    // smaller Gram matrix first
    if (matrix.rows() <= matrix.cols()) return gram_projection_wide(matrix, r);
    return gram_projection_wide(matrix.adjoint(), r).adjoint();
}

SvpResult svp_estimate(const SampleSet& samples, const SvpConfig& config, const SvpObserver& observer) {
    config.validate();
    const auto& y = samples.observed;
    const auto& mask = samples.omega.indicator();
    if (y.rows() != mask.rows() || y.cols() != mask.cols())
        throw std::invalid_argument("svp_estimate: observed matrix and mask shapes differ");

    const int rank = static_cast<int>(std::min<Index>(config.rank_budget, std::min(y.rows(), y.cols())));
    const double tolerance = stopping_tolerance(samples, config);
    const CMatrix y_masked = apply_mask(y, samples.omega);
    const double initial_residual = y_masked.squaredNorm();
    const double blowup_limit = 1e6 * std::max(initial_residual, std::numeric_limits<double>::min());

    SvpResult result;
    CMatrix x = CMatrix::Zero(y.rows(), y.cols());
    CMatrix residual = -y_masked;  // P_Omega(X^t) - P_Omega(Y)
    for (int t = 1; t <= config.max_iterations; ++t) {
        const CMatrix z = x - config.step_size * residual;
        CMatrix next = rank_projection(z, rank, config.projection);
        residual = next.cwiseProduct(mask.cast<Complex>()) - y_masked;
        const double r2 = residual.squaredNorm();
        result.residual_trace.push_back(r2);
        result.iterations_used = t;

        if (!next.allFinite() || !std::isfinite(r2) || r2 > blowup_limit) {
            result.status = SvpStatus::diverged;
            result.converged = false;
            result.estimate = x;
            return result;
        }
        x = std::move(next);
        if (observer) observer(t, x);
        if (config.stop_on_tolerance && r2 <= tolerance) {
            result.status = SvpStatus::converged;
            result.converged = true;
            break;
        }
    }
    result.estimate = std::move(x);
    return result;
}

void write_residual_csv(std::ostream& out, const SvpResult& result,
                        const std::optional<std::vector<double>>& nmse_trace) {
    const auto old_precision = out.precision(12);
    out << "iteration,residual,nmse\n";
    for (std::size_t t = 0; t < result.residual_trace.size(); ++t) {
        out << (t + 1) << ',' << result.residual_trace[t] << ',';
        if (nmse_trace && t < nmse_trace->size()) out << (*nmse_trace)[t];
        out << '\n';
    }
    out.precision(old_precision);
}

}  // namespace mmwave
