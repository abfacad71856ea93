#pragma once

#include "mmwave/sampling.hpp"
#include "mmwave/types.hpp"

#include <functional>
#include <iosfwd>
#include <optional>
#include <vector>

namespace mmwave {

enum class ProjectionMethod { direct_svd, gram_eigendecomposition };

struct SvpConfig {
    int rank_budget = 4;
    double step_size = 1.8;
    /// epsilon_0 in epsilon = p N_MS N_BS sigma^2 + epsilon_0.
    double tolerance_floor = 1e-3;
    /// sigma^2 used inside the stopping tolerance; taken as known.
    double noise_variance = 0.0;
    int max_iterations = 100;
    ProjectionMethod projection = ProjectionMethod::gram_eigendecomposition;
    /// When false the loop always runs max_iterations (unless it diverges).
    bool stop_on_tolerance = true;

    void validate() const;
};

/// 1.8 for p >= 0.5, 1.4 below.
double default_step_size(double density);

/// 1 / (p (1 + delta)) with delta the RIP constant, 0 <= delta < 1/3.
double rip_step_size(double density, double rip_constant);

/// epsilon = p N_MS N_BS sigma^2 + epsilon_0.
double stopping_tolerance(const SampleSet& samples, const SvpConfig& config);

/// Best rank-L approximation in Frobenius norm. L >= min(rows, cols) returns the input.
CMatrix rank_projection(const CMatrix& matrix, int rank, ProjectionMethod method);

enum class SvpStatus { converged, iteration_limit, diverged };

struct SvpResult {
    CMatrix estimate;
    int iterations_used = 0;
    /// ||P_Omega(X^t) - P_Omega(Y)||_F^2 for t = 1..iterations_used.
    std::vector<double> residual_trace;
    bool converged = false;
    SvpStatus status = SvpStatus::iteration_limit;

    bool diverged() const { return status == SvpStatus::diverged; }
};

/// Called after every iteration with (t, X^t).
using SvpObserver = std::function<void(int, const CMatrix&)>;

/// Singular value projection: X^{t+1} = P_L(X^t - eta (P_Omega(X^t) - P_Omega(Y))), X^0 = 0.
/// A non-finite iterate, or a residual above 1e6 times ||P_Omega(Y)||^2, stops the loop
/// with status diverged; the estimate is then the last finite iterate.
SvpResult svp_estimate(const SampleSet& samples, const SvpConfig& config, const SvpObserver& observer = {});

/// CSV: iteration,residual,nmse (nmse column empty when `nmse_trace` is not given).
void write_residual_csv(std::ostream& out, const SvpResult& result,
                        const std::optional<std::vector<double>>& nmse_trace = std::nullopt);

}  // namespace mmwave
