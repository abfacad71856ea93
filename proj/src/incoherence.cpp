#include "mmwave/incoherence.hpp"

#include <Eigen/SVD>

#include <cmath>
#include <limits>
#include <ostream>
#include <stdexcept>
#include <string_view>

namespace mmwave {

namespace {

double projector_deviation(const CMatrix& basis, double rank) {
    const Index n = basis.rows();
    const CMatrix projector = basis * basis.adjoint();
    double worst = 0;
    for (Index j = 0; j < n; ++j) {
        for (Index i = 0; i < n; ++i) {
            const Complex centred = projector(i, j) - (i == j ? rank / static_cast<double>(n) : 0.0);
            worst = std::max(worst, std::abs(centred));
        }
    }
    return worst;
}

}  // namespace

IncoherenceReport incoherence_mu(const CMatrix& matrix, int rank) {
    const Index min_dim = std::min(matrix.rows(), matrix.cols());
    if (rank < 1 || rank > min_dim) throw std::invalid_argument("incoherence_mu: rank must be in [1, min(N_MS, N_BS)]");

    Eigen::JacobiSVD<CMatrix> svd(matrix, Eigen::ComputeThinU | Eigen::ComputeThinV);
    const auto& sv = svd.singularValues();
    const CMatrix u = svd.matrixU().leftCols(rank);
    const CMatrix v = svd.matrixV().leftCols(rank);

    const double l = rank;
    const double n_ms = static_cast<double>(matrix.rows());
    const double n_bs = static_cast<double>(matrix.cols());

    IncoherenceReport report;
    report.rank_used = rank;
    report.mu_u = n_ms / std::sqrt(l) * projector_deviation(u, l);
    report.mu_v = n_bs / std::sqrt(l) * projector_deviation(v, l);
    report.mu_e = std::sqrt(n_ms * n_bs / l) * (u * v.adjoint()).cwiseAbs().maxCoeff();
    report.mu = std::max({report.mu_u, report.mu_v, report.mu_e});

    if (sv(0) == 0.0) {
        report.relative_gap = 0;
    } else if (rank == min_dim) {
        report.relative_gap = std::numeric_limits<double>::infinity();
    } else {
        report.relative_gap = (sv(rank - 1) - sv(rank)) / sv(0);
    }
    report.degenerate = report.relative_gap < 1e-8;
    return report;
}

void write_incoherence_csv_header(std::ostream& out) {
    out << "label,rank,mu_u,mu_v,mu_e,mu,relative_gap,degenerate\n";
}

void write_incoherence_csv_row(std::ostream& out, std::string_view label, const IncoherenceReport& report) {
    const auto old_precision = out.precision(12);
    out << label << ',' << report.rank_used << ',' << report.mu_u << ',' << report.mu_v << ',' << report.mu_e << ','
        << report.mu << ',' << report.relative_gap << ',' << (report.degenerate ? 1 : 0) << '\n';
    out.precision(old_precision);
}

}  // namespace mmwave
