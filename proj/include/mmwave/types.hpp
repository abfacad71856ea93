#pragma once

#include <Eigen/Dense>

#include <complex>
#include <compare>
#include <cstdint>

namespace mmwave {

using Complex = std::complex<double>;
using CMatrix = Eigen::MatrixXcd;
using CVector = Eigen::VectorXcd;
using RVector = Eigen::VectorXd;
using Index = Eigen::Index;
using Seed = std::uint64_t;

/// Zero-based (row, column) position in an N_MS x N_BS channel matrix.
struct Entry {
    Index row = 0;
    Index col = 0;

    auto operator<=>(const Entry&) const = default;
};

constexpr double kPi = 3.14159265358979323846;

}  // namespace mmwave
