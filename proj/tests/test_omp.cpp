#include "mmwave/omp.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <set>
#include <sstream>

using namespace mmwave;

namespace {

SampleSet noiseless_samples(const CMatrix& h, const SamplingMask& omega) {
    return SampleSet{omega, apply_mask(h, omega), static_cast<double>(omega.size()) / h.size(), 0.0};
}

}  // namespace

TEST(AtomGrid, UnitaryWhenGridEqualsAntennas) {
    for (int n : {4, 16, 64}) {
        const auto grid = build_grid(n, n);
        EXPECT_LT((grid.atoms.adjoint() * grid.atoms - CMatrix::Identity(n, n)).norm(), 1e-10) << n;
    }
}

TEST(AtomGrid, EndpointsAndMidpoint) {
    const auto grid = build_grid(8, 16);
    ASSERT_EQ(grid.angles.size(), 16u);
    EXPECT_NEAR(grid.angles.front(), -kPi / 2, 1e-12);
    EXPECT_NEAR(grid.angles[8], 0.0, 1e-15);
    EXPECT_LT(grid.angles.back(), kPi / 2);
    for (std::size_t g = 0; g < 16; ++g)
        EXPECT_NEAR(std::sin(grid.angles[g]), 2.0 * static_cast<double>(g) / 16.0 - 1.0, 1e-12);
}

TEST(AtomGrid, RedundantGramMatchesDirichletKernel) {
    const int n = 64, g = 128;
    const auto grid = build_grid(n, g);
    const CMatrix gram = grid.atoms.adjoint() * grid.atoms;
    for (int a = 0; a < g; a += 7) {
        for (int b = 0; b < g; b += 5) {
            const int delta = a - b;
            double expected = 1.0;
            const double x = kPi * delta / g;
            if (delta != 0) expected = std::abs(std::sin(n * x) / (n * std::sin(x)));
            EXPECT_NEAR(std::abs(gram(a, b)), expected, 1e-10) << a << "," << b;
        }
    }
}

TEST(AtomGrid, RejectsUnrealizableOrUndersizedGrids) {
    EXPECT_THROW(build_grid(8, 16, 0.25), std::invalid_argument);
    EXPECT_THROW(build_grid(8, 4), std::invalid_argument);
    EXPECT_NO_THROW(build_grid(8, 16, 1.0));
}

TEST(Omp, RecoversSingleOnGridPathFromFewSamples) {
    const auto dict = build_dictionary(16, 16, 16, 16);
    const CMatrix h = synthesize(dict, {{5, 11}}, {Complex(1.5, -0.5)});
    const auto ms = ArrayGeometry::ideal(16, 4);
    const auto bs = ArrayGeometry::ideal(16, 4);
    const auto y = noiseless_samples(h, build_uss_schedule(ms, bs, 64, 3).mask());
    const auto est = omp_estimate(y, dict, 1);
    ASSERT_EQ(est.support.size(), 1u);
    EXPECT_EQ(est.support[0], (GridPair{5, 11}));
    EXPECT_LT(std::abs(est.coefficients[0] - Complex(1.5, -0.5)), 1e-10);
    EXPECT_LT((est.reconstructed - h).norm(), 1e-10);
}

TEST(Omp, RecoversFourOnGridPaths) {
    const auto dict = build_dictionary(16, 16, 16, 16);
    const std::vector<GridPair> support{{1, 2}, {6, 13}, {9, 9}, {14, 4}};
    const std::vector<Complex> coeffs{{2.0, 0.0}, {0.0, -1.7}, {-1.2, 0.9}, {1.0, 1.0}};
    const CMatrix h = synthesize(dict, support, coeffs);
    const auto ms = ArrayGeometry::ideal(16, 4);
    const auto bs = ArrayGeometry::ideal(16, 4);
    const auto y = noiseless_samples(h, build_uss_schedule(ms, bs, 128, 5).mask());
    const auto est = omp_estimate(y, dict, 4);
    EXPECT_EQ(std::set<GridPair>(est.support.begin(), est.support.end()),
              std::set<GridPair>(support.begin(), support.end()));
    EXPECT_LT((est.reconstructed - h).norm(), 1e-9 * h.norm());
    EXPECT_LT(est.residual_norms.back(), 1e-9 * h.norm());
}

TEST(Omp, FullSamplingGivesExactProjectionCoefficient) {
    // Unitary dictionary and full sampling: the first atom's coefficient is the
    // correlation a_MS^H H a_BS.
    const auto dict = build_dictionary(8, 8, 8, 8);
    CMatrix h(8, 8);
    for (Index j = 0; j < 8; ++j)
        for (Index i = 0; i < 8; ++i) h(i, j) = Complex(std::cos(0.3 * i + 0.7 * j), std::sin(1.1 * i * j));
    const auto est = omp_estimate(noiseless_samples(h, SamplingMask::full(8, 8)), dict, 1);
    const auto& p = est.support[0];
    const Complex expected = (dict.ms_atoms.col(p.ms).adjoint() * h * dict.bs_atoms.col(p.bs))(0, 0);
    EXPECT_LT(std::abs(est.coefficients[0] - expected), 1e-12);
    // and it is the largest such correlation
    const CMatrix corr = dict.ms_atoms.adjoint() * h * dict.bs_atoms;
    EXPECT_NEAR(std::abs(expected), corr.cwiseAbs().maxCoeff(), 1e-12);
}

TEST(Omp, ResidualNonIncreasingAndSupportDistinct) {
    const auto dict = build_dictionary(16, 32, 16, 32);
    const auto ms = ArrayGeometry::ideal(16, 4);
    const auto bs = ArrayGeometry::ideal(16, 4);
    const auto ch = assemble_channel(sample_paths(4, 1.0, 77), ms, bs);
    const auto y = observe(ch, build_uss_schedule(ms, bs, 128, 78), 1.0, 0.01, 79);
    const auto est = omp_estimate(y, dict, 12);
    ASSERT_EQ(est.residual_norms.size(), 12u);
    for (std::size_t k = 1; k < est.residual_norms.size(); ++k)
        EXPECT_LE(est.residual_norms[k], est.residual_norms[k - 1] * (1 + 1e-12));
    EXPECT_EQ(std::set<GridPair>(est.support.begin(), est.support.end()).size(), est.support.size());
    EXPECT_LT((synthesize(dict, est.support, est.coefficients) - est.reconstructed).norm(), 1e-10);
}

TEST(Omp, TiesBreakToLowestLinearIndex) {
    // All-zero observation: every correlation is exactly 0.
    const auto dict = build_dictionary(4, 8, 4, 8);
    const auto est = omp_estimate(noiseless_samples(CMatrix::Zero(4, 4), SamplingMask::full(4, 4)), dict, 3);
    ASSERT_EQ(est.support.size(), 3u);
    EXPECT_EQ(est.support[0], (GridPair{0, 0}));
    EXPECT_EQ(est.support[1], (GridPair{1, 0}));
    EXPECT_EQ(est.support[2], (GridPair{2, 0}));
    EXPECT_TRUE(est.reconstructed.isZero(0));
}

TEST(Omp, RejectsInvalidInputs) {
    const auto dict = build_dictionary(4, 4, 4, 4);
    const auto y = noiseless_samples(CMatrix::Ones(4, 4), SamplingMask::full(4, 4));
    EXPECT_THROW(omp_estimate(y, dict, 0), std::invalid_argument);
    EXPECT_THROW(omp_estimate(y, build_dictionary(8, 8, 4, 4), 1), std::invalid_argument);
}

TEST(Flops, PaperScaleRatios) {
    const auto svp = svp_flops_per_iteration(64, 64, 4);
    EXPECT_EQ(svp, 16 * 64 * 64 * 64 + 23 * 64 * 64 * 64 + 8 * 64 * 64 * 4);
    EXPECT_EQ(omp_flops_per_iteration(2048, 64, 64), 8LL * 2048 * 64 * 64);
    const double r64 = static_cast<double>(omp_flops_per_iteration(2048, 64, 64)) / svp;
    const double r128 = static_cast<double>(omp_flops_per_iteration(2048, 128, 128)) / svp;
    EXPECT_NEAR(r64, 6.48, 0.01);
    EXPECT_NEAR(r128, 25.9, 0.05);
}

TEST(MatchedIterations, ScheduleAndSnapping) {
    EXPECT_EQ(matched_iterations_for_pnr(5), 2);
    EXPECT_EQ(matched_iterations_for_pnr(10), 3);
    EXPECT_EQ(matched_iterations_for_pnr(15), 4);
    EXPECT_EQ(matched_iterations_for_pnr(20), 5);
    EXPECT_EQ(matched_iterations_for_pnr(25), 6);
    EXPECT_EQ(matched_iterations_for_pnr(-3), 2);
    EXPECT_EQ(matched_iterations_for_pnr(40), 6);
    EXPECT_EQ(matched_iterations_for_pnr(11), 3);
}

TEST(SupportCsv, Format) {
    const auto dict = build_dictionary(4, 4, 4, 4);
    SparseEstimate est;
    est.support = {{0, 2}};
    est.coefficients = {Complex(0.5, -1)};
    std::ostringstream out;
    write_support_csv(out, dict, est);
    EXPECT_EQ(out.str().substr(0, out.str().find('\n')), "k,ms_grid_index,bs_grid_index,aoa,aod,coefficient_re,coefficient_im");
    EXPECT_NE(out.str().find("\n1,1,3,"), std::string::npos);
    EXPECT_NE(out.str().find(",0.5,-1\n"), std::string::npos);
}
