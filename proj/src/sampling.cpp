#include "mmwave/sampling.hpp"

#include "mmwave/random.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <ostream>
#include <stdexcept>
#include <string>

namespace mmwave {

SamplingMask::SamplingMask(Index rows, Index cols) : indicator_(Eigen::MatrixXd::Zero(rows, cols)) {}

SamplingMask::SamplingMask(Index rows, Index cols, std::vector<Entry> entries)
    : entries_(std::move(entries)), indicator_(Eigen::MatrixXd::Zero(rows, cols)) {
    std::sort(entries_.begin(), entries_.end(),
              [](const Entry& a, const Entry& b) { return a.col != b.col ? a.col < b.col : a.row < b.row; });
    for (std::size_t k = 0; k < entries_.size(); ++k) {
        const auto& e = entries_[k];
        if (e.row < 0 || e.row >= rows || e.col < 0 || e.col >= cols)
            throw std::invalid_argument("SamplingMask: entry out of range");
        if (k > 0 && entries_[k - 1] == e) throw std::invalid_argument("SamplingMask: duplicate entry");
        indicator_(e.row, e.col) = 1.0;
    }
}

SamplingMask SamplingMask::full(Index rows, Index cols) {
    std::vector<Entry> all;
    all.reserve(static_cast<std::size_t>(rows * cols));
    for (Index j = 0; j < cols; ++j)
        for (Index i = 0; i < rows; ++i) all.push_back({i, j});
    return SamplingMask(rows, cols, std::move(all));
}

Eigen::VectorXi SamplingMask::row_counts() const {
    return indicator_.rowwise().sum().cast<int>();
}

Eigen::VectorXi SamplingMask::col_counts() const {
    return indicator_.colwise().sum().transpose().cast<int>();
}

CMatrix apply_mask(const CMatrix& matrix, const SamplingMask& omega) {
    if (matrix.rows() != omega.rows() || matrix.cols() != omega.cols())
        throw std::invalid_argument("apply_mask: shape mismatch");
    return matrix.cwiseProduct(omega.indicator().cast<Complex>());
}

SamplingMask TrainingSchedule::mask() const {
    std::vector<Entry> entries;
    entries.reserve(static_cast<std::size_t>(num_samples()));
    for (const auto& stage : stages)
        for (int i : stage.ms_antennas) entries.push_back({i, stage.bs_antenna});
    return SamplingMask(num_ms, num_bs, std::move(entries));
}

namespace {

bool admissible(int num_ms, int num_bs, int num_rf_ms, Index m) {
    const Index unit = static_cast<Index>(num_rf_ms) * num_bs;
    const Index per_column_subarray = unit > 0 ? m / unit : 0;
    return m > 0 && m % unit == 0 && per_column_subarray <= num_ms / num_rf_ms;
}

}  // namespace

Index nearest_valid_sample_count(int num_ms, int num_bs, int num_rf_ms, Index requested) {
    const Index unit = static_cast<Index>(num_rf_ms) * num_bs;
    const Index max_multiple = num_ms / num_rf_ms;
    Index k = (requested + unit / 2) / unit;  // round half up
    k = std::clamp<Index>(k, 1, max_multiple);
    // prefer the lower neighbour on exact ties
    if (k > 1 && std::llabs(requested - (k - 1) * unit) <= std::llabs(requested - k * unit)) --k;
    return k * unit;
}

std::string check_sample_count(int num_ms, int num_bs, int num_rf_ms, Index num_samples) {
    if (num_ms < 1 || num_bs < 1 || num_rf_ms < 1 || num_ms % num_rf_ms != 0)
        return "invalid array dimensions for USS sampling";
    if (admissible(num_ms, num_bs, num_rf_ms, num_samples)) return {};
    return "M = " + std::to_string(num_samples) + " must be a positive multiple of N_RF_MS * N_BS = " +
           std::to_string(static_cast<Index>(num_rf_ms) * num_bs) + " not exceeding N_MS * N_BS = " +
           std::to_string(static_cast<Index>(num_ms) * num_bs) + "; nearest valid M = " +
           std::to_string(nearest_valid_sample_count(num_ms, num_bs, num_rf_ms, num_samples));
}

Index sample_count_for_density(int num_ms, int num_bs, double density) {
    return static_cast<Index>(std::llround(density * num_ms * num_bs));
}

TrainingSchedule build_uss_schedule(const ArrayGeometry& ms_geometry, const ArrayGeometry& bs_geometry,
                                    Index num_samples, Seed seed) {
    ms_geometry.validate();
    bs_geometry.validate();
    const int n_ms = ms_geometry.num_antennas;
    const int n_bs = bs_geometry.num_antennas;
    const int n_rf = ms_geometry.num_rf_chains;
    if (auto msg = check_sample_count(n_ms, n_bs, n_rf, num_samples); !msg.empty())
        throw std::invalid_argument("build_uss_schedule: " + msg);

    const int n_sub = ms_geometry.subarray_size();
    const Index num_stages = num_samples / n_rf;

    // Antennas of subarray k not yet switched on for column j: remaining[j * n_rf + k].
    std::vector<std::vector<int>> remaining(static_cast<std::size_t>(n_bs) * n_rf);
    for (int j = 0; j < n_bs; ++j) {
        for (int k = 0; k < n_rf; ++k) {
            auto& pool = remaining[static_cast<std::size_t>(j) * n_rf + k];
            pool.resize(static_cast<std::size_t>(n_sub));
            for (int a = 0; a < n_sub; ++a) pool[static_cast<std::size_t>(a)] = k * n_sub + a;
        }
    }

    Rng rng(seed);
    TrainingSchedule schedule{n_ms, n_bs, n_rf, {}};
    schedule.stages.reserve(static_cast<std::size_t>(num_stages));
    for (Index t = 0; t < num_stages; ++t) {
        TrainingStage stage;
        stage.bs_antenna = static_cast<int>(t % n_bs);
        stage.ms_antennas.reserve(static_cast<std::size_t>(n_rf));
        for (int k = 0; k < n_rf; ++k) {
            auto& pool = remaining[static_cast<std::size_t>(stage.bs_antenna) * n_rf + k];
            std::uniform_int_distribution<std::size_t> pick(0, pool.size() - 1);
            const std::size_t idx = pick(rng);
            stage.ms_antennas.push_back(pool[idx]);
            pool[idx] = pool.back();
            pool.pop_back();
        }
        schedule.stages.push_back(std::move(stage));
    }
    return schedule;
}

SampleSet observe(const CMatrix& channel, const TrainingSchedule& schedule, Complex pilot,
                  double noise_variance, Seed seed) {
    if (std::abs(pilot) == 0.0) throw std::invalid_argument("observe: pilot symbol must be nonzero");
    if (!(noise_variance >= 0)) throw std::invalid_argument("observe: noise variance must be >= 0");
    if (channel.rows() != schedule.num_ms || channel.cols() != schedule.num_bs)
        throw std::invalid_argument("observe: channel shape does not match schedule");

    Rng rng(seed);
    CMatrix y = CMatrix::Zero(channel.rows(), channel.cols());
    for (const auto& stage : schedule.stages) {
        for (int i : stage.ms_antennas) {
            const Complex h = channel(i, stage.bs_antenna);
            const Complex n = noise_variance > 0 ? complex_gaussian(rng, noise_variance) : Complex{};
            const Complex r = h * pilot + n;
            y(i, stage.bs_antenna) = r / pilot;
        }
    }
    SampleSet samples{schedule.mask(), std::move(y), 0.0, noise_variance};
    samples.density = static_cast<double>(samples.omega.size()) / (static_cast<double>(channel.rows()) * channel.cols());
    return samples;
}

SampleSet observe(const ChannelInstance& channel, const TrainingSchedule& schedule, Complex pilot,
                  double noise_variance, Seed seed) {
    return observe(channel.matrix, schedule, pilot, noise_variance, seed);
}

double miss_probability(int num_ms, int num_bs, Index num_samples, int num_rf_ms) {
    if (auto msg = check_sample_count(num_ms, num_bs, num_rf_ms, num_samples); !msg.empty())
        throw std::invalid_argument("miss_probability: " + msg);
    const double per_column = static_cast<double>(num_samples) / num_bs;
    return std::pow((num_ms - per_column) / num_ms, num_bs);
}

MissFrequency empirical_miss_frequency(int num_ms, int num_bs, Index num_samples, int num_rf_ms,
                                       long long trials, Seed seed) {
    const auto ms = ArrayGeometry::ideal(num_ms, num_rf_ms);
    const auto bs = ArrayGeometry::ideal(num_bs, 1);
    MissFrequency freq;
    freq.trials = trials;
    std::vector<char> hit(static_cast<std::size_t>(num_ms));
    for (long long t = 0; t < trials; ++t) {
        const auto schedule = build_uss_schedule(ms, bs, num_samples, derive_seed(seed, {static_cast<std::uint64_t>(t)}));
        std::fill(hit.begin(), hit.end(), 0);
        for (const auto& stage : schedule.stages)
            for (int i : stage.ms_antennas) hit[static_cast<std::size_t>(i)] = 1;
        if (!hit[0]) ++freq.row_misses;
        if (std::find(hit.begin(), hit.end(), 0) != hit.end()) ++freq.any_row_misses;
    }
    return freq;
}

void write_schedule_csv(std::ostream& out, const TrainingSchedule& schedule) {
    out << "stage,bs_antenna";
    for (int k = 1; k <= schedule.num_rf_ms; ++k) out << ",ms_antenna_" << k;
    out << '\n';
    for (std::size_t t = 0; t < schedule.stages.size(); ++t) {
        const auto& stage = schedule.stages[t];
        out << (t + 1) << ',' << (stage.bs_antenna + 1);
        for (int i : stage.ms_antennas) out << ',' << (i + 1);
        out << '\n';
    }
}

}  // namespace mmwave
