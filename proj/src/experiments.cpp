#include "mmwave/experiments.hpp"

#include "mmwave/omp.hpp"
#include "mmwave/random.hpp"
#include "mmwave/svp.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <numeric>
#include <ostream>
#include <stdexcept>

namespace mmwave::study {

namespace {

enum StreamTag : std::uint64_t { kTrial = 1, kPaths, kPhaseMs, kPhaseBs, kSchedule, kNoise };

void require_valid(const ExperimentConfig& config) {
    const auto errors = config.validate();
    if (errors.empty()) return;
    std::string msg = "invalid experiment config:";
    for (const auto& e : errors) msg += "\n  " + e;
    throw std::invalid_argument(msg);
}

void write_preamble(std::ostream& out, const std::string& study, const ExperimentConfig& config) {
    out << "# study=" << study << " config_digest=" << config.digest() << " master_seed=" << config.master_seed
        << '\n';
}

struct RunningMean {
    double sum = 0;
    double sum_sq = 0;
    int count = 0;

    void add(double v) {
        sum += v;
        sum_sq += v * v;
        ++count;
    }
    double mean() const { return count ? sum / count : 0.0; }
    double std_error() const {
        if (count < 2) return 0.0;
        const double m = mean();
        const double var = std::max(0.0, (sum_sq - count * m * m) / (count - 1));
        return std::sqrt(var / count);
    }
};

bool same(double a, double b) { return std::abs(a - b) <= 1e-12 * std::max(1.0, std::abs(a)); }

ArrayGeometry ms_geometry(const ExperimentConfig& config) {
    return ArrayGeometry::ideal(config.num_ms, config.num_rf_ms, config.element_spacing);
}

ArrayGeometry bs_geometry(const ExperimentConfig& config) {
    return ArrayGeometry::ideal(config.num_bs, config.num_rf_bs, config.element_spacing);
}

// Residual trace never increases (relative slack for round-off at the noise floor).
bool non_increasing(const std::vector<double>& trace) {
    for (std::size_t t = 1; t < trace.size(); ++t)
        if (trace[t] > trace[t - 1] * (1.0 + 1e-9)) return false;
    return true;
}

SvpConfig svp_config(const ExperimentConfig& config, double step_size, double noise_variance) {
    SvpConfig svp;
    svp.rank_budget = config.paths;
    svp.step_size = step_size;
    svp.tolerance_floor = config.tolerance_floor;
    svp.noise_variance = noise_variance;
    svp.max_iterations = config.max_iterations;
    svp.projection = config.projection;
    return svp;
}

int iterations_for(const ExperimentConfig& config, double pnr_db) {
    return config.omp_iterations ? *config.omp_iterations : matched_iterations_for_pnr(pnr_db);
}

ArrayGeometry truncated(const ArrayGeometry& g, int antennas) {
    ArrayGeometry small = g;
    small.num_antennas = antennas;
    small.num_rf_chains = antennas;
    small.phase_errors.resize(static_cast<std::size_t>(antennas));
    return small;
}

}  // namespace

std::string format_number(double value) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.10g", value);
    return buf;
}

TrialStreams trial_streams(Seed master_seed, int trial_index) {
    TrialStreams s;
    s.trial = derive_seed(master_seed, {kTrial, static_cast<std::uint64_t>(trial_index)});
    s.paths = derive_seed(s.trial, {kPaths});
    s.phase_ms = derive_seed(s.trial, {kPhaseMs});
    s.phase_bs = derive_seed(s.trial, {kPhaseBs});
    s.schedule = derive_seed(s.trial, {kSchedule});
    s.noise = derive_seed(s.trial, {kNoise});
    return s;
}

ChannelInstance trial_channel(const ExperimentConfig& config, const TrialStreams& streams, double gamma_ms,
                              double gamma_bs) {
    const auto paths = sample_paths(config.paths, config.gain_variance, streams.paths);
    const auto ms = with_phase_errors(ms_geometry(config), gamma_ms, streams.phase_ms);
    const auto bs = with_phase_errors(bs_geometry(config), gamma_bs, streams.phase_bs);
    return assemble_channel(paths, ms, bs);
}

// ---------------------------------------------------------------- convergence

const ConvergenceCurve& ConvergenceStudy::curve(double step_size, double density) const {
    for (const auto& c : curves)
        if (same(c.step_size, step_size) && same(c.density, density)) return c;
    throw std::out_of_range("ConvergenceStudy: no curve for the requested (eta, p)");
}

ConvergenceStudy run_convergence_study(const ExperimentConfig& config) {
    require_valid(config);
    const int trials = config.trials_or(200);
    const int t_max = config.convergence_iterations;
    const double sigma2 = noise_variance_for_pnr(config.convergence_pnr_db, config.gain_variance, config.pilot);

    ConvergenceStudy study;
    for (double eta : config.step_sizes) {
        for (double p : config.densities) {
            ConvergenceCurve c;
            c.step_size = eta;
            c.density = p;
            c.mean_nmse.assign(static_cast<std::size_t>(t_max), 0.0);
            c.mean_residual.assign(static_cast<std::size_t>(t_max), 0.0);
            c.active_trials.assign(static_cast<std::size_t>(t_max), 0);
            study.curves.push_back(std::move(c));
        }
    }
    auto curve_at = [&](std::size_t eta_idx, std::size_t p_idx) -> ConvergenceCurve& {
        return study.curves[eta_idx * config.densities.size() + p_idx];
    };

    for (int trial = 0; trial < trials; ++trial) {
        const auto streams = trial_streams(config.master_seed, trial);
        const auto channel = trial_channel(config, streams, config.gamma_max_ms, config.gamma_max_bs);
        for (std::size_t pi = 0; pi < config.densities.size(); ++pi) {
            const double p = config.densities[pi];
            const auto schedule = build_uss_schedule(channel.ms_geometry, channel.bs_geometry, config.sample_count(p),
                                                     streams.schedule);
            const auto samples = observe(channel, schedule, config.pilot, sigma2, streams.noise);
            for (std::size_t ei = 0; ei < config.step_sizes.size(); ++ei) {
                auto svp = svp_config(config, config.step_sizes[ei], sigma2);
                svp.max_iterations = t_max;
                svp.stop_on_tolerance = false;
                std::vector<double> nmse_trace;
                const auto result = svp_estimate(samples, svp, [&](int, const CMatrix& x) {
                    nmse_trace.push_back(nmse(channel.matrix, x));
                });
                auto& c = curve_at(ei, pi);
                ++c.trials;
                if (result.diverged()) ++c.diverged_trials;
                if (!result.diverged() && non_increasing(result.residual_trace)) ++c.monotone_trials;
                if (!result.diverged() && result.residual_trace.back() < result.residual_trace.front())
                    ++c.decreasing_trials;
                for (std::size_t t = 0; t < nmse_trace.size(); ++t) {
                    c.mean_nmse[t] += nmse_trace[t];
                    c.mean_residual[t] += result.residual_trace[t];
                    ++c.active_trials[t];
                }
            }
        }
    }
    for (auto& c : study.curves) {
        for (std::size_t t = 0; t < c.mean_nmse.size(); ++t) {
            if (c.active_trials[t] == 0) continue;
            c.mean_nmse[t] /= c.active_trials[t];
            c.mean_residual[t] /= c.active_trials[t];
        }
    }
    return study;
}

void write_csv(std::ostream& out, const ExperimentConfig& config, const ConvergenceStudy& study) {
    write_preamble(out, "convergence", config);
    out << "eta,p,iteration,mean_nmse,mean_residual,active_trials,diverged_trials,trials\n";
    for (const auto& c : study.curves) {
        for (std::size_t t = 0; t < c.mean_nmse.size(); ++t) {
            out << format_number(c.step_size) << ',' << format_number(c.density) << ',' << (t + 1) << ',';
            if (c.active_trials[t] > 0) out << format_number(c.mean_nmse[t]) << ',' << format_number(c.mean_residual[t]);
            else out << "NA,NA";
            out << ',' << c.active_trials[t] << ',' << c.diverged_trials << ',' << c.trials << '\n';
        }
    }
}

// ---------------------------------------------------------------- stopping

double StoppingPoint::mean() const {
    if (iterations.empty()) return 0.0;
    return std::accumulate(iterations.begin(), iterations.end(), 0.0) / static_cast<double>(iterations.size());
}

StoppingStudy run_stopping_study(const ExperimentConfig& config) {
    require_valid(config);
    const int trials = config.trials_or(200);
    const double eta = config.step_size_or_default();

    StoppingStudy study;
    for (double pnr : config.pnr_db) study.points.push_back({pnr, {}, {}, 0});

    for (int trial = 0; trial < trials; ++trial) {
        const auto streams = trial_streams(config.master_seed, trial);
        const auto channel = trial_channel(config, streams, config.gamma_max_ms, config.gamma_max_bs);
        const auto schedule =
            build_uss_schedule(channel.ms_geometry, channel.bs_geometry, config.sample_count(), streams.schedule);
        for (auto& point : study.points) {
            const double sigma2 = noise_variance_for_pnr(point.pnr_db, config.gain_variance, config.pilot);
            const auto samples = observe(channel, schedule, config.pilot, sigma2, streams.noise);
            const auto result = svp_estimate(samples, svp_config(config, eta, sigma2));
            point.iterations.push_back(result.iterations_used);
            ++point.histogram[result.iterations_used];
            if (!result.converged) ++point.unconverged;
        }
    }
    return study;
}

void write_csv(std::ostream& out, const ExperimentConfig& config, const StoppingStudy& study) {
    write_preamble(out, "stopping", config);
    out << "pnr_db,iterations,count,fraction,mean_iterations,unconverged\n";
    for (const auto& p : study.points) {
        const double n = static_cast<double>(p.iterations.size());
        for (const auto& [iters, count] : p.histogram) {
            out << format_number(p.pnr_db) << ',' << iters << ',' << count << ',' << format_number(count / n) << ','
                << format_number(p.mean()) << ',' << p.unconverged << '\n';
        }
    }
}

// ---------------------------------------------------------------- NMSE comparison

const NmsePoint& NmseStudy::point(double pnr_db, double gamma_max, const std::string& estimator) const {
    for (const auto& p : points)
        if (same(p.pnr_db, pnr_db) && same(p.gamma_max, gamma_max) && p.estimator == estimator) return p;
    throw std::out_of_range("NmseStudy: no point for " + estimator);
}

NmseStudy run_nmse_comparison(const ExperimentConfig& config) {
    require_valid(config);
    const int trials = config.trials_or(200);
    const double eta = config.step_size_or_default();
    const auto unitary = build_dictionary(config.num_ms, config.num_ms, config.num_bs, config.num_bs,
                                          config.element_spacing);
    std::optional<Dictionary> redundant;
    if (config.redundant)
        redundant = build_dictionary(config.num_ms, config.redundant_grid_ms, config.num_bs, config.redundant_grid_bs,
                                     config.element_spacing);

    const bool ms_err = config.mismatch != MismatchTerminals::bs;
    const bool bs_err = config.mismatch != MismatchTerminals::ms;

    const std::size_t n_pnr = config.pnr_db.size();
    const std::size_t n_gamma = config.gamma_max.size();
    std::vector<RunningMean> svp_acc(n_pnr * n_gamma), ompu_acc(n_pnr * n_gamma), ompr_acc(n_pnr * n_gamma);

    NmseStudy study;
    for (int trial = 0; trial < trials; ++trial) {
        const auto streams = trial_streams(config.master_seed, trial);
        for (std::size_t gi = 0; gi < n_gamma; ++gi) {
            const double gamma = config.gamma_max[gi];
            const auto channel = trial_channel(config, streams, ms_err ? gamma : 0.0, bs_err ? gamma : 0.0);
            const auto schedule =
                build_uss_schedule(channel.ms_geometry, channel.bs_geometry, config.sample_count(), streams.schedule);
            for (std::size_t pi = 0; pi < n_pnr; ++pi) {
                const double pnr = config.pnr_db[pi];
                const double sigma2 = noise_variance_for_pnr(pnr, config.gain_variance, config.pilot);
                const int iterations = iterations_for(config, pnr);
                const auto samples = observe(channel, schedule, config.pilot, sigma2, streams.noise);

                auto svp = svp_config(config, eta, sigma2);
                svp.max_iterations = iterations;
                svp.stop_on_tolerance = false;
                const auto svp_result = svp_estimate(samples, svp);

                ExperimentRecord rec;
                rec.trial = trial;
                rec.seed = streams.trial;
                rec.pnr_db = pnr;
                rec.gamma_max = gamma;
                rec.nmse_svp = nmse(channel.matrix, svp_result.estimate);
                rec.svp_iterations = svp_result.iterations_used;
                rec.nmse_omp_unitary = nmse(channel.matrix, omp_estimate(samples, unitary, iterations).reconstructed);
                if (redundant)
                    rec.nmse_omp_redundant = nmse(channel.matrix, omp_estimate(samples, *redundant, iterations).reconstructed);

                const std::size_t k = pi * n_gamma + gi;
                svp_acc[k].add(rec.nmse_svp);
                ompu_acc[k].add(rec.nmse_omp_unitary);
                if (rec.nmse_omp_redundant) ompr_acc[k].add(*rec.nmse_omp_redundant);
                study.records.push_back(rec);
            }
        }
    }

    for (std::size_t pi = 0; pi < n_pnr; ++pi) {
        for (std::size_t gi = 0; gi < n_gamma; ++gi) {
            const std::size_t k = pi * n_gamma + gi;
            const double pnr = config.pnr_db[pi];
            const double gamma = config.gamma_max[gi];
            const int iterations = iterations_for(config, pnr);
            auto add = [&](const char* name, const RunningMean& acc) {
                study.points.push_back({pnr, gamma, name, iterations, acc.count, acc.mean(), acc.std_error()});
            };
            add(kSvp, svp_acc[k]);
            add(kOmpUnitary, ompu_acc[k]);
            if (redundant) add(kOmpRedundant, ompr_acc[k]);
        }
    }
    std::sort(study.records.begin(), study.records.end(), [](const ExperimentRecord& a, const ExperimentRecord& b) {
        if (a.pnr_db != b.pnr_db) return a.pnr_db < b.pnr_db;
        if (a.gamma_max != b.gamma_max) return a.gamma_max < b.gamma_max;
        return a.trial < b.trial;
    });
    return study;
}

void write_csv(std::ostream& out, const ExperimentConfig& config, const NmseStudy& study) {
    write_preamble(out, "nmse", config);
    out << "pnr_db,gamma_max_over_pi,estimator,iterations,trials,mean_nmse,std_error,mean_nmse_db\n";
    for (const auto& p : study.points) {
        out << format_number(p.pnr_db) << ',' << format_number(p.gamma_max / kPi) << ',' << p.estimator << ','
            << p.iterations << ',' << p.trials << ',' << format_number(p.mean) << ',' << format_number(p.std_error)
            << ',' << format_number(10.0 * std::log10(p.mean)) << '\n';
    }
}

void write_records_csv(std::ostream& out, const ExperimentConfig& config, const NmseStudy& study) {
    write_preamble(out, "nmse-records", config);
    out << "trial,seed,pnr_db,gamma_max_over_pi,nmse_svp,nmse_omp_unitary,nmse_omp_redundant,svp_iterations\n";
    for (const auto& r : study.records) {
        out << r.trial << ',' << r.seed << ',' << format_number(r.pnr_db) << ',' << format_number(r.gamma_max / kPi)
            << ',' << format_number(r.nmse_svp) << ',' << format_number(r.nmse_omp_unitary) << ','
            << (r.nmse_omp_redundant ? format_number(*r.nmse_omp_redundant) : std::string("NA")) << ','
            << r.svp_iterations << '\n';
    }
}

// ---------------------------------------------------------------- spectral efficiency

const SePoint& SeStudy::point(double snr_db, const std::string& scheme) const {
    for (const auto& p : points)
        if (same(p.snr_db, snr_db) && p.scheme == scheme) return p;
    throw std::out_of_range("SeStudy: no point for " + scheme);
}

SeStudy run_se_study(const ExperimentConfig& config, SelectionSetting setting) {
    require_valid(config);
    const int trials = config.trials_or(100);
    const double eta = config.step_size_or_default();
    const double sigma2 = noise_variance_for_pnr(config.se_pnr_db, config.gain_variance, config.pilot);
    const int iterations = iterations_for(config, config.se_pnr_db);
    const auto unitary = build_dictionary(config.num_ms, config.num_ms, config.num_bs, config.num_bs,
                                          config.element_spacing);
    std::optional<Dictionary> redundant;
    if (config.redundant)
        redundant = build_dictionary(config.num_ms, config.redundant_grid_ms, config.num_bs, config.redundant_grid_bs,
                                     config.element_spacing);

    SelectionConstraint constraint;
    constraint.ms = {config.num_ms, config.num_rf_ms};
    if (setting == SelectionSetting::B) {
        constraint.side = SelectionSide::joint;
        constraint.bs = SubarrayPartition{config.num_bs, config.num_rf_bs};
    }

    SeStudy study;
    study.setting = setting;
    study.schemes = {kPerfect, kSvp, kOmpUnitary};
    if (redundant) study.schemes.push_back(kOmpRedundant);
    study.schemes.push_back(kNoAs);

    std::map<std::pair<std::size_t, std::string>, RunningMean> acc;
    for (int trial = 0; trial < trials; ++trial) {
        const auto streams = trial_streams(config.master_seed, trial);
        const auto channel = trial_channel(config, streams, config.gamma_max_ms, config.gamma_max_bs);
        const auto schedule =
            build_uss_schedule(channel.ms_geometry, channel.bs_geometry, config.sample_count(), streams.schedule);
        const auto samples = observe(channel, schedule, config.pilot, sigma2, streams.noise);

        auto svp = svp_config(config, eta, sigma2);
        svp.max_iterations = iterations;
        svp.stop_on_tolerance = false;

        std::map<std::string, CMatrix> estimates;
        estimates[kPerfect] = channel.matrix;
        estimates[kSvp] = svp_estimate(samples, svp).estimate;
        estimates[kOmpUnitary] = omp_estimate(samples, unitary, iterations).reconstructed;
        if (redundant) estimates[kOmpRedundant] = omp_estimate(samples, *redundant, iterations).reconstructed;

        // Fully digital array with one antenna per RF chain, same path realization.
        const auto small_ms = truncated(channel.ms_geometry, config.num_rf_ms);
        const auto small_bs =
            setting == SelectionSetting::B ? truncated(channel.bs_geometry, config.num_rf_bs) : channel.bs_geometry;
        const CMatrix h_small = assemble_channel(channel.paths, small_ms, small_bs).matrix;
        const int small_streams =
            static_cast<int>(std::min<Index>(config.paths, std::min(h_small.rows(), h_small.cols())));
        const CMatrix p_small = svd_precoder(h_small, small_streams);
        std::vector<int> all_rows(static_cast<std::size_t>(h_small.rows()));
        std::iota(all_rows.begin(), all_rows.end(), 0);

        for (std::size_t si = 0; si < config.snr_db.size(); ++si) {
            const double snr = std::pow(10.0, config.snr_db[si] / 10.0);
            SeRecord rec;
            rec.trial = trial;
            rec.snr_db = config.snr_db[si];
            for (const auto& scheme : study.schemes) {
                double se = 0;
                if (scheme == kNoAs) {
                    se = spectral_efficiency(h_small, p_small, all_rows, snr);
                } else {
                    se = select_and_evaluate(channel.matrix, estimates.at(scheme), constraint, config.paths, snr,
                                             setting)
                             .spectral_efficiency;
                }
                rec.se[scheme] = se;
                acc[{si, scheme}].add(se);
            }
            study.records.push_back(std::move(rec));
        }
    }

    for (std::size_t si = 0; si < config.snr_db.size(); ++si) {
        for (const auto& scheme : study.schemes) {
            const auto& a = acc[{si, scheme}];
            study.points.push_back({config.snr_db[si], scheme, a.count, a.mean(), a.std_error()});
        }
    }
    return study;
}

void write_csv(std::ostream& out, const ExperimentConfig& config, const SeStudy& study) {
    write_preamble(out, study.setting == SelectionSetting::A ? "se-A" : "se-B", config);
    out << "snr_db,scheme,trials,mean_se,std_error\n";
    for (const auto& p : study.points) {
        out << format_number(p.snr_db) << ',' << p.scheme << ',' << p.trials << ',' << format_number(p.mean) << ','
            << format_number(p.std_error) << '\n';
    }
}

// ---------------------------------------------------------------- miss probability

MissStudy run_miss_prob(const ExperimentConfig& config) {
    MissStudy study;
    for (std::size_t k = 0; k < config.miss_cases.size(); ++k) {
        const auto& c = config.miss_cases[k];
        if (auto msg = check_sample_count(c.num_ms, c.num_bs, c.num_rf_ms, c.num_samples); !msg.empty())
            throw std::invalid_argument("missprob: " + msg);
        MissRow row;
        row.setup = c;
        row.analytic = miss_probability(c.num_ms, c.num_bs, c.num_samples, c.num_rf_ms);
        if (row.analytic >= kMissEstimableThreshold && config.miss_trials > 0) {
            row.empirical = empirical_miss_frequency(c.num_ms, c.num_bs, c.num_samples, c.num_rf_ms, config.miss_trials,
                                                     derive_seed(config.master_seed, {0x4d495353, k}));
        }
        study.rows.push_back(row);
    }
    return study;
}

void write_csv(std::ostream& out, const ExperimentConfig& config, const MissStudy& study) {
    write_preamble(out, "missprob", config);
    out << "n_ms,n_bs,n_rf_ms,num_samples,analytic_p_miss,empirical_row_miss,empirical_any_row_miss,trials\n";
    for (const auto& r : study.rows) {
        out << r.setup.num_ms << ',' << r.setup.num_bs << ',' << r.setup.num_rf_ms << ',' << r.setup.num_samples << ','
            << format_number(r.analytic) << ',';
        if (r.empirical) {
            out << format_number(r.empirical->row_frequency()) << ',' << format_number(r.empirical->any_row_frequency())
                << ',' << r.empirical->trials << '\n';
        } else {
            out << "not_estimable,not_estimable,0\n";
        }
    }
}

}  // namespace mmwave::study
