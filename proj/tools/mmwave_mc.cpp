// Experiment runner for the matrix-completion channel estimation studies.

#include "mmwave/config.hpp"
#include "mmwave/experiments.hpp"

#include <CLI11.hpp>

#include <fstream>
#include <functional>
#include <iostream>
#include <optional>
#include <string>

namespace {

struct CommonOptions {
    std::string config_path;
    std::string seed;
    std::string out_path;
    std::optional<int> trials;
};

void add_common(CLI::App* cmd, CommonOptions& opts) {
    cmd->add_option("--config", opts.config_path, "INI experiment config (defaults apply when omitted)");
    cmd->add_option("--seed", opts.seed, "master seed (u64), overrides [run] seed");
    cmd->add_option("--out", opts.out_path, "output CSV path (stdout when omitted)");
    cmd->add_option("--trials", opts.trials, "Monte-Carlo trial count, overrides [run] trials")->check(CLI::PositiveNumber);
}

mmwave::ExperimentConfig resolve(const CommonOptions& opts) {
    auto config = opts.config_path.empty() ? mmwave::ExperimentConfig{} : mmwave::load_config(opts.config_path);
    if (!opts.seed.empty()) config.master_seed = mmwave::parse_seed(opts.seed);
    if (opts.trials) config.trials = *opts.trials;
    return config;
}

// Prints validation failures and returns false when the config is unusable.
bool report_violations(const mmwave::ExperimentConfig& config) {
    const auto errors = config.validate();
    for (const auto& e : errors) std::cerr << "config error: " << e << '\n';
    return errors.empty();
}

int emit(const CommonOptions& opts, const std::function<void(std::ostream&)>& write) {
    if (opts.out_path.empty()) {
        write(std::cout);
        return 0;
    }
    std::ofstream out(opts.out_path, std::ios::binary);
    if (!out) {
        std::cerr << "cannot open output '" << opts.out_path << "'\n";
        return 2;
    }
    write(out);
    return out ? 0 : 2;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Matrix-completion and OMP channel estimation studies for switch-based mmWave MIMO"};
    app.require_subcommand(1);

    CommonOptions opts;
    std::string setting = "config";
    std::string records_path;

    auto* convergence = app.add_subcommand("convergence", "SVP convergence traces over (eta, p)");
    auto* stopping = app.add_subcommand("stopping", "iterations-to-stop histograms across PNR");
    auto* nmse = app.add_subcommand("nmse", "NMSE of SVP and OMP across PNR and phase mismatch");
    auto* se = app.add_subcommand("se", "spectral efficiency with antenna selection");
    auto* missprob = app.add_subcommand("missprob", "analytic and empirical row-miss probability");
    auto* validate = app.add_subcommand("validate-config", "check a config and list every violation");
    for (auto* cmd : {convergence, stopping, nmse, se, missprob, validate}) add_common(cmd, opts);
    se->add_option("--setting", setting, "A (MS selection) or B (joint selection); defaults to [se] setting")
        ->check(CLI::IsMember({"A", "B", "config"}));
    nmse->add_option("--records", records_path, "also write per-trial records to this CSV");

    CLI11_PARSE(app, argc, argv);

    try {
        const auto config = resolve(opts);
        if (!report_violations(config)) return 1;
        using namespace mmwave::study;

        if (validate->parsed()) {
            std::cout << "config ok, digest " << config.digest() << '\n';
            return 0;
        }
        if (convergence->parsed()) {
            const auto result = run_convergence_study(config);
            return emit(opts, [&](std::ostream& out) { write_csv(out, config, result); });
        }
        if (stopping->parsed()) {
            const auto result = run_stopping_study(config);
            return emit(opts, [&](std::ostream& out) { write_csv(out, config, result); });
        }
        if (nmse->parsed()) {
            const auto result = run_nmse_comparison(config);
            if (!records_path.empty()) {
                std::ofstream rec(records_path, std::ios::binary);
                if (!rec) {
                    std::cerr << "cannot open records output '" << records_path << "'\n";
                    return 2;
                }
                write_records_csv(rec, config, result);
            }
            return emit(opts, [&](std::ostream& out) { write_csv(out, config, result); });
        }
        if (se->parsed()) {
            auto which = config.se_setting;
            if (setting == "A") which = mmwave::SelectionSetting::A;
            if (setting == "B") which = mmwave::SelectionSetting::B;
            const auto result = run_se_study(config, which);
            return emit(opts, [&](std::ostream& out) { write_csv(out, config, result); });
        }
        if (missprob->parsed()) {
            const auto result = run_miss_prob(config);
            return emit(opts, [&](std::ostream& out) { write_csv(out, config, result); });
        }
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    }
    return 0;
}
