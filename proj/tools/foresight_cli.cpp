// Operator entry points: ingest, forecast, evaluate, sweep, finetune-data,
// report. Exit codes: 0 ok, 2 config, 3 io, 4 provider, 5 validation.

#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "foresight/cli.hpp"

namespace {

using foresight::cli::CommandOptions;

void add_common(CLI::App* cmd, CommandOptions& opts, bool needs_dataset = true) {
    if (needs_dataset)
        cmd->add_option("--dataset", opts.dataset_path, "question dataset (JSON-lines)")
            ->required();
    cmd->add_option("--config", opts.config_path, "pipeline config file (JSON)");
    cmd->add_option("--out", opts.out_dir, "output directory")->capture_default_str();
    cmd->add_flag("--mock-providers", opts.mock_providers,
                  "use scripted fixtures instead of external services");
    cmd->add_option("--seed", [&opts](const std::vector<std::string>& v) {
        opts.seed = std::stoull(v[0]);
        return true;
    }, "override the config seed");
    cmd->add_option("--workers", [&opts](const std::vector<std::string>& v) {
        opts.workers = std::stoi(v[0]);
        return true;
    }, "cap the worker pool");
    cmd->add_option("--preset", opts.preset,
                    "ablation preset: full, no_finetuned, no_retrieval_no_finetune");
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"retrieval-augmented forecasting pipeline"};
    app.require_subcommand(1);

    CommandOptions ingest_opts;
    auto* ingest = app.add_subcommand("ingest", "load, curate, and split a question corpus");
    add_common(ingest, ingest_opts);
    ingest->add_flag("--curate", ingest_opts.curate,
                     "run the screening and categorization prompts");
    std::string cutoff_text;
    ingest->add_option("--cutoff", cutoff_text, "split cutoff date (YYYY-MM-DD)");
    ingest->add_option("--validation-fraction", [&ingest_opts](const std::vector<std::string>& v) {
        ingest_opts.validation_fraction = std::stod(v[0]);
        return true;
    }, "fraction of the pre-cutoff pool held out for validation");

    CommandOptions forecast_opts;
    auto* forecast = app.add_subcommand("forecast", "run the pipeline; score only if resolved");
    add_common(forecast, forecast_opts);

    CommandOptions evaluate_opts;
    auto* evaluate = app.add_subcommand("evaluate", "run the pipeline and produce reports");
    add_common(evaluate, evaluate_opts);

    CommandOptions sweep_opts;
    auto* sweep = app.add_subcommand("sweep", "sequential group-wise hyperparameter sweep");
    add_common(sweep, sweep_opts);
    sweep->add_option("--sweep-spec", sweep_opts.sweep_spec_path, "sweep spec file (JSON)")
        ->required();

    CommandOptions finetune_opts;
    auto* finetune =
        app.add_subcommand("finetune-data", "generate and select fine-tuning pairs");
    add_common(finetune, finetune_opts);
    finetune->add_option("--limit", finetune_opts.finetune_limit,
                         "most recent pairs kept")->capture_default_str();

    CommandOptions report_opts;
    auto* report = app.add_subcommand("report", "rebuild reports from an existing forecast log");
    add_common(report, report_opts);
    report->add_option("--log", report_opts.log_path, "forecast log (JSON-lines)")->required();

    CLI11_PARSE(app, argc, argv);

    try {
        if (*ingest) {
            if (!cutoff_text.empty()) ingest_opts.cutoff = foresight::Date::parse(cutoff_text);
            return foresight::cli::run_ingest(ingest_opts);
        }
        if (*forecast) return foresight::cli::run_forecast_command(forecast_opts, false);
        if (*evaluate) return foresight::cli::run_forecast_command(evaluate_opts, true);
        if (*sweep) return foresight::cli::run_sweep_command(sweep_opts);
        if (*finetune) return foresight::cli::run_finetune_data(finetune_opts);
        if (*report) return foresight::cli::run_report_command(report_opts);
    } catch (const foresight::Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return e.exit_code();
    } catch (const std::exception& e) {
        std::cerr << "unexpected error: " << e.what() << "\n";
        return 1;
    }
    return 1;
}
