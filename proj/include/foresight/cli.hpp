#pragma once

#include <filesystem>
#include <fstream>
#include <iostream>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "foresight/config.hpp"
#include "foresight/evaluate.hpp"
#include "foresight/finetune.hpp"
#include "foresight/ingest.hpp"
#include "foresight/manifest.hpp"
#include "foresight/provider_cache.hpp"
#include "foresight/providers_http.hpp"
#include "foresight/providers_mock.hpp"
#include "foresight/reasoning.hpp"
#include "foresight/sweep.hpp"

namespace foresight {
namespace cli {

struct CommandOptions {
    std::string dataset_path;
    std::string config_path;
    std::string out_dir = "out";
    bool mock_providers = false;
    std::optional<uint64_t> seed;
    std::optional<int> workers;
    std::string preset;            // ablation preset name, optional
    std::string sweep_spec_path;   // sweep command
    std::string log_path;          // report command
    size_t finetune_limit = 6000;
    bool curate = false;           // ingest: run screening + categorization
    std::optional<Date> cutoff;    // ingest split cutoff
    std::optional<double> validation_fraction;
};

/// Keeps ownership of the concrete providers wired for a run.
struct OwnedProviders {
    std::vector<std::shared_ptr<CompletionProvider>> completions;
    std::vector<std::shared_ptr<NewsProvider>> news;
    std::shared_ptr<EmbeddingProvider> embedder;
    std::shared_ptr<UrlFetcher> url_fetcher;
    std::shared_ptr<DiskCache> cache;
    PromptLibrary prompts = PromptLibrary::builtin();
    ProviderSet set;
    std::vector<std::string> ids;
};

inline OwnedProviders build_providers(const PipelineConfig& config,
                                      const std::vector<ForecastQuestion>& dataset,
                                      bool mock, double mock_jitter = 0.0) {
    OwnedProviders owned;
    std::shared_ptr<CompletionProvider> completion;
    std::shared_ptr<NewsProvider> news;
    if (mock) {
        completion = std::make_shared<CrowdEchoCompletionProvider>(dataset, mock_jitter);
        news = std::make_shared<FixtureNewsProvider>("mock_news");
        owned.embedder = std::make_shared<MockEmbeddingProvider>();
    } else {
        const char* base = std::getenv("OPENAI_BASE_URL");
        completion = std::make_shared<HttpCompletionProvider>(
            base && *base ? base : "https://api.openai.com", "OPENAI_API_KEY",
            HttpOptions{config.provider_retries});
        const char* news_base = std::getenv("NEWSCATCHER_BASE_URL");
        news = std::make_shared<HttpNewsProvider>(
            news_base && *news_base ? news_base : "https://api.newscatcherapi.com",
            "NEWSCATCHER_API_KEY", HttpOptions{config.provider_retries});
        owned.url_fetcher = std::make_shared<HttpUrlFetcher>();
    }
    if (!config.cache_dir.empty()) {
        owned.cache = std::make_shared<DiskCache>(config.cache_dir);
        completion = std::make_shared<CachedCompletionProvider>(completion, owned.cache);
        news = std::make_shared<CachedNewsProvider>(news, owned.cache);
    }
    owned.completions.push_back(completion);
    owned.news.push_back(news);
    owned.set.completion = completion.get();
    owned.set.news.push_back(news.get());
    owned.set.embedder = owned.embedder.get();
    owned.set.url_fetcher = owned.url_fetcher.get();
    owned.set.prompts = &owned.prompts;
    owned.ids = {completion->provider_id(), news->provider_id()};
    return owned;
}

inline PipelineConfig resolve_config(const CommandOptions& opts) {
    PipelineConfig config =
        opts.config_path.empty() ? PipelineConfig{} : load_config_file(opts.config_path);
    if (!opts.preset.empty()) config = apply_preset(config, opts.preset);
    if (opts.seed) config.seed = *opts.seed;
    if (opts.workers) config.workers = *opts.workers;
    if (opts.mock_providers && config.tuned_model_id &&
        *config.tuned_model_id == "gpt-4-0613-finetuned") {
        // Mock runs have no hosted fine-tuned model; the echo provider serves
        // both roles, so keep the id but nothing special happens.
    }
    config.validate();
    return config;
}

inline std::vector<ForecastQuestion> load_questions_or_throw(const std::string& path,
                                                             LoadResult* full = nullptr) {
    LoadResult loaded = load_dataset(path);
    if (full) *full = loaded;
    if (loaded.questions.empty())
        throw EmptyDataset("no valid questions in " + path +
                           (loaded.rejected.empty()
                                ? ""
                                : " (" + std::to_string(loaded.rejected.size()) + " rejected)"));
    return loaded.questions;
}

inline void write_text(const std::filesystem::path& path, const std::string& text) {
    std::ofstream out(path);
    if (!out) throw IoError("cannot write " + path.string());
    out << text;
    if (!out) throw IoError("failed writing " + path.string());
}

inline void write_log(const ForecastLog& log, const std::filesystem::path& path) {
    std::ofstream out(path);
    if (!out) throw IoError("cannot write forecast log: " + path.string());
    for (const auto& r : log) out << record_to_json(r).dump() << "\n";
    if (!out) throw IoError("failed writing forecast log: " + path.string());
}

inline ForecastLog read_log(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open forecast log: " + path);
    ForecastLog log;
    std::string line;
    while (std::getline(in, line)) {
        if (trim(line).empty()) continue;
        try {
            log.push_back(record_from_json(nlohmann::json::parse(line)));
        } catch (const nlohmann::json::exception& e) {
            throw ParseError("malformed forecast log line: " + std::string(e.what()));
        }
    }
    return log;
}

namespace detail {

inline std::string csv_escape(const std::string& s) {
    if (s.find_first_of(",\"\n") == std::string::npos) return s;
    std::string out = "\"";
    for (char c : s) {
        if (c == '"') out += "\"\"";
        else out.push_back(c);
    }
    return out + "\"";
}

inline std::string table_csv(const std::vector<ReportTableRow>& rows,
                             const std::string& label_header) {
    std::string csv = label_header +
                      ",questions,ours_brier,ours_accuracy,ours_se,crowd_brier,crowd_accuracy,"
                      "crowd_se\n";
    for (const auto& r : rows) {
        char buf[256];
        std::snprintf(buf, sizeof(buf), ",%zu,%.6f,%.6f,%.6f,%.6f,%.6f,%.6f\n", r.questions,
                      r.ours.mean_brier, r.ours.mean_accuracy, r.ours.standard_error,
                      r.crowd.mean_brier, r.crowd.mean_accuracy, r.crowd.standard_error);
        csv += csv_escape(r.label) + buf;
    }
    return csv;
}

inline std::string selective_csv(const std::vector<SelectiveRow>& rows) {
    std::string csv =
        "criterion,qualifying_forecasts,ours_brier,ours_accuracy,crowd_brier,crowd_accuracy,"
        "aggregate_brier,aggregate_accuracy,pct_forecasts,pct_questions,pct_scheduled\n";
    for (const auto& r : rows) {
        char buf[320];
        std::snprintf(buf, sizeof(buf), "%s,%zu,%.6f,%.6f,%.6f,%.6f,%.6f,%.6f,%.4f,%.4f,%.4f\n",
                      r.criterion.c_str(), r.qualifying_forecasts, r.ours.mean_brier,
                      r.ours.mean_accuracy, r.crowd.mean_brier, r.crowd.mean_accuracy,
                      r.aggregate.mean_brier, r.aggregate.mean_accuracy, r.pct_forecasts,
                      r.pct_questions, r.pct_scheduled);
        csv += buf;
    }
    return csv;
}

inline std::string calibration_csv(const CalibrationCurve& c) {
    std::string csv = "lower,upper,count,mean_forecast,empirical_rate\n";
    for (const auto& b : c.bins) {
        char buf[160];
        std::snprintf(buf, sizeof(buf), "%.2f,%.2f,%zu,%.6f,%.6f\n", b.lower, b.upper, b.count,
                      b.mean_forecast, b.empirical_rate);
        csv += buf;
    }
    return csv;
}

inline std::string sweep_csv(const SweepResult& result) {
    std::string csv = "group,metric,label,metric_value,question_count,winner\n";
    for (const auto& t : result.tables) {
        for (size_t i = 0; i < t.rows.size(); ++i) {
            char buf[160];
            std::snprintf(buf, sizeof(buf), ",%s,%.6f,%zu,%d\n",
                          csv_escape(t.rows[i].label).c_str(), t.rows[i].metric_value,
                          t.rows[i].question_count, i == t.winner ? 1 : 0);
            csv += csv_escape(t.group) + "," + sweep_metric_name(t.metric) + buf;
        }
    }
    return csv;
}

}  // namespace detail

inline void write_report_files(const EvaluationReport& report,
                               const std::filesystem::path& out_dir,
                               std::vector<std::string>& outputs) {
    std::filesystem::create_directories(out_dir / "tables");
    write_text(out_dir / "report.json", report_to_json(report).dump(2) + "\n");
    outputs.push_back((out_dir / "report.json").string());
    write_text(out_dir / "tables" / "platform.csv",
               detail::table_csv(report.by_platform, "platform"));
    write_text(out_dir / "tables" / "category.csv",
               detail::table_csv(report.by_category, "category"));
    write_text(out_dir / "tables" / "selective.csv", detail::selective_csv(report.selective));
    outputs.push_back((out_dir / "tables").string());
    if (report.calibration_system)
        write_text(out_dir / "tables" / "calibration_system.csv",
                   detail::calibration_csv(*report.calibration_system));
    if (report.calibration_crowd)
        write_text(out_dir / "tables" / "calibration_crowd.csv",
                   detail::calibration_csv(*report.calibration_crowd));
}

struct ManifestScope {
    RunManifest manifest;
    std::filesystem::path out_dir;

    ManifestScope(const std::string& command, const CommandOptions& opts,
                  const PipelineConfig& config) {
        out_dir = opts.out_dir;
        std::filesystem::create_directories(out_dir);
        manifest.command = command;
        manifest.config_hash = config_hash(config);
        manifest.seed = config.seed;
        if (!opts.dataset_path.empty()) manifest.dataset_hash = hash_file(opts.dataset_path);
        manifest.started_at = iso8601_now();
    }

    void finish(const std::vector<std::string>& provider_ids,
                std::vector<std::string> outputs) {
        manifest.provider_ids = provider_ids;
        manifest.finished_at = iso8601_now();
        manifest.output_paths = std::move(outputs);
        write_manifest(manifest, (out_dir / "manifest.json").string());
    }
};

// ---------------------------------------------------------------------------
// Commands
// ---------------------------------------------------------------------------

inline int run_ingest(const CommandOptions& opts) {
    PipelineConfig config = resolve_config(opts);
    ManifestScope scope("ingest", opts, config);

    LoadResult loaded;
    std::vector<ForecastQuestion> questions = load_questions_or_throw(opts.dataset_path, &loaded);

    std::vector<std::string> provider_ids;
    if (opts.curate) {
        OwnedProviders providers =
            build_providers(config, questions, opts.mock_providers);
        provider_ids = providers.ids;
        auto curated = parallel_map(
            questions,
            [&](const ForecastQuestion& q) {
                ForecastQuestion out = q;
                auto screen = screen_question(q, *providers.set.completion, providers.prompts);
                if (screen.verdict == ScreenVerdict::flag) return std::optional<ForecastQuestion>();
                out.category =
                    assign_category(q, *providers.set.completion, providers.prompts).category;
                return std::optional<ForecastQuestion>(std::move(out));
            },
            config.workers);
        std::vector<ForecastQuestion> kept;
        for (auto& [value, error] : curated) {
            if (error) std::rethrow_exception(error);
            if (*value) kept.push_back(std::move(**value));
        }
        questions = std::move(kept);
    }

    SplitSpec spec;
    spec.seed = config.seed;
    if (opts.cutoff) spec.cutoff = *opts.cutoff;
    if (opts.validation_fraction) spec.validation_fraction = *opts.validation_fraction;
    SplitResult splits = split(questions, spec);

    std::vector<std::string> outputs;
    auto emit = [&](const std::vector<ForecastQuestion>& set, const char* name) {
        auto path = scope.out_dir / name;
        save_dataset(set, path.string());
        outputs.push_back(path.string());
    };
    emit(splits.train, "train.jsonl");
    emit(splits.validation, "validation.jsonl");
    emit(splits.test, "test.jsonl");
    emit(splits.discarded, "discarded.jsonl");

    nlohmann::json rejects = nlohmann::json::array();
    for (const auto& [line, reason] : loaded.rejected)
        rejects.push_back({{"line", line}, {"reason", reason}});
    write_text(scope.out_dir / "rejected.json", rejects.dump(2) + "\n");
    outputs.push_back((scope.out_dir / "rejected.json").string());

    scope.finish(provider_ids, outputs);
    std::cout << "ingest: " << splits.train.size() << " train, " << splits.validation.size()
              << " validation, " << splits.test.size() << " test, " << splits.discarded.size()
              << " discarded, " << loaded.rejected.size() << " rejected\n";
    return 0;
}

inline int run_forecast_command(const CommandOptions& opts, bool require_resolved) {
    PipelineConfig config = resolve_config(opts);
    ManifestScope scope(require_resolved ? "evaluate" : "forecast", opts, config);

    std::vector<ForecastQuestion> questions = load_questions_or_throw(opts.dataset_path);
    if (require_resolved) {
        size_t resolved = 0;
        for (const auto& q : questions) resolved += q.resolved() ? 1 : 0;
        if (resolved == 0) throw ValidationError("evaluate needs resolved questions for scoring");
    }

    OwnedProviders providers = build_providers(config, questions, opts.mock_providers);
    RunSystemResult result = run_system(questions, config, providers.set);

    std::vector<std::string> outputs;
    auto log_path = scope.out_dir / "forecast_log.jsonl";
    write_log(result.log, log_path);
    outputs.push_back(log_path.string());

    bool any_scored = result.report.scored_question_count > 0;
    if (any_scored) {
        write_report_files(result.report, scope.out_dir, outputs);
    } else {
        std::cout << "no resolved questions; scoring skipped\n";
    }

    scope.finish(providers.ids, outputs);
    if (any_scored) {
        std::cout << "questions: " << result.report.question_count
                  << "  forecasts: " << result.report.forecast_count
                  << "  failed: " << result.report.failed_question_count << "\n";
        char buf[128];
        std::snprintf(buf, sizeof(buf), "brier ours %.4f crowd %.4f aggregate %.4f\n",
                      result.report.overall_ours.mean_brier,
                      result.report.overall_crowd.mean_brier,
                      result.report.overall_aggregate.mean_brier);
        std::cout << buf;
    }
    return 0;
}

inline std::vector<SweepGroup> load_sweep_spec(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open sweep spec: " + path);
    nlohmann::json j;
    try {
        in >> j;
    } catch (const nlohmann::json::exception& e) {
        throw ConfigError("sweep spec is not valid JSON: " + std::string(e.what()));
    }
    std::vector<SweepGroup> groups;
    try {
        for (const auto& g : j.at("groups")) {
            SweepGroup group;
            group.name = g.at("name").get<std::string>();
            group.metric = parse_sweep_metric(g.value("metric", "mean_brier"));
            for (const auto& c : g.at("candidates"))
                group.axis.push_back(
                    {c.at("label").get<std::string>(), c.at("patch")});
            groups.push_back(std::move(group));
        }
    } catch (const nlohmann::json::exception& e) {
        throw ConfigError("malformed sweep spec: " + std::string(e.what()));
    }
    if (groups.empty()) throw ConfigError("sweep spec has no groups");
    return groups;
}

inline int run_sweep_command(const CommandOptions& opts) {
    PipelineConfig config = resolve_config(opts);
    ManifestScope scope("sweep", opts, config);

    std::vector<ForecastQuestion> questions = load_questions_or_throw(opts.dataset_path);
    std::erase_if(questions, [](const ForecastQuestion& q) { return !q.resolved(); });
    if (questions.empty()) throw EmptyDataset("sweep needs resolved questions");

    std::vector<SweepGroup> groups = load_sweep_spec(opts.sweep_spec_path);
    OwnedProviders providers = build_providers(config, questions, opts.mock_providers);
    SweepResult result = run_sweep(groups, questions, config,
                                   make_system_sweep_evaluator(providers.set), config.seed);

    std::vector<std::string> outputs;
    write_text(scope.out_dir / "sweep_result.json", sweep_result_to_json(result).dump(2) + "\n");
    write_text(scope.out_dir / "sweep_tables.csv", detail::sweep_csv(result));
    outputs.push_back((scope.out_dir / "sweep_result.json").string());
    outputs.push_back((scope.out_dir / "sweep_tables.csv").string());

    scope.finish(providers.ids, outputs);
    std::cout << "sweep: " << result.pipeline_runs << " pipeline runs over "
              << questions.size() << " questions\n";
    for (const auto& t : result.tables)
        std::cout << "  group " << t.group << " -> " << t.rows[t.winner].label << "\n";
    return 0;
}

/// Default candidate pools for fine-tuning data generation. The prompt pool
/// carries validation Brier scores used for inverse-score sampling.
struct FinetuneGenOptions {
    std::vector<std::pair<std::string, double>> prompt_pool = {
        {"scratchpad_strength_rating", 0.170},
        {"scratchpad_decision_tree", 0.174},
        {"scratchpad_base", 0.209},
    };
    std::string optimal_prompt_id = "scratchpad_optimal";
    std::vector<std::string> model_ids = {"gpt-4-1106-preview", "claude-2.1"};
};

inline int run_finetune_data(const CommandOptions& opts,
                             const FinetuneGenOptions& gen = {}) {
    PipelineConfig config = resolve_config(opts);
    ManifestScope scope("finetune-data", opts, config);

    std::vector<ForecastQuestion> questions = load_questions_or_throw(opts.dataset_path);
    std::erase_if(questions, [](const ForecastQuestion& q) { return !q.resolved(); });
    if (questions.empty()) throw EmptyDataset("finetune-data needs resolved questions");

    OwnedProviders providers =
        build_providers(config, questions, opts.mock_providers, /*mock_jitter=*/0.1);

    std::vector<RetrievalVariant> variant_pool;
    for (const auto& prompt_id : config.query_prompt_ids)
        for (int nq : {config.queries_per_prompt, std::max(1, config.queries_per_prompt / 2)})
            for (int na : {config.per_query_limit, std::max(1, config.per_query_limit / 2)})
                variant_pool.push_back({prompt_id, nq, na});

    std::map<std::pair<std::string, int>, Probability> crowd_probs;
    std::map<std::string, Outcome> outcomes;
    std::vector<FinetuneCandidate> candidates;

    auto per_question = parallel_map(
        questions,
        [&](const ForecastQuestion& q) {
            std::vector<FinetuneCandidate> local;
            std::mt19937_64 rng(fnv1a64(q.id) ^ config.seed);
            auto variants = sample_retrieval_variants(variant_pool, 2, rng);
            auto prompt_ids = sample_scratchpad_prompts(gen.optimal_prompt_id, gen.prompt_pool,
                                                        3, rng);
            auto points =
                retrieval_dates(q.date_begin, q.date_close, q.date_resolve, config.schedule_n);
            for (const auto& point : points) {
                Probability crowd;
                try {
                    crowd = crowd_at(q.community_series, point.date);
                } catch (const CrowdUnavailable&) {
                    continue;  // no benchmark at this date, nothing to select against
                }
                for (const auto& variant : variants) {
                    PipelineConfig vc = config;
                    vc.query_prompt_ids = {variant.query_prompt_id};
                    vc.queries_per_prompt = variant.queries_per_prompt;
                    vc.per_query_limit = variant.per_query_limit;

                    std::vector<std::string> summaries;
                    if (vc.retrieval_enabled)
                        summaries =
                            retrieve_and_summarize(q, point.date, vc, providers.set).summaries;
                    const std::string basic_input = assemble_prompt(
                        q, summaries, providers.prompts.reasoning("basic_info"), point.date);
                    ForecastOptions fo;
                    fo.fallback = Probability(config.fallback_probability);
                    fo.retries = config.provider_retries;
                    for (const auto& prompt_id : prompt_ids) {
                        for (const auto& model_id : gen.model_ids) {
                            auto sample = forecast_once(
                                q, summaries, providers.prompts.reasoning(prompt_id), model_id,
                                config.base_temperature, point, *providers.set.completion, fo);
                            local.push_back({std::move(sample), basic_input, q.date_begin});
                        }
                    }
                }
            }
            return local;
        },
        config.workers);

    size_t failed = 0;
    for (size_t i = 0; i < questions.size(); ++i) {
        auto& [value, error] = per_question[i];
        if (error) {
            ++failed;
            continue;
        }
        const auto& q = questions[i];
        outcomes.emplace(q.id, *q.resolution);
        for (auto& c : *value) {
            crowd_probs.emplace(
                std::make_pair(c.sample.question_id, c.sample.retrieval_index),
                crowd_at(q.community_series, c.sample.retrieval_date));
            candidates.push_back(std::move(c));
        }
    }

    auto pairs = select_pairs(candidates, crowd_probs, outcomes);
    auto out_path = scope.out_dir / "finetune.jsonl";
    size_t written = emit_dataset(pairs, opts.finetune_limit, out_path.string());

    nlohmann::json stats = {{"questions", questions.size()},
                            {"failed_questions", failed},
                            {"candidates", candidates.size()},
                            {"selected", pairs.size()},
                            {"written", written}};
    write_text(scope.out_dir / "finetune_stats.json", stats.dump(2) + "\n");

    scope.finish(providers.ids,
                 {out_path.string(), (scope.out_dir / "finetune_stats.json").string()});
    std::cout << "finetune-data: " << candidates.size() << " candidates, " << pairs.size()
              << " selected, " << written << " written\n";
    return 0;
}

inline int run_report_command(const CommandOptions& opts) {
    PipelineConfig config = resolve_config(opts);
    ManifestScope scope("report", opts, config);

    std::vector<ForecastQuestion> questions = load_questions_or_throw(opts.dataset_path);
    ForecastLog log = read_log(opts.log_path);
    EvaluationReport report = build_report(log, questions, config.schedule_n);

    std::vector<std::string> outputs;
    write_report_files(report, scope.out_dir, outputs);
    scope.finish({}, outputs);
    char buf[128];
    std::snprintf(buf, sizeof(buf), "brier ours %.4f crowd %.4f aggregate %.4f\n",
                  report.overall_ours.mean_brier, report.overall_crowd.mean_brier,
                  report.overall_aggregate.mean_brier);
    std::cout << buf;
    return 0;
}

}  // namespace cli
}  // namespace foresight
