#pragma once

#include <cstdlib>
#include <fstream>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "foresight/ensemble.hpp"
#include "foresight/errors.hpp"
#include "foresight/retrieval.hpp"
#include "foresight/util.hpp"

namespace foresight {

/// Every swept hyperparameter of the pipeline, with the optimized settings as
/// defaults: both query prompts at 6 queries each, top 10 articles per query,
/// relevance threshold 4 on the 1-6 scale, top 15 summaries ordered by
/// relevance, 3 base scratchpad prompts at temperature 0 plus 3 samples of the
/// tuned model at temperature 0.5, aggregated by trimmed mean.
struct PipelineConfig {
    std::vector<std::string> query_prompt_ids = {"search_query_expansion",
                                                 "search_query_subquestions"};
    int queries_per_prompt = 6;
    int query_max_words = 10;
    int per_query_limit = 10;
    RelevanceMode relevance_mode = RelevanceMode::title_first250;
    double relevance_threshold = 4.0;
    ArticleOrder article_order = ArticleOrder::relevance;
    int top_k_articles = 15;
    std::vector<std::string> scratchpad_prompt_ids = {
        "scratchpad_optimal", "scratchpad_strength_rating", "scratchpad_decision_tree"};
    std::string basic_model_id = "gpt-4-1106-preview";
    std::optional<std::string> tuned_model_id = "gpt-4-0613-finetuned";
    int samples_per_tuned_model = 3;
    double base_temperature = 0.0;
    double tuned_temperature = 0.5;
    std::string query_model_id = "gpt-4-1106-preview";
    std::string relevance_model_id = "gpt-3.5-turbo";
    std::string summary_model_id = "gpt-3.5-turbo";
    EnsembleMethod ensemble_method = EnsembleMethod::trimmed_mean_median_variant;
    bool retrieval_enabled = true;
    double fallback_probability = 0.5;
    int schedule_n = 5;
    uint64_t seed = 0;
    int workers = 4;
    int provider_retries = 2;
    int max_output_tokens = 2500;
    std::vector<std::string> whitelist;
    std::string cache_dir;

    int samples_per_question() const {
        return static_cast<int>(scratchpad_prompt_ids.size()) +
               (tuned_model_id ? samples_per_tuned_model : 0);
    }

    void validate() const {
        if (top_k_articles < 0) throw ConfigError("top_k_articles must be >= 0");
        if (schedule_n < 1) throw ConfigError("schedule_n must be >= 1");
        if (queries_per_prompt < 1) throw ConfigError("queries_per_prompt must be >= 1");
        if (scratchpad_prompt_ids.empty() && !tuned_model_id)
            throw ConfigError("no reasoning samples configured");
        if (fallback_probability < 0.0 || fallback_probability > 1.0)
            throw ConfigError("fallback_probability must be in [0,1]");
    }
};

inline nlohmann::json config_to_json(const PipelineConfig& c) {
    nlohmann::json j = {
        {"query_prompt_ids", c.query_prompt_ids},
        {"queries_per_prompt", c.queries_per_prompt},
        {"query_max_words", c.query_max_words},
        {"per_query_limit", c.per_query_limit},
        {"relevance_mode", relevance_mode_name(c.relevance_mode)},
        {"relevance_threshold", c.relevance_threshold},
        {"article_order", article_order_name(c.article_order)},
        {"top_k_articles", c.top_k_articles},
        {"scratchpad_prompt_ids", c.scratchpad_prompt_ids},
        {"basic_model_id", c.basic_model_id},
        {"samples_per_tuned_model", c.samples_per_tuned_model},
        {"base_temperature", c.base_temperature},
        {"tuned_temperature", c.tuned_temperature},
        {"query_model_id", c.query_model_id},
        {"relevance_model_id", c.relevance_model_id},
        {"summary_model_id", c.summary_model_id},
        {"ensemble_method", ensemble_method_name(c.ensemble_method)},
        {"retrieval_enabled", c.retrieval_enabled},
        {"fallback_probability", c.fallback_probability},
        {"schedule_n", c.schedule_n},
        {"seed", c.seed},
        {"workers", c.workers},
        {"provider_retries", c.provider_retries},
        {"max_output_tokens", c.max_output_tokens},
        {"whitelist", c.whitelist},
        {"cache_dir", c.cache_dir},
    };
    if (c.tuned_model_id) j["tuned_model_id"] = *c.tuned_model_id;
    else j["tuned_model_id"] = nullptr;
    return j;
}

inline PipelineConfig config_from_json(const nlohmann::json& j) {
    PipelineConfig c;
    try {
        if (j.contains("query_prompt_ids"))
            c.query_prompt_ids = j["query_prompt_ids"].get<std::vector<std::string>>();
        c.queries_per_prompt = j.value("queries_per_prompt", c.queries_per_prompt);
        c.query_max_words = j.value("query_max_words", c.query_max_words);
        c.per_query_limit = j.value("per_query_limit", c.per_query_limit);
        if (j.contains("relevance_mode"))
            c.relevance_mode = parse_relevance_mode(j["relevance_mode"].get<std::string>());
        c.relevance_threshold = j.value("relevance_threshold", c.relevance_threshold);
        if (j.contains("article_order"))
            c.article_order = parse_article_order(j["article_order"].get<std::string>());
        c.top_k_articles = j.value("top_k_articles", c.top_k_articles);
        if (j.contains("scratchpad_prompt_ids"))
            c.scratchpad_prompt_ids = j["scratchpad_prompt_ids"].get<std::vector<std::string>>();
        c.basic_model_id = j.value("basic_model_id", c.basic_model_id);
        if (j.contains("tuned_model_id")) {
            if (j["tuned_model_id"].is_null()) c.tuned_model_id.reset();
            else c.tuned_model_id = j["tuned_model_id"].get<std::string>();
        }
        c.samples_per_tuned_model = j.value("samples_per_tuned_model", c.samples_per_tuned_model);
        c.base_temperature = j.value("base_temperature", c.base_temperature);
        c.tuned_temperature = j.value("tuned_temperature", c.tuned_temperature);
        c.query_model_id = j.value("query_model_id", c.query_model_id);
        c.relevance_model_id = j.value("relevance_model_id", c.relevance_model_id);
        c.summary_model_id = j.value("summary_model_id", c.summary_model_id);
        if (j.contains("ensemble_method"))
            c.ensemble_method = parse_ensemble_method(j["ensemble_method"].get<std::string>());
        c.retrieval_enabled = j.value("retrieval_enabled", c.retrieval_enabled);
        c.fallback_probability = j.value("fallback_probability", c.fallback_probability);
        c.schedule_n = j.value("schedule_n", c.schedule_n);
        c.seed = j.value("seed", c.seed);
        c.workers = j.value("workers", c.workers);
        c.provider_retries = j.value("provider_retries", c.provider_retries);
        c.max_output_tokens = j.value("max_output_tokens", c.max_output_tokens);
        if (j.contains("whitelist"))
            c.whitelist = j["whitelist"].get<std::vector<std::string>>();
        c.cache_dir = j.value("cache_dir", c.cache_dir);
    } catch (const nlohmann::json::exception& e) {
        throw ConfigError(std::string("malformed config: ") + e.what());
    }
    c.validate();
    return c;
}

/// Replaces ${NAME} with the named environment variable. Secrets never live
/// in config files.
inline std::string interpolate_env(const std::string& text) {
    std::string out;
    size_t i = 0;
    while (i < text.size()) {
        if (text[i] == '$' && i + 1 < text.size() && text[i + 1] == '{') {
            size_t close = text.find('}', i + 2);
            if (close == std::string::npos) throw ConfigError("unterminated ${ in config");
            std::string name = text.substr(i + 2, close - i - 2);
            const char* value = std::getenv(name.c_str());
            if (!value) throw ConfigError("environment variable not set: " + name);
            out += value;
            i = close + 1;
        } else {
            out.push_back(text[i++]);
        }
    }
    return out;
}

inline PipelineConfig load_config_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open config file: " + path);
    std::string text((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(interpolate_env(text));
    } catch (const nlohmann::json::exception& e) {
        throw ConfigError("config is not valid JSON: " + std::string(e.what()));
    }
    return config_from_json(j);
}

/// Stable across machines: FNV over the canonical (key-sorted) JSON dump.
inline std::string config_hash(const PipelineConfig& c) {
    return hex64(fnv1a64(config_to_json(c).dump()));
}

/// Named ablation presets. `full` is the optimized system; `no_finetuned`
/// drops the tuned reasoning model; `no_retrieval_no_finetune` additionally
/// disables news retrieval.
inline PipelineConfig apply_preset(PipelineConfig c, const std::string& name) {
    if (name == "full") return c;
    if (name == "no_finetuned") {
        c.tuned_model_id.reset();
        return c;
    }
    if (name == "no_retrieval_no_finetune") {
        c.tuned_model_id.reset();
        c.retrieval_enabled = false;
        return c;
    }
    throw ConfigError("unknown preset: " + name);
}

}  // namespace foresight
