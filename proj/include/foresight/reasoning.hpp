#pragma once

#include <string>
#include <vector>

#include "foresight/concurrency.hpp"
#include "foresight/errors.hpp"
#include "foresight/extraction.hpp"
#include "foresight/prompts.hpp"
#include "foresight/providers.hpp"
#include "foresight/schedule.hpp"
#include "foresight/types.hpp"

namespace foresight {

inline constexpr const char* kNoArticlesSentence = "No relevant articles were retrieved.";

/// Renders a reasoning prompt for the question at the simulated date.
/// retrieved_info becomes the numbered concatenation of the summaries, or
/// the no-articles sentence when empty. "Today's date" receives the retrieval
/// date unless the template binds the question's begin date (baseline
/// evaluation behavior).
inline std::string assemble_prompt(const ForecastQuestion& q,
                                   const std::vector<std::string>& summaries,
                                   const PromptTemplate& tmpl, Date retrieval_date) {
    std::string retrieved_info;
    if (summaries.empty()) {
        retrieved_info = kNoArticlesSentence;
    } else {
        for (size_t i = 0; i < summaries.size(); ++i) {
            if (i) retrieved_info += "\n\n";
            retrieved_info += std::to_string(i + 1) + ". " + summaries[i];
        }
    }
    const std::string today = tmpl.today_binding == TodayBinding::question_begin
                                  ? q.date_begin.str()
                                  : retrieval_date.str();
    return render_template(tmpl.body, {
                                          {"question", q.title},
                                          {"background", q.background},
                                          {"resolution_criteria", q.resolution_criteria},
                                          {"date_begin", today},
                                          {"date_retrieval", retrieval_date.str()},
                                          {"date_end", q.date_close.str()},
                                          {"retrieved_info", retrieved_info},
                                      });
}

struct ForecastOptions {
    Probability fallback = Probability(0.5);
    int max_output = 2500;
    int retries = 2;
    int backoff_ms = 100;
};

/// assemble -> complete -> extract. Provider failures retry with backoff and
/// propagate once exhausted.
inline ForecastSample forecast_once(const ForecastQuestion& q,
                                    const std::vector<std::string>& summaries,
                                    const PromptTemplate& tmpl, const std::string& model_id,
                                    double temperature, RetrievalPoint point,
                                    CompletionProvider& provider,
                                    const ForecastOptions& opts = {}) {
    const std::string prompt = assemble_prompt(q, summaries, tmpl, point.date);
    const std::string response = with_retries(
        [&] { return provider.complete(model_id, prompt, temperature, opts.max_output); },
        opts.retries, opts.backoff_ms);
    ProbabilityExtraction extracted = extract_probability(response, opts.fallback);

    ForecastSample sample;
    sample.question_id = q.id;
    sample.retrieval_index = point.index;
    sample.retrieval_date = point.date;
    sample.model_id = model_id;
    sample.prompt_id = tmpl.id;
    sample.reasoning = response;
    sample.probability = extracted.probability;
    sample.refusal = extracted.refusal;
    sample.extraction_fallback = extracted.used_fallback;
    return sample;
}

}  // namespace foresight
