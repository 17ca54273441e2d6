#pragma once

#include <filesystem>
#include <fstream>
#include <map>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "foresight/errors.hpp"
#include "foresight/util.hpp"

namespace foresight {

// {name} is a placeholder when name is a bare identifier; {{ ... }} blocks and
// any other brace content pass through literally, so response-format scaffolds
// like "{{ Insert answer here }}" survive rendering.
namespace detail {

inline bool is_identifier(std::string_view s) {
    if (s.empty()) return false;
    if (!(std::isalpha(static_cast<unsigned char>(s[0])) || s[0] == '_')) return false;
    for (char c : s)
        if (!(std::isalnum(static_cast<unsigned char>(c)) || c == '_')) return false;
    return true;
}

}  // namespace detail

inline std::vector<std::string> extract_placeholders(std::string_view body) {
    std::vector<std::string> names;
    std::set<std::string> seen;
    for (size_t i = 0; i < body.size(); ++i) {
        if (body[i] != '{') continue;
        if (i + 1 < body.size() && body[i + 1] == '{') {
            ++i;  // literal {{
            continue;
        }
        size_t close = body.find('}', i + 1);
        if (close == std::string_view::npos) continue;
        std::string name(body.substr(i + 1, close - i - 1));
        if (detail::is_identifier(name)) {
            if (seen.insert(name).second) names.push_back(name);
            i = close;
        }
    }
    return names;
}

/// Substitutes {name} placeholders from the binding map. A placeholder with no
/// binding raises TemplateError; unused bindings are fine.
inline std::string render_template(std::string_view body,
                                   const std::map<std::string, std::string>& bindings) {
    std::string out;
    out.reserve(body.size());
    for (size_t i = 0; i < body.size(); ++i) {
        if (body[i] != '{') {
            out.push_back(body[i]);
            continue;
        }
        if (i + 1 < body.size() && body[i + 1] == '{') {
            out += "{{";
            ++i;
            continue;
        }
        size_t close = body.find('}', i + 1);
        if (close != std::string_view::npos) {
            std::string name(body.substr(i + 1, close - i - 1));
            if (detail::is_identifier(name)) {
                auto it = bindings.find(name);
                if (it == bindings.end())
                    throw TemplateError("no binding for placeholder {" + name + "}");
                out += it->second;
                i = close;
                continue;
            }
        }
        out.push_back(body[i]);
    }
    return out;
}

enum class PromptKind { zero_shot, scratchpad, basic_info_only };

/// What the {date_begin} placeholder receives at assembly time. The system
/// binds the retrieval date (the simulated "today"); the baseline evaluation
/// templates bind the question's begin date.
enum class TodayBinding { retrieval_date, question_begin };

struct PromptTemplate {
    std::string id;
    std::string body;
    PromptKind kind = PromptKind::scratchpad;
    TodayBinding today_binding = TodayBinding::retrieval_date;
};

inline const std::set<std::string>& reasoning_placeholders() {
    static const std::set<std::string> allowed = {
        "question",   "background",     "resolution_criteria",
        "date_begin", "date_end",       "date_retrieval",
        "retrieved_info",
    };
    return allowed;
}

inline void validate_reasoning_template(const PromptTemplate& t) {
    for (const auto& name : extract_placeholders(t.body)) {
        if (!reasoning_placeholders().count(name))
            throw TemplateError("template " + t.id + " uses unknown placeholder {" + name + "}");
    }
}

namespace builtin_prompts {

inline constexpr const char* kZeroShotBase =
    "You are an expert superforecaster, familiar with the work of Tetlock and others. Make a "
    "prediction of the probability that the question will be resolved as true. You MUST give a "
    "probability estimate between 0 and 1 UNDER ALL CIRCUMSTANCES. If for some reason you can't "
    "answer, pick the base rate, but return a number between 0 and 1.\n"
    "\n"
    "Question:\n"
    "{question}\n"
    "\n"
    "Question Background: {background}\n"
    "\n"
    "Resolution Criteria: {resolution_criteria}\n"
    "\n"
    "Today's date: {date_begin}\n"
    "\n"
    "Question close date: {date_end}\n"
    "\n"
    "Output your answer (a number between 0 and 1) with an asterisk at the beginning and end of "
    "the decimal. Do not output anything else.\n"
    "\n"
    "Answer: {{ Insert answer here }}\n";

inline constexpr const char* kScratchpadBase =
    "Question:\n"
    "{question}\n"
    "\n"
    "Question Background:{background}\n"
    "\n"
    "Resolution Criteria:{resolution_criteria}\n"
    "\n"
    "Today's date: {date_begin}\n"
    "\n"
    "Question close date: {date_end}\n"
    "\n"
    "Instructions:\n"
    "1. Provide reasons why the answer might be no.\n"
    "{{ Insert your thoughts }}\n"
    "\n"
    "2. Provide reasons why the answer might be yes.\n"
    "{{ Insert your thoughts }}\n"
    "\n"
    "3. Aggregate your considerations.\n"
    "{{ Insert your aggregated considerations }}\n"
    "\n"
    "4. Output your answer (a number between 0 and 1) with an asterisk at the beginning and end "
    "of the decimal.\n"
    "{{ Insert your answer }}\n";

// Shared header of every retrieval-augmented reasoning prompt: the question's
// basic information followed by the retrieved summaries.
inline constexpr const char* kBasicInfoHeader =
    "Question: {question}\n"
    "\n"
    "Question Background:\n"
    "{background}\n"
    "\n"
    "Resolution Criteria:\n"
    "{resolution_criteria}\n"
    "\n"
    "Today's date: {date_begin}\n"
    "Question close date: {date_end}\n"
    "\n"
    "We have retrieved the following information for this question:\n"
    "{retrieved_info}\n";

inline const std::string kScratchpadOptimal = std::string(kBasicInfoHeader) +
    "\n"
    "Instructions:\n"
    "1. Given the above question, rephrase and expand it to help you do better answering. "
    "Maintain all information in the original question.\n"
    "{{ Insert rephrased and expanded question. }}\n"
    "\n"
    "2. Using your knowledge of the world and topic, as well as the information provided, "
    "provide a few reasons why the answer might be no. Rate the strength of each reason.\n"
    "{{ Insert your thoughts }}\n"
    "\n"
    "3. Using your knowledge of the world and topic, as well as the information provided, "
    "provide a few reasons why the answer might be yes. Rate the strength of each reason.\n"
    "{{ Insert your thoughts }}\n"
    "\n"
    "4. Aggregate your considerations. Think like a superforecaster (e.g. Nate Silver).\n"
    "{{ Insert your aggregated considerations }}\n"
    "\n"
    "5. Output an initial probability (prediction) given steps 1-4.\n"
    "{{ Insert initial probability }}\n"
    "\n"
    "6. Evaluate whether your calculated probability is excessively confident or not confident "
    "enough. Also, consider anything else that might affect the forecast that you did not "
    "before consider (e.g. base rate of the event).\n"
    "{{ Insert your thoughts }}\n"
    "\n"
    "7. Output your final prediction (a number between 0 and 1) with an asterisk at the "
    "beginning and end of the decimal.\n"
    "{{ Insert your answer }}\n";

inline const std::string kScratchpadStrengthRating = std::string(kBasicInfoHeader) +
    "\n"
    "Instructions:\n"
    "1. Rephrase and expand the question, and compile a list of the key facts from the "
    "retrieved information and your own knowledge.\n"
    "{{ Insert your rephrased question and key facts }}\n"
    "\n"
    "2. Provide reasons why the answer might be no.\n"
    "{{ Insert your thoughts }}\n"
    "\n"
    "3. Provide reasons why the answer might be yes.\n"
    "{{ Insert your thoughts }}\n"
    "\n"
    "4. Rate the strength of each reason given in steps 2 and 3.\n"
    "{{ Insert your ratings }}\n"
    "\n"
    "5. Aggregate your considerations.\n"
    "{{ Insert your aggregated considerations }}\n"
    "\n"
    "6. Output your answer (a number between 0 and 1) with an asterisk at the beginning and "
    "end of the decimal.\n"
    "{{ Insert your answer }}\n";

inline const std::string kScratchpadDecisionTree = std::string(kBasicInfoHeader) +
    "\n"
    "Instructions:\n"
    "1. Rephrase and expand the question to help you answer it.\n"
    "{{ Insert rephrased and expanded question }}\n"
    "\n"
    "2. Outline a decision tree of the main paths by which the question could resolve yes "
    "or no.\n"
    "{{ Insert decision tree outline }}\n"
    "\n"
    "3. Analyze the probability of each branch using the retrieved information and your own "
    "knowledge.\n"
    "{{ Insert branch probability analysis }}\n"
    "\n"
    "4. Discuss wildcards that could upend your analysis.\n"
    "{{ Insert discussion on wildcards }}\n"
    "\n"
    "5. Output an initial probability (prediction) given steps 1-4.\n"
    "{{ Insert initial probability }}\n"
    "\n"
    "6. Evaluate whether your calculated probability is excessively confident or not "
    "confident enough.\n"
    "{{ Insert your thoughts }}\n"
    "\n"
    "7. Output your final prediction (a number between 0 and 1) with an asterisk at the "
    "beginning and end of the decimal.\n"
    "{{ Insert your answer }}\n";

// The fine-tuned model takes only this structure, with no instructions.
inline constexpr const char* kBasicInfo =
    "Question:\n"
    "{question}\n"
    "\n"
    "Background:\n"
    "{background}\n"
    "\n"
    "Resolution criteria:\n"
    "{resolution_criteria}\n"
    "\n"
    "Today's date: {date_retrieval}\n"
    "Question close date: {date_end}\n"
    "\n"
    "We have retrieved the following information:\n"
    "{retrieved_info}\n";

inline constexpr const char* kSearchQueryExpansion =
    "I will provide you with a forecasting question and the background information for the "
    "question.\n"
    "\n"
    "Question: {question}\n"
    "\n"
    "Background: {background}\n"
    "\n"
    "Task:\n"
    "- Generate brief search queries (up to {max_words} words each) to gather information on "
    "Google that could influence the forecast.\n"
    "\n"
    "You must generate this exact amount of queries: {num_keywords}\n"
    "\n"
    "Your response should take the following structure:\n"
    "Thoughts:\n"
    "{{ Insert your thinking here. }}\n"
    "\n"
    "Search Queries:\n"
    "{{ Insert the queries here. Use semicolons to separate the queries. }}\n";

inline constexpr const char* kSearchQuerySubquestions =
    "I will provide you with a forecasting question and the background information for the "
    "question. I will then ask you to generate short search queries (up to {max_words} words "
    "each) that I'll use to find articles on Google News to help answer the question.\n"
    "\n"
    "Question: {question}\n"
    "\n"
    "Background: {background}\n"
    "\n"
    "You must generate this exact amount of queries: {num_keywords}\n"
    "\n"
    "Start off by writing down sub-questions. Then use your sub-questions to help steer the "
    "search queries you produce.\n"
    "\n"
    "Your response should take the following structure:\n"
    "Thoughts:\n"
    "{{ Insert your thinking here. }}\n"
    "\n"
    "Search Queries:\n"
    "{{ Insert the queries here. Use semicolons to separate the queries. }}\n";

inline constexpr const char* kRelevanceRating =
    "Please consider the following forecasting question and its background information. After "
    "that, I will give you a news article and ask you to rate its relevance with respect to the "
    "forecasting question.\n"
    "\n"
    "Question:\n"
    "{question}\n"
    "\n"
    "Question Background:{background}\n"
    "\n"
    "Resolution Criteria:{resolution_criteria}\n"
    "\n"
    "Article:\n"
    "{article}\n"
    "\n"
    "Please rate the relevance of the article to the question, at the scale of 1-6\n"
    "1 -- irrelevant\n"
    "2 -- slightly relevant\n"
    "3 -- somewhat relevant\n"
    "4 -- relevant\n"
    "5 -- highly relevant\n"
    "6 -- most relevant\n"
    "\n"
    "Guidelines:\n"
    "- You don't need to access any external sources. Just consider the information provided.\n"
    "- Focus on the content of the article, not the title.\n"
    "- If the text content is an error message about JavaScript, paywall, cookies or other "
    "technical issues, output a score of 1.\n"
    "\n"
    "Your response should look like the following:\n"
    "Thought: {{ Insert your thinking }}\n"
    "Rating: {{ Insert answer here }}\n";

inline constexpr const char* kSummarization =
    "I want to make the following article shorter (condense it to no more than 100 words).\n"
    "\n"
    "Article:\n"
    "{article}\n"
    "\n"
    "When doing this task for me, please do not remove any details that would be helpful for "
    "making considerations about the following forecasting question.\n"
    "\n"
    "Forecasting Question: {question}\n"
    "\n"
    "Question Background: {background}\n";

inline constexpr const char* kCategorization =
    "Question: {question}\n"
    "\n"
    "Background: {background}\n"
    "\n"
    "Options:\n"
    "- Science & Tech\n"
    "- Healthcare & Biology\n"
    "- Economics & Business\n"
    "- Environment & Energy\n"
    "- Politics & Governance\n"
    "- Education & Research\n"
    "- Arts & Recreation\n"
    "- Security & Defense\n"
    "- Social Sciences\n"
    "- Sports\n"
    "- Other\n"
    "\n"
    "Instruction: Assign a category for the given question.\n"
    "\n"
    "Rules:\n"
    "1. Make sure you only return one of the options from the option list.\n"
    "2. Only output the category, and do not output any other words in your response.\n"
    "3. You have to pick a string from the above categories.\n"
    "\n"
    "Answer: {{ Insert answer here }}\n";

inline constexpr const char* kScreening =
    "I'm trying to assess the quality of an old forecasting dataset.\n"
    "\n"
    "Here is a forecasting question from the dataset: {question}.\n"
    "\n"
    "Please flag questions that don't sound like binary forecasting questions by outputting "
    "\"flag\". If it sounds like a reasonable question, output \"ok\".\n"
    "\n"
    "Examples of strings that should be flagged:\n"
    "- Will I finish my homework tonight?\n"
    "- Metaculus party 2023\n"
    "- Will Hell freeze over?\n"
    "- Heads or tails\n"
    "- Will this video reach 100k views by the EOD?\n"
    "\n"
    "Examples of strings that should not be flagged:\n"
    "- Will Megan Markle and Prince Harry have a baby by the end of the year?\n"
    "- Will the Brain Preservation Foundation's Large Mammal preservation prize be won by Feb "
    "9th, 2017?\n"
    "- Will there be more novel new drugs approved by the FDA in 2016 than in 2015?\n"
    "\n"
    "If a question is already resolved, that doesn't mean it should be flagged. When in doubt, "
    "mark it as \"ok\".\n"
    "\n"
    "Your response should take the following structure:\n"
    "\n"
    "Insert thinking:\n"
    "{{ insert your concise thoughts here }}\n"
    "\n"
    "Classification:\n"
    "{{ insert \"flag\" or \"ok\" }}\n";

inline constexpr const char* kUscAggregate =
    "Several forecasters have shared their reasoning and final predictions for the same "
    "forecasting question.\n"
    "\n"
    "Forecasts:\n"
    "{member_forecasts}\n"
    "\n"
    "Instructions:\n"
    "1. Carefully weigh the reasonings above, noting where they agree and where they "
    "conflict.\n"
    "{{ Insert your thoughts }}\n"
    "\n"
    "2. Form an aggregated forecast from the individual predictions.\n"
    "{{ Insert your aggregated considerations }}\n"
    "\n"
    "3. Output your final prediction (a number between 0 and 1) with an asterisk at the "
    "beginning and end of the decimal.\n"
    "{{ Insert your answer }}\n";

}  // namespace builtin_prompts

/// Registry of reasoning templates and raw prompt bodies. Ships the built-in
/// library; user templates load from UTF-8 files.
class PromptLibrary {
public:
    static PromptLibrary builtin() {
        namespace bp = builtin_prompts;
        PromptLibrary lib;
        lib.add_reasoning({"zero_shot_base", bp::kZeroShotBase, PromptKind::zero_shot,
                           TodayBinding::question_begin});
        lib.add_reasoning({"scratchpad_base", bp::kScratchpadBase, PromptKind::scratchpad,
                           TodayBinding::question_begin});
        lib.add_reasoning({"scratchpad_optimal", bp::kScratchpadOptimal, PromptKind::scratchpad,
                           TodayBinding::retrieval_date});
        lib.add_reasoning({"scratchpad_strength_rating", bp::kScratchpadStrengthRating,
                           PromptKind::scratchpad, TodayBinding::retrieval_date});
        lib.add_reasoning({"scratchpad_decision_tree", bp::kScratchpadDecisionTree,
                           PromptKind::scratchpad, TodayBinding::retrieval_date});
        lib.add_reasoning({"basic_info", bp::kBasicInfo, PromptKind::basic_info_only,
                           TodayBinding::retrieval_date});
        lib.raw_["search_query_expansion"] = bp::kSearchQueryExpansion;
        lib.raw_["search_query_subquestions"] = bp::kSearchQuerySubquestions;
        lib.raw_["relevance_rating"] = bp::kRelevanceRating;
        lib.raw_["summarization"] = bp::kSummarization;
        lib.raw_["categorization"] = bp::kCategorization;
        lib.raw_["screening"] = bp::kScreening;
        lib.raw_["usc_aggregate"] = bp::kUscAggregate;
        return lib;
    }

    void add_reasoning(PromptTemplate t) {
        validate_reasoning_template(t);
        reasoning_[t.id] = std::move(t);
    }

    /// Loads a user template from a text file; the id is the filename stem.
    void load_reasoning_file(const std::filesystem::path& path,
                             PromptKind kind = PromptKind::scratchpad,
                             TodayBinding binding = TodayBinding::retrieval_date) {
        std::ifstream in(path);
        if (!in) throw IoError("cannot open template file: " + path.string());
        std::ostringstream body;
        body << in.rdbuf();
        add_reasoning({path.stem().string(), body.str(), kind, binding});
    }

    const PromptTemplate& reasoning(const std::string& id) const {
        auto it = reasoning_.find(id);
        if (it == reasoning_.end()) throw ConfigError("unknown reasoning template: " + id);
        return it->second;
    }

    bool has_reasoning(const std::string& id) const { return reasoning_.count(id) > 0; }

    const std::string& raw(const std::string& id) const {
        auto it = raw_.find(id);
        if (it == raw_.end()) throw ConfigError("unknown prompt: " + id);
        return it->second;
    }

private:
    std::map<std::string, PromptTemplate> reasoning_;
    std::map<std::string, std::string> raw_;
};

}  // namespace foresight
