#pragma once

#include <stdexcept>
#include <string>

namespace foresight {

// Exit-code categories surfaced by the CLI.
enum class ErrorCategory : int {
    config = 2,
    io = 3,
    provider = 4,
    validation = 5,
};

class Error : public std::runtime_error {
public:
    Error(ErrorCategory category, const std::string& what)
        : std::runtime_error(what), category_(category) {}
    ErrorCategory category() const { return category_; }
    int exit_code() const { return static_cast<int>(category_); }

private:
    ErrorCategory category_;
};

struct ConfigError : Error {
    explicit ConfigError(const std::string& what) : Error(ErrorCategory::config, what) {}
};

struct IoError : Error {
    explicit IoError(const std::string& what) : Error(ErrorCategory::io, what) {}
};

struct ProviderError : Error {
    explicit ProviderError(const std::string& what) : Error(ErrorCategory::provider, what) {}
};

struct AllProvidersFailed : ProviderError {
    explicit AllProvidersFailed(const std::string& what) : ProviderError(what) {}
};

struct ValidationError : Error {
    explicit ValidationError(const std::string& what) : Error(ErrorCategory::validation, what) {}
};

struct ParseError : ValidationError {
    explicit ParseError(const std::string& what) : ValidationError(what) {}
};

struct TemplateError : ValidationError {
    explicit TemplateError(const std::string& what) : ValidationError(what) {}
};

struct EmptyInput : ValidationError {
    explicit EmptyInput(const std::string& what = "empty input") : ValidationError(what) {}
};

struct EmptyDataset : ValidationError {
    explicit EmptyDataset(const std::string& what = "empty dataset") : ValidationError(what) {}
};

struct InvalidWindow : ValidationError {
    explicit InvalidWindow(const std::string& what) : ValidationError(what) {}
};

struct InvalidN : ValidationError {
    explicit InvalidN(const std::string& what) : ValidationError(what) {}
};

struct CrowdUnavailable : ValidationError {
    explicit CrowdUnavailable(const std::string& what) : ValidationError(what) {}
};

struct UnresolvedQuestion : ValidationError {
    explicit UnresolvedQuestion(const std::string& what) : ValidationError(what) {}
};

struct MissingAggregator : ValidationError {
    explicit MissingAggregator(const std::string& what) : ValidationError(what) {}
};

}  // namespace foresight
