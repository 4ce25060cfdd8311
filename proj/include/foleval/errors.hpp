#ifndef FOLEVAL_ERRORS_HPP
#define FOLEVAL_ERRORS_HPP

#include <stdexcept>
#include <string>

namespace foleval {

enum class Errc {
  // fol
  lex_error,
  syntax_error,
  arity_error,
  empty_atom,
  // transform
  translator_error,
  invalid_logic,
  missing_raw,
  // providers
  auth_error,
  rate_limited,
  timeout,
  malformed_response,
  transcript_format,
  embedding_error,
  // dataset
  schema_error,
  duplicate_key,
  unknown_category,
  // judges
  unknown_language,
  judge_parse_error,
  // metrics
  insufficient_trials,
  unknown_judge,
  unknown_request,
  empty_run,
  empty_tokenization,
  // mitigations
  wrong_kind,
  mismatched_runs,
  // analysis
  perplexity_out_of_range,
  degenerate_input,
  too_few_clusters,
  // io / config
  io_error,
  config_error,
};

inline const char* errc_name(Errc c) {
  switch (c) {
    case Errc::lex_error: return "LexError";
    case Errc::syntax_error: return "SyntaxError";
    case Errc::arity_error: return "ArityError";
    case Errc::empty_atom: return "EmptyAtom";
    case Errc::translator_error: return "TranslatorError";
    case Errc::invalid_logic: return "InvalidLogic";
    case Errc::missing_raw: return "MissingRaw";
    case Errc::auth_error: return "AuthError";
    case Errc::rate_limited: return "RateLimited";
    case Errc::timeout: return "Timeout";
    case Errc::malformed_response: return "MalformedResponse";
    case Errc::transcript_format: return "TranscriptFormatError";
    case Errc::embedding_error: return "EmbeddingError";
    case Errc::schema_error: return "SchemaError";
    case Errc::duplicate_key: return "DuplicateKey";
    case Errc::unknown_category: return "UnknownCategory";
    case Errc::unknown_language: return "UnknownLanguage";
    case Errc::judge_parse_error: return "JudgeParseError";
    case Errc::insufficient_trials: return "InsufficientTrials";
    case Errc::unknown_judge: return "UnknownJudge";
    case Errc::unknown_request: return "UnknownRequest";
    case Errc::empty_run: return "EmptyRun";
    case Errc::empty_tokenization: return "EmptyTokenization";
    case Errc::wrong_kind: return "WrongKind";
    case Errc::mismatched_runs: return "MismatchedRuns";
    case Errc::perplexity_out_of_range: return "PerplexityOutOfRange";
    case Errc::degenerate_input: return "DegenerateInput";
    case Errc::too_few_clusters: return "TooFewClusters";
    case Errc::io_error: return "IoError";
    case Errc::config_error: return "ConfigError";
  }
  return "UnknownError";
}

class Error : public std::runtime_error {
 public:
  Error(Errc code, const std::string& message)
      : std::runtime_error(std::string(errc_name(code)) + ": " + message), code_(code) {}

  Errc code() const { return code_; }

 private:
  Errc code_;
};

}  // namespace foleval

#endif  // FOLEVAL_ERRORS_HPP
