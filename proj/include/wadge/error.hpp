#pragma once

#include <stdexcept>
#include <string>

namespace wadge {

enum class errc {
  invalid_code,
  not_a_limit,
  level_exceeds_delta,
  not_a_prefix,
  oracle_too_short,
  invalid_provider,
  path_not_in_tree,
  level_too_high,
  not_acceptable,
  not_countable,
  not_in_forest,
  not_a_subforest,
  not_orthogonal,
  level_not_below,
  missing_certificate,
  unknown_oracle,
  forest_mismatch,
  rank_violation,
  trivial_tree,
  empty_play,
  limit_level_unsupported,
  parse_error,
  bad_input,
};

inline const char* errc_name(errc c) {
  switch (c) {
    case errc::invalid_code: return "InvalidCode";
    case errc::not_a_limit: return "NotALimit";
    case errc::level_exceeds_delta: return "LevelExceedsDelta";
    case errc::not_a_prefix: return "NotAPrefix";
    case errc::oracle_too_short: return "OracleTooShort";
    case errc::invalid_provider: return "InvalidProvider";
    case errc::path_not_in_tree: return "PathNotInTree";
    case errc::level_too_high: return "LevelTooHigh";
    case errc::not_acceptable: return "NotAcceptable";
    case errc::not_countable: return "NotCountable";
    case errc::not_in_forest: return "NotInForest";
    case errc::not_a_subforest: return "NotASubforest";
    case errc::not_orthogonal: return "NotOrthogonal";
    case errc::level_not_below: return "LevelNotBelow";
    case errc::missing_certificate: return "MissingCertificate";
    case errc::unknown_oracle: return "UnknownOracle";
    case errc::forest_mismatch: return "ForestMismatch";
    case errc::rank_violation: return "RankViolation";
    case errc::trivial_tree: return "TrivialTree";
    case errc::empty_play: return "EmptyPlay";
    case errc::limit_level_unsupported: return "LimitLevelUnsupported";
    case errc::parse_error: return "ParseError";
    case errc::bad_input: return "BadInput";
  }
  return "?";
}

class Error : public std::runtime_error {
 public:
  Error(errc c, const std::string& what)
      : std::runtime_error(std::string(errc_name(c)) + ": " + what), code_(c) {}
  errc code() const { return code_; }

 private:
  errc code_;
};

[[noreturn]] inline void raise(errc c, const std::string& what) { throw Error(c, what); }

}  // namespace wadge
