#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace graspmix {

enum class Errc {
  invalid_argument,
  degenerate_orientation,
  empty_input,
  degenerate_contact,
  missing_target,
  invalid_trajectory,
  invalid_spec,
  insufficient_corpus,
  strategy_undefined,
  domain,
  rank_deficient,
  format,
  io,
};

inline std::string_view to_string(Errc c) {
  switch (c) {
    case Errc::invalid_argument: return "invalid-argument";
    case Errc::degenerate_orientation: return "degenerate-orientation";
    case Errc::empty_input: return "empty-input";
    case Errc::degenerate_contact: return "degenerate-contact";
    case Errc::missing_target: return "missing-target";
    case Errc::invalid_trajectory: return "invalid-trajectory";
    case Errc::invalid_spec: return "invalid-spec";
    case Errc::insufficient_corpus: return "insufficient-corpus";
    case Errc::strategy_undefined: return "strategy-undefined";
    case Errc::domain: return "domain";
    case Errc::rank_deficient: return "rank-deficient";
    case Errc::format: return "format";
    case Errc::io: return "io";
  }
  return "unknown";
}

/// Every failure raised by the library carries one of the codes above so the
/// command-line layer can map it onto an exit status.
class Error : public std::runtime_error {
 public:
  Error(Errc code, const std::string& what)
      : std::runtime_error(std::string(to_string(code)) + ": " + what), code_(code) {}

  Errc code() const noexcept { return code_; }

 private:
  Errc code_;
};

[[noreturn]] inline void fail(Errc code, const std::string& what) { throw Error(code, what); }

inline void require(bool cond, Errc code, const std::string& what) {
  if (!cond) fail(code, what);
}

}  // namespace graspmix
