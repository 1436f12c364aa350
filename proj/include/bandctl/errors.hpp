#pragma once

#include <stdexcept>
#include <string>

namespace bandctl {

// Failure classes, split between bad inputs (CLI exit 2) and numerical
// breakdowns (CLI exit 3).
enum class errc {
  validation,
  not_in_gap,
  not_in_band,
  defective_matrix,
  derivative_near_zero,
  singular_wronskian,
  denominator_vanished,
  root_bracketing,
  no_root_in_bracket,
  integration_failure,
  asymmetric_input,
  zero_coupling,
};

inline const char* errc_name(errc c) {
  switch (c) {
    case errc::validation: return "validation";
    case errc::not_in_gap: return "not_in_gap";
    case errc::not_in_band: return "not_in_band";
    case errc::defective_matrix: return "defective_matrix";
    case errc::derivative_near_zero: return "derivative_near_zero";
    case errc::singular_wronskian: return "singular_wronskian";
    case errc::denominator_vanished: return "denominator_vanished";
    case errc::root_bracketing: return "root_bracketing";
    case errc::no_root_in_bracket: return "no_root_in_bracket";
    case errc::integration_failure: return "integration_failure";
    case errc::asymmetric_input: return "asymmetric_input";
    case errc::zero_coupling: return "zero_coupling";
  }
  return "unknown";
}

// True for error classes caused by invalid user input rather than a
// numerical method giving up.
inline bool is_validation(errc c) {
  switch (c) {
    case errc::validation:
    case errc::not_in_gap:
    case errc::not_in_band:
    case errc::asymmetric_input:
    case errc::zero_coupling:
      return true;
    default:
      return false;
  }
}

class Error : public std::runtime_error {
 public:
  Error(errc code, const std::string& msg)
      : std::runtime_error(msg), code_(code) {}
  errc code() const { return code_; }
  int exit_code() const { return is_validation(code_) ? 2 : 3; }

 private:
  errc code_;
};

[[noreturn]] inline void fail(errc code, const std::string& msg) {
  throw Error(code, msg);
}

inline void require(bool cond, errc code, const std::string& msg) {
  if (!cond) fail(code, msg);
}

}  // namespace bandctl
