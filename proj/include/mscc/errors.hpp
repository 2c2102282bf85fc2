#pragma once

#include <stdexcept>
#include <string>

namespace mscc {

enum class ErrorCode {
  domain,               // e.g. inverse of zero, binomial exchange preconditions
  field_too_small,      // code length exceeds GF(2^8)
  shape,                // mismatched payload lengths or matrix dimensions
  insufficient_shares,  // fewer than k chunks for an MDS decode
  duplicate_index,      // repeated code index among shares
  singular,             // selected generator rows are not invertible
  infeasible,           // M_U + rho * M_S < N
  contract,             // caller broke a documented precondition
  too_large,            // enumeration bound exceeded
  coverage,             // a user has fewer connected servers than needed
  decode_failure,       // a user could not collect enough chunks
  unsupported,          // e.g. worst-case demands with N < K
  parse,                // malformed JSON / config input
};

inline const char* to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::domain: return "domain";
    case ErrorCode::field_too_small: return "field-too-small";
    case ErrorCode::shape: return "shape";
    case ErrorCode::insufficient_shares: return "insufficient-shares";
    case ErrorCode::duplicate_index: return "duplicate-index";
    case ErrorCode::singular: return "singular";
    case ErrorCode::infeasible: return "infeasible";
    case ErrorCode::contract: return "contract";
    case ErrorCode::too_large: return "too-large";
    case ErrorCode::coverage: return "coverage";
    case ErrorCode::decode_failure: return "decode-failure";
    case ErrorCode::unsupported: return "unsupported";
    case ErrorCode::parse: return "parse";
  }
  return "unknown";
}

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(std::string(to_string(code)) + ": " + what), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

}  // namespace mscc
