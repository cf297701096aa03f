#ifndef RPE_ERROR_HPP
#define RPE_ERROR_HPP

#include <stdexcept>
#include <string>

namespace rpe {

enum class Errc {
  invalid_input,
  parse_error,
  window_too_large,
  not_orthonormal,
  dimension_mismatch,
  rank_deficient,
  bad_budget,
  series_too_short,
  all_columns_dropped,
  all_zero_spectrum,
  not_trained,
  invalid_config,
  no_positives,
  cannot_place,
};

const char* to_string(Errc code) noexcept;

/// Every failure surfaced by the library. `code()` identifies the contract
/// that was violated; `what()` carries the human-readable detail.
class Error : public std::runtime_error {
 public:
  Error(Errc code, const std::string& message)
      : std::runtime_error(std::string(to_string(code)) + ": " + message),
        code_(code) {}

  Errc code() const noexcept { return code_; }

 private:
  Errc code_;
};

}  // namespace rpe

#endif  // RPE_ERROR_HPP
