#include "rpe/error.hpp"

namespace rpe {

const char* to_string(Errc code) noexcept {
  switch (code) {
    case Errc::invalid_input: return "InvalidInput";
    case Errc::parse_error: return "ParseError";
    case Errc::window_too_large: return "WindowTooLarge";
    case Errc::not_orthonormal: return "NotOrthonormal";
    case Errc::dimension_mismatch: return "DimensionMismatch";
    case Errc::rank_deficient: return "RankDeficient";
    case Errc::bad_budget: return "BadBudget";
    case Errc::series_too_short: return "SeriesTooShort";
    case Errc::all_columns_dropped: return "AllColumnsDropped";
    case Errc::all_zero_spectrum: return "AllZeroSpectrum";
    case Errc::not_trained: return "NotTrained";
    case Errc::invalid_config: return "InvalidConfig";
    case Errc::no_positives: return "NoPositives";
    case Errc::cannot_place: return "CannotPlace";
  }
  return "Unknown";
}

}  // namespace rpe
