#ifndef RPE_CSV_HPP
#define RPE_CSV_HPP

#include <iosfwd>
#include <string>

#include "rpe/trajectory.hpp"

namespace rpe {

struct CsvReadOptions {
  // Replace missing values (empty or NaN fields) by the median of the
  // present ones instead of rejecting the file.
  bool impute_median = false;
};

/// Reads `timestamp,value[,label]` rows. A leading header row is skipped when
/// its value field is not numeric. Labels accept 0/1/true/false; the label
/// column must be present on every row or on none.
TimeSeries read_series_csv(std::istream& in, const CsvReadOptions& options = {});
TimeSeries read_series_csv_file(const std::string& path,
                                const CsvReadOptions& options = {});

/// Writes the same layout. Missing timestamps are emitted as the row ordinal.
void write_series_csv(std::ostream& out, const TimeSeries& series);

}  // namespace rpe

#endif  // RPE_CSV_HPP
