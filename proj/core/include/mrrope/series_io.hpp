#pragma once

#include <ostream>
#include <string>

#include "mrrope/diagnostics.hpp"

namespace mrrope {

/// CSV with header `x,y,spread`, one row per sample, '.' decimal separator,
/// '\n' line endings and 9 significant digits. The spread cell is empty when
/// the series has none.
void write_series_csv(std::ostream& out, const DiagnosticSeries& series);
std::string series_to_csv(const DiagnosticSeries& series);

/// JSON object {"label", "xs", "ys"} plus "spread" when present.
void write_series_json(std::ostream& out, const DiagnosticSeries& series);
std::string series_to_json(const DiagnosticSeries& series);

}  // namespace mrrope
