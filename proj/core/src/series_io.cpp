#include "mrrope/series_io.hpp"

#include <iomanip>
#include <locale>
#include <sstream>

#include "json.hpp"

namespace mrrope {

void write_series_csv(std::ostream& out, const DiagnosticSeries& series) {
  series.validate();
  const auto saved_locale = out.imbue(std::locale::classic());
  const auto saved_precision = out.precision(9);
  out << "x,y,spread\n";
  for (std::size_t i = 0; i < series.xs.size(); ++i) {
    out << series.xs[i] << ',' << series.ys[i] << ',';
    if (series.spread) {
      out << (*series.spread)[i];
    }
    out << '\n';
  }
  out.precision(saved_precision);
  out.imbue(saved_locale);
}

std::string series_to_csv(const DiagnosticSeries& series) {
  std::ostringstream out;
  write_series_csv(out, series);
  return out.str();
}

void write_series_json(std::ostream& out, const DiagnosticSeries& series) {
  series.validate();
  nlohmann::ordered_json j;
  j["label"] = series.label;
  j["xs"] = series.xs;
  j["ys"] = series.ys;
  if (series.spread) {
    j["spread"] = *series.spread;
  }
  out << j.dump(2) << '\n';
}

std::string series_to_json(const DiagnosticSeries& series) {
  std::ostringstream out;
  write_series_json(out, series);
  return out.str();
}

}  // namespace mrrope
