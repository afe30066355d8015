#pragma once

#include <filesystem>
#include <string>
#include <vector>

namespace opdyn {

// Uniformly sampled real observable, times starting at 0.
struct TimeSeries {
  std::vector<double> times;
  std::vector<double> values;

  std::size_t size() const { return values.size(); }
  double delta() const { return times.size() > 1 ? times[1] - times[0] : 0.0; }
};

// Builds times[i] = i * delta for the given values.
TimeSeries uniform_series(double delta, std::vector<double> values);

// Throws std::invalid_argument unless strictly increasing, uniformly spaced
// to 1e-12, starting at 0, with finite values.
void validate(const TimeSeries& series);

// CSV with header "time,value", 17 significant digits per field.
std::string to_csv(const TimeSeries& series);
TimeSeries series_from_csv_text(const std::string& text);

void write_csv(const TimeSeries& series, const std::filesystem::path& path);
TimeSeries read_csv(const std::filesystem::path& path);

// Writes via a temporary file in the same directory, then renames, so a
// failed run never leaves a partially written output.
void write_text_atomic(const std::filesystem::path& path, const std::string& text);

// Formats a double with enough digits to round-trip bit-exactly.
std::string format_double(double v);

// Evolution output: the recorded series plus run metadata.
struct EvolveRecord {
  TimeSeries series;
  double truncation_weight = 0.0;  // cumulative over all steps
  double wall_seconds = 0.0;
};

}  // namespace opdyn
