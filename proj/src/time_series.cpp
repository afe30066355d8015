#include "opdyn/time_series.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace opdyn {

TimeSeries uniform_series(double delta, std::vector<double> values) {
  TimeSeries series;
  series.times.resize(values.size());
  for (std::size_t i = 0; i < values.size(); ++i)
    series.times[i] = delta * static_cast<double>(i);
  series.values = std::move(values);
  return series;
}

void validate(const TimeSeries& series) {
  if (series.times.size() != series.values.size())
    throw std::invalid_argument("TimeSeries: times/values length mismatch");
  if (series.times.empty()) throw std::invalid_argument("TimeSeries: empty");
  if (series.times.front() != 0.0)
    throw std::invalid_argument("TimeSeries: times must start at 0");
  const double delta = series.times.size() > 1 ? series.times[1] : 0.0;
  for (std::size_t i = 0; i < series.times.size(); ++i) {
    if (!std::isfinite(series.values[i]) || !std::isfinite(series.times[i]))
      throw std::invalid_argument("TimeSeries: non-finite entries");
    if (i > 0) {
      const double spacing = series.times[i] - series.times[i - 1];
      if (spacing <= 0)
        throw std::invalid_argument("TimeSeries: times must be strictly increasing");
      if (std::abs(spacing - delta) > 1e-12)
        throw std::invalid_argument("TimeSeries: non-uniform spacing");
    }
  }
}

std::string format_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

std::string to_csv(const TimeSeries& series) {
  std::string out = "time,value\n";
  for (std::size_t i = 0; i < series.size(); ++i) {
    out += format_double(series.times[i]);
    out += ',';
    out += format_double(series.values[i]);
    out += '\n';
  }
  return out;
}

TimeSeries series_from_csv_text(const std::string& text) {
  std::istringstream in(text);
  std::string line;
  if (!std::getline(in, line) || line != "time,value")
    throw std::invalid_argument("TimeSeries CSV: missing 'time,value' header");
  TimeSeries series;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    const auto comma = line.find(',');
    if (comma == std::string::npos)
      throw std::invalid_argument("TimeSeries CSV: malformed row: " + line);
    std::size_t used = 0;
    const double t = std::stod(line.substr(0, comma), &used);
    const double v = std::stod(line.substr(comma + 1), &used);
    series.times.push_back(t);
    series.values.push_back(v);
  }
  if (series.size() == 0)
    throw std::invalid_argument("TimeSeries CSV: no data rows");
  return series;
}

void write_text_atomic(const std::filesystem::path& path, const std::string& text) {
  const std::filesystem::path tmp = path.string() + ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw std::runtime_error("cannot open for writing: " + tmp.string());
    out << text;
    if (!out) throw std::runtime_error("write failed: " + tmp.string());
  }
  std::filesystem::rename(tmp, path);
}

void write_csv(const TimeSeries& series, const std::filesystem::path& path) {
  write_text_atomic(path, to_csv(series));
}

TimeSeries read_csv(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open: " + path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  return series_from_csv_text(buf.str());
}

}  // namespace opdyn
