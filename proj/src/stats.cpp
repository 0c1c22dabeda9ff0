#include "cftplab/stats.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <stdexcept>

namespace cftplab {

SurvivalCurve survival_from_values(const std::vector<int>& values, int max_abscissa) {
  SurvivalCurve c;
  const std::int64_t n = static_cast<std::int64_t>(values.size());
  for (int a = 0; a <= max_abscissa; ++a) {
    SurvivalRow row;
    row.abscissa = a;
    row.trials = n;
    for (int v : values) row.exceedances += (v > a);
    if (n > 0) {
      row.survival = static_cast<double>(row.exceedances) / static_cast<double>(n);
      row.std_error = std::sqrt(row.survival * (1.0 - row.survival) / static_cast<double>(n));
    }
    c.rows.push_back(row);
  }
  return c;
}

TailFit fit_tail(const SurvivalCurve& curve, std::int64_t min_exceed) {
  TailFit fit;
  std::vector<double> xs, ys;
  for (const auto& r : curve.rows) {
    if (r.exceedances >= min_exceed && r.exceedances < r.trials) {
      xs.push_back(static_cast<double>(r.abscissa));
      ys.push_back(std::log(r.survival));
    }
  }
  fit.points = static_cast<int>(xs.size());
  if (fit.points < 3) {
    fit.note = "fewer than 3 usable points";
    return fit;
  }
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  const double n = static_cast<double>(xs.size());
  for (std::size_t i = 0; i < xs.size(); ++i) {
    sx += xs[i];
    sy += ys[i];
    sxx += xs[i] * xs[i];
    sxy += xs[i] * ys[i];
  }
  const double denom = n * sxx - sx * sx;
  if (denom <= 0) {
    fit.note = "degenerate abscissas";
    return fit;
  }
  const double slope = (n * sxy - sx * sy) / denom;
  fit.rate = -slope;
  fit.intercept = (sy - slope * sx) / n;
  double ss_res = 0, ss_tot = 0;
  const double mean_y = sy / n;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    const double pred = fit.intercept + slope * xs[i];
    ss_res += (ys[i] - pred) * (ys[i] - pred);
    ss_tot += (ys[i] - mean_y) * (ys[i] - mean_y);
  }
  fit.r2 = ss_tot > 0 ? 1.0 - ss_res / ss_tot : 1.0;
  fit.ok = true;
  return fit;
}

std::string format_double(double x) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof(buf), x);
  if (res.ec != std::errc{}) throw std::runtime_error("number formatting failed");
  return std::string(buf, res.ptr);
}

CsvWriter::CsvWriter(std::vector<std::string> columns) : width_(columns.size()) {
  row(columns);
}

void CsvWriter::row(const std::vector<std::string>& fields) {
  if (fields.size() != width_) throw std::invalid_argument("csv row width mismatch");
  for (std::size_t i = 0; i < fields.size(); ++i) {
    if (fields[i].find_first_of(",\n\"") != std::string::npos)
      throw std::invalid_argument("csv field needs quoting; use plain fields");
    if (i > 0) out_ += ',';
    out_ += fields[i];
  }
  out_ += '\n';
}

void write_text_file(const std::string& path, const std::string& content) {
  std::ofstream f(path, std::ios::binary);
  if (!f) throw std::runtime_error("cannot open for writing: " + path);
  f << content;
  if (!f) throw std::runtime_error("write failed: " + path);
}

}  // namespace cftplab
