#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace cftplab {

// Censored observations: value = smallest index at which the event resolved,
// or `censored_at` (exclusive cap) when it never did within the scan.
struct SurvivalRow {
  int abscissa = 0;
  std::int64_t trials = 0;
  std::int64_t exceedances = 0;  // observations strictly above the abscissa
  double survival = 0.0;
  double std_error = 0.0;
};

struct SurvivalCurve {
  std::vector<SurvivalRow> rows;
};

// Values above `max_abscissa` (censored scans included) count as exceedances
// at every abscissa 0..max_abscissa.
SurvivalCurve survival_from_values(const std::vector<int>& values, int max_abscissa);

struct TailFit {
  bool ok = false;
  double rate = 0.0;       // survival ~ exp(-rate * abscissa) on the fit range
  double intercept = 0.0;  // log-survival at abscissa 0 extrapolated
  double r2 = 0.0;         // goodness of the log-linear fit
  int points = 0;
  std::string note;
};

// Least squares on log survival over the rows with at least `min_exceed`
// exceedances (noise floor); needs three such points to call it a tail.
TailFit fit_tail(const SurvivalCurve& curve, std::int64_t min_exceed = 10);

// Shortest decimal digits that round-trip; deterministic across platforms.
std::string format_double(double x);

// Minimal CSV: comma separators, LF line ends, no quoting (writers must not
// pass fields containing commas).
class CsvWriter {
 public:
  explicit CsvWriter(std::vector<std::string> columns);
  void row(const std::vector<std::string>& fields);
  const std::string& str() const { return out_; }

 private:
  std::size_t width_;
  std::string out_;
};

void write_text_file(const std::string& path, const std::string& content);

}  // namespace cftplab
