#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

namespace covsim::experiment {

// Worker count: explicit argument > COVSIM_JOBS env var > hardware threads.
int default_jobs();
int resolve_jobs(int jobs);

// Runs fn(i) for i in [0, n) on up to `jobs` threads. Callers must write
// results into per-index slots; reductions happen afterwards in index order
// so that output never depends on scheduling.
void parallel_for(std::int64_t n, int jobs,
                  const std::function<void(std::int64_t)>& fn);

struct Accumulator {
  double sum = 0.0;
  double sum_sq = 0.0;
  std::int64_t n = 0;

  void add(double x) {
    sum += x;
    sum_sq += x * x;
    ++n;
  }
  double mean() const { return n > 0 ? sum / static_cast<double>(n) : 0.0; }
  double variance() const;
  double se() const;
};

// Ordered record table rendered as CSV: comma separated, '.' decimal point,
// LF line endings, one mandatory header row. Values are formatted once, at
// insertion, so identical runs produce byte-identical files.
class ResultTable {
 public:
  explicit ResultTable(std::vector<std::string> header);

  static std::string fmt(double v);
  static std::string fmt(int v);

  void add_row(std::vector<std::string> cells);
  const std::vector<std::string>& header() const { return header_; }
  const std::vector<std::vector<std::string>>& rows() const { return rows_; }

  std::string to_csv() const;
  void write_csv(const std::string& path) const;

 private:
  std::vector<std::string> header_;
  std::vector<std::vector<std::string>> rows_;
};

}  // namespace covsim::experiment
