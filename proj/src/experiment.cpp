#include "covsim/experiment.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <mutex>
#include <stdexcept>
#include <thread>
#include <vector>

namespace covsim::experiment {

int default_jobs() {
  if (const char* env = std::getenv("COVSIM_JOBS")) {
    const int v = std::atoi(env);
    if (v > 0) return v;
  }
  const unsigned hw = std::thread::hardware_concurrency();
  return hw > 0 ? static_cast<int>(hw) : 1;
}

int resolve_jobs(int jobs) { return jobs > 0 ? jobs : default_jobs(); }

void parallel_for(std::int64_t n, int jobs,
                  const std::function<void(std::int64_t)>& fn) {
  jobs = resolve_jobs(jobs);
  if (n <= 0) return;
  if (jobs <= 1 || n == 1) {
    for (std::int64_t i = 0; i < n; ++i) fn(i);
    return;
  }
  std::atomic<std::int64_t> next{0};
  std::exception_ptr error;
  std::mutex error_mutex;
  auto worker = [&] {
    for (;;) {
      const std::int64_t i = next.fetch_add(1);
      if (i >= n) return;
      try {
        fn(i);
      } catch (...) {
        std::lock_guard<std::mutex> lock(error_mutex);
        if (!error) error = std::current_exception();
      }
    }
  };
  std::vector<std::thread> pool;
  const int n_threads = static_cast<int>(std::min<std::int64_t>(jobs, n));
  pool.reserve(static_cast<std::size_t>(n_threads));
  for (int t = 0; t < n_threads; ++t) pool.emplace_back(worker);
  for (auto& th : pool) th.join();
  if (error) std::rethrow_exception(error);
}

double Accumulator::variance() const {
  if (n < 2) return 0.0;
  const double m = mean();
  const double v = (sum_sq - static_cast<double>(n) * m * m) /
                   static_cast<double>(n - 1);
  return v > 0.0 ? v : 0.0;
}

double Accumulator::se() const {
  return n > 0 ? std::sqrt(variance() / static_cast<double>(n)) : 0.0;
}

ResultTable::ResultTable(std::vector<std::string> header)
    : header_(std::move(header)) {}

std::string ResultTable::fmt(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.10g", v);
  return buf;
}

std::string ResultTable::fmt(int v) { return std::to_string(v); }

void ResultTable::add_row(std::vector<std::string> cells) {
  if (cells.size() != header_.size()) {
    throw std::invalid_argument("ResultTable: row width does not match header");
  }
  rows_.push_back(std::move(cells));
}

std::string ResultTable::to_csv() const {
  std::string out;
  auto append_line = [&out](const std::vector<std::string>& cells) {
    for (std::size_t i = 0; i < cells.size(); ++i) {
      if (i > 0) out.push_back(',');
      out += cells[i];
    }
    out.push_back('\n');
  };
  append_line(header_);
  for (const auto& row : rows_) append_line(row);
  return out;
}

void ResultTable::write_csv(const std::string& path) const {
  std::ofstream f(path, std::ios::binary);
  if (!f) throw std::runtime_error("ResultTable: cannot open " + path);
  const std::string csv = to_csv();
  f.write(csv.data(), static_cast<std::streamsize>(csv.size()));
  if (!f) throw std::runtime_error("ResultTable: write failed for " + path);
}

}  // namespace covsim::experiment
