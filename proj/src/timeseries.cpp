#include "msd/timeseries.hpp"

#include <cinttypes>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <vector>

namespace msd {

TimeSeries TimeSeries::segment(Eigen::Index start, Eigen::Index count) const {
  if (start < 0 || count < 1 || start + count > rows())
    throw std::invalid_argument("TimeSeries::segment: window out of range");
  TimeSeries out;
  out.t0 = time(start);
  out.dt = dt;
  out.values = values.middleRows(start, count);
  return out;
}

TimeSeries TimeSeries::decimate(Eigen::Index stride, Eigen::Index start) const {
  if (stride < 1 || start < 0 || start >= rows())
    throw std::invalid_argument("TimeSeries::decimate: bad stride or start");
  const Eigen::Index m = (rows() - start + stride - 1) / stride;
  TimeSeries out;
  out.t0 = time(start);
  out.dt = dt * static_cast<double>(stride);
  out.values.resize(m, dim());
  for (Eigen::Index k = 0; k < m; ++k) out.values.row(k) = values.row(start + k * stride);
  return out;
}

TimeSeries TimeSeries::channel(Eigen::Index col) const {
  if (col < 0 || col >= dim()) throw std::invalid_argument("TimeSeries::channel: column out of range");
  TimeSeries out;
  out.t0 = t0;
  out.dt = dt;
  out.values = values.col(col);
  return out;
}

std::string format_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

void write_csv(const TimeSeries& series, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot open for writing: " + path);
  out << "t";
  for (Eigen::Index j = 0; j < series.dim(); ++j) out << ",x" << (j + 1);
  out << "\n";
  for (Eigen::Index k = 0; k < series.rows(); ++k) {
    out << format_double(series.time(k));
    for (Eigen::Index j = 0; j < series.dim(); ++j) out << "," << format_double(series.values(k, j));
    out << "\n";
  }
  if (!out) throw std::runtime_error("write failed: " + path);
}

TimeSeries read_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open for reading: " + path);
  std::string line;
  if (!std::getline(in, line)) throw std::runtime_error("empty CSV: " + path);
  Eigen::Index ncols = 0;
  for (char ch : line)
    if (ch == ',') ++ncols;
  if (ncols < 1) throw std::runtime_error("CSV header must be t,x1,...: " + path);

  std::vector<double> t;
  std::vector<double> vals;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::stringstream ss(line);
    std::string cell;
    Eigen::Index j = 0;
    while (std::getline(ss, cell, ',')) {
      const double v = std::stod(cell);
      if (j == 0)
        t.push_back(v);
      else
        vals.push_back(v);
      ++j;
    }
    if (j != ncols + 1) throw std::runtime_error("ragged CSV row in " + path);
  }
  if (t.size() < 1) throw std::runtime_error("CSV has no data rows: " + path);

  TimeSeries out;
  out.t0 = t.front();
  out.dt = t.size() > 1 ? (t.back() - t.front()) / static_cast<double>(t.size() - 1) : 1.0;
  out.values.resize(static_cast<Eigen::Index>(t.size()), ncols);
  for (Eigen::Index k = 0; k < out.rows(); ++k)
    for (Eigen::Index j = 0; j < ncols; ++j) out.values(k, j) = vals[static_cast<size_t>(k) * ncols + j];
  return out;
}

}  // namespace msd
