#include "specfloor/designs.hpp"

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <istream>
#include <limits>
#include <map>
#include <ostream>
#include <random>
#include <sstream>

#include "specfloor/errors.hpp"

namespace specfloor {

namespace {

double max_distance(const Point &a, const Point &b) {
  double value = 0.0;
  for (std::size_t j = 0; j < a.size(); ++j) {
    value = std::max(value, std::abs(a[j] - b[j]));
  }
  return value;
}

std::size_t cube_side(std::size_t n, int d) {
  std::size_t side = 1;
  auto capacity = [&](std::size_t s) {
    double cap = 1.0;
    for (int j = 0; j < d; ++j) {
      cap *= static_cast<double>(s);
    }
    return cap;
  };
  while (capacity(side) < static_cast<double>(n)) {
    ++side;
  }
  return side;
}

} // namespace

Design::Design(int d, std::vector<std::vector<Point>> processes)
    : d_(d), processes_(std::move(processes)) {
  if (d <= 0) {
    throw ParameterError("design dimension must be positive");
  }
  if (processes_.empty()) {
    throw ShapeError("design needs at least one process");
  }
  offsets_.assign(1, 0);
  for (std::size_t k = 0; k < processes_.size(); ++k) {
    if (processes_[k].empty()) {
      throw ShapeError("process " + std::to_string(k + 1) + " has no points");
    }
    for (const auto &point : processes_[k]) {
      if (point.size() != static_cast<std::size_t>(d)) {
        throw ShapeError("process " + std::to_string(k + 1) +
                         " has a point of dimension " + std::to_string(point.size()));
      }
    }
    offsets_.push_back(offsets_.back() + processes_[k].size());
  }
}

Design Design::scaled(double factor) const {
  auto processes = processes_;
  for (auto &process : processes) {
    for (auto &point : process) {
      for (auto &x : point) {
        x *= factor;
      }
    }
  }
  return Design(d_, std::move(processes));
}

bool MinDistanceReport::unconstrained(double delta) { return std::isinf(delta); }

Design make_grid_design(int d, std::span<const std::size_t> counts, double spacing,
                        const std::vector<Point> &process_offsets) {
  if (!(spacing > 0.0)) {
    throw ParameterError("grid spacing must be positive");
  }
  if (d <= 0) {
    throw ParameterError("design dimension must be positive");
  }
  if (!process_offsets.empty() && process_offsets.size() != counts.size()) {
    throw ShapeError("need one offset per process");
  }
  const auto dim = static_cast<std::size_t>(d);
  std::vector<std::vector<Point>> processes;
  for (std::size_t k = 0; k < counts.size(); ++k) {
    Point shift(dim, 0.0);
    if (!process_offsets.empty()) {
      if (process_offsets[k].size() != dim) {
        throw ShapeError("offset of process " + std::to_string(k + 1) +
                         " has the wrong dimension");
      }
      shift = process_offsets[k];
    }
    const std::size_t side = cube_side(counts[k], d);
    std::vector<Point> points;
    points.reserve(counts[k]);
    std::vector<std::size_t> index(dim, 0);
    for (std::size_t i = 0; i < counts[k]; ++i) {
      Point point(dim);
      for (std::size_t j = 0; j < dim; ++j) {
        point[j] = spacing * static_cast<double>(index[j]) + shift[j];
      }
      points.push_back(std::move(point));
      // Lexicographic increment, last coordinate fastest.
      for (std::size_t j = dim; j-- > 0;) {
        if (++index[j] < side) {
          break;
        }
        index[j] = 0;
      }
    }
    processes.push_back(std::move(points));
  }
  return Design(d, std::move(processes));
}

Design make_random_min_dist(int d, std::span<const std::size_t> counts, double delta,
                            const Region &region, std::uint64_t seed,
                            std::size_t max_rejections) {
  if (!(delta > 0.0)) {
    throw ParameterError("minimum distance must be positive");
  }
  const auto dim = static_cast<std::size_t>(d);
  if (d <= 0 || region.lower.size() != dim || region.upper.size() != dim) {
    throw ShapeError("region dimension does not match d");
  }
  for (std::size_t j = 0; j < dim; ++j) {
    if (!(region.upper[j] > region.lower[j])) {
      throw ParameterError("region must have upper > lower on every axis");
    }
  }
  std::mt19937_64 engine(seed);
  std::vector<std::uniform_real_distribution<double>> axes;
  for (std::size_t j = 0; j < dim; ++j) {
    axes.emplace_back(region.lower[j], region.upper[j]);
  }

  std::vector<std::vector<Point>> processes;
  for (std::size_t k = 0; k < counts.size(); ++k) {
    std::vector<Point> accepted;
    accepted.reserve(std::min<std::size_t>(counts[k], 1u << 16));
    std::size_t rejections = 0;
    while (accepted.size() < counts[k]) {
      Point candidate(dim);
      for (std::size_t j = 0; j < dim; ++j) {
        candidate[j] = axes[j](engine);
      }
      const bool clear = std::all_of(accepted.begin(), accepted.end(), [&](const Point &q) {
        return max_distance(candidate, q) >= delta;
      });
      if (clear) {
        accepted.push_back(std::move(candidate));
        rejections = 0;
      } else if (++rejections >= max_rejections) {
        throw SaturationError("process " + std::to_string(k + 1) + " saturated after " +
                                  std::to_string(accepted.size()) + " of " +
                                  std::to_string(counts[k]) + " points",
                              k);
      }
    }
    processes.push_back(std::move(accepted));
  }
  return Design(d, std::move(processes));
}

MinDistanceReport min_distance(const Design &design) {
  MinDistanceReport report;
  report.overall = std::numeric_limits<double>::infinity();
  for (std::size_t k = 0; k < design.process_count(); ++k) {
    const auto &points = design.process(k);
    double delta = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < points.size(); ++i) {
      for (std::size_t j = i + 1; j < points.size(); ++j) {
        const double dist = max_distance(points[i], points[j]);
        if (dist == 0.0) {
          throw ZeroDistanceError("process " + std::to_string(k + 1) +
                                      " repeats a point (indices " +
                                      std::to_string(i + 1) + " and " +
                                      std::to_string(j + 1) + ")",
                                  k);
        }
        delta = std::min(delta, dist);
      }
    }
    report.per_process.push_back(delta);
    report.overall = std::min(report.overall, delta);
  }
  return report;
}

void write_design_table(std::ostream &out, const Design &design) {
  out << "# process point";
  for (int j = 0; j < design.d(); ++j) {
    out << " x" << (j + 1);
  }
  out << '\n';
  const auto precision = out.precision(17);
  for (std::size_t k = 0; k < design.process_count(); ++k) {
    const auto &points = design.process(k);
    for (std::size_t i = 0; i < points.size(); ++i) {
      out << (k + 1) << ' ' << (i + 1);
      for (double x : points[i]) {
        out << ' ' << x;
      }
      out << '\n';
    }
  }
  out.precision(precision);
}

Design read_design_table(std::istream &in) {
  std::map<std::size_t, std::map<std::size_t, Point>> table;
  std::string line;
  std::size_t line_number = 0;
  int d = -1;
  while (std::getline(in, line)) {
    ++line_number;
    const auto first = line.find_first_not_of(" \t\r");
    if (first == std::string::npos || line[first] == '#') {
      continue;
    }
    std::istringstream row(line);
    long process = 0;
    long index = 0;
    if (!(row >> process >> index) || process < 1 || index < 1) {
      throw ParameterError("design table line " + std::to_string(line_number) +
                           ": expected 1-based process and point indices");
    }
    Point point;
    double x = 0.0;
    while (row >> x) {
      point.push_back(x);
    }
    if (!row.eof()) {
      throw ParameterError("design table line " + std::to_string(line_number) +
                           ": malformed coordinate");
    }
    if (point.empty() || (d >= 0 && point.size() != static_cast<std::size_t>(d))) {
      throw ShapeError("design table line " + std::to_string(line_number) +
                       ": inconsistent dimension");
    }
    d = static_cast<int>(point.size());
    auto &slot = table[static_cast<std::size_t>(process)];
    if (!slot.emplace(static_cast<std::size_t>(index), std::move(point)).second) {
      throw ParameterError("design table line " + std::to_string(line_number) +
                           ": duplicate point index");
    }
  }
  if (table.empty()) {
    throw ShapeError("design table is empty");
  }
  std::vector<std::vector<Point>> processes;
  std::size_t expected_process = 1;
  for (auto &[process, points] : table) {
    if (process != expected_process++) {
      throw ShapeError("design table skips process " + std::to_string(expected_process - 1));
    }
    std::vector<Point> ordered;
    std::size_t expected_index = 1;
    for (auto &[index, point] : points) {
      if (index != expected_index++) {
        throw ShapeError("design table process " + std::to_string(process) +
                         " skips point " + std::to_string(expected_index - 1));
      }
      ordered.push_back(std::move(point));
    }
    processes.push_back(std::move(ordered));
  }
  return Design(d, std::move(processes));
}

} // namespace specfloor
