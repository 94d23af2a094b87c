#pragma once

#include <cstdint>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

namespace specfloor {

using Point = std::vector<double>;

// p point sequences in R^d. Process k occupies rows offsets[k] ..
// offsets[k + 1] - 1 of any matrix assembled from the design.
class Design {
public:
  Design(int d, std::vector<std::vector<Point>> processes);

  int d() const { return d_; }
  std::size_t process_count() const { return processes_.size(); }
  std::size_t count(std::size_t k) const { return processes_.at(k).size(); }
  const std::vector<Point> &process(std::size_t k) const { return processes_.at(k); }
  const std::vector<std::vector<Point>> &processes() const { return processes_; }
  // N_0 = 0, N_k = n_1 + ... + n_k; size p + 1.
  const std::vector<std::size_t> &offsets() const { return offsets_; }
  std::size_t total() const { return offsets_.back(); }

  // Every coordinate multiplied by `factor`.
  Design scaled(double factor) const;

  bool operator==(const Design &) const = default;

private:
  int d_;
  std::vector<std::vector<Point>> processes_;
  std::vector<std::size_t> offsets_;
};

struct MinDistanceReport {
  // Max-norm minimum distance per process; +inf for single-point processes.
  std::vector<double> per_process;
  // Minimum over constrained processes; +inf when none is constrained.
  double overall = 0.0;

  static bool unconstrained(double delta);
};

// Process k receives the first counts[k] nodes (lexicographic order) of the
// cube {0, ..., m-1}^d, m = ceil(counts[k]^(1/d)), scaled by `spacing` and
// shifted by process_offsets[k]. An empty offsets list means collocated.
Design make_grid_design(int d, std::span<const std::size_t> counts, double spacing,
                        const std::vector<Point> &process_offsets = {});

struct Region {
  Point lower;
  Point upper;
};

// Per-process rejection sampling: uniform draws in `region` accepted when at
// least `delta` (max norm) from every accepted point of the same process.
// Throws SaturationError after `max_rejections` consecutive rejections.
Design make_random_min_dist(int d, std::span<const std::size_t> counts, double delta,
                            const Region &region, std::uint64_t seed,
                            std::size_t max_rejections = 20000);

// Throws ZeroDistanceError on a repeated point within one process.
MinDistanceReport min_distance(const Design &design);

// Text table, one row per point: process (1-based), point (1-based), coords.
void write_design_table(std::ostream &out, const Design &design);
Design read_design_table(std::istream &in);

} // namespace specfloor
