#include "locpen/data.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <functional>
#include <limits>
#include <sstream>
#include <stdexcept>

#include "locpen/rng.hpp"

namespace locpen {

namespace {

double clip01(double v) { return std::clamp(v, 0.0, 1.0); }

double intersection_measure(std::span<const Interval> a, std::span<const Interval> b) {
  double total = 0.0;
  std::size_t i = 0;
  std::size_t j = 0;
  while (i < a.size() && j < b.size()) {
    const double lo = std::max(clip01(a[i].lo), clip01(b[j].lo));
    const double hi = std::min(clip01(a[i].hi), clip01(b[j].hi));
    if (hi > lo) total += hi - lo;
    if (a[i].hi < b[j].hi) {
      ++i;
    } else {
      ++j;
    }
  }
  return total;
}

std::vector<std::string> split_line(std::string_view line) {
  std::vector<std::string> cells;
  std::size_t start = 0;
  for (;;) {
    const std::size_t comma = line.find(',', start);
    cells.emplace_back(line.substr(start, comma == std::string_view::npos ? line.npos : comma - start));
    if (comma == std::string_view::npos) break;
    start = comma + 1;
  }
  for (auto& c : cells) {
    const auto first = c.find_first_not_of(" \t\r");
    const auto last = c.find_last_not_of(" \t\r");
    c = first == std::string::npos ? std::string() : c.substr(first, last - first + 1);
  }
  return cells;
}

}  // namespace

void validate_regions(std::span<const Interval> regions) {
  for (std::size_t i = 0; i < regions.size(); ++i) {
    if (std::isnan(regions[i].lo) || std::isnan(regions[i].hi) || regions[i].lo > regions[i].hi) {
      throw std::invalid_argument("interval endpoints must satisfy lo <= hi");
    }
    if (i > 0 && !(regions[i - 1].hi < regions[i].lo)) {
      throw std::invalid_argument("intervals must be sorted and pairwise disjoint");
    }
  }
}

double unit_measure(std::span<const Interval> regions) {
  double total = 0.0;
  for (const auto& r : regions) total += std::max(0.0, clip01(r.hi) - clip01(r.lo));
  return total;
}

double symmetric_difference_measure(std::span<const Interval> a, std::span<const Interval> b) {
  const double d = unit_measure(a) + unit_measure(b) - 2.0 * intersection_measure(a, b);
  return std::max(0.0, d);
}

LabeledSample::LabeledSample(std::vector<double> coordinates, std::size_t dim, std::vector<std::uint8_t> labels)
    : dim_(dim), coords_(std::move(coordinates)), labels_(std::move(labels)) {
  if (dim_ == 0) throw std::invalid_argument("sample dimension must be at least 1");
  if (labels_.empty()) throw std::invalid_argument("sample must contain at least one observation");
  if (coords_.size() != labels_.size() * dim_) {
    throw std::invalid_argument("points and labels must have equal length");
  }
  for (auto y : labels_) {
    if (y > 1) throw std::invalid_argument("labels must be 0 or 1");
  }
}

LabeledSample::LabeledSample(std::vector<double> xs, std::vector<std::uint8_t> labels)
    : LabeledSample(std::move(xs), 1, std::move(labels)) {}

LabeledSample LabeledSample::concat(const LabeledSample& other) const {
  if (other.dim_ != dim_) throw std::invalid_argument("cannot concatenate samples of different dimension");
  std::vector<double> coords = coords_;
  coords.insert(coords.end(), other.coords_.begin(), other.coords_.end());
  std::vector<std::uint8_t> labels = labels_;
  labels.insert(labels.end(), other.labels_.begin(), other.labels_.end());
  return LabeledSample(std::move(coords), dim_, std::move(labels));
}

NoisyRegionDistribution::NoisyRegionDistribution(std::vector<Interval> target, double eta)
    : target_(std::move(target)), eta_(eta) {
  validate_regions(target_);
  for (const auto& r : target_) {
    if (r.lo < 0.0 || r.hi > 1.0) throw std::invalid_argument("target intervals must lie inside [0, 1]");
  }
  if (!(eta_ >= 0.0 && eta_ < 0.5)) throw std::invalid_argument("noise rate must lie in [0, 1/2)");
}

bool NoisyRegionDistribution::in_target(double x) const noexcept {
  for (const auto& r : target_) {
    if (x < r.lo) return false;
    if (x <= r.hi) return true;
  }
  return false;
}

IntervalClassifier::IntervalClassifier(std::vector<Interval> regions) : regions_(std::move(regions)) {
  validate_regions(regions_);
}

bool IntervalClassifier::predict(double x) const noexcept {
  for (const auto& r : regions_) {
    if (x < r.lo) return false;
    if (x <= r.hi) return true;
  }
  return false;
}

LabeledSample generate_sample(const NoisyRegionDistribution& dist, std::size_t n, std::uint64_t seed) {
  if (n == 0) throw std::invalid_argument("sample size must be at least 1");
  std::vector<double> xs(n);
  std::vector<std::uint8_t> ys(n);
  for (std::size_t i = 0; i < n; ++i) {
    const std::uint64_t point_seed = derive_seed(seed, i);
    xs[i] = to_unit(derive_seed(point_seed, 0));
    const bool flip = to_unit(derive_seed(point_seed, 1)) < dist.eta();
    ys[i] = static_cast<std::uint8_t>(dist.in_target(xs[i]) != flip);
  }
  return LabeledSample(std::move(xs), std::move(ys));
}

double bayes_risk(const NoisyRegionDistribution& dist) { return dist.eta(); }

double true_loss(std::span<const Interval> regions, const NoisyRegionDistribution& dist) {
  const double eta = dist.eta();
  return eta + (1.0 - 2.0 * eta) * symmetric_difference_measure(regions, dist.target());
}

double true_loss(const IntervalClassifier& f, const NoisyRegionDistribution& dist) {
  return true_loss(f.regions(), dist);
}

ClassOptimum class_optimum(const NoisyRegionDistribution& dist, int k) {
  if (k < 0) throw std::invalid_argument("interval budget must be nonnegative");
  std::vector<double> ends;
  for (const auto& r : dist.target()) {
    ends.push_back(r.lo);
    ends.push_back(r.hi);
  }
  std::sort(ends.begin(), ends.end());
  ends.erase(std::unique(ends.begin(), ends.end()), ends.end());

  ClassOptimum best{true_loss(std::span<const Interval>{}, dist), IntervalClassifier{}};
  std::vector<Interval> current;
  // Lexicographic enumeration per interval count, so the first candidate
  // attaining the minimum already satisfies the tie-breaking rule.
  std::function<void(std::size_t, int)> extend = [&](std::size_t from, int remaining) {
    if (remaining == 0) {
      const double loss = true_loss(current, dist);
      if (loss < best.loss - 1e-12) best = {loss, IntervalClassifier(current)};
      return;
    }
    for (std::size_t a = from; a < ends.size(); ++a) {
      for (std::size_t b = a + 1; b < ends.size(); ++b) {
        current.push_back({ends[a], ends[b]});
        extend(b + 1, remaining - 1);
        current.pop_back();
      }
    }
  };
  for (int r = 1; r <= k; ++r) extend(0, r);
  return best;
}

double class_optimal_loss(const NoisyRegionDistribution& dist, int k) { return class_optimum(dist, k).loss; }

ClassOptimum threshold_optimum(const NoisyRegionDistribution& dist) {
  std::vector<double> ends{0.0};
  for (const auto& r : dist.target()) {
    ends.push_back(r.lo);
    ends.push_back(r.hi);
  }
  std::sort(ends.begin(), ends.end());
  ends.erase(std::unique(ends.begin(), ends.end()), ends.end());
  ClassOptimum best{true_loss(std::span<const Interval>{}, dist), IntervalClassifier{}};
  const double inf = std::numeric_limits<double>::infinity();
  for (double t : ends) {
    const Interval region{t, inf};
    const double loss = true_loss(std::span<const Interval>(&region, 1), dist);
    if (loss < best.loss - 1e-12) best = {loss, IntervalClassifier({region})};
  }
  return best;
}

LabeledSample parse_sample_csv(std::string_view text) {
  std::istringstream in{std::string(text)};
  std::string line;
  if (!std::getline(in, line)) throw std::runtime_error("dataset CSV is empty");
  const auto header = split_line(line);
  if (header.size() < 2 || header.back() != "y") {
    throw std::runtime_error("dataset CSV header must be x1,...,xd,y");
  }
  const std::size_t dim = header.size() - 1;
  for (std::size_t j = 0; j < dim; ++j) {
    if (header[j] != "x" + std::to_string(j + 1)) {
      throw std::runtime_error("dataset CSV header must be x1,...,xd,y (got '" + header[j] + "')");
    }
  }
  std::vector<double> coords;
  std::vector<std::uint8_t> labels;
  std::size_t row = 1;
  while (std::getline(in, line)) {
    ++row;
    if (line.empty() || line == "\r") continue;
    const auto cells = split_line(line);
    if (cells.size() != dim + 1) {
      throw std::runtime_error("dataset CSV row " + std::to_string(row) + " has wrong column count");
    }
    for (std::size_t j = 0; j < dim; ++j) {
      char* end = nullptr;
      const double v = std::strtod(cells[j].c_str(), &end);
      if (cells[j].empty() || *end != '\0') {
        throw std::runtime_error("dataset CSV row " + std::to_string(row) + ": bad number '" + cells[j] + "'");
      }
      coords.push_back(v);
    }
    if (cells[dim] != "0" && cells[dim] != "1") {
      throw std::runtime_error("dataset CSV row " + std::to_string(row) + ": label must be 0 or 1");
    }
    labels.push_back(cells[dim] == "1" ? 1 : 0);
  }
  return LabeledSample(std::move(coords), dim, std::move(labels));
}

std::string format_sample_csv(const LabeledSample& sample) {
  std::string out;
  for (std::size_t j = 0; j < sample.dim(); ++j) out += "x" + std::to_string(j + 1) + ",";
  out += "y\n";
  char buf[64];
  for (std::size_t i = 0; i < sample.n(); ++i) {
    for (std::size_t j = 0; j < sample.dim(); ++j) {
      std::snprintf(buf, sizeof buf, "%.17g,", sample.x(i, j));
      out += buf;
    }
    out += sample.label(i) ? "1\n" : "0\n";
  }
  return out;
}

LabeledSample read_sample_csv(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open dataset " + path.string());
  std::stringstream buffer;
  buffer << in.rdbuf();
  try {
    return parse_sample_csv(buffer.str());
  } catch (const std::exception& e) {
    throw std::runtime_error(path.string() + ": " + e.what());
  }
}

void write_sample_csv(const LabeledSample& sample, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write dataset " + path.string());
  out << format_sample_csv(sample);
  if (!out) throw std::runtime_error("write failed for " + path.string());
}

}  // namespace locpen
