#include "locpen/config.hpp"

#include <fstream>
#include <map>
#include <optional>
#include <sstream>
#include <stdexcept>

namespace locpen {

namespace {

std::string trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r\n");
  if (first == std::string_view::npos) return "";
  const auto last = s.find_last_not_of(" \t\r\n");
  return std::string(s.substr(first, last - first + 1));
}

std::vector<std::string> split(std::string_view s, char sep) {
  std::vector<std::string> out;
  std::size_t start = 0;
  for (;;) {
    const auto pos = s.find(sep, start);
    out.push_back(trim(s.substr(start, pos == std::string_view::npos ? s.npos : pos - start)));
    if (pos == std::string_view::npos) break;
    start = pos + 1;
  }
  return out;
}

double to_double(const std::string& text, const std::string& what) {
  std::size_t used = 0;
  double v = 0.0;
  try {
    v = std::stod(text, &used);
  } catch (const std::exception&) {
    used = 0;
  }
  if (used == 0 || used != text.size()) throw std::invalid_argument(what + ": expected a number, got '" + text + "'");
  return v;
}

unsigned long long to_unsigned(const std::string& text, const std::string& what) {
  std::size_t used = 0;
  unsigned long long v = 0;
  try {
    if (!text.empty() && text.front() != '-') v = std::stoull(text, &used, 0);
  } catch (const std::exception&) {
    used = 0;
  }
  if (used == 0 || used != text.size()) {
    throw std::invalid_argument(what + ": expected a nonnegative integer, got '" + text + "'");
  }
  return v;
}

int to_int(const std::string& text, const std::string& what) {
  const auto v = to_unsigned(text, what);
  if (v > 1000000) throw std::invalid_argument(what + ": value too large");
  return static_cast<int>(v);
}

}  // namespace

std::vector<ModelClass> parse_class_list(std::string_view text) {
  std::vector<ModelClass> out;
  for (const auto& item : split(text, ',')) {
    if (item.empty()) continue;
    const auto colon = item.find(':');
    const std::string family = item.substr(0, colon);
    const std::string arg = colon == std::string::npos ? "" : trim(item.substr(colon + 1));
    if (family == "thresholds") {
      if (!arg.empty()) throw std::invalid_argument("thresholds take no argument");
      out.push_back(ModelClass::thresholds());
    } else if (family == "intervals") {
      if (arg.empty()) throw std::invalid_argument("intervals need a budget, e.g. intervals:3 or intervals:1..5");
      const auto dots = arg.find("..");
      if (dots == std::string::npos) {
        out.push_back(ModelClass::intervals(to_int(arg, "interval budget")));
      } else {
        const int lo = to_int(trim(arg.substr(0, dots)), "interval range");
        const int hi = to_int(trim(arg.substr(dots + 2)), "interval range");
        if (lo < 1 || hi < lo) throw std::invalid_argument("interval range must satisfy 1 <= A <= B");
        for (int k = lo; k <= hi; ++k) out.push_back(ModelClass::intervals(k));
      }
    } else if (family == "stumps") {
      out.push_back(ModelClass::stumps(arg.empty() ? 1 : to_int(arg, "stump dimension")));
    } else {
      throw std::invalid_argument("unknown class '" + item + "' (expected intervals:K, intervals:A..B, thresholds, stumps:D)");
    }
  }
  if (out.empty()) throw std::invalid_argument("class list is empty");
  return out;
}

std::vector<Interval> parse_interval_list(std::string_view text) {
  std::vector<Interval> out;
  const std::string t = trim(text);
  if (t.empty() || t == "none") return out;
  for (const auto& item : split(t, ',')) {
    const auto dash = item.find('-', 1);
    if (dash == std::string::npos) throw std::invalid_argument("interval '" + item + "' must look like lo-hi");
    out.push_back({to_double(trim(item.substr(0, dash)), "interval"), to_double(trim(item.substr(dash + 1)), "interval")});
  }
  validate_regions(out);
  return out;
}

std::vector<PenaltyKind> parse_penalty_list(std::string_view text) {
  std::vector<PenaltyKind> out;
  for (const auto& item : split(text, ',')) {
    if (!item.empty()) out.push_back(parse_penalty_kind(item));
  }
  if (out.empty()) throw std::invalid_argument("penalty list is empty");
  return out;
}

ExperimentConfig parse_experiment_config(std::string_view text) {
  std::map<std::string, std::pair<std::string, int>> values;
  std::istringstream in{std::string(text)};
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    if (trim(line).empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) {
      throw std::invalid_argument("config line " + std::to_string(line_no) + ": expected 'key = value'");
    }
    const std::string key = trim(line.substr(0, eq));
    if (values.count(key)) throw std::invalid_argument("config line " + std::to_string(line_no) + ": duplicate key '" + key + "'");
    values[key] = {trim(line.substr(eq + 1)), line_no};
  }

  auto take = [&](const std::string& key) -> std::optional<std::string> {
    const auto it = values.find(key);
    if (it == values.end()) return std::nullopt;
    std::string v = it->second.first;
    values.erase(it);
    return v;
  };

  std::vector<Interval> target{{0.2, 0.4}, {0.6, 0.8}};
  double eta = 0.1;
  if (auto v = take("intervals")) target = parse_interval_list(*v);
  if (auto v = take("eta")) eta = to_double(*v, "eta");
  ExperimentConfig cfg{NoisyRegionDistribution(target, eta), interval_hierarchy(5)};
  if (auto v = take("classes")) cfg.hierarchy = parse_class_list(*v);
  if (auto v = take("n")) cfg.n = to_unsigned(*v, "n");
  if (auto v = take("reps")) cfg.reps = to_unsigned(*v, "reps");
  if (auto v = take("penalty")) cfg.kinds = parse_penalty_list(*v);
  if (auto v = take("gamma")) cfg.gamma = to_double(*v, "gamma");
  if (auto v = take("gamma1")) cfg.gamma1 = to_double(*v, "gamma1");
  if (auto v = take("gamma2")) cfg.gamma2 = to_double(*v, "gamma2");
  if (auto v = take("mc_draws")) cfg.mc_draws = to_unsigned(*v, "mc_draws");
  if (auto v = take("seed")) cfg.seed = to_unsigned(*v, "seed");
  if (auto v = take("workers")) cfg.workers = static_cast<unsigned>(to_int(*v, "workers"));
  if (auto v = take("shatter_reps")) cfg.shatter_reps = to_unsigned(*v, "shatter_reps");
  double scale = 0.05;
  if (auto v = take("constant_scale")) scale = to_double(*v, "constant_scale");
  if (auto v = take("profile")) {
    if (*v == "exploratory") {
      cfg.profile = ConstantProfile::exploratory(scale);
    } else if (*v != "paper") {
      throw std::invalid_argument("profile must be paper or exploratory");
    }
  }
  if (!values.empty()) {
    const auto& [key, entry] = *values.begin();
    throw std::invalid_argument("config line " + std::to_string(entry.second) + ": unknown key '" + key + "'");
  }
  if (cfg.n == 0 || cfg.reps == 0) throw std::invalid_argument("config needs n >= 1 and reps >= 1");
  if (cfg.mc_draws == 0) throw std::invalid_argument("mc_draws must be positive");
  return cfg;
}

ExperimentConfig read_experiment_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open config " + path.string());
  std::stringstream buf;
  buf << in.rdbuf();
  try {
    return parse_experiment_config(buf.str());
  } catch (const std::invalid_argument& e) {
    throw std::invalid_argument(path.string() + ": " + e.what());
  }
}

}  // namespace locpen
