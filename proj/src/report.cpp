#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <stdexcept>
#include <string>

#include "locpen/harness.hpp"

namespace locpen {

namespace {

std::string num(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.10g", v);
  return buf;
}

std::string fixed(double v, int digits = 2) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.*f", digits, v);
  return buf;
}

const char* kPalette[] = {"#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b"};

struct Panel {
  double x0;
  double y0;
  double width;
  double height;
};

void panel(std::string& svg, const Panel& p, const std::string& title, const std::string& ylabel, int max_k,
           double ymax, const ExperimentReport& report, double (*value)(const ClassSummary&, double)) {
  svg += "<rect x=\"" + fixed(p.x0) + "\" y=\"" + fixed(p.y0) + "\" width=\"" + fixed(p.width) + "\" height=\"" +
         fixed(p.height) + "\" fill=\"none\" stroke=\"#333\"/>\n";
  svg += "<text x=\"" + fixed(p.x0 + p.width / 2) + "\" y=\"" + fixed(p.y0 - 10) +
         "\" text-anchor=\"middle\" font-size=\"14\">" + title + "</text>\n";
  svg += "<text x=\"" + fixed(p.x0 - 45) + "\" y=\"" + fixed(p.y0 + p.height / 2) +
         "\" text-anchor=\"middle\" font-size=\"12\" transform=\"rotate(-90 " + fixed(p.x0 - 45) + " " +
         fixed(p.y0 + p.height / 2) + ")\">" + ylabel + "</text>\n";
  auto xpos = [&](int k) { return max_k == 1 ? p.x0 + p.width / 2 : p.x0 + p.width * (k - 1) / (max_k - 1); };
  auto ypos = [&](double v) { return p.y0 + p.height * (1.0 - std::clamp(v / ymax, 0.0, 1.0)); };
  for (int k = 1; k <= max_k; ++k) {
    svg += "<text x=\"" + fixed(xpos(k)) + "\" y=\"" + fixed(p.y0 + p.height + 16) +
           "\" text-anchor=\"middle\" font-size=\"11\">" + std::to_string(k) + "</text>\n";
  }
  svg += "<text x=\"" + fixed(p.x0 + p.width / 2) + "\" y=\"" + fixed(p.y0 + p.height + 34) +
         "\" text-anchor=\"middle\" font-size=\"12\">k</text>\n";
  for (int t = 0; t <= 4; ++t) {
    const double v = ymax * t / 4.0;
    svg += "<text x=\"" + fixed(p.x0 - 6) + "\" y=\"" + fixed(ypos(v) + 4) +
           "\" text-anchor=\"end\" font-size=\"10\">" + fixed(v, 3) + "</text>\n";
  }
  for (std::size_t j = 0; j < report.penalties.size(); ++j) {
    const auto& ps = report.penalties[j];
    const char* color = kPalette[j % (sizeof kPalette / sizeof kPalette[0])];
    std::string points;
    for (const auto& cs : ps.per_k) {
      if (!points.empty()) points += ' ';
      points += fixed(xpos(cs.k)) + "," + fixed(ypos(value(cs, report.bayes_risk)));
    }
    svg += "<polyline fill=\"none\" stroke=\"" + std::string(color) + "\" stroke-width=\"2\" points=\"" + points +
           "\"/>\n";
    for (const auto& cs : ps.per_k) {
      svg += "<circle cx=\"" + fixed(xpos(cs.k)) + "\" cy=\"" + fixed(ypos(value(cs, report.bayes_risk))) +
             "\" r=\"3\" fill=\"" + color + "\"/>\n";
    }
  }
}

double excess_value(const ClassSummary& cs, double bayes) { return cs.mean_true_loss - bayes; }
double penalty_value(const ClassSummary& cs, double) { return cs.mean_penalty; }

}  // namespace

std::string report_csv(const ExperimentReport& report) {
  std::string out =
      "penalty,k,mean_emp_loss,mean_penalty_raw,mean_penalty_clamped,mean_u_hat,mean_subset_count,selection_freq,"
      "mean_true_loss,se_true_loss,oracle_bound,violations,reps,seed\n";
  for (const auto& ps : report.penalties) {
    for (const auto& cs : ps.per_k) {
      out += ps.label + "," + std::to_string(cs.k) + "," + num(cs.mean_emp_loss) + "," + num(cs.mean_penalty_raw) +
             "," + num(cs.mean_penalty) + "," + num(cs.mean_u_hat) + "," + num(cs.mean_subset_count) + "," +
             num(cs.selection_freq) + "," + num(cs.mean_true_loss) + "," + num(cs.se_true_loss) + "," +
             num(cs.oracle_term) + "," + std::to_string(cs.lemma_violations) + "," + std::to_string(report.reps) +
             "," + std::to_string(report.seed) + "\n";
    }
  }
  return out;
}

std::string report_svg(const ExperimentReport& report) {
  int max_k = 1;
  double max_excess = 0.0;
  double max_penalty = 0.0;
  for (const auto& ps : report.penalties) {
    for (const auto& cs : ps.per_k) {
      max_k = std::max(max_k, cs.k);
      max_excess = std::max(max_excess, cs.mean_true_loss - report.bayes_risk);
      max_penalty = std::max(max_penalty, cs.mean_penalty);
    }
  }
  auto nice = [](double v) { return v <= 0.0 ? 1.0 : std::ceil(v * 1.1 * 100.0) / 100.0; };
  const double width = 900;
  const double height = 420;
  std::string svg = "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" + fixed(width, 0) + "\" height=\"" +
                    fixed(height, 0) + "\" viewBox=\"0 0 " + fixed(width, 0) + " " + fixed(height, 0) + "\">\n";
  svg += "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  svg += "<text x=\"" + fixed(width / 2) + "\" y=\"20\" text-anchor=\"middle\" font-size=\"13\">n = " +
         std::to_string(report.n) + ", reps = " + std::to_string(report.reps) + ", seed = " +
         std::to_string(report.seed) + "</text>\n";
  panel(svg, {80, 60, 320, 280}, "excess risk of the class-k ERM", "E L(f_k) - L*", max_k, nice(max_excess), report,
        excess_value);
  panel(svg, {530, 60, 320, 280}, "mean penalty (clamped)", "E C_k", max_k, nice(max_penalty), report, penalty_value);
  for (std::size_t j = 0; j < report.penalties.size(); ++j) {
    const double y = 385;
    const double x = 80 + 180.0 * static_cast<double>(j);
    const char* color = kPalette[j % (sizeof kPalette / sizeof kPalette[0])];
    svg += "<rect x=\"" + fixed(x) + "\" y=\"" + fixed(y - 9) + "\" width=\"12\" height=\"12\" fill=\"" + color +
           "\"/>\n";
    svg += "<text x=\"" + fixed(x + 18) + "\" y=\"" + fixed(y + 1) + "\" font-size=\"12\">" +
           report.penalties[j].label + "</text>\n";
  }
  svg += "</svg>\n";
  return svg;
}

std::string report_summary(const ExperimentReport& report) {
  std::string out;
  char buf[512];
  std::snprintf(buf, sizeof buf, "n=%zu reps=%zu seed=%llu bayes_risk=%.6g profile=%s%s\n", report.n, report.reps,
                static_cast<unsigned long long>(report.seed), report.bayes_risk, report.profile.c_str(),
                report.se_defined ? "" : " (single replicate: standard errors undefined)");
  out += buf;
  for (const auto& ps : report.penalties) {
    std::snprintf(buf, sizeof buf,
                  "%-24s excess %.6g (se %s)  bound %.6g + slack %.3g  expectation %s  prob %zu/%zu vs %.3g%s %s",
                  ps.label.c_str(), ps.mean_excess, num(ps.se_excess).c_str(), ps.oracle_bound, ps.oracle_slack,
                  ps.expectation_ok ? "ok" : "VIOLATED", ps.prob_violations, report.reps, ps.prob_level,
                  ps.prob_vacuous ? " (vacuous)" : "", ps.prob_ok ? "ok" : "VIOLATED");
    out += buf;
    if (!ps.theorem_applies) out += "  [reference constants]";
    if (!std::isnan(ps.population_bound)) {
      std::snprintf(buf, sizeof buf, "  population-class bound %.6g %s", ps.population_bound, ps.population_ok ? "ok" : "VIOLATED");
      out += buf;
    }
    if (!std::isnan(ps.closed_form_bound)) {
      std::snprintf(buf, sizeof buf, "  closed-form bound %.6g %s", ps.closed_form_bound,
                    ps.closed_form_ok ? "ok" : "VIOLATED");
      out += buf;
    }
    out += "\n";
  }
  return out;
}

void emit_report(const ExperimentReport& report, const std::filesystem::path& path, ReportFormat format) {
  const std::string text = format == ReportFormat::kCsv ? report_csv(report) : report_svg(report);
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot open " + path.string() + " for writing");
  out << text;
  if (!out) throw std::runtime_error("failed writing report to " + path.string());
}

}  // namespace locpen
