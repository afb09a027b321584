#include "iterlog/report.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <numbers>
#include <sstream>

#include "iterlog/numeric.hpp"

namespace iterlog {

namespace {

constexpr double kWidth = 640.0;
constexpr double kHeight = 400.0;
constexpr double kLeft = 70.0;
constexpr double kRight = 20.0;
constexpr double kTop = 40.0;
constexpr double kBottom = 50.0;

const char* const kPalette[] = {"#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b"};

std::string fixed(double value) {
  char buffer[32];
  std::snprintf(buffer, sizeof buffer, "%.2f", value);
  return buffer;
}

std::string tick(double value) {
  char buffer[32];
  std::snprintf(buffer, sizeof buffer, "%.4g", value);
  return buffer;
}

std::string escape(const std::string& text) {
  std::string out;
  for (char c : text) {
    switch (c) {
      case '&': out += "&amp;"; break;
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '"': out += "&quot;"; break;
      default: out += c;
    }
  }
  return out;
}

struct Range {
  double lo = std::numeric_limits<double>::infinity();
  double hi = -std::numeric_limits<double>::infinity();

  void include(double v) {
    if (!std::isfinite(v)) return;
    lo = std::min(lo, v);
    hi = std::max(hi, v);
  }
  void pad() {
    if (!(lo <= hi)) {
      lo = -1.0;
      hi = 1.0;
    }
    const double width = hi - lo;
    const double margin = width > 0.0 ? 0.05 * width : std::max(1.0, std::abs(lo) * 0.1);
    lo -= margin;
    hi += margin;
  }
};

}  // namespace

std::string render_svg(const PlotSpec& spec) {
  bool any_point = false;
  for (const auto& series : spec.series) {
    if (series.x.size() != series.y.size()) throw Error("series x and y lengths differ");
    any_point = any_point || !series.x.empty();
  }
  if (!any_point) throw Error("empty series");

  Range xr;
  Range yr;
  for (const auto& series : spec.series) {
    for (std::size_t i = 0; i < series.x.size(); ++i) {
      xr.include(series.x[i]);
      yr.include(series.y[i]);
    }
  }
  for (double line : spec.reference_lines) yr.include(line);
  xr.pad();
  yr.pad();
  const double plot_w = kWidth - kLeft - kRight;
  const double plot_h = kHeight - kTop - kBottom;
  auto px = [&](double x) { return kLeft + (x - xr.lo) / (xr.hi - xr.lo) * plot_w; };
  auto py = [&](double y) { return kTop + (yr.hi - y) / (yr.hi - yr.lo) * plot_h; };

  std::ostringstream svg;
  svg << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << kWidth << "\" height=\""
      << kHeight << "\" viewBox=\"0 0 " << kWidth << ' ' << kHeight << "\">\n";
  svg << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  svg << "<text x=\"" << kWidth / 2 << "\" y=\"22\" text-anchor=\"middle\" font-size=\"15\">"
      << escape(spec.title) << "</text>\n";
  svg << "<rect x=\"" << kLeft << "\" y=\"" << kTop << "\" width=\"" << plot_w << "\" height=\""
      << plot_h << "\" fill=\"none\" stroke=\"black\"/>\n";
  for (int i = 0; i <= 4; ++i) {
    const double x = xr.lo + (xr.hi - xr.lo) * i / 4.0;
    const double y = yr.lo + (yr.hi - yr.lo) * i / 4.0;
    svg << "<text x=\"" << fixed(px(x)) << "\" y=\"" << kHeight - kBottom + 18
        << "\" text-anchor=\"middle\" font-size=\"11\">" << tick(x) << "</text>\n";
    svg << "<text x=\"" << kLeft - 6 << "\" y=\"" << fixed(py(y) + 4)
        << "\" text-anchor=\"end\" font-size=\"11\">" << tick(y) << "</text>\n";
  }
  svg << "<text x=\"" << kLeft + plot_w / 2 << "\" y=\"" << kHeight - 10
      << "\" text-anchor=\"middle\" font-size=\"13\">" << escape(spec.x_label) << "</text>\n";
  svg << "<text x=\"16\" y=\"" << kTop + plot_h / 2 << "\" text-anchor=\"middle\" font-size=\"13\""
      << " transform=\"rotate(-90 16 " << kTop + plot_h / 2 << ")\">" << escape(spec.y_label)
      << "</text>\n";
  for (double line : spec.reference_lines) {
    svg << "<line class=\"reference\" data-y=\"" << tick(line) << "\" x1=\"" << kLeft
        << "\" x2=\"" << kLeft + plot_w << "\" y1=\"" << fixed(py(line)) << "\" y2=\""
        << fixed(py(line)) << "\" stroke=\"gray\" stroke-dasharray=\"6 4\"/>\n";
  }
  for (std::size_t s = 0; s < spec.series.size(); ++s) {
    const auto& series = spec.series[s];
    const char* color = kPalette[s % std::size(kPalette)];
    if (series.x.size() > 1) {
      svg << "<polyline fill=\"none\" stroke=\"" << color << "\" points=\"";
      for (std::size_t i = 0; i < series.x.size(); ++i) {
        if (!std::isfinite(series.x[i]) || !std::isfinite(series.y[i])) continue;
        svg << fixed(px(series.x[i])) << ',' << fixed(py(series.y[i])) << ' ';
      }
      svg << "\"/>\n";
    }
    for (std::size_t i = 0; i < series.x.size(); ++i) {
      if (!std::isfinite(series.x[i]) || !std::isfinite(series.y[i])) continue;
      svg << "<circle cx=\"" << fixed(px(series.x[i])) << "\" cy=\"" << fixed(py(series.y[i]))
          << "\" r=\"3\" fill=\"" << color << "\"/>\n";
    }
    svg << "<text x=\"" << kLeft + 10 << "\" y=\"" << kTop + 16 + 15 * s << "\" font-size=\"12\""
        << " fill=\"" << color << "\">" << escape(series.label) << "</text>\n";
  }
  svg << "</svg>\n";
  return svg.str();
}

void write_file(const std::filesystem::path& path, const std::string& text) {
  std::ofstream file(path, std::ios::binary);
  if (!file) throw OutputError("cannot write " + path.string());
  file << text;
  file.close();
  if (!file) throw OutputError("cannot write " + path.string());
}

void emit_plot(const PlotSpec& spec, const std::filesystem::path& path) {
  write_file(path, render_svg(spec));
}

void write_cmj_csv(std::ostream& out, const SimConfig& config, const EnsembleSummary& ensemble) {
  if (ensemble.outcomes.empty()) throw Error("CSV output needs retained outcomes");
  std::vector<double> times = config.grid;
  const bool on_grid = !times.empty();
  if (!on_grid) times.push_back(ensemble.horizon);
  const std::size_t generations = ensemble.generations.size();
  // centers[j][k - 1]
  std::vector<std::vector<double>> centers(times.size());
  for (std::size_t j = 0; j < times.size(); ++j) {
    for (std::size_t k = 1; k <= generations; ++k) {
      centers[j].push_back(on_grid ? centering_value(config, k, times[j], ensemble.centering)
                                   : ensemble.generations[k - 1].center);
    }
  }
  out << "replica,k,t,Y,clt_stat,lil_stat\n";
  for (const auto& outcome : ensemble.outcomes) {
    for (std::size_t k = 1; k <= generations; ++k) {
      for (std::size_t j = 0; j < times.size(); ++j) {
        const double t = times[j];
        const std::uint64_t y = on_grid ? outcome.path[j][k - 1] : outcome.count(k);
        const double center = centers[j][k - 1];
        out << outcome.replica << ',' << k << ',' << format_g17(t) << ',' << y << ',';
        if (t > 0.0 && ensemble.moments.variance > 0.0) {
          out << format_g17(clt_statistic(static_cast<double>(y), k, t, ensemble.moments, center));
        }
        out << ',';
        if (t > std::numbers::e && ensemble.moments.variance > 0.0) {
          out << format_g17(lil_statistic(static_cast<double>(y), k, t, ensemble.moments, center,
                                          ensemble.centering)
                                .value);
        }
        out << '\n';
      }
    }
  }
}

void write_rrt_csv(std::ostream& out, const std::vector<ProfileTrace>& traces) {
  out << "replica,n,k,X,statistic\n";
  for (std::size_t r = 0; r < traces.size(); ++r) {
    const auto& trace = traces[r];
    const bool defined = static_cast<double>(trace.n) > std::exp(std::numbers::e);
    for (std::size_t k = 1; k <= trace.max_level; ++k) {
      const auto x = trace.level(k);
      out << r << ',' << trace.n << ',' << k << ',' << x << ',';
      if (defined) out << format_g17(rrt_lil_statistic(static_cast<double>(x), trace.n, k));
      out << '\n';
    }
  }
}

void write_gauss_csv(std::ostream& out, const std::vector<GaussSample>& samples) {
  out << "replica,t,B1k,B2k\n";
  for (const auto& sample : samples) {
    out << sample.replica << ',' << format_g17(sample.t) << ',' << format_g17(sample.b1k) << ','
        << format_g17(sample.b2k) << '\n';
  }
}

}  // namespace iterlog
