#pragma once

#include <filesystem>
#include <ostream>
#include <string>
#include <vector>

#include "iterlog/cmj.hpp"
#include "iterlog/error.hpp"
#include "iterlog/gauss.hpp"
#include "iterlog/rrt.hpp"

namespace iterlog {

/// Raised when an output file cannot be written.
class OutputError : public Error {
 public:
  using Error::Error;
};

struct Series {
  std::string label;
  std::vector<double> x;
  std::vector<double> y;
};

struct PlotSpec {
  std::string title;
  std::string x_label;
  std::string y_label;
  std::vector<Series> series;
  /// Dashed horizontal annotations, e.g. +1 and -1.
  std::vector<double> reference_lines;
};

/// Self-contained SVG document; throws on an empty plot.
std::string render_svg(const PlotSpec& spec);

/// Writes render_svg(spec) to `path`. Nothing is created on error.
void emit_plot(const PlotSpec& spec, const std::filesystem::path& path);

/// replica,k,t,Y,clt_stat,lil_stat with one row per grid time (or just the
/// horizon); lil_stat is empty where t <= e.
void write_cmj_csv(std::ostream& out, const SimConfig& config, const EnsembleSummary& ensemble);

/// replica,n,k,X,statistic; statistic is empty where n <= e^e.
void write_rrt_csv(std::ostream& out, const std::vector<ProfileTrace>& traces);

/// replica,t,B1k,B2k
void write_gauss_csv(std::ostream& out, const std::vector<GaussSample>& samples);

/// Writes `text` to `path`, raising OutputError on failure.
void write_file(const std::filesystem::path& path, const std::string& text);

}  // namespace iterlog
