#pragma once

#include <string>
#include <vector>

namespace pvs {

/// Simple metric table: one header row, string cells (numbers pre-formatted
/// with fixed precision so serialization is deterministic).
struct ReportTable {
  std::vector<std::string> columns;
  std::vector<std::vector<std::string>> rows;
};

std::string format_metric(double value);

std::string table_to_csv(const ReportTable& table);
std::string table_to_json(const ReportTable& table);

/// Line plot of one or more series over a shared x axis (e.g. metric vs
/// frame count).
struct PlotSeries {
  std::string label;
  std::vector<double> x;
  std::vector<double> y;
};
std::string svg_line_plot(const std::vector<PlotSeries>& series, const std::string& x_label,
                          const std::string& y_label, int width = 640, int height = 420);

/// Heatmap over a parameter grid (e.g. score as a function of two
/// temperatures).
std::string svg_heatmap(const std::vector<double>& values, int cols, int rows,
                        const std::vector<double>& x_ticks, const std::vector<double>& y_ticks,
                        const std::string& x_label, const std::string& y_label, int width = 640,
                        int height = 480);

enum class ReportFormat { csv, json, svg_plot };

/// Writes a table (csv/json) or plot (svg) to disk; serialization is
/// byte-deterministic for identical inputs.
void emit_report(const ReportTable& table, ReportFormat format, const std::string& path);
void emit_plot(const std::vector<PlotSeries>& series, const std::string& x_label,
               const std::string& y_label, const std::string& path);

}  // namespace pvs
