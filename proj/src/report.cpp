#include "pvs/io/report.hpp"

#include <json.hpp>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace pvs {

std::string format_metric(double value) {
  if (std::isinf(value)) return value > 0 ? "inf" : "-inf";
  if (std::isnan(value)) return "nan";
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.6g", value);
  return buf;
}

std::string table_to_csv(const ReportTable& table) {
  std::ostringstream os;
  for (size_t i = 0; i < table.columns.size(); ++i)
    os << table.columns[i] << (i + 1 < table.columns.size() ? "," : "");
  os << "\n";
  for (const auto& row : table.rows) {
    for (size_t i = 0; i < row.size(); ++i) os << row[i] << (i + 1 < row.size() ? "," : "");
    os << "\n";
  }
  return os.str();
}

std::string table_to_json(const ReportTable& table) {
  nlohmann::json rows = nlohmann::json::array();
  for (const auto& row : table.rows) {
    nlohmann::json r;
    for (size_t i = 0; i < table.columns.size() && i < row.size(); ++i)
      r[table.columns[i]] = row[i];
    rows.push_back(r);
  }
  nlohmann::json j{{"columns", table.columns}, {"rows", rows}};
  return j.dump(2) + "\n";
}

namespace {

std::string fmt(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.2f", v);
  return buf;
}

const char* kSeriesColors[] = {"#d95f02", "#1b9e77", "#7570b3", "#e7298a", "#66a61e", "#e6ab02"};

}  // namespace

std::string svg_line_plot(const std::vector<PlotSeries>& series, const std::string& x_label,
                          const std::string& y_label, int width, int height) {
  double x_min = 0.0, x_max = 1.0, y_min = 0.0, y_max = 1.0;
  bool first = true;
  for (const auto& s : series) {
    for (size_t i = 0; i < s.x.size(); ++i) {
      if (!std::isfinite(s.x[i]) || !std::isfinite(s.y[i])) continue;
      if (first) {
        x_min = x_max = s.x[i];
        y_min = y_max = s.y[i];
        first = false;
      } else {
        x_min = std::min(x_min, s.x[i]);
        x_max = std::max(x_max, s.x[i]);
        y_min = std::min(y_min, s.y[i]);
        y_max = std::max(y_max, s.y[i]);
      }
    }
  }
  if (x_max == x_min) x_max = x_min + 1.0;
  if (y_max == y_min) y_max = y_min + 1.0;

  const double ml = 60, mr = 20, mt = 20, mb = 45;
  const double pw = width - ml - mr, ph = height - mt - mb;
  auto sx = [&](double x) { return ml + (x - x_min) / (x_max - x_min) * pw; };
  auto sy = [&](double y) { return mt + (1.0 - (y - y_min) / (y_max - y_min)) * ph; };

  std::ostringstream os;
  os << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << width << "\" height=\"" << height
     << "\">\n";
  os << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  os << "<rect x=\"" << fmt(ml) << "\" y=\"" << fmt(mt) << "\" width=\"" << fmt(pw)
     << "\" height=\"" << fmt(ph) << "\" fill=\"none\" stroke=\"#333\"/>\n";
  os << "<text x=\"" << fmt(ml + pw / 2) << "\" y=\"" << fmt(double(height) - 8)
     << "\" text-anchor=\"middle\" font-size=\"13\">" << x_label << "</text>\n";
  os << "<text x=\"14\" y=\"" << fmt(mt + ph / 2)
     << "\" text-anchor=\"middle\" font-size=\"13\" transform=\"rotate(-90 14 " << fmt(mt + ph / 2)
     << ")\">" << y_label << "</text>\n";
  for (int k = 0; k <= 4; ++k) {
    const double xv = x_min + (x_max - x_min) * k / 4.0;
    const double yv = y_min + (y_max - y_min) * k / 4.0;
    os << "<text x=\"" << fmt(sx(xv)) << "\" y=\"" << fmt(mt + ph + 16)
       << "\" text-anchor=\"middle\" font-size=\"11\">" << format_metric(xv) << "</text>\n";
    os << "<text x=\"" << fmt(ml - 6) << "\" y=\"" << fmt(sy(yv) + 4)
       << "\" text-anchor=\"end\" font-size=\"11\">" << format_metric(yv) << "</text>\n";
  }
  for (size_t si = 0; si < series.size(); ++si) {
    const auto& s = series[si];
    os << "<polyline fill=\"none\" stroke=\"" << kSeriesColors[si % 6]
       << "\" stroke-width=\"1.5\" points=\"";
    for (size_t i = 0; i < s.x.size(); ++i) os << fmt(sx(s.x[i])) << "," << fmt(sy(s.y[i])) << " ";
    os << "\"/>\n";
    os << "<text x=\"" << fmt(ml + pw - 6) << "\" y=\"" << fmt(mt + 16 + 14 * double(si))
       << "\" text-anchor=\"end\" font-size=\"12\" fill=\"" << kSeriesColors[si % 6] << "\">"
       << s.label << "</text>\n";
  }
  os << "</svg>\n";
  return os.str();
}

std::string svg_heatmap(const std::vector<double>& values, int cols, int rows,
                        const std::vector<double>& x_ticks, const std::vector<double>& y_ticks,
                        const std::string& x_label, const std::string& y_label, int width,
                        int height) {
  if (values.size() != size_t(cols) * rows) throw std::invalid_argument("svg_heatmap: size mismatch");
  double v_min = values.empty() ? 0.0 : values.front();
  double v_max = v_min;
  for (double v : values) {
    v_min = std::min(v_min, v);
    v_max = std::max(v_max, v);
  }
  if (v_max == v_min) v_max = v_min + 1.0;

  const double ml = 60, mr = 20, mt = 20, mb = 45;
  const double pw = width - ml - mr, ph = height - mt - mb;
  const double cw = pw / cols, ch = ph / rows;

  std::ostringstream os;
  os << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << width << "\" height=\"" << height
     << "\">\n<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  for (int r = 0; r < rows; ++r) {
    for (int c = 0; c < cols; ++c) {
      const double t = (values[size_t(r) * cols + c] - v_min) / (v_max - v_min);
      const int red = int(std::lround(255 * t));
      const int blue = int(std::lround(255 * (1.0 - t)));
      os << "<rect x=\"" << fmt(ml + c * cw) << "\" y=\"" << fmt(mt + (rows - 1 - r) * ch)
         << "\" width=\"" << fmt(cw + 0.5) << "\" height=\"" << fmt(ch + 0.5) << "\" fill=\"rgb("
         << red << ",64," << blue << ")\"/>\n";
    }
  }
  os << "<text x=\"" << fmt(ml + pw / 2) << "\" y=\"" << fmt(double(height) - 8)
     << "\" text-anchor=\"middle\" font-size=\"13\">" << x_label << "</text>\n";
  os << "<text x=\"14\" y=\"" << fmt(mt + ph / 2)
     << "\" text-anchor=\"middle\" font-size=\"13\" transform=\"rotate(-90 14 " << fmt(mt + ph / 2)
     << ")\">" << y_label << "</text>\n";
  if (!x_ticks.empty()) {
    os << "<text x=\"" << fmt(ml) << "\" y=\"" << fmt(mt + ph + 16)
       << "\" font-size=\"11\">" << format_metric(x_ticks.front()) << "</text>\n";
    os << "<text x=\"" << fmt(ml + pw) << "\" y=\"" << fmt(mt + ph + 16)
       << "\" text-anchor=\"end\" font-size=\"11\">" << format_metric(x_ticks.back()) << "</text>\n";
  }
  if (!y_ticks.empty()) {
    os << "<text x=\"" << fmt(ml - 6) << "\" y=\"" << fmt(mt + ph)
       << "\" text-anchor=\"end\" font-size=\"11\">" << format_metric(y_ticks.front()) << "</text>\n";
    os << "<text x=\"" << fmt(ml - 6) << "\" y=\"" << fmt(mt + 10)
       << "\" text-anchor=\"end\" font-size=\"11\">" << format_metric(y_ticks.back()) << "</text>\n";
  }
  os << "</svg>\n";
  return os.str();
}

void emit_report(const ReportTable& table, ReportFormat format, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error(path + ": cannot open for writing");
  switch (format) {
    case ReportFormat::csv:
      out << table_to_csv(table);
      break;
    case ReportFormat::json:
      out << table_to_json(table);
      break;
    case ReportFormat::svg_plot:
      throw std::invalid_argument("emit_report: use emit_plot for svg output");
  }
}

void emit_plot(const std::vector<PlotSeries>& series, const std::string& x_label,
               const std::string& y_label, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error(path + ": cannot open for writing");
  out << svg_line_plot(series, x_label, y_label);
}

}  // namespace pvs
