/// \file report.hpp
/// \brief CSV tables (RFC 4180, 17 significant digits) and SVG line plots
/// drawn from those CSV files.
#pragma once

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "willmore/error.hpp"

namespace willmore::report {

inline std::string num(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}
inline std::string num(int v) { return std::to_string(v); }

/// Short form for labels and messages.
inline std::string label(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.6g", v);
  return buf;
}

inline std::string csv_field(const std::string& s) {
  if (s.find_first_of(",\"\r\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + "\"";
}

struct Column {
  std::string name;
  std::string description;
};

struct Table {
  std::string name;  // file stem
  std::vector<Column> columns;
  std::vector<std::vector<std::string>> rows;

  void add_row(std::vector<std::string> row) {
    if (row.size() != columns.size())
      throw Error(ErrorKind::ConfigError, "table " + name + ": row width differs from header");
    rows.push_back(std::move(row));
  }

  std::string csv() const {
    std::string out;
    for (size_t i = 0; i < columns.size(); ++i) out += (i ? "," : "") + csv_field(columns[i].name);
    out += "\r\n";
    for (const auto& r : rows) {
      for (size_t i = 0; i < r.size(); ++i) out += (i ? "," : "") + csv_field(r[i]);
      out += "\r\n";
    }
    return out;
  }

  void write(const std::string& path) const {
    std::ofstream f(path, std::ios::binary);
    if (!f) throw Error(ErrorKind::ConfigError, "cannot write " + path);
    f << csv();
  }
};

/// Minimal RFC 4180 reader (header row plus string cells).
inline std::pair<std::vector<std::string>, std::vector<std::vector<std::string>>> read_csv(const std::string& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw Error(ErrorKind::ConfigError, "cannot read " + path);
  std::stringstream ss;
  ss << f.rdbuf();
  const std::string text = ss.str();
  std::vector<std::vector<std::string>> records;
  std::vector<std::string> rec;
  std::string cell;
  bool quoted = false;
  for (size_t i = 0; i < text.size(); ++i) {
    const char c = text[i];
    if (quoted) {
      if (c == '"' && i + 1 < text.size() && text[i + 1] == '"') {
        cell += '"';
        ++i;
      } else if (c == '"') {
        quoted = false;
      } else {
        cell += c;
      }
    } else if (c == '"') {
      quoted = true;
    } else if (c == ',') {
      rec.push_back(cell);
      cell.clear();
    } else if (c == '\n') {
      rec.push_back(cell);
      cell.clear();
      records.push_back(rec);
      rec.clear();
    } else if (c != '\r') {
      cell += c;
    }
  }
  if (!cell.empty() || !rec.empty()) {
    rec.push_back(cell);
    records.push_back(rec);
  }
  if (records.empty()) throw Error(ErrorKind::ConfigError, "empty CSV " + path);
  std::vector<std::string> header = records.front();
  records.erase(records.begin());
  return {header, records};
}

struct PlotSpec {
  std::string title;
  std::string x_column;
  std::vector<std::string> y_columns;
  bool log_x = false;
  bool log_y = false;
  bool abs_y = false;  // plot |y| (needed with log_y for signed data)
};

/// Renders selected columns of a CSV file as a self-contained SVG line plot.
inline std::string svg_from_csv(const std::string& csv_path, const PlotSpec& spec) {
  const auto [header, rows] = read_csv(csv_path);
  auto col = [&](const std::string& name) {
    const auto it = std::find(header.begin(), header.end(), name);
    if (it == header.end()) throw Error(ErrorKind::ConfigError, "no column " + name + " in " + csv_path);
    return static_cast<size_t>(it - header.begin());
  };
  const size_t xc = col(spec.x_column);
  struct Series {
    std::string name;
    std::vector<std::pair<double, double>> pts;
  };
  std::vector<Series> series;
  double xmin = INFINITY, xmax = -INFINITY, ymin = INFINITY, ymax = -INFINITY;
  auto tx = [&](double v) { return spec.log_x ? std::log10(v) : v; };
  auto ty = [&](double v) {
    if (spec.abs_y) v = std::abs(v);
    return spec.log_y ? std::log10(v) : v;
  };
  for (const auto& yname : spec.y_columns) {
    Series s{yname, {}};
    const size_t yc = col(yname);
    for (const auto& r : rows) {
      if (r.size() <= std::max(xc, yc)) continue;
      char* e1 = nullptr;
      char* e2 = nullptr;
      const double x = std::strtod(r[xc].c_str(), &e1), y = std::strtod(r[yc].c_str(), &e2);
      if (e1 == r[xc].c_str() || e2 == r[yc].c_str()) continue;
      const double X = tx(x), Y = ty(y);
      if (!std::isfinite(X) || !std::isfinite(Y)) continue;
      s.pts.emplace_back(X, Y);
      xmin = std::min(xmin, X);
      xmax = std::max(xmax, X);
      ymin = std::min(ymin, Y);
      ymax = std::max(ymax, Y);
    }
    series.push_back(std::move(s));
  }
  if (!(xmax > xmin)) {
    xmin -= 1;
    xmax += 1;
  }
  if (!(ymax > ymin)) {
    ymin -= 1;
    ymax += 1;
  }
  const double W = 640, Hh = 420, ml = 80, mr = 20, mt = 40, mb = 60;
  auto px = [&](double x) { return ml + (x - xmin) / (xmax - xmin) * (W - ml - mr); };
  auto py = [&](double y) { return Hh - mb - (y - ymin) / (ymax - ymin) * (Hh - mt - mb); };
  const char* colors[] = {"#1f77b4", "#d62728", "#2ca02c", "#ff7f0e", "#9467bd", "#8c564b"};
  std::ostringstream o;
  char buf[256];
  o << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << W << "\" height=\"" << Hh << "\">\n";
  o << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  o << "<text x=\"" << W / 2 << "\" y=\"24\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"15\">"
    << spec.title << "</text>\n";
  std::snprintf(buf, sizeof buf, "<rect x=\"%g\" y=\"%g\" width=\"%g\" height=\"%g\" fill=\"none\" stroke=\"black\"/>\n",
                ml, mt, W - ml - mr, Hh - mt - mb);
  o << buf;
  for (int k = 0; k <= 4; ++k) {
    const double xv = xmin + k * (xmax - xmin) / 4, yv = ymin + k * (ymax - ymin) / 4;
    std::snprintf(buf, sizeof buf,
                  "<text x=\"%g\" y=\"%g\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"11\">%s%.4g</text>\n",
                  px(xv), Hh - mb + 16, spec.log_x ? "1e" : "", xv);
    o << buf;
    std::snprintf(buf, sizeof buf,
                  "<text x=\"%g\" y=\"%g\" text-anchor=\"end\" font-family=\"sans-serif\" font-size=\"11\">%s%.4g</text>\n",
                  ml - 6, py(yv) + 4, spec.log_y ? "1e" : "", yv);
    o << buf;
  }
  o << "<text x=\"" << W / 2 << "\" y=\"" << Hh - 18
    << "\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"12\">" << spec.x_column << "</text>\n";
  for (size_t s = 0; s < series.size(); ++s) {
    const char* c = colors[s % 6];
    o << "<polyline fill=\"none\" stroke=\"" << c << "\" stroke-width=\"1.5\" points=\"";
    for (const auto& [x, y] : series[s].pts) {
      std::snprintf(buf, sizeof buf, "%.2f,%.2f ", px(x), py(y));
      o << buf;
    }
    o << "\"/>\n";
    for (const auto& [x, y] : series[s].pts) {
      std::snprintf(buf, sizeof buf, "<circle cx=\"%.2f\" cy=\"%.2f\" r=\"3\" fill=\"%s\"/>\n", px(x), py(y), c);
      o << buf;
    }
    std::snprintf(buf, sizeof buf,
                  "<text x=\"%g\" y=\"%g\" font-family=\"sans-serif\" font-size=\"11\" fill=\"%s\">%s%s</text>\n",
                  ml + 8, mt + 14 + 14.0 * s, c, spec.abs_y ? "|" : "", series[s].name.c_str());
    o << buf;
  }
  o << "</svg>\n";
  return o.str();
}

inline void write_svg(const std::string& csv_path, const std::string& svg_path, const PlotSpec& spec) {
  std::ofstream f(svg_path, std::ios::binary);
  if (!f) throw Error(ErrorKind::ConfigError, "cannot write " + svg_path);
  f << svg_from_csv(csv_path, spec);
}

}  // namespace willmore::report
