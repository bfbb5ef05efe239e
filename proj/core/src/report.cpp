#include "mecrl/report.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <limits>
#include <sstream>

#include "mecrl/checkpoint.hpp"
#include "mecrl/error.hpp"

namespace mecrl::harness {

namespace {

using nn::format_double;

std::vector<std::string> split(const std::string& line, char sep) {
  std::vector<std::string> out;
  std::string cur;
  for (char c : line) {
    if (c == sep) {
      out.push_back(cur);
      cur.clear();
    } else {
      cur += c;
    }
  }
  out.push_back(cur);
  return out;
}

double parse_double(const std::string& s) {
  double v = 0.0;
  const auto res = std::from_chars(s.data(), s.data() + s.size(), v);
  if (res.ec != std::errc() || res.ptr != s.data() + s.size()) throw ParseError("not a number: '" + s + "'");
  return v;
}

std::string xml_escape(const std::string& s) {
  std::string out;
  for (char c : s) {
    switch (c) {
      case '&':
        out += "&amp;";
        break;
      case '<':
        out += "&lt;";
        break;
      case '>':
        out += "&gt;";
        break;
      case '"':
        out += "&quot;";
        break;
      default:
        out += c;
    }
  }
  return out;
}

// Fixed-precision coordinate text keeps the markup compact.
std::string coord(double v) {
  char buf[32];
  const auto res = std::to_chars(buf, buf + sizeof(buf), v, std::chars_format::fixed, 2);
  return std::string(buf, res.ptr);
}

std::string tick_label(double v) {
  char buf[32];
  const double mag = std::abs(v);
  const int prec = mag >= 100 ? 0 : mag >= 10 ? 1 : mag >= 1 ? 2 : 3;
  const auto res = std::to_chars(buf, buf + sizeof(buf), v, std::chars_format::fixed, prec);
  return std::string(buf, res.ptr);
}

constexpr const char* kPalette[] = {"#1f77b4", "#d62728", "#2ca02c", "#ff7f0e", "#9467bd", "#8c564b"};

}  // namespace

void write_text(const std::filesystem::path& path, const std::string& text) {
  if (path.has_parent_path()) {
    std::error_code ec;
    std::filesystem::create_directories(path.parent_path(), ec);
    if (ec) throw IoError("cannot create " + path.parent_path().string() + ": " + ec.message());
  }
  std::ofstream os(path, std::ios::binary);
  if (!os) throw IoError("cannot open " + path.string() + " for writing");
  os << text;
  if (!os) throw IoError("failed writing " + path.string());
}

std::string aggregate_csv(const AggregateSeries& agg, const std::vector<RunSeries>& runs) {
  for (const auto& r : runs)
    if (r.size() != agg.size()) throw_dimension("write_csv run length", agg.size(), r.size());
  std::string out = "episode,mean_return,std_return";
  for (std::size_t k = 0; k < runs.size(); ++k) out += ",run" + std::to_string(k);
  out += '\n';
  for (std::size_t e = 0; e < agg.size(); ++e) {
    out += std::to_string(e) + ',' + format_double(agg.mean[e]) + ',' + format_double(agg.std[e]);
    for (const auto& r : runs) out += ',' + format_double(r.records[e].mean_true_return);
    out += '\n';
  }
  return out;
}

void write_csv(const AggregateSeries& agg, const std::vector<RunSeries>& runs, const std::filesystem::path& path) {
  write_text(path, aggregate_csv(agg, runs));
}

std::string run_csv(const RunSeries& run) {
  const std::size_t users = run.records.empty() ? 0 : run.records[0].true_return.size();
  std::string out = "episode,mean_true_return,sigma";
  for (std::size_t m = 0; m < users; ++m) out += ",true_u" + std::to_string(m);
  for (std::size_t m = 0; m < users; ++m) out += ",perceived_u" + std::to_string(m);
  out += '\n';
  for (const auto& r : run.records) {
    out += std::to_string(r.episode) + ',' + format_double(r.mean_true_return) + ',' + format_double(r.sigma);
    for (double v : r.true_return) out += ',' + format_double(v);
    for (double v : r.perceived_return) out += ',' + format_double(v);
    out += '\n';
  }
  return out;
}

void write_run_csv(const RunSeries& run, const std::filesystem::path& path) { write_text(path, run_csv(run)); }

AggregateTable parse_aggregate_csv(const std::string& text) {
  std::istringstream is(text);
  std::string line;
  if (!std::getline(is, line)) throw ParseError("aggregate csv is empty");
  const auto header = split(line, ',');
  if (header.size() < 3 || header[0] != "episode" || header[1] != "mean_return" || header[2] != "std_return")
    throw ParseError("aggregate csv has an unexpected header");
  const std::size_t n_runs = header.size() - 3;
  AggregateTable t;
  t.runs.assign(n_runs, {});
  std::size_t lineno = 1;
  while (std::getline(is, line)) {
    ++lineno;
    if (line.empty()) continue;
    const auto cells = split(line, ',');
    if (cells.size() != header.size())
      throw ParseError("aggregate csv line " + std::to_string(lineno) + " has " + std::to_string(cells.size()) +
                       " fields, expected " + std::to_string(header.size()));
    t.episodes.push_back(static_cast<std::size_t>(parse_double(cells[0])));
    t.agg.mean.push_back(parse_double(cells[1]));
    t.agg.std.push_back(parse_double(cells[2]));
    for (std::size_t k = 0; k < n_runs; ++k) t.runs[k].push_back(parse_double(cells[3 + k]));
  }
  return t;
}

AggregateTable read_aggregate_csv(const std::filesystem::path& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw IoError("cannot read " + path.string());
  std::ostringstream ss;
  ss << is.rdbuf();
  return parse_aggregate_csv(ss.str());
}

std::string render_svg_string(const std::vector<LabeledSeries>& series) {
  if (series.empty()) throw InsufficientDataError("render_svg: no series to draw");
  constexpr double width = 800, height = 480;
  constexpr double left = 80, right = 180, top = 30, bottom = 60;
  const double plot_w = width - left - right;
  const double plot_h = height - top - bottom;

  std::size_t max_len = 0;
  double lo = std::numeric_limits<double>::infinity();
  double hi = -std::numeric_limits<double>::infinity();
  for (const auto& [label, s] : series) {
    if (s.mean.size() != s.std.size()) throw DimensionError("render_svg: mean/std length mismatch");
    max_len = std::max(max_len, s.size());
    for (std::size_t e = 0; e < s.size(); ++e) {
      lo = std::min(lo, s.mean[e] - s.std[e]);
      hi = std::max(hi, s.mean[e] + s.std[e]);
    }
  }
  if (max_len == 0) throw InsufficientDataError("render_svg: series are empty");
  if (!(hi > lo)) {
    const double pad = std::max(1.0, std::abs(lo) * 0.05);
    lo -= pad;
    hi += pad;
  }
  const double x_span = max_len > 1 ? static_cast<double>(max_len - 1) : 1.0;
  auto sx = [&](double e) { return left + plot_w * (e / x_span); };
  auto sy = [&](double v) { return top + plot_h * (1.0 - (v - lo) / (hi - lo)); };

  std::ostringstream os;
  os << "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n";
  os << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << width << "\" height=\"" << height
     << "\" viewBox=\"0 0 " << width << ' ' << height << "\">\n";
  os << "<rect x=\"0\" y=\"0\" width=\"" << width << "\" height=\"" << height << "\" fill=\"white\"/>\n";

  // Axes and ticks.
  os << "<g class=\"axes\" stroke=\"black\" stroke-width=\"1\">\n";
  os << "<line x1=\"" << coord(left) << "\" y1=\"" << coord(top + plot_h) << "\" x2=\"" << coord(left + plot_w)
     << "\" y2=\"" << coord(top + plot_h) << "\"/>\n";
  os << "<line x1=\"" << coord(left) << "\" y1=\"" << coord(top) << "\" x2=\"" << coord(left) << "\" y2=\""
     << coord(top + plot_h) << "\"/>\n";
  os << "</g>\n<g class=\"ticks\" font-family=\"sans-serif\" font-size=\"11\">\n";
  constexpr int kTicks = 5;
  for (int i = 0; i <= kTicks; ++i) {
    const double e = x_span * i / kTicks;
    const double x = sx(e);
    os << "<line x1=\"" << coord(x) << "\" y1=\"" << coord(top + plot_h) << "\" x2=\"" << coord(x) << "\" y2=\""
       << coord(top + plot_h + 5) << "\" stroke=\"black\"/>\n";
    os << "<text x=\"" << coord(x) << "\" y=\"" << coord(top + plot_h + 18) << "\" text-anchor=\"middle\">"
       << tick_label(std::round(e)) << "</text>\n";
    const double v = lo + (hi - lo) * i / kTicks;
    const double y = sy(v);
    os << "<line x1=\"" << coord(left - 5) << "\" y1=\"" << coord(y) << "\" x2=\"" << coord(left) << "\" y2=\""
       << coord(y) << "\" stroke=\"black\"/>\n";
    os << "<text x=\"" << coord(left - 8) << "\" y=\"" << coord(y + 4) << "\" text-anchor=\"end\">" << tick_label(v)
       << "</text>\n";
  }
  os << "<text x=\"" << coord(left + plot_w / 2) << "\" y=\"" << coord(height - 15)
     << "\" text-anchor=\"middle\">episode</text>\n";
  os << "<text x=\"20\" y=\"" << coord(top + plot_h / 2) << "\" text-anchor=\"middle\" transform=\"rotate(-90 20 "
     << coord(top + plot_h / 2) << ")\">mean true return</text>\n";
  os << "</g>\n";

  for (std::size_t i = 0; i < series.size(); ++i) {
    const auto& [label, s] = series[i];
    const char* color = kPalette[i % std::size(kPalette)];
    os << "<g class=\"series\" data-label=\"" << xml_escape(label) << "\">\n";
    os << "<polygon class=\"band\" fill=\"" << color << "\" fill-opacity=\"0.2\" stroke=\"none\" points=\"";
    for (std::size_t e = 0; e < s.size(); ++e)
      os << coord(sx(static_cast<double>(e))) << ',' << coord(sy(s.mean[e] + s.std[e])) << ' ';
    for (std::size_t e = s.size(); e-- > 0;)
      os << coord(sx(static_cast<double>(e))) << ',' << coord(sy(s.mean[e] - s.std[e])) << ' ';
    os << "\"/>\n";
    os << "<polyline class=\"mean\" fill=\"none\" stroke=\"" << color << "\" stroke-width=\"1.5\" points=\"";
    for (std::size_t e = 0; e < s.size(); ++e)
      os << coord(sx(static_cast<double>(e))) << ',' << coord(sy(s.mean[e])) << ' ';
    os << "\"/>\n</g>\n";
  }

  os << "<g class=\"legend\" font-family=\"sans-serif\" font-size=\"12\">\n";
  for (std::size_t i = 0; i < series.size(); ++i) {
    const double y = top + 10 + 20.0 * static_cast<double>(i);
    const char* color = kPalette[i % std::size(kPalette)];
    os << "<rect x=\"" << coord(left + plot_w + 20) << "\" y=\"" << coord(y - 9) << "\" width=\"14\" height=\"10\" fill=\""
       << color << "\"/>\n";
    os << "<text class=\"legend-entry\" x=\"" << coord(left + plot_w + 40) << "\" y=\"" << coord(y) << "\">"
       << xml_escape(series[i].first) << "</text>\n";
  }
  os << "</g>\n</svg>\n";
  return os.str();
}

void render_svg(const std::vector<LabeledSeries>& series, const std::filesystem::path& path) {
  write_text(path, render_svg_string(series));
}

}  // namespace mecrl::harness
