#include "solace/report.hpp"

#include <algorithm>
#include <array>
#include <cstdio>
#include <fstream>
#include <sstream>

namespace solace {

namespace {

std::string fmt(const char* pattern, double v) {
  std::array<char, 64> buf{};
  std::snprintf(buf.data(), buf.size(), pattern, v);
  return buf.data();
}

std::string time_text(double t) { return fmt("%.10g", t); }

std::string csv_field(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + "\"";
}

std::string xml_escape(const std::string& s) {
  std::string out;
  for (char c : s) {
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

std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> fields;
  std::string cur;
  bool quoted = false;
  for (size_t i = 0; i < line.size(); ++i) {
    const char c = line[i];
    if (quoted) {
      if (c == '"' && i + 1 < line.size() && line[i + 1] == '"') {
        cur += '"';
        ++i;
      } else if (c == '"') {
        quoted = false;
      } else {
        cur += c;
      }
    } else if (c == '"') {
      quoted = true;
    } else if (c == ',') {
      fields.push_back(cur);
      cur.clear();
    } else if (c != '\r') {
      cur += c;
    }
  }
  fields.push_back(cur);
  return fields;
}

constexpr std::array<const char*, 8> kPalette = {"#1f77b4", "#d62728", "#2ca02c", "#ff7f0e",
                                                 "#9467bd", "#8c564b", "#e377c2", "#17becf"};

}  // namespace

void write_run_csv(std::ostream& out, std::span<const MetricsFrame> frames) {
  out << kRunCsvHeader << '\n';
  for (const auto& f : frames) {
    out << time_text(f.t);
    for (size_t c = 0; c < kCategories; ++c)
      out << ',' << f.arrived[c] << ',' << fmt("%.6f", f.fraction(static_cast<Category>(c)));
    out << ',' << f.trapped << ',' << f.enroute << ',' << f.preevac << '\n';
  }
}

void write_trace_csv(std::ostream& out, std::span<const TraceEvent> trace) {
  out << kTraceCsvHeader << '\n';
  for (const auto& e : trace)
    out << time_text(e.t) << ',' << e.agent << ',' << csv_field(e.event) << ',' << csv_field(e.detail) << '\n';
}

void write_summary_csv(std::ostream& out, std::span<const CategorySummary> summary) {
  out << kSummaryCsvHeader << '\n';
  for (const auto& s : summary)
    out << csv_field(s.scenario) << ',' << to_string(s.category) << ',' << fmt("%.6f", s.mean_final) << ','
        << fmt("%.6f", s.sd_final) << ',' << s.n << '\n';
}

int CsvTable::column(const std::string& name) const {
  const auto it = std::find(header.begin(), header.end(), name);
  return it == header.end() ? -1 : static_cast<int>(it - header.begin());
}

CsvTable read_csv(std::istream& in) {
  CsvTable t;
  std::string line;
  bool first = true;
  while (std::getline(in, line)) {
    if (line.empty() || line == "\r") continue;
    auto fields = split_csv_line(line);
    if (first) {
      t.header = std::move(fields);
      first = false;
    } else {
      t.rows.push_back(std::move(fields));
    }
  }
  return t;
}

CsvTable read_csv(const std::filesystem::path& file) {
  std::ifstream in(file);
  if (!in) throw ChartError("cannot open " + file.string());
  return read_csv(in);
}

std::string render_chart(const ChartSpec& spec) {
  if (spec.inputs.empty()) throw ChartError("no data: no input CSV given");
  if (spec.series.empty()) throw ChartError("no data: no series selected");

  struct Series {
    std::string label;
    std::vector<std::pair<std::string, std::string>> points;  // verbatim text
  };
  std::vector<Series> all;
  double t_max = 0.0;
  std::vector<std::string> grid;
  for (const auto& input : spec.inputs) {
    const CsvTable table = read_csv(input);
    const int tc = table.column("t");
    if (tc < 0) throw ChartError(input.string() + ": missing column t");
    std::vector<std::string> times;
    for (const auto& row : table.rows)
      if (static_cast<int>(row.size()) > tc) times.push_back(row[tc]);
    if (&input == &spec.inputs.front())
      grid = times;
    else if (times != grid)
      throw ChartError(input.string() + ": t column differs from " + spec.inputs.front().string());
    for (const auto& name : spec.series) {
      const std::string col = name + "_frac";
      const int yc = table.column(col);
      if (yc < 0) throw ChartError(input.string() + ": missing column " + col);
      Series s;
      s.label = spec.inputs.size() > 1 ? input.stem().string() + " " + name : name;
      for (size_t r = 0; r < table.rows.size(); ++r) {
        const auto& row = table.rows[r];
        if (static_cast<int>(row.size()) <= std::max(tc, yc))
          throw ChartError(input.string() + ": row " + std::to_string(r + 2) + " is too short");
        try {
          t_max = std::max(t_max, std::stod(row[tc]));
          (void)std::stod(row[yc]);
        } catch (const std::exception&) {
          throw ChartError(input.string() + ": row " + std::to_string(r + 2) + " is not numeric");
        }
        s.points.emplace_back(row[tc], row[yc]);
      }
      if (s.points.empty()) throw ChartError("no data: " + input.string() + " has no rows");
      all.push_back(std::move(s));
    }
  }
  if (t_max <= 0.0) t_max = 1.0;

  const double width = 800, height = 500, left = 70, right = 160, top = 50, bottom = 60;
  const double pw = width - left - right, ph = height - top - bottom;
  std::ostringstream svg;
  svg << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << width << "\" height=\"" << height
      << "\" viewBox=\"0 0 " << width << ' ' << height << "\" font-family=\"sans-serif\" font-size=\"12\">\n";
  svg << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  svg << "<text x=\"" << width / 2 << "\" y=\"25\" text-anchor=\"middle\" font-size=\"16\">" << xml_escape(spec.title)
      << "</text>\n";

  // Axes, ticks and grid.
  svg << "<g stroke=\"#444\" stroke-width=\"1\">\n";
  svg << "<line x1=\"" << left << "\" y1=\"" << top + ph << "\" x2=\"" << left + pw << "\" y2=\"" << top + ph
      << "\"/>\n";
  svg << "<line x1=\"" << left << "\" y1=\"" << top << "\" x2=\"" << left << "\" y2=\"" << top + ph << "\"/>\n";
  svg << "</g>\n";
  for (int i = 0; i <= 5; ++i) {
    const double y = top + ph - ph * i / 5.0;
    svg << "<line x1=\"" << left << "\" y1=\"" << y << "\" x2=\"" << left + pw << "\" y2=\"" << y
        << "\" stroke=\"#ddd\"/>\n";
    svg << "<text x=\"" << left - 8 << "\" y=\"" << y + 4 << "\" text-anchor=\"end\">" << fmt("%.1f", i / 5.0)
        << "</text>\n";
    const double x = left + pw * i / 5.0;
    svg << "<text x=\"" << x << "\" y=\"" << top + ph + 18 << "\" text-anchor=\"middle\">"
        << fmt("%g", t_max * i / 5.0) << "</text>\n";
  }
  svg << "<text x=\"" << left + pw / 2 << "\" y=\"" << height - 15 << "\" text-anchor=\"middle\">t (s)</text>\n";
  svg << "<text transform=\"translate(20," << top + ph / 2
      << ") rotate(-90)\" text-anchor=\"middle\">arrival fraction</text>\n";

  // Data in (t, fraction) coordinates.
  svg << "<g transform=\"translate(" << left << ',' << top + ph << ") scale(" << fmt("%.10g", pw / t_max) << ','
      << fmt("%.10g", -ph) << ")\" fill=\"none\" stroke-width=\"2\">\n";
  for (size_t i = 0; i < all.size(); ++i) {
    svg << "<polyline class=\"series\" data-label=\"" << xml_escape(all[i].label) << "\" stroke=\""
        << kPalette[i % kPalette.size()] << "\" vector-effect=\"non-scaling-stroke\" points=\"";
    for (size_t p = 0; p < all[i].points.size(); ++p)
      svg << (p ? " " : "") << all[i].points[p].first << ',' << all[i].points[p].second;
    svg << "\"/>\n";
  }
  svg << "</g>\n";

  svg << "<g class=\"legend\">\n";
  for (size_t i = 0; i < all.size(); ++i) {
    const double y = top + 10 + 20.0 * i;
    svg << "<line x1=\"" << left + pw + 15 << "\" y1=\"" << y << "\" x2=\"" << left + pw + 40 << "\" y2=\"" << y
        << "\" stroke=\"" << kPalette[i % kPalette.size()] << "\" stroke-width=\"2\"/>\n";
    svg << "<text x=\"" << left + pw + 45 << "\" y=\"" << y + 4 << "\">" << xml_escape(all[i].label) << "</text>\n";
  }
  svg << "</g>\n</svg>\n";
  return svg.str();
}

}  // namespace solace
