#pragma once

#include <filesystem>
#include <iosfwd>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "solace/engine.hpp"

namespace solace {

inline constexpr const char* kRunCsvHeader =
    "t,adult_arr,adult_frac,elderly_arr,elderly_frac,child_arr,child_frac,disabled_arr,disabled_frac,all_arr,"
    "all_frac,trapped,enroute,preevac";
inline constexpr const char* kTraceCsvHeader = "t,agent_id,event,detail";
inline constexpr const char* kSummaryCsvHeader = "scenario,category,mean_final_frac,sd,n";

void write_run_csv(std::ostream& out, std::span<const MetricsFrame> frames);
void write_trace_csv(std::ostream& out, std::span<const TraceEvent> trace);
void write_summary_csv(std::ostream& out, std::span<const CategorySummary> summary);

struct CsvTable {
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;

  // Column index, or -1.
  int column(const std::string& name) const;
};

CsvTable read_csv(std::istream& in);
CsvTable read_csv(const std::filesystem::path& file);

class ChartError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct ChartSpec {
  std::vector<std::filesystem::path> inputs;
  std::vector<std::string> series = {"all"};  // categories; column `<name>_frac`
  std::filesystem::path output;
  std::string title = "Arrivals";
};

// One polyline per (input, series). Points are in data coordinates (t, fraction)
// copied verbatim from the CSV; the enclosing group maps them onto the plot area.
std::string render_chart(const ChartSpec& spec);

}  // namespace solace
