#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "ciindex/config.hpp"
#include "ciindex/index.hpp"

namespace ciindex {

/// One estimator's externally reported performance.
struct ExternalPerformanceRow {
  std::string estimator;
  std::vector<std::pair<std::string, std::string>> group_keys;  ///< column order
  double coverage = 0.0;
  double mean_length = 0.0;
  std::vector<std::string> extra;  ///< columns after `length`, passed through
  std::size_t line = 0;            ///< source line, 0 if built in memory
};

struct ReportRow {
  ExternalPerformanceRow row;
  double index = 0.0;
  std::size_t rank = 1;  ///< 1 = largest index within the group
};

/// Parsed apply-mode table: `estimator,<group...>,coverage,length[,<extra...>]`.
/// Lines starting with '#' are ignored.
struct PerformanceTable {
  std::vector<std::string> group_columns;
  std::vector<std::string> extra_columns;
  std::vector<ExternalPerformanceRow> rows;
};

PerformanceTable read_performance_table(std::istream& in, const std::string& source);
PerformanceTable load_performance_table(const std::filesystem::path& path);

/// Index and within-group rank for every row, in input order. Rows sharing
/// all group key values form a group; ties rank by input order. Throws
/// ValidationError naming the row for invalid coverage or length.
std::vector<ReportRow> apply_index(std::span<const ExternalPerformanceRow> rows,
                                   const IndexConfig& cfg);

/// "n=15;cv=0.1", or "all" when there are no group columns.
std::string group_label(const ExternalPerformanceRow& row);

/// Fixed decimals, or shortest round-trip text when decimals == 0.
std::string format_number(double value, int decimals);

/// Split one CSV record; double-quoted fields may contain commas and "".
std::vector<std::string> split_csv_record(const std::string& line);
std::string csv_field(const std::string& value);

/// Provenance line written at the top of every CSV output.
struct OutputStamp {
  std::uint64_t seed = 0;
  std::string plan_hash;
  std::string comment_line() const;
};

void write_report_csv(std::ostream& out, const PerformanceTable& table,
                      std::span<const ReportRow> rows, int decimals,
                      const OutputStamp& stamp);

/// Long format `group,estimator,series,value` with series in
/// {coverage, index, nominal}; one nominal row per group. Values are printed
/// in shortest round-trip form.
void write_plot_data(std::ostream& out, std::span<const ReportRow> rows,
                     Probability alpha, const OutputStamp& stamp);

/// Writes plot data to a file; returns 0 on success, 3 on I/O failure.
int emit_plot_data(std::span<const ReportRow> rows, Probability alpha,
                   const std::filesystem::path& out_path, const OutputStamp& stamp);

/// Files produced by a study run, relative to the output directory.
struct RunOutputs {
  std::vector<std::filesystem::path> files;
};

/// Runs the configured study and writes its CSV files plus
/// run_metadata.json into out_dir. Throws ValidationError, PlanError or
/// std::runtime_error.
RunOutputs execute_study(const StudyConfig& cfg, const std::filesystem::path& out_dir);

/// Exit-code wrapper around load_study_config + execute_study:
/// 0 success, 2 validation failure, 3 runtime failure. Diagnostics go to err.
int run_from_config(const std::filesystem::path& config_path,
                    const std::filesystem::path& out_dir,
                    const ConfigOverrides& overrides,
                    std::optional<StudyKind> expected_kind, std::ostream& err);

}  // namespace ciindex
