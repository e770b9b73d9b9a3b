#include "ciindex/report.hpp"

#include <algorithm>
#include <charconv>
#include <chrono>
#include <cmath>
#include <ctime>
#include <fstream>
#include <iostream>
#include <iterator>
#include <map>
#include <sstream>

#include <json.hpp>

#include "ciindex/harness.hpp"
#include "ciindex/version.hpp"

namespace ciindex {
namespace {

std::string trim(const std::string& s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string::npos) return {};
  const auto last = s.find_last_not_of(" \t\r");
  return s.substr(first, last - first + 1);
}

double parse_field(const std::string& source, std::size_t line,
                   const std::string& column, const std::string& text) {
  double v = 0.0;
  const auto* end = text.data() + text.size();
  const auto [ptr, ec] = std::from_chars(text.data(), end, v);
  if (text.empty() || ec != std::errc() || ptr != end || !std::isfinite(v)) {
    throw ValidationError(source, line,
                          column + " is not a finite number: '" + text + "'");
  }
  return v;
}

// Empty when the row is valid, otherwise the reason it is not.
std::string row_problem(const ExternalPerformanceRow& row) {
  if (!(row.coverage >= 0.0 && row.coverage <= 1.0)) {
    return "coverage " + format_number(row.coverage, 0) + " outside [0, 1]";
  }
  if (!(row.mean_length >= 0.0) || !std::isfinite(row.mean_length)) {
    return "length " + format_number(row.mean_length, 0) +
           " must be finite and non-negative";
  }
  return {};
}

std::ofstream open_output(const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  return out;
}

void finish_output(std::ofstream& out, const std::filesystem::path& path) {
  out.flush();
  if (!out) throw std::runtime_error("error while writing " + path.string());
}

std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open " + path.string());
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

std::string utc_now() {
  const auto now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&now, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

// Model description split into fixed columns so every mean study shares one
// header.
struct ModelColumns {
  std::string distribution;
  double location;
  double dispersion;
};

ModelColumns model_columns(const DataModel& model) {
  if (const auto* m = std::get_if<NormalModel>(&model)) {
    return {"normal", m->mean, m->variance};
  }
  if (const auto* m = std::get_if<LognormalModel>(&model)) {
    return {"lognormal", m->mu_log, m->sigma2_log};
  }
  const auto& b = std::get<BinomialModel>(model);
  return {"binomial", static_cast<double>(b.trials), b.p};
}

class CsvWriter {
 public:
  CsvWriter(std::ostream& out, int decimals) : out_(out), decimals_(decimals) {}

  CsvWriter& text(const std::string& s) {
    sep();
    out_ << csv_field(s);
    return *this;
  }
  CsvWriter& num(double v) {
    sep();
    out_ << format_number(v, decimals_);
    return *this;
  }
  CsvWriter& opt(const std::optional<double>& v) {
    return v ? num(*v) : text("NA");
  }
  CsvWriter& count(std::size_t v) {
    sep();
    out_ << v;
    return *this;
  }
  void end() {
    out_ << '\n';
    first_ = true;
  }

 private:
  void sep() {
    if (!first_) out_ << ',';
    first_ = false;
  }
  std::ostream& out_;
  int decimals_;
  bool first_ = true;
};

void write_header(std::ostream& out, std::initializer_list<const char*> cols) {
  bool first = true;
  for (const char* c : cols) {
    out << (first ? "" : ",") << c;
    first = false;
  }
  out << '\n';
}

void write_mean_outputs(const StudyConfig& cfg, const OutputStamp& stamp,
                        const std::filesystem::path& dir, RunOutputs& outputs) {
  const auto rep_path = dir / "replications.csv";
  const auto sum_path = dir / "summary.csv";
  auto reps = open_output(rep_path);
  auto summary = open_output(sum_path);
  reps << stamp.comment_line() << '\n';
  summary << stamp.comment_line() << '\n';
  write_header(reps, {"estimator", "distribution", "location", "dispersion", "n",
                      "variant", "replication", "coverage", "length", "index"});
  write_header(summary, {"estimator", "distribution", "location", "dispersion", "n",
                         "variant", "coverage", "length", "index", "mean_index",
                         "sd_index", "skewness", "kurtosis", "calibration_skipped",
                         "mean_beta"});
  CsvWriter rw(reps, cfg.precision);
  CsvWriter sw(summary, cfg.precision);

  for (const auto& plan : cfg.plans) {
    const auto result = run_mean_study(plan);
    const auto mc = model_columns(plan.model);
    auto emit = [&](const std::vector<MeanEstimatorStudy>& studies,
                    const char* variant) {
      for (const auto& st : studies) {
        const std::string name(to_string(st.method));
        for (std::size_t r = 0; r < st.replications.size(); ++r) {
          const auto& rep = st.replications[r];
          rw.text(name).text(mc.distribution).num(mc.location).num(mc.dispersion)
              .count(plan.n).text(variant).count(r + 1)
              .num(rep.coverage).num(rep.mean_length).num(rep.index);
          rw.end();
        }
        sw.text(name).text(mc.distribution).num(mc.location).num(mc.dispersion)
            .count(plan.n).text(variant)
            .num(st.pooled.coverage).num(st.pooled.mean_length).num(st.pooled_index);
        if (st.summary) {
          sw.num(st.summary->mean).num(st.summary->st_dev)
              .opt(st.summary->skewness).opt(st.summary->kurtosis);
        } else {
          sw.text("NA").text("NA").text("NA").text("NA");
        }
        sw.text(plan.calibrate ? (st.calibration_skipped ? "true" : "false") : "NA");
        if (plan.calibrate && std::string(variant) == "calibrated") {
          sw.num(result.mean_beta);
        } else {
          sw.text("NA");
        }
        sw.end();
      }
    };
    emit(result.uncalibrated, "uncalibrated");
    if (plan.calibrate) emit(result.calibrated, "calibrated");
  }
  finish_output(reps, rep_path);
  finish_output(summary, sum_path);
  outputs.files.push_back("replications.csv");
  outputs.files.push_back("summary.csv");
}

void write_proportion_outputs(const StudyConfig& cfg, const OutputStamp& stamp,
                              const std::filesystem::path& dir, RunOutputs& outputs) {
  const auto path = dir / "proportion.csv";
  auto out = open_output(path);
  out << stamp.comment_line() << '\n';
  write_header(out, {"estimator", "n", "p", "coverage", "length", "index",
                     "exact_coverage", "exact_length", "exact_index"});
  CsvWriter w(out, cfg.precision);
  for (const auto& plan : cfg.plans) {
    const auto& model = std::get<BinomialModel>(plan.model);
    for (const auto& st : run_proportion_study(plan)) {
      w.text(std::string(to_string(st.method))).count(plan.n).num(model.p)
          .num(st.result.coverage).num(st.result.mean_length).num(st.result.index)
          .num(st.exact.coverage).num(st.exact.mean_length)
          .num(compute_index(st.exact, plan.index));
      w.end();
    }
  }
  finish_output(out, path);
  outputs.files.push_back("proportion.csv");
}

void write_apply_outputs(const StudyConfig& cfg, const OutputStamp& stamp,
                         const PerformanceTable& table,
                         const std::filesystem::path& dir, RunOutputs& outputs) {
  const auto rows = apply_index(table.rows, cfg.index);
  const auto path = dir / "apply.csv";
  auto out = open_output(path);
  write_report_csv(out, table, rows, cfg.precision, stamp);
  finish_output(out, path);
  outputs.files.push_back("apply.csv");
  if (emit_plot_data(rows, cfg.index.alpha, dir / "plot_data.csv", stamp) != 0) {
    throw std::runtime_error("cannot write " + (dir / "plot_data.csv").string());
  }
  outputs.files.push_back("plot_data.csv");
}

}  // namespace

std::string format_number(double value, int decimals) {
  if (value == 0.0) value = 0.0;  // drop the sign of -0
  char buf[400];
  const auto res = decimals <= 0
                       ? std::to_chars(buf, buf + sizeof buf, value)
                       : std::to_chars(buf, buf + sizeof buf, value,
                                       std::chars_format::fixed, decimals);
  if (res.ec != std::errc()) throw std::runtime_error("number formatting failed");
  return std::string(buf, res.ptr);
}

std::vector<std::string> split_csv_record(const std::string& line) {
  std::vector<std::string> fields;
  std::string cur;
  bool quoted = false;
  for (std::size_t i = 0; i < line.size(); ++i) {
    const char c = line[i];
    if (quoted) {
      if (c == '"') {
        if (i + 1 < line.size() && line[i + 1] == '"') {
          cur += '"';
          ++i;
        } else {
          quoted = false;
        }
      } else {
        cur += c;
      }
    } else if (c == '"') {
      quoted = true;
    } else if (c == ',') {
      fields.push_back(trim(cur));
      cur.clear();
    } else {
      cur += c;
    }
  }
  fields.push_back(trim(cur));
  return fields;
}

std::string csv_field(const std::string& value) {
  if (value.find_first_of(",\"\n") == std::string::npos) return value;
  std::string out = "\"";
  for (char c : value) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + '"';
}

PerformanceTable read_performance_table(std::istream& in, const std::string& source) {
  PerformanceTable table;
  std::string raw;
  std::size_t line_no = 0;
  std::optional<std::size_t> width;
  std::size_t cov_col = 0;
  while (std::getline(in, raw)) {
    ++line_no;
    if (!raw.empty() && raw.back() == '\r') raw.pop_back();
    const auto content = trim(raw);
    if (content.empty() || content.front() == '#') continue;
    auto fields = split_csv_record(raw);
    if (!width) {
      if (fields.empty() || fields.front() != "estimator") {
        throw ValidationError(source, line_no, "header must start with 'estimator'");
      }
      const auto cov = std::find(fields.begin(), fields.end(), "coverage");
      if (cov == fields.end() || cov + 1 == fields.end() || *(cov + 1) != "length") {
        throw ValidationError(source, line_no,
                              "header needs adjacent 'coverage,length' columns");
      }
      cov_col = static_cast<std::size_t>(cov - fields.begin());
      table.group_columns.assign(fields.begin() + 1, cov);
      table.extra_columns.assign(cov + 2, fields.end());
      width = fields.size();
      continue;
    }
    if (fields.size() != *width) {
      throw ValidationError(source, line_no,
                            "expected " + std::to_string(*width) + " fields, found " +
                                std::to_string(fields.size()));
    }
    ExternalPerformanceRow row;
    row.line = line_no;
    row.estimator = fields[0];
    if (row.estimator.empty()) throw ValidationError(source, line_no, "empty estimator");
    for (std::size_t g = 0; g < table.group_columns.size(); ++g) {
      row.group_keys.emplace_back(table.group_columns[g], fields[1 + g]);
    }
    row.coverage = parse_field(source, line_no, "coverage", fields[cov_col]);
    row.mean_length = parse_field(source, line_no, "length", fields[cov_col + 1]);
    row.extra.assign(fields.begin() + static_cast<std::ptrdiff_t>(cov_col + 2),
                     fields.end());
    if (const auto problem = row_problem(row); !problem.empty()) {
      throw ValidationError(source, line_no,
                            "row " + std::to_string(table.rows.size() + 1) + " (" +
                                row.estimator + "): " + problem);
    }
    table.rows.push_back(std::move(row));
  }
  if (!width) throw ValidationError(source, 0, "no header line");
  if (table.rows.empty()) throw ValidationError(source, 0, "no data rows");
  return table;
}

PerformanceTable load_performance_table(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open input table: " + path.string());
  return read_performance_table(in, path.string());
}

std::string group_label(const ExternalPerformanceRow& row) {
  if (row.group_keys.empty()) return "all";
  std::string label;
  for (const auto& [k, v] : row.group_keys) {
    if (!label.empty()) label += ';';
    label += k + "=" + v;
  }
  return label;
}

std::vector<ReportRow> apply_index(std::span<const ExternalPerformanceRow> rows,
                                   const IndexConfig& cfg) {
  if (rows.empty()) throw ValidationError("apply_index", 0, "no rows");
  cfg.validate();
  std::vector<ReportRow> out;
  out.reserve(rows.size());
  std::map<std::vector<std::string>, std::vector<std::size_t>> groups;
  for (std::size_t i = 0; i < rows.size(); ++i) {
    if (const auto problem = row_problem(rows[i]); !problem.empty()) {
      throw ValidationError("row " + std::to_string(i + 1) + " (" + rows[i].estimator + ")",
                            rows[i].line, problem);
    }
    out.push_back({rows[i], compute_index({rows[i].coverage, rows[i].mean_length}, cfg), 1});
    std::vector<std::string> key;
    for (const auto& kv : rows[i].group_keys) key.push_back(kv.second);
    groups[key].push_back(i);
  }
  for (auto& [key, members] : groups) {
    // members are in input order; stable_sort keeps it for equal indexes.
    std::stable_sort(members.begin(), members.end(), [&](std::size_t a, std::size_t b) {
      return out[a].index > out[b].index;
    });
    for (std::size_t r = 0; r < members.size(); ++r) out[members[r]].rank = r + 1;
  }
  return out;
}

std::string OutputStamp::comment_line() const {
  return "# ciindex " + std::string(kVersion) + " seed=" + std::to_string(seed) +
         " plan_hash=" + plan_hash;
}

void write_report_csv(std::ostream& out, const PerformanceTable& table,
                      std::span<const ReportRow> rows, int decimals,
                      const OutputStamp& stamp) {
  out << stamp.comment_line() << '\n';
  out << "estimator";
  for (const auto& g : table.group_columns) out << ',' << csv_field(g);
  out << ",coverage,length";
  for (const auto& x : table.extra_columns) {
    // Keep pass-through columns distinct from the computed ones.
    out << ',' << csv_field(x == "index" || x == "rank" ? "input_" + x : x);
  }
  out << ",index,rank\n";
  for (const auto& r : rows) {
    out << csv_field(r.row.estimator);
    for (const auto& kv : r.row.group_keys) out << ',' << csv_field(kv.second);
    out << ',' << format_number(r.row.coverage, decimals) << ','
        << format_number(r.row.mean_length, decimals);
    for (const auto& x : r.row.extra) out << ',' << csv_field(x);
    out << ',' << format_number(r.index, decimals) << ',' << r.rank << '\n';
  }
}

void write_plot_data(std::ostream& out, std::span<const ReportRow> rows,
                     Probability alpha, const OutputStamp& stamp) {
  out << stamp.comment_line() << '\n';
  out << "group,estimator,series,value\n";
  std::vector<std::string> order;
  std::map<std::string, std::vector<const ReportRow*>> groups;
  for (const auto& r : rows) {
    const auto label = group_label(r.row);
    auto& members = groups[label];
    if (members.empty()) order.push_back(label);
    members.push_back(&r);
  }
  const std::string nominal = format_number(1.0 - alpha.value(), 0);
  for (const auto& label : order) {
    const auto& members = groups[label];
    const auto g = csv_field(label);
    for (const auto* r : members) {
      out << g << ',' << csv_field(r->row.estimator) << ",coverage,"
          << format_number(r->row.coverage, 0) << '\n';
    }
    for (const auto* r : members) {
      out << g << ',' << csv_field(r->row.estimator) << ",index,"
          << format_number(r->index, 0) << '\n';
    }
    out << g << ",,nominal," << nominal << '\n';
  }
}

int emit_plot_data(std::span<const ReportRow> rows, Probability alpha,
                   const std::filesystem::path& out_path, const OutputStamp& stamp) {
  if (rows.empty()) return 2;
  std::ofstream out(out_path, std::ios::binary | std::ios::trunc);
  if (!out) return 3;
  write_plot_data(out, rows, alpha, stamp);
  out.flush();
  return out ? 0 : 3;
}

RunOutputs execute_study(const StudyConfig& cfg, const std::filesystem::path& out_dir) {
  const auto started = std::chrono::steady_clock::now();
  const std::string started_utc = utc_now();
  std::error_code ec;
  std::filesystem::create_directories(out_dir, ec);
  if (ec) throw std::runtime_error("cannot create " + out_dir.string() + ": " + ec.message());

  std::string echo = cfg.echo();
  std::optional<PerformanceTable> table;
  if (cfg.kind == StudyKind::apply) {
    table = load_performance_table(cfg.apply_input);
    echo += "input_hash=" + stable_hash(read_file(cfg.apply_input)) + "\n";
  }
  const OutputStamp stamp{cfg.seed, stable_hash(echo)};

  RunOutputs outputs;
  switch (cfg.kind) {
    case StudyKind::mean:
    case StudyKind::calibration:
      write_mean_outputs(cfg, stamp, out_dir, outputs);
      break;
    case StudyKind::proportion:
      write_proportion_outputs(cfg, stamp, out_dir, outputs);
      break;
    case StudyKind::apply:
      write_apply_outputs(cfg, stamp, *table, out_dir, outputs);
      break;
  }

  nlohmann::ordered_json meta;
  meta["tool"] = "ciindex";
  meta["version"] = kVersion;
  meta["kind"] = to_string(cfg.kind);
  meta["seed"] = cfg.seed;
  meta["plan_hash"] = stamp.plan_hash;
  meta["scale"] = to_string(cfg.scale);
  meta["workers"] = cfg.workers;
  meta["compiler"] = __VERSION__;
  meta["plan_echo"] = echo;
  std::vector<std::string> files;
  for (const auto& f : outputs.files) files.push_back(f.generic_string());
  meta["outputs"] = files;
  meta["started_utc"] = started_utc;
  meta["elapsed_seconds"] =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - started).count();

  const auto meta_path = out_dir / "run_metadata.json";
  auto out = open_output(meta_path);
  out << meta.dump(2) << '\n';
  finish_output(out, meta_path);
  outputs.files.push_back("run_metadata.json");
  return outputs;
}

int run_from_config(const std::filesystem::path& config_path,
                    const std::filesystem::path& out_dir,
                    const ConfigOverrides& overrides,
                    std::optional<StudyKind> expected_kind, std::ostream& err) {
  StudyConfig cfg;
  try {
    if (!std::filesystem::exists(config_path)) {
      err << "error: config file not found: " << config_path.string() << '\n';
      return 2;
    }
    cfg = load_study_config(config_path, overrides, expected_kind);
  } catch (const ValidationError& e) {
    err << "error: " << e.what() << '\n';
    return 2;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return 3;
  }
  try {
    execute_study(cfg, out_dir);
  } catch (const ValidationError& e) {
    err << "error: " << e.what() << '\n';
    return 2;
  } catch (const PlanError& e) {
    err << "error: invalid plan: " << e.what() << '\n';
    return 2;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return 3;
  }
  return 0;
}

}  // namespace ciindex
