#include "ciindex/config.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cmath>
#include <fstream>
#include <istream>
#include <sstream>

namespace ciindex {
namespace {

std::string trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r");
  return std::string(s.substr(first, last - first + 1));
}

std::string lower(std::string s) {
  std::transform(s.begin(), s.end(), s.begin(),
                 [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  return s;
}

std::vector<std::string> split_list(const std::string& value) {
  std::vector<std::string> items;
  std::stringstream ss(value);
  std::string item;
  while (std::getline(ss, item, ',')) {
    item = trim(item);
    if (!item.empty()) items.push_back(item);
  }
  return items;
}

// Typed access to one file with section/key schema checks.
class Reader {
 public:
  explicit Reader(const KeyValueFile& file) : file_(file) {}

  [[noreturn]] void fail(std::size_t line, const std::string& msg) const {
    throw ValidationError(file_.source(), line, msg);
  }

  const KeyValueFile::Entry* entry(const std::string& section,
                                   const std::string& key) const {
    const auto* e = file_.find(section, key);
    if (e) e->used = true;
    return e;
  }

  const KeyValueFile::Entry& required(const std::string& section,
                                      const std::string& key) const {
    const auto* e = entry(section, key);
    if (!e) {
      fail(file_.section_line(section),
           "missing required key '" + key + "' in [" + section + "]");
    }
    return *e;
  }

  double to_double(const KeyValueFile::Entry& e, const std::string& text) const {
    double v = 0.0;
    const auto* end = text.data() + text.size();
    const auto [ptr, ec] = std::from_chars(text.data(), end, v);
    if (ec != std::errc() || ptr != end || !std::isfinite(v)) {
      fail(e.line, "expected a number, got '" + text + "'");
    }
    return v;
  }

  std::uint64_t to_uint(const KeyValueFile::Entry& e, const std::string& text) const {
    std::uint64_t v = 0;
    const auto* end = text.data() + text.size();
    const auto [ptr, ec] = std::from_chars(text.data(), end, v);
    if (ec != std::errc() || ptr != end) {
      fail(e.line, "expected a non-negative integer, got '" + text + "'");
    }
    return v;
  }

  std::optional<double> number(const std::string& section, const std::string& key) const {
    const auto* e = entry(section, key);
    if (!e) return std::nullopt;
    return to_double(*e, e->value);
  }

  std::optional<std::uint64_t> integer(const std::string& section,
                                       const std::string& key) const {
    const auto* e = entry(section, key);
    if (!e) return std::nullopt;
    return to_uint(*e, e->value);
  }

  std::vector<double> numbers(const std::string& section, const std::string& key) const {
    const auto& e = required(section, key);
    std::vector<double> out;
    for (const auto& item : split_list(e.value)) out.push_back(to_double(e, item));
    if (out.empty()) fail(e.line, "'" + key + "' needs at least one value");
    return out;
  }

  std::vector<std::uint64_t> integers(const std::string& section,
                                      const std::string& key) const {
    const auto& e = required(section, key);
    std::vector<std::uint64_t> out;
    for (const auto& item : split_list(e.value)) out.push_back(to_uint(e, item));
    if (out.empty()) fail(e.line, "'" + key + "' needs at least one value");
    return out;
  }

  std::optional<bool> boolean(const std::string& section, const std::string& key) const {
    const auto* e = entry(section, key);
    if (!e) return std::nullopt;
    const auto v = lower(e->value);
    if (v == "true" || v == "yes" || v == "1") return true;
    if (v == "false" || v == "no" || v == "0") return false;
    fail(e->line, "expected true or false, got '" + e->value + "'");
  }

  // Every key in the file must have been consumed by the schema.
  void reject_unused() const {
    for (const auto& [section, keys] : file_.sections()) {
      for (const auto& [key, e] : keys) {
        if (!e.used) fail(e.line, "unknown key '" + key + "' in [" + section + "]");
      }
    }
  }

 private:
  const KeyValueFile& file_;
};

const std::vector<std::string> kKnownSections = {"study", "index", "model",
                                                 "design", "calibration", "apply"};

std::string format_double(double v) {
  char buf[64];
  const auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, ptr);
}

std::string model_echo(const DataModel& model) {
  return std::visit(
      [](const auto& m) -> std::string {
        using M = std::decay_t<decltype(m)>;
        if constexpr (std::is_same_v<M, NormalModel>) {
          return "normal(mean=" + format_double(m.mean) +
                 ",variance=" + format_double(m.variance) + ")";
        } else if constexpr (std::is_same_v<M, LognormalModel>) {
          return "lognormal(mu_log=" + format_double(m.mu_log) +
                 ",sigma2_log=" + format_double(m.sigma2_log) + ")";
        } else {
          return "binomial(trials=" + std::to_string(m.trials) +
                 ",p=" + format_double(m.p) + ")";
        }
      },
      model);
}

}  // namespace

ValidationError::ValidationError(const std::string& source, std::size_t line,
                                 const std::string& message)
    : std::runtime_error(line > 0 ? source + ":" + std::to_string(line) + ": " + message
                                  : source + ": " + message),
      line_(line) {}

KeyValueFile KeyValueFile::parse(std::istream& in, const std::string& source) {
  KeyValueFile file;
  file.source_ = source;
  std::string raw;
  std::string section;
  std::size_t line_no = 0;
  while (std::getline(in, raw)) {
    ++line_no;
    std::string_view view(raw);
    if (const auto hash = view.find('#'); hash != std::string_view::npos) {
      view = view.substr(0, hash);
    }
    const std::string line = trim(view);
    if (line.empty()) continue;
    if (line.front() == '[') {
      if (line.back() != ']') {
        throw ValidationError(source, line_no, "malformed section header");
      }
      section = lower(trim(std::string_view(line).substr(1, line.size() - 2)));
      if (section.empty()) throw ValidationError(source, line_no, "empty section name");
      if (file.section_lines_.count(section)) {
        throw ValidationError(source, line_no, "duplicate section [" + section + "]");
      }
      file.section_lines_[section] = line_no;
      file.sections_[section];
      continue;
    }
    const auto eq = line.find('=');
    if (eq == std::string::npos) {
      throw ValidationError(source, line_no, "expected 'key = value'");
    }
    if (section.empty()) {
      throw ValidationError(source, line_no, "key outside of any [section]");
    }
    const std::string key = lower(trim(std::string_view(line).substr(0, eq)));
    const std::string value = trim(std::string_view(line).substr(eq + 1));
    if (key.empty()) throw ValidationError(source, line_no, "empty key");
    auto& keys = file.sections_[section];
    if (keys.count(key)) {
      throw ValidationError(source, line_no, "duplicate key '" + key + "'");
    }
    keys[key] = Entry{value, line_no, false};
  }
  return file;
}

KeyValueFile KeyValueFile::load(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open config file: " + path.string());
  return parse(in, path.string());
}

const KeyValueFile::Entry* KeyValueFile::find(const std::string& section,
                                              const std::string& key) const {
  const auto s = sections_.find(section);
  if (s == sections_.end()) return nullptr;
  const auto k = s->second.find(key);
  return k == s->second.end() ? nullptr : &k->second;
}

bool KeyValueFile::has_section(const std::string& section) const {
  return sections_.count(section) > 0;
}

std::size_t KeyValueFile::section_line(const std::string& section) const {
  const auto it = section_lines_.find(section);
  return it == section_lines_.end() ? 0 : it->second;
}

std::string to_string(StudyKind kind) {
  switch (kind) {
    case StudyKind::mean: return "mean";
    case StudyKind::proportion: return "proportion";
    case StudyKind::calibration: return "calibration";
    case StudyKind::apply: return "apply";
  }
  return "unknown";
}

std::optional<StudyKind> parse_study_kind(const std::string& name) {
  const auto v = lower(name);
  for (auto k : {StudyKind::mean, StudyKind::proportion, StudyKind::calibration,
                 StudyKind::apply}) {
    if (v == to_string(k)) return k;
  }
  return std::nullopt;
}

std::string to_string(Scale scale) {
  return scale == Scale::desk ? "desk" : "paper";
}

std::optional<Scale> parse_scale(const std::string& name) {
  const auto v = lower(name);
  if (v == "desk") return Scale::desk;
  if (v == "paper") return Scale::paper;
  return std::nullopt;
}

ScaleDefaults scale_defaults(Scale scale, StudyKind kind) {
  if (kind == StudyKind::proportion) return {1000, 1, 0};
  if (scale == Scale::paper) return {5000, 1000, 1000};
  return {50, 500, 200};
}

std::string stable_hash(const std::string& text) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : text) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  char buf[17];
  static constexpr char kHex[] = "0123456789abcdef";
  for (int i = 15; i >= 0; --i) {
    buf[i] = kHex[h & 0xF];
    h >>= 4;
  }
  buf[16] = '\0';
  return buf;
}

std::string StudyConfig::echo() const {
  std::ostringstream out;
  out << "schema=" << kConfigSchemaVersion << "\n"
      << "kind=" << to_string(kind) << "\n"
      << "seed=" << seed << "\n"
      << "scale=" << to_string(scale) << "\n"
      << "alpha=" << format_double(index.alpha.value()) << "\n"
      << "loss=" << to_string(index.loss) << "\n"
      << "rescaled=" << (index.rescaled ? "true" : "false") << "\n"
      << "precision=" << precision << "\n";
  if (kind == StudyKind::apply) out << "input=" << apply_input.generic_string() << "\n";
  for (std::size_t s = 0; s < plans.size(); ++s) {
    const auto& p = plans[s];
    out << "scenario " << s << ": " << model_echo(p.model) << " n=" << p.n
        << " N=" << p.N << " B=" << p.B << " R=" << p.R
        << " seed=" << p.master_seed << " calibrate=" << (p.calibrate ? 1 : 0)
        << " skip_delta=" << format_double(p.skip_delta) << " estimators=";
    for (std::size_t e = 0; e < p.estimators.size(); ++e) {
      out << (e ? "," : "") << estimator_name(p.estimators[e]);
    }
    out << "\n";
  }
  // Worker count is deliberately excluded: results do not depend on it.
  return out.str();
}

StudyConfig build_study_config(const KeyValueFile& file,
                               const ConfigOverrides& overrides,
                               std::optional<StudyKind> expected_kind) {
  Reader rd(file);
  for (const auto& [name, keys] : file.sections()) {
    if (std::find(kKnownSections.begin(), kKnownSections.end(), name) ==
        kKnownSections.end()) {
      rd.fail(file.section_line(name), "unknown section [" + name + "]");
    }
  }

  StudyConfig cfg;
  if (const auto* e = rd.entry("study", "schema")) {
    if (rd.to_uint(*e, e->value) != static_cast<std::uint64_t>(kConfigSchemaVersion)) {
      rd.fail(e->line, "unsupported schema version '" + e->value + "' (expected " +
                           std::to_string(kConfigSchemaVersion) + ")");
    }
  }
  if (const auto* e = rd.entry("study", "kind")) {
    const auto k = parse_study_kind(e->value);
    if (!k) rd.fail(e->line, "unknown study kind '" + e->value + "'");
    if (expected_kind && *expected_kind != *k) {
      rd.fail(e->line, "config describes a " + to_string(*k) + " study but the " +
                           to_string(*expected_kind) + " command was used");
    }
    cfg.kind = *k;
  } else if (expected_kind) {
    cfg.kind = *expected_kind;
  } else {
    rd.fail(file.section_line("study"), "missing required key 'kind' in [study]");
  }

  cfg.seed = rd.integer("study", "seed").value_or(0);
  if (overrides.seed) cfg.seed = *overrides.seed;
  if (const auto* e = rd.entry("study", "scale")) {
    const auto s = parse_scale(e->value);
    if (!s) rd.fail(e->line, "scale must be desk or paper");
    cfg.scale = *s;
  }
  if (overrides.scale) cfg.scale = *overrides.scale;
  if (const auto* e = rd.entry("study", "workers")) {
    const auto w = rd.to_uint(*e, e->value);
    if (w == 0 || w > 1024) rd.fail(e->line, "workers must be in 1..1024");
    cfg.workers = static_cast<unsigned>(w);
  }
  if (overrides.workers) cfg.workers = *overrides.workers;
  if (const auto* e = rd.entry("study", "precision")) {
    const auto p = rd.to_uint(*e, e->value);
    if (p > 17) rd.fail(e->line, "precision must be in 0..17 (0 = shortest round-trip)");
    cfg.precision = static_cast<int>(p);
  }

  double alpha = 0.05;
  if (const auto* e = rd.entry("index", "alpha")) alpha = rd.to_double(*e, e->value);
  if (overrides.alpha) alpha = *overrides.alpha;
  if (!(alpha > 0.0 && alpha < 1.0)) {
    const auto* e = file.find("index", "alpha");
    rd.fail(overrides.alpha || !e ? 0 : e->line, "alpha must lie in (0, 1)");
  }
  cfg.index.alpha = Probability(alpha);
  if (const auto* e = rd.entry("index", "loss")) {
    const auto l = parse_loss(e->value);
    if (!l) rd.fail(e->line, "loss must be absolute or squared");
    cfg.index.loss = *l;
  }
  if (overrides.loss) cfg.index.loss = *overrides.loss;
  cfg.index.rescaled = rd.boolean("index", "rescaled").value_or(false) || overrides.rescaled;

  if (cfg.kind == StudyKind::apply) {
    cfg.apply_input = rd.required("apply", "input").value;
    const auto base = std::filesystem::path(file.source()).parent_path();
    if (cfg.apply_input.is_relative() && !base.empty()) {
      cfg.apply_input = base / cfg.apply_input;
    }
    rd.reject_unused();
    return cfg;
  }

  // Simulation kinds.
  const auto& dist_entry = rd.required("model", "distribution");
  const auto dist = lower(dist_entry.value);
  const bool want_binomial = cfg.kind == StudyKind::proportion;
  if (want_binomial != (dist == "binomial")) {
    rd.fail(dist_entry.line, cfg.kind == StudyKind::proportion
                                 ? "proportion studies need distribution = binomial"
                                 : "mean studies need distribution = normal or lognormal");
  }
  std::vector<DataModel> models;  // n is filled in per scenario for binomial
  if (dist == "normal") {
    const double mean = rd.number("model", "mean").value_or(0.0);
    for (double v : rd.numbers("model", "variance")) models.push_back(NormalModel{mean, v});
  } else if (dist == "lognormal") {
    const double mu = rd.number("model", "mu_log").value_or(0.0);
    for (double s2 : rd.numbers("model", "sigma2_log")) {
      models.push_back(LognormalModel{mu, s2});
    }
  } else if (dist == "binomial") {
    for (double p : rd.numbers("model", "p")) models.push_back(BinomialModel{0, p});
  } else {
    rd.fail(dist_entry.line, "unknown distribution '" + dist_entry.value + "'");
  }

  const auto defaults = scale_defaults(cfg.scale, cfg.kind);
  // An explicit --scale replaces the design counts; otherwise the file wins.
  auto count = [&](const char* key, std::size_t fallback) -> std::size_t {
    const auto v = rd.integer("design", key);
    if (v && !overrides.scale) return static_cast<std::size_t>(*v);
    return fallback;
  };
  const std::size_t R = count("r", defaults.R);
  const std::size_t N = cfg.kind == StudyKind::proportion ? 1 : count("n_samples", defaults.N);
  const std::size_t B = cfg.kind == StudyKind::proportion ? 0 : count("b", defaults.B);

  std::vector<EstimatorKind> estimators;
  if (const auto* e = rd.entry("design", "estimators");
      e && lower(e->value) != "all") {
    for (const auto& name : split_list(e->value)) {
      if (want_binomial) {
        const auto m = parse_proportion_method(name);
        if (!m) rd.fail(e->line, "unknown proportion estimator '" + name + "'");
        estimators.emplace_back(*m);
      } else {
        const auto m = parse_mean_method(name);
        if (!m) rd.fail(e->line, "unknown mean estimator '" + name + "'");
        estimators.emplace_back(*m);
      }
    }
  } else if (want_binomial) {
    for (auto m : kAllProportionMethods) estimators.emplace_back(m);
  } else {
    for (auto m : kAllMeanMethods) estimators.emplace_back(m);
  }

  double skip_delta = 0.005;
  if (cfg.kind == StudyKind::calibration) {
    skip_delta = rd.number("calibration", "skip_delta").value_or(0.005);
  }

  const auto& n_entry = rd.required("design", "n");
  const auto sizes = rd.integers("design", "n");
  for (auto n : sizes) {
    for (const auto& base : models) {
      SimulationPlan plan;
      plan.model = base;
      if (auto* b = std::get_if<BinomialModel>(&plan.model)) b->trials = n;
      plan.n = static_cast<std::size_t>(n);
      plan.N = N;
      plan.B = B;
      plan.R = R;
      plan.index = cfg.index;
      plan.estimators = estimators;
      // Scenarios draw from disjoint streams of the master seed.
      plan.master_seed = StreamKey(cfg.seed).child(cfg.plans.size()).value();
      plan.calibrate = cfg.kind == StudyKind::calibration;
      plan.skip_delta = skip_delta;
      plan.workers = cfg.workers;
      try {
        plan.validate();
      } catch (const PlanError& err) {
        rd.fail(n_entry.line, std::string("invalid scenario: ") + err.what());
      }
      cfg.plans.push_back(std::move(plan));
    }
  }
  rd.reject_unused();
  return cfg;
}

StudyConfig load_study_config(const std::filesystem::path& path,
                              const ConfigOverrides& overrides,
                              std::optional<StudyKind> expected_kind) {
  return build_study_config(KeyValueFile::load(path), overrides, expected_kind);
}

}  // namespace ciindex
