#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "ciindex/harness.hpp"
#include "ciindex/index.hpp"

namespace ciindex {

/// Invalid configuration or input table. line() is 1-based, 0 when the
/// problem is not tied to one line.
class ValidationError : public std::runtime_error {
 public:
  ValidationError(const std::string& source, std::size_t line,
                  const std::string& message);
  std::size_t line() const noexcept { return line_; }

 private:
  std::size_t line_;
};

/// Sectioned key-value text:
///
///     # comment
///     [section]
///     key = value   # trailing comment
///
/// Keys outside a section, duplicate keys and malformed lines are rejected
/// with the offending line number.
class KeyValueFile {
 public:
  struct Entry {
    std::string value;
    std::size_t line = 0;
    mutable bool used = false;
  };

  static KeyValueFile parse(std::istream& in, const std::string& source);
  static KeyValueFile load(const std::filesystem::path& path);

  const Entry* find(const std::string& section, const std::string& key) const;
  bool has_section(const std::string& section) const;
  std::size_t section_line(const std::string& section) const;
  const std::string& source() const noexcept { return source_; }
  const std::map<std::string, std::map<std::string, Entry>>& sections() const {
    return sections_;
  }

 private:
  std::string source_;
  std::map<std::string, std::map<std::string, Entry>> sections_;
  std::map<std::string, std::size_t> section_lines_;
};

enum class StudyKind { mean, proportion, calibration, apply };
enum class Scale { desk, paper };

std::string to_string(StudyKind kind);
std::optional<StudyKind> parse_study_kind(const std::string& name);
std::string to_string(Scale scale);
std::optional<Scale> parse_scale(const std::string& name);

/// Values given on the command line; each one replaces the file's setting.
struct ConfigOverrides {
  std::optional<std::uint64_t> seed;
  std::optional<Scale> scale;
  std::optional<double> alpha;
  std::optional<LossKind> loss;
  bool rescaled = false;
  std::optional<unsigned> workers;
};

/// Replication counts implied by a scale.
struct ScaleDefaults {
  std::size_t R;
  std::size_t N;
  std::size_t B;
};
ScaleDefaults scale_defaults(Scale scale, StudyKind kind);

inline constexpr int kConfigSchemaVersion = 1;

/// Validated experiment description. Simulation kinds expand their scenario
/// grid (n values x model parameter values) into one plan per scenario.
struct StudyConfig {
  StudyKind kind = StudyKind::mean;
  std::uint64_t seed = 0;
  Scale scale = Scale::desk;
  unsigned workers = 1;
  IndexConfig index;
  int precision = 6;
  std::vector<SimulationPlan> plans;
  std::filesystem::path apply_input;  ///< apply kind; relative to the config

  /// Canonical text rendering of every setting; hashed into output headers.
  std::string echo() const;
};

/// Builds a StudyConfig. expected_kind, when given, must match the file's
/// [study] kind if one is present and supplies it otherwise.
StudyConfig build_study_config(const KeyValueFile& file,
                               const ConfigOverrides& overrides,
                               std::optional<StudyKind> expected_kind = {});

StudyConfig load_study_config(const std::filesystem::path& path,
                              const ConfigOverrides& overrides,
                              std::optional<StudyKind> expected_kind = {});

/// 64-bit FNV-1a, rendered as 16 hex digits.
std::string stable_hash(const std::string& text);

}  // namespace ciindex
