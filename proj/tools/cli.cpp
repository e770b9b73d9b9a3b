#include "cli.hpp"

#include <algorithm>
#include <filesystem>
#include <iostream>
#include <optional>

#include <CLI11.hpp>

#include "ciindex/config.hpp"
#include "ciindex/report.hpp"
#include "ciindex/version.hpp"

namespace ciindex::cli {
namespace {

struct CommonFlags {
  std::string config;
  std::string out = "out";
  std::optional<std::uint64_t> seed;
  std::string scale;
  std::optional<double> alpha;
  std::string loss;
  bool rescaled = false;
  std::optional<unsigned> workers;
  std::string input;
};

void add_common(CLI::App& cmd, CommonFlags& f, bool needs_config) {
  auto* cfg = cmd.add_option("--config", f.config, "Experiment config file");
  if (needs_config) cfg->required();
  cmd.add_option("--out", f.out, "Output directory")->capture_default_str();
  cmd.add_option("--seed", f.seed, "Master seed (overrides the config)");
  cmd.add_option("--scale", f.scale, "Replication scale")
      ->check(CLI::IsMember({"desk", "paper"}));
  cmd.add_option("--alpha", f.alpha, "Nominal level alpha");
  cmd.add_option("--loss", f.loss, "Loss for the index")
      ->check(CLI::IsMember({"absolute", "squared"}));
  cmd.add_flag("--rescaled", f.rescaled, "Rescale the index to [0, 1]");
  cmd.add_option("--workers", f.workers, "Worker threads")->check(CLI::Range(1u, 1024u));
}

ConfigOverrides overrides_from(const CommonFlags& f) {
  ConfigOverrides o;
  o.seed = f.seed;
  if (!f.scale.empty()) o.scale = parse_scale(f.scale);
  o.alpha = f.alpha;
  if (!f.loss.empty()) o.loss = parse_loss(f.loss);
  o.rescaled = f.rescaled;
  o.workers = f.workers;
  return o;
}

// apply / plot-data without a config file: everything comes from flags.
StudyConfig config_from_flags(const CommonFlags& f) {
  const auto o = overrides_from(f);
  StudyConfig cfg;
  cfg.kind = StudyKind::apply;
  cfg.seed = o.seed.value_or(0);
  const double alpha = o.alpha.value_or(0.05);
  if (!(alpha > 0.0 && alpha < 1.0)) {
    throw ValidationError("--alpha", 0, "alpha must lie in (0, 1)");
  }
  cfg.index.alpha = Probability(alpha);
  cfg.index.loss = o.loss.value_or(LossKind::absolute);
  cfg.index.rescaled = o.rescaled;
  cfg.apply_input = f.input;
  return cfg;
}

template <class Fn>
int guarded(std::ostream& err, Fn fn) {
  try {
    return fn();
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
}

int report_outputs(const RunOutputs& outputs, const std::filesystem::path& dir,
                   std::ostream& out) {
  for (const auto& f : outputs.files) out << (dir / f).string() << '\n';
  return 0;
}

}  // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Confidence interval index: simulation studies and reporting", "ciindex"};
  app.set_version_flag("--version", std::string(kVersion));
  app.require_subcommand(1);

  struct Command {
    const char* name;
    const char* help;
    std::optional<StudyKind> kind;
    CommonFlags flags;
    CLI::App* app = nullptr;
  };
  std::vector<Command> commands = {
      {"simulate-mean", "Coverage study of intervals for a mean", StudyKind::mean, {}},
      {"simulate-proportion", "Coverage study of binomial proportion intervals",
       StudyKind::proportion, {}},
      {"calibrate", "Mean study with bootstrap-calibrated levels",
       StudyKind::calibration, {}},
      {"run", "Run whatever study the config describes", std::nullopt, {}},
  };
  for (auto& c : commands) {
    c.app = app.add_subcommand(c.name, c.help);
    add_common(*c.app, c.flags, true);
  }

  CommonFlags apply_flags;
  auto* apply = app.add_subcommand("apply", "Index and rank an external coverage/length table");
  add_common(*apply, apply_flags, false);
  apply->add_option("--input", apply_flags.input,
                    "CSV with estimator,<group...>,coverage,length");

  CommonFlags plot_flags;
  auto* plot = app.add_subcommand("plot-data", "Long-format coverage/index data for plotting");
  add_common(*plot, plot_flags, false);
  plot->add_option("--input", plot_flags.input,
                   "CSV with estimator,<group...>,coverage,length");

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? 0 : 2;
  }

  for (auto& c : commands) {
    if (!c.app->parsed()) continue;
    return run_from_config(c.flags.config, c.flags.out, overrides_from(c.flags), c.kind,
                           err);
  }

  if (apply->parsed()) {
    if (apply_flags.config.empty() == apply_flags.input.empty()) {
      err << "error: apply needs exactly one of --config or --input\n";
      return 2;
    }
    if (!apply_flags.config.empty()) {
      return run_from_config(apply_flags.config, apply_flags.out,
                             overrides_from(apply_flags), StudyKind::apply, err);
    }
    return guarded(err, [&] {
      return report_outputs(execute_study(config_from_flags(apply_flags), apply_flags.out),
                            apply_flags.out, out);
    });
  }

  // plot-data
  if (plot_flags.config.empty() == plot_flags.input.empty()) {
    err << "error: plot-data needs exactly one of --config or --input\n";
    return 2;
  }
  return guarded(err, [&] {
    StudyConfig cfg = plot_flags.config.empty()
                          ? config_from_flags(plot_flags)
                          : load_study_config(plot_flags.config, overrides_from(plot_flags),
                                              StudyKind::apply);
    const auto table = load_performance_table(cfg.apply_input);
    const auto rows = apply_index(table.rows, cfg.index);
    const std::filesystem::path dir(plot_flags.out);
    std::error_code ec;
    std::filesystem::create_directories(dir, ec);
    const OutputStamp stamp{cfg.seed, stable_hash(cfg.echo())};
    const int code = emit_plot_data(rows, cfg.index.alpha, dir / "plot_data.csv", stamp);
    if (code != 0) {
      err << "error: cannot write " << (dir / "plot_data.csv").string() << '\n';
      return code;
    }
    out << (dir / "plot_data.csv").string() << '\n';
    return 0;
  });
}

}  // namespace ciindex::cli
