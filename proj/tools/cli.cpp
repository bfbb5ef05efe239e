#include "cli.hpp"

#include <charconv>
#include <cstddef>
#include <exception>
#include <filesystem>
#include <optional>

#include <CLI11.hpp>

#include "mecrl/checkpoint.hpp"
#include "mecrl/config.hpp"
#include "mecrl/error.hpp"
#include "mecrl/harness.hpp"
#include "mecrl/report.hpp"

namespace mecrl::cli {

namespace fs = std::filesystem;

namespace {

struct TrainArgs {
  std::string config;
  std::optional<std::size_t> runs;
  std::optional<std::string> out;
  std::size_t jobs = 1;
};

struct EvalArgs {
  std::string config;
  std::string checkpoints;
  std::size_t episodes = 10;
};

struct PlotArgs {
  std::vector<std::string> inputs;
  std::string out;
};

struct GridArgs {
  std::string config;
  std::string gamma;
  std::string noise;
  std::optional<std::string> out;
  std::string algos = "ddpg,rmaddpg";
  std::optional<std::size_t> runs;
  std::size_t jobs = 1;
};

std::vector<std::string> split_list(const std::string& text) {
  std::vector<std::string> out;
  std::string cur;
  for (char c : text) {
    if (c == ',') {
      out.push_back(cur);
      cur.clear();
    } else if (c != ' ') {
      cur += c;
    }
  }
  out.push_back(cur);
  return out;
}

// Trains every run of `cfg` and writes the full output tree under cfg.out_dir.
harness::AggregateSeries train_to_dir(const harness::ExperimentConfig& cfg, std::size_t jobs) {
  harness::write_resolved_config(cfg);
  const auto runs = harness::run_all(cfg, jobs, cfg.out_dir / "checkpoints");
  for (std::size_t k = 0; k < runs.size(); ++k)
    harness::write_run_csv(runs[k], cfg.out_dir / ("run_" + std::to_string(k) + ".csv"));
  const auto agg = harness::aggregate_runs(runs);
  harness::write_csv(agg, runs, cfg.out_dir / "aggregate.csv");
  harness::render_svg({{std::string(agents::algo_name(cfg.algo)), agg}}, cfg.out_dir / "curves.svg");
  return agg;
}

double final_window_mean(const harness::AggregateSeries& agg, std::size_t window) {
  const std::size_t n = agg.size();
  const std::size_t start = n > window ? n - window : 0;
  double s = 0.0;
  for (std::size_t e = start; e < n; ++e) s += agg.mean[e];
  return n > start ? s / static_cast<double>(n - start) : 0.0;
}

int cmd_train(const TrainArgs& a, std::ostream& out) {
  auto cfg = harness::load_config(a.config);
  if (a.runs) cfg.n_runs = *a.runs;
  if (a.out) cfg.out_dir = *a.out;
  cfg.validate();
  const auto agg = train_to_dir(cfg, a.jobs);
  out << "trained " << agents::algo_name(cfg.algo) << ": " << cfg.n_runs << " runs x " << cfg.episodes
      << " episodes, final mean return " << nn::format_double(final_window_mean(agg, 100)) << " -> "
      << cfg.out_dir.string() << '\n';
  return kExitOk;
}

int cmd_eval(const EvalArgs& a, std::ostream& out) {
  const auto cfg = harness::load_config(a.config);
  if (a.episodes < 1) throw ValidationError("--episodes must be at least 1");
  const auto summary = harness::evaluate(cfg, a.checkpoints, a.episodes);
  out << "episodes " << summary.episodes << " mean_return " << nn::format_double(summary.mean_return)
      << " std_return " << nn::format_double(summary.std_return) << '\n';
  return kExitOk;
}

std::string plot_label(const fs::path& csv) {
  if (csv.filename() == "aggregate.csv") {
    const auto parent = fs::absolute(csv).parent_path().filename().string();
    if (!parent.empty()) return parent;
  }
  return csv.stem().string();
}

int cmd_plot(const PlotArgs& a, std::ostream& out) {
  std::vector<harness::LabeledSeries> series;
  for (const auto& in : a.inputs) series.emplace_back(plot_label(in), harness::read_aggregate_csv(in).agg);
  harness::render_svg(series, a.out);
  out << "wrote " << a.out << '\n';
  return kExitOk;
}

int cmd_grid(const GridArgs& a, std::ostream& out) {
  auto base = harness::load_config(a.config);
  if (a.runs) base.n_runs = *a.runs;
  const fs::path root = a.out ? fs::path(*a.out) : base.out_dir;
  const auto gammas = parse_number_list(a.gamma);
  const auto noises = parse_number_list(a.noise);
  std::vector<agents::Algo> algos;
  for (const auto& name : split_list(a.algos)) algos.push_back(agents::parse_algo(name));
  if (algos.empty()) throw ValidationError("--algos is empty");

  // Validate every cell before spending time on training.
  for (double g : gammas)
    for (double n : noises) {
      auto cfg = base;
      cfg.trainer.gamma = g;
      cfg.env.noise_level = n;
      cfg.validate();
    }

  for (double g : gammas) {
    for (double n : noises) {
      const fs::path cell = root / grid_cell_name(g, n);
      std::vector<harness::LabeledSeries> overlay;
      for (auto algo : algos) {
        auto cfg = base;
        cfg.trainer.gamma = g;
        cfg.env.noise_level = n;
        cfg.algo = algo;
        cfg.out_dir = cell / std::string(agents::algo_name(algo));
        overlay.emplace_back(std::string(agents::algo_name(algo)), train_to_dir(cfg, a.jobs));
        out << cell.filename().string() << ' ' << agents::algo_name(algo) << " final mean return "
            << nn::format_double(final_window_mean(overlay.back().second, 100)) << '\n';
      }
      harness::render_svg(overlay, cell / "curves.svg");
    }
  }
  return kExitOk;
}

}  // namespace

std::string grid_cell_name(double gamma, double noise) {
  return "g" + nn::format_double(gamma) + "_n" + nn::format_double(noise);
}

std::vector<double> parse_number_list(const std::string& text) {
  std::vector<double> out;
  for (const auto& item : split_list(text)) {
    double v = 0.0;
    const auto res = std::from_chars(item.data(), item.data() + item.size(), v);
    if (item.empty() || res.ec != std::errc() || res.ptr != item.data() + item.size())
      throw ValidationError("not a number in list: '" + item + "'");
    out.push_back(v);
  }
  return out;
}

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Multi-user edge-computing offloading: training and evaluation of actor-critic agents", "mecrl"};
  app.require_subcommand(1);

  TrainArgs train;
  auto* train_cmd = app.add_subcommand("train", "train K seeded runs and write curves and checkpoints");
  train_cmd->add_option("--config", train.config, "experiment config (JSON)")->required();
  train_cmd->add_option("--runs", train.runs, "number of seeded runs (overrides n_runs)");
  train_cmd->add_option("--out", train.out, "output directory (overrides out_dir)");
  train_cmd->add_option("--jobs", train.jobs, "runs trained concurrently")->check(CLI::PositiveNumber);

  EvalArgs ev;
  auto* eval_cmd = app.add_subcommand("eval", "greedy rollouts of checkpointed actors");
  eval_cmd->add_option("--config", ev.config, "experiment config (JSON)")->required();
  eval_cmd->add_option("--checkpoints", ev.checkpoints, "checkpoint directory")->required();
  eval_cmd->add_option("--episodes", ev.episodes, "evaluation episodes");

  PlotArgs plot;
  auto* plot_cmd = app.add_subcommand("plot", "overlay aggregate curves in one SVG");
  plot_cmd->add_option("--in", plot.inputs, "aggregate CSV files")->required()->expected(1, -1);
  plot_cmd->add_option("--out", plot.out, "SVG path")->required();

  GridArgs grid;
  auto* grid_cmd = app.add_subcommand("grid", "sweep discount factor and reward noise");
  grid_cmd->add_option("--config", grid.config, "base experiment config (JSON)")->required();
  grid_cmd->add_option("--gamma", grid.gamma, "comma-separated discount factors")->required();
  grid_cmd->add_option("--noise", grid.noise, "comma-separated reward noise levels")->required();
  grid_cmd->add_option("--out", grid.out, "root directory (default: out_dir)");
  grid_cmd->add_option("--algos", grid.algos, "comma-separated algorithms");
  grid_cmd->add_option("--runs", grid.runs, "number of seeded runs per cell");
  grid_cmd->add_option("--jobs", grid.jobs, "runs trained concurrently")->check(CLI::PositiveNumber);

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  if (!reversed.empty()) reversed.pop_back();  // program name
  try {
    app.parse(reversed);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << "\n\n" << app.help();
    return kExitInvalid;
  }

  try {
    if (train_cmd->parsed()) return cmd_train(train, out);
    if (eval_cmd->parsed()) return cmd_eval(ev, out);
    if (plot_cmd->parsed()) return cmd_plot(plot, out);
    return cmd_grid(grid, out);
  } catch (const IoError& e) {
    err << "error: " << e.what() << '\n';
    return kExitIo;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kExitInvalid;
  }
}

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  std::vector<std::string> args(argv, argv + argc);
  return run(args, out, err);
}

}  // namespace mecrl::cli
