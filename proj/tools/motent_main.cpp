// motent: skill-assessment features from motion time series.
//
// Subcommands:
//   codebook   train per-K motion codebooks from the manifest's expert trials
//   featurize  turn every trial into a persisted feature vector record
//   evaluate   cross-validate per criterion and write OSATS-style tables
//   synth      emit the synthetic validation curves (SNR + phase sweeps)
//   report     render a text roll-up of the latest evaluation
//
// Exit codes: 0 ok, 2 config error, 3 data error, 4 check failure.

#include <cstdio>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "motent/motent.hpp"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitConfig = 2;
constexpr int kExitData = 3;
constexpr int kExitCheck = 4;

struct Overrides {
  std::string config_path;
  std::string task, modality, family, manifest, output_dir, cv, metric;
  std::vector<int> k_grid;
  std::uint64_t seed = 0;
  std::uint64_t cv_seed = 0;
  int threads = -1;
  int sffs_max_dim = -1;
  bool no_sffs = false, paper_protocol = false, synthetic = false, cv_sweep = false;
};

// Shared options on every subcommand; flags override the config file.
void add_common(CLI::App* cmd, Overrides& ov) {
  cmd->add_option("-c,--config", ov.config_path, "config file (key = value lines)")
      ->check(CLI::ExistingFile);
  cmd->add_option("--task", ov.task, "task: suturing | knot_tying");
  cmd->add_option("--modality", ov.modality, "modality: video | accel | fused");
  cmd->add_option("--family", ov.family, "features: entropy | apen | xapen | dct | dft | smt");
  cmd->add_option("--manifest", ov.manifest, "trial manifest (JSON)");
  cmd->add_option("-o,--output-dir", ov.output_dir,
                  "output root (default $MOTENT_OUTPUT_ROOT or ./motent-out)");
  cmd->add_option("--seed", ov.seed, "root RNG seed");
  cmd->add_option("--cv", ov.cv, "cross-validation: loocv | kfold:2 | kfold:5 | kfold:10");
  cmd->add_option("--cv-seed", ov.cv_seed, "fold-shuffle seed");
  cmd->add_flag("--cv-sweep", ov.cv_sweep,
                "evaluate every scheme (2/5/10-fold + loocv) in one run");
  cmd->add_option("--k", ov.k_grid, "codebook size(s), subset of [2..10, 12, 14, 16, 18, 20]");
  cmd->add_option("--metric", ov.metric, "distance: euclidean | manhattan | chebyshev");
  cmd->add_option("--threads", ov.threads, "worker threads (0 = auto)");
  cmd->add_option("--sffs-max-dim", ov.sffs_max_dim, "feature-selection size cap");
  cmd->add_flag("--no-sffs", ov.no_sffs, "skip feature selection (use all features)");
  cmd->add_flag("--paper-protocol", ov.paper_protocol,
                "select features once on the full dataset (optimistic legacy protocol)");
  cmd->add_flag("--synthetic", ov.synthetic, "use the generated synthetic dataset as input");
}

motent::ExperimentConfig resolve(const Overrides& ov, const CLI::App* cmd) {
  motent::ExperimentConfig cfg;
  if (!ov.config_path.empty()) cfg = motent::ExperimentConfig::load(ov.config_path);
  if (!ov.task.empty()) cfg.task = motent::task_from_name(ov.task);
  if (!ov.modality.empty()) cfg.modality = motent::modality_from_name(ov.modality);
  if (!ov.family.empty()) cfg.family = motent::family_choice_from_name(ov.family);
  if (!ov.manifest.empty()) cfg.manifest = ov.manifest;
  if (!ov.output_dir.empty()) cfg.output_dir = ov.output_dir;
  if (cmd->count("--seed") > 0) cfg.seed = ov.seed;
  if (!ov.cv.empty()) cfg.cv = ov.cv;
  if (cmd->count("--cv-seed") > 0) cfg.cv_seed = ov.cv_seed;
  if (ov.cv_sweep) cfg.cv_sweep = true;
  if (!ov.k_grid.empty()) cfg.k_grid = ov.k_grid;
  if (!ov.metric.empty()) cfg.metric = motent::metric_from_name(ov.metric);
  if (ov.threads >= 0) cfg.threads = ov.threads;
  if (ov.sffs_max_dim >= 0) cfg.sffs_max_dim = ov.sffs_max_dim;
  if (ov.no_sffs) cfg.sffs = false;
  if (ov.paper_protocol) cfg.paper_protocol = true;
  if (ov.synthetic) cfg.synthetic = true;
  return cfg;
}

void print_result(const motent::CommandResult& result) {
  for (const auto& w : result.warnings) std::fprintf(stderr, "warning: %s\n", w.c_str());
  for (const auto& [trial, err] : result.failures)
    std::fprintf(stderr, "failed: trial '%s': %s\n", trial.c_str(), err.c_str());
  for (const auto& p : result.outputs) std::printf("wrote %s\n", p.string().c_str());
  if (!result.failures.empty())
    std::fprintf(stderr, "%zu trial(s) failed\n", result.failures.size());
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"motion-entropy skill assessment"};
  app.require_subcommand(1);

  Overrides ov;
  bool check = false;
  bool save_config = false;

  auto* cmd_codebook = app.add_subcommand("codebook", "train per-K codebooks from expert trials");
  auto* cmd_featurize = app.add_subcommand("featurize", "compute per-trial feature vectors");
  auto* cmd_evaluate = app.add_subcommand("evaluate", "cross-validate and write OSATS tables");
  auto* cmd_synth = app.add_subcommand("synth", "emit the synthetic validation curves");
  auto* cmd_report = app.add_subcommand("report", "render a text report of the last evaluation");
  for (auto* cmd : {cmd_codebook, cmd_featurize, cmd_evaluate, cmd_synth, cmd_report})
    add_common(cmd, ov);
  cmd_synth->add_flag("--check", check, "enforce the documented curve trends (exit 4 on failure)");
  for (auto* cmd : {cmd_codebook, cmd_featurize, cmd_evaluate, cmd_synth})
    cmd->add_flag("--save-config", save_config, "also write the resolved config to the output dir");

  CLI11_PARSE(app, argc, argv);

  try {
    const auto* active = app.get_subcommands().front();
    const auto cfg = resolve(ov, active);

    motent::CommandResult result;
    if (active == cmd_codebook) {
      result = motent::cmd_codebook(cfg);
    } else if (active == cmd_featurize) {
      result = motent::cmd_featurize(cfg);
    } else if (active == cmd_evaluate) {
      result = motent::cmd_evaluate(cfg);
    } else if (active == cmd_synth) {
      result = motent::cmd_synth(cfg, check);
    } else {
      result = motent::cmd_report(cfg);
      std::printf("%s", motent::render_report(cfg).c_str());
    }

    if (save_config) {
      const auto path = cfg.resolved_output_dir() / "config.txt";
      cfg.save(path);
      result.outputs.push_back(path);
    }
    print_result(result);
    return result.ok() ? kExitOk : kExitData;
  } catch (const motent::CheckFailure& e) {
    std::fprintf(stderr, "check failed: %s\n", e.what());
    return kExitCheck;
  } catch (const motent::ConfigError& e) {
    std::fprintf(stderr, "config error: %s\n", e.what());
    return kExitConfig;
  } catch (const motent::ParseError& e) {
    std::fprintf(stderr, "data error: %s\n", e.what());
    return kExitData;
  } catch (const motent::ParamError& e) {
    std::fprintf(stderr, "config error: %s\n", e.what());
    return kExitConfig;
  } catch (const motent::DataError& e) {
    std::fprintf(stderr, "data error: %s\n", e.what());
    return kExitData;
  } catch (const motent::Error& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return kExitData;
  }
}
