#include <cstdint>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "argmine/config.hpp"
#include "argmine/errors.hpp"
#include "argmine/pipeline.hpp"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitUsage = 1;
constexpr int kExitData = 2;
constexpr int kExitNumeric = 3;

int dispatch(const std::string& stage, const std::string& config_path,
             bool force, int jobs, std::optional<std::uint64_t> seed) {
  try {
    argmine::PipelineConfig config =
        argmine::PipelineConfig::load(config_path);
    if (seed) {
      config.run_seeds = {*seed};
      config.lda_seed = *seed;
    }
    argmine::StageOptions options;
    options.force = force;
    options.jobs = jobs;
    argmine::run_stage(config, stage, options);
    return kExitOk;
  } catch (const argmine::ConfigError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const argmine::NumericError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitNumeric;
  } catch (const argmine::DataError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitData;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitData;
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{
      "argmine: label attacked sentences in argumentative posts, analyze "
      "feature effects, and train/evaluate an attackability ranker"};
  app.require_subcommand(1);

  std::string config_path;
  bool force = false;
  int jobs = 0;
  std::optional<std::uint64_t> seed;
  app.add_option("--config", config_path, "pipeline config file")
      ->required()
      ->check(CLI::ExistingFile);
  app.add_flag("--force", force, "re-run the stage even if up to date");
  app.add_option("--jobs", jobs, "worker threads (default: number of cores)");
  app.add_option("--seed", seed, "override the run seed (single-seed run)");

  std::vector<std::string> stages = argmine::pipeline_stages();
  stages.push_back("all");
  const char* help[] = {
      "ingest posts.jsonl/comments.jsonl into a corpus",
      "label attacked and successfully attacked sentences",
      "train topic models and assign post domains",
      "compute external knowledge features",
      "extract proposition, tone, and n-gram features",
      "fit per-feature odds-ratio models",
      "grid-search and train the attackability ranker",
      "evaluate the ranker and baselines on the test split",
      "render per-post HTML reports",
      "run every stage in order"};
  for (std::size_t i = 0; i < stages.size(); ++i) {
    // global flags may follow the stage name
    app.add_subcommand(stages[i], help[i])->fallthrough();
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? kExitOk : kExitUsage;
  }

  const std::string stage = app.get_subcommands().front()->get_name();
  return dispatch(stage, config_path, force, jobs, seed);
}
