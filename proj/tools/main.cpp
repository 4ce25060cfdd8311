#include <cstdio>
#include <exception>
#include <string>

#include <CLI11.hpp>

#include "foleval/pipeline.hpp"

namespace {

struct GlobalOpts {
  std::string config_path;
  std::string out_dir;
  long long seed = -1;
  bool keep_going = false;
  bool log_bodies = false;
};

foleval::RunConfig load_config(const GlobalOpts& opts) {
  foleval::RunConfig cfg = foleval::load_run_config(opts.config_path);
  if (!opts.out_dir.empty()) cfg.out_dir = opts.out_dir;
  if (opts.seed >= 0) {
    cfg.seed = static_cast<uint64_t>(opts.seed);
    cfg.raw["seed"] = cfg.seed;  // the hash covers the effective seed
  }
  if (opts.keep_going) cfg.keep_going = true;
  cfg.log_bodies = opts.log_bodies;
  return cfg;
}

void print_summary(const char* stage, const foleval::StageSummary& s,
                   const foleval::RunConfig& cfg) {
  // bodies are never echoed here; warnings carry ids and error text only
  std::printf("%s: processed=%zu flagged=%zu config=%s seed=%llu\n", stage, s.processed,
              s.flagged, foleval::config_hash(cfg).c_str(),
              static_cast<unsigned long long>(cfg.seed));
  for (const auto& w : s.warnings) std::printf("  warning: %s\n", w.c_str());
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"black-box LLM safety evaluation harness"};
  app.require_subcommand(1);

  GlobalOpts opts;
  app.add_option("--config", opts.config_path, "run config JSON path");
  app.add_option("--seed", opts.seed, "override the config seed");
  app.add_option("--out", opts.out_dir, "override the output directory");
  app.add_flag("--keep-going", opts.keep_going, "record per-record errors instead of aborting");
  app.add_flag("--log-bodies", opts.log_bodies,
               "opt in to echoing prompt/response bodies (off by default)");

  auto* transform = app.add_subcommand("transform", "corpus -> logic documents + consistency gate");
  auto* attack = app.add_subcommand("attack", "transformed corpus -> trial responses");
  auto* judge = app.add_subcommand("judge", "trials -> verdicts");
  auto* report = app.add_subcommand("report", "judged trials -> report files");
  std::string baseline_path;
  report->add_option("--baseline", baseline_path,
                     "judged.jsonl of an unmitigated run for the comparison table");
  auto* project = app.add_subcommand("project", "embedding views -> t-SNE scatter files");
  auto* validate = app.add_subcommand("validate-dataset", "schema-check a corpus file");
  std::string dataset_path;
  validate->add_option("path", dataset_path, "corpus JSONL path")->required();

  CLI11_PARSE(app, argc, argv);

  try {
    if (validate->parsed()) {
      foleval::Corpus corpus = foleval::load_corpus(dataset_path);
      foleval::CorpusStats st = foleval::stats(corpus);
      std::printf("ok: %zu records\n", st.total);
      for (const auto& [category, langs] : st.counts) {
        for (const auto& [lang, count] : langs) {
          std::printf("  %s/%s: %zu\n", category.c_str(), lang.c_str(), count);
        }
      }
      return 0;
    }

    if (opts.config_path.empty()) {
      std::fprintf(stderr, "error: --config is required\n");
      return 2;
    }
    foleval::RunConfig cfg = load_config(opts);

    if (transform->parsed()) {
      print_summary("transform", foleval::cmd_transform(cfg), cfg);
    } else if (attack->parsed()) {
      print_summary("attack", foleval::cmd_attack(cfg), cfg);
    } else if (judge->parsed()) {
      print_summary("judge", foleval::cmd_judge(cfg), cfg);
    } else if (report->parsed()) {
      foleval::RunReport r = foleval::cmd_report(cfg, baseline_path);
      std::printf("report: groups=%zu judges=%zu config=%s seed=%llu\n", r.total_groups,
                  r.judges.size(), r.config_hash.c_str(),
                  static_cast<unsigned long long>(r.seed));
    } else if (project->parsed()) {
      foleval::StageSummary s;
      foleval::cmd_project(cfg, &s);
      print_summary("project", s, cfg);
    }
  } catch (const foleval::Error& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 1;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 1;
  }
  return 0;
}
