#ifndef FOLEVAL_PIPELINE_HPP
#define FOLEVAL_PIPELINE_HPP

#include <filesystem>
#include <fstream>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "foleval/analysis/silhouette.hpp"
#include "foleval/analysis/tsne.hpp"
#include "foleval/analysis/views.hpp"
#include "foleval/dataset.hpp"
#include "foleval/errors.hpp"
#include "foleval/judges.hpp"
#include "foleval/metrics.hpp"
#include "foleval/mitigations.hpp"
#include "foleval/providers.hpp"
#include "foleval/transform.hpp"

namespace foleval {

// ---------------------------------------------------------------------------
// Run configuration
// ---------------------------------------------------------------------------

struct ProviderSpec {
  std::string kind = "scripted";  // scripted | http
  std::string transcript_path;    // scripted
  std::string base_url;           // http
  std::string api_key_env;        // http; the key itself is never in config
  std::string model_id = "target-model";
};

struct JudgeConfig {
  std::string id = "rule";
  std::string kind = "rule";  // rule | llm
  std::string lexicon_path;   // rule; empty = built-in lexicon
  std::string template_path;  // llm
  ProviderSpec provider;      // llm
};

struct RunConfig {
  std::string corpus_path;
  std::string out_dir = "out";
  uint64_t seed = 0;
  int n_trials = 1;
  TransformVariant variant = TransformVariant::Full;
  double tau = 0.80;
  int parallelism = 1;
  bool keep_going = false;
  bool log_bodies = false;

  std::string translator_fixture;
  std::string prompt_templates_path;  // empty = built-in defaults

  ProviderSpec target;
  std::vector<JudgeConfig> judges;

  std::string mitigation = "none";  // none | self_reminder | guard_filter
  ProviderSpec guard;
  std::string guard_template_path;

  double perplexity = 30.0;
  int tsne_iters = 1000;

  nlohmann::json raw;  // canonical form, basis of the config hash
};

namespace detail {

inline void require_file(const std::string& path, const std::string& what) {
  if (path.empty()) {
    throw Error(Errc::config_error, what + " path missing from config");
  }
  if (!std::filesystem::exists(path)) {
    throw Error(Errc::config_error, what + " not found: " + path);
  }
}

inline ProviderSpec provider_spec_from(const nlohmann::json& j) {
  ProviderSpec spec;
  spec.kind = j.value("kind", spec.kind);
  spec.transcript_path = j.value("transcript", "");
  spec.base_url = j.value("base_url", "");
  spec.api_key_env = j.value("api_key_env", "");
  spec.model_id = j.value("model", spec.model_id);
  if (spec.kind == "scripted") {
    require_file(spec.transcript_path, "scripted transcript");
  } else if (spec.kind == "http") {
    if (spec.base_url.empty() || spec.api_key_env.empty()) {
      throw Error(Errc::config_error, "http provider needs base_url and api_key_env");
    }
  } else {
    throw Error(Errc::config_error, "unknown provider kind " + spec.kind);
  }
  return spec;
}

}  // namespace detail

inline RunConfig run_config_from_json(const nlohmann::json& j) {
  RunConfig cfg;
  cfg.raw = j;
  cfg.corpus_path = j.value("corpus", "");
  cfg.out_dir = j.value("out_dir", cfg.out_dir);
  cfg.seed = j.value("seed", cfg.seed);
  cfg.n_trials = j.value("n_trials", cfg.n_trials);
  if (cfg.n_trials < 1) throw Error(Errc::config_error, "n_trials must be >= 1");
  cfg.variant = variant_from_name(j.value("variant", "full"));
  cfg.tau = j.value("tau", cfg.tau);
  cfg.parallelism = j.value("parallelism", cfg.parallelism);
  cfg.keep_going = j.value("keep_going", false);
  cfg.perplexity = j.value("perplexity", cfg.perplexity);
  cfg.tsne_iters = j.value("tsne_iters", cfg.tsne_iters);

  detail::require_file(cfg.corpus_path, "corpus");
  cfg.translator_fixture = j.value("translator_fixture", "");
  if (!cfg.translator_fixture.empty()) {
    detail::require_file(cfg.translator_fixture, "translator fixture");
  }
  cfg.prompt_templates_path = j.value("prompt_templates", "");
  if (!cfg.prompt_templates_path.empty()) {
    detail::require_file(cfg.prompt_templates_path, "prompt templates");
  }

  if (j.contains("target")) cfg.target = detail::provider_spec_from(j.at("target"));

  for (const auto& jj : j.value("judges", nlohmann::json::array())) {
    JudgeConfig jc;
    jc.id = jj.value("id", jc.id);
    jc.kind = jj.value("kind", jc.kind);
    if (jc.kind == "rule") {
      jc.lexicon_path = jj.value("lexicon", "");
      if (!jc.lexicon_path.empty()) detail::require_file(jc.lexicon_path, "lexicon");
    } else if (jc.kind == "llm") {
      jc.template_path = jj.value("template", "");
      detail::require_file(jc.template_path, "judge template");
      jc.provider = detail::provider_spec_from(jj.at("provider"));
    } else {
      throw Error(Errc::config_error, "unknown judge kind " + jc.kind);
    }
    cfg.judges.push_back(std::move(jc));
  }

  cfg.mitigation = j.value("mitigation", cfg.mitigation);
  if (cfg.mitigation != "none" && cfg.mitigation != "self_reminder" &&
      cfg.mitigation != "guard_filter") {
    throw Error(Errc::config_error, "unknown mitigation " + cfg.mitigation);
  }
  if (cfg.mitigation == "guard_filter") {
    cfg.guard = detail::provider_spec_from(j.at("guard"));
    cfg.guard_template_path = j.value("guard_template", "");
    if (!cfg.guard_template_path.empty()) {
      detail::require_file(cfg.guard_template_path, "guard template");
    }
  }
  return cfg;
}

inline RunConfig load_run_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(Errc::io_error, "cannot open config " + path);
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::exception& e) {
    throw Error(Errc::config_error, std::string("config parse: ") + e.what());
  }
  return run_config_from_json(j);
}

// FNV-1a over the canonical (key-sorted) JSON dump of the config.
inline std::string config_hash(const RunConfig& cfg) {
  return text::to_hex(text::fnv1a64(cfg.raw.dump()));
}

// ---------------------------------------------------------------------------
// Serialization of pipeline artifacts
// ---------------------------------------------------------------------------

inline nlohmann::json verdict_to_json(const Verdict& v) {
  nlohmann::json j = {{"judge_id", v.judge_id}, {"jailbroken", v.jailbroken}};
  if (v.score) j["score"] = *v.score;
  if (v.label) j["label"] = *v.label;
  if (v.rationale) j["rationale"] = *v.rationale;
  return j;
}

inline Verdict verdict_from_json(const nlohmann::json& j) {
  Verdict v;
  v.judge_id = j.at("judge_id").get<std::string>();
  v.jailbroken = j.at("jailbroken").get<bool>();
  if (j.contains("score")) v.score = j.at("score").get<int>();
  if (j.contains("label")) v.label = j.at("label").get<std::string>();
  if (j.contains("rationale")) v.rationale = j.at("rationale").get<std::string>();
  return v;
}

inline nlohmann::json trial_to_json(const TrialResult& t) {
  nlohmann::json verdicts = nlohmann::json::array();
  for (const auto& v : t.verdicts) verdicts.push_back(verdict_to_json(v));
  return {{"request_id", t.request_id}, {"language", t.language},
          {"variant", variant_name(t.variant)}, {"trial_index", t.trial_index},
          {"prompt", t.prompt}, {"response", t.response},
          {"verdicts", verdicts}, {"mitigation", t.mitigation},
          {"flagged", t.flagged}, {"error", t.error}};
}

inline TrialResult trial_from_json(const nlohmann::json& j) {
  TrialResult t;
  t.request_id = j.at("request_id").get<std::string>();
  t.language = j.at("language").get<std::string>();
  t.variant = variant_from_name(j.at("variant").get<std::string>());
  t.trial_index = j.at("trial_index").get<int>();
  t.prompt = j.value("prompt", "");
  t.response = j.value("response", "");
  for (const auto& v : j.value("verdicts", nlohmann::json::array())) {
    t.verdicts.push_back(verdict_from_json(v));
  }
  t.mitigation = j.value("mitigation", "");
  t.flagged = j.value("flagged", false);
  t.error = j.value("error", "");
  return t;
}

// Transformed record: the corpus entry plus its logic document and gate result.
struct TransformedRecord {
  std::string request_id;
  std::string language;
  std::string category;
  std::optional<fol::FolDocument> doc;
  std::string rendered;
  std::string back_text;
  ConsistencyReport consistency;
  bool flagged = false;
  std::string error;
};

inline nlohmann::json transformed_to_json(const TransformedRecord& r) {
  nlohmann::json j = {{"request_id", r.request_id}, {"language", r.language},
                      {"category", r.category},     {"rendered", r.rendered},
                      {"back_text", r.back_text},   {"flagged", r.flagged},
                      {"error", r.error}};
  if (r.doc) j["fol_document"] = fol::document_to_json(*r.doc);
  j["consistency"] = {{"precision", r.consistency.precision},
                      {"recall", r.consistency.recall},
                      {"f1", r.consistency.f1},
                      {"threshold", r.consistency.threshold},
                      {"passes", r.consistency.passes}};
  return j;
}

inline TransformedRecord transformed_from_json(const nlohmann::json& j) {
  TransformedRecord r;
  r.request_id = j.at("request_id").get<std::string>();
  r.language = j.at("language").get<std::string>();
  r.category = j.value("category", "");
  if (j.contains("fol_document")) r.doc = fol::document_from_json(j.at("fol_document"));
  r.rendered = j.value("rendered", "");
  r.back_text = j.value("back_text", "");
  if (j.contains("consistency")) {
    const auto& c = j.at("consistency");
    r.consistency.precision = c.value("precision", 0.0);
    r.consistency.recall = c.value("recall", 0.0);
    r.consistency.f1 = c.value("f1", 0.0);
    r.consistency.threshold = c.value("threshold", 0.8);
    r.consistency.passes = c.value("passes", false);
  }
  r.flagged = j.value("flagged", false);
  r.error = j.value("error", "");
  return r;
}

// ---------------------------------------------------------------------------
// JSONL with a leading meta line carrying the config hash and seed
// ---------------------------------------------------------------------------

namespace detail {

inline nlohmann::json meta_line(const RunConfig& cfg, const std::string& kind) {
  return {{"kind", kind}, {"config_hash", config_hash(cfg)}, {"seed", cfg.seed}};
}

template <typename T, typename ToJson>
void write_jsonl(const std::string& path, const RunConfig& cfg, const std::string& kind,
                 const std::vector<T>& rows, ToJson to_json) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(Errc::io_error, "cannot write " + path);
  out << meta_line(cfg, kind).dump() << '\n';
  for (const auto& r : rows) out << to_json(r).dump() << '\n';
  if (!out.flush()) throw Error(Errc::io_error, "write failed for " + path);
}

template <typename T, typename FromJson>
std::vector<T> read_jsonl(const std::string& path, const std::string& kind,
                          FromJson from_json) {
  std::ifstream in(path);
  if (!in) throw Error(Errc::io_error, "cannot open " + path);
  std::vector<T> rows;
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (text::trim(line).empty()) continue;
    nlohmann::json j;
    try {
      j = nlohmann::json::parse(line);
    } catch (const nlohmann::json::exception& e) {
      throw Error(Errc::schema_error,
                  path + " line " + std::to_string(lineno) + ": " + e.what());
    }
    if (lineno == 1) {
      if (j.value("kind", "") != kind) {
        throw Error(Errc::schema_error, path + ": expected a '" + kind + "' meta line");
      }
      continue;
    }
    rows.push_back(from_json(j));
  }
  return rows;
}

inline std::shared_ptr<ChatProvider> make_chat_provider(const ProviderSpec& spec) {
  if (spec.kind == "scripted") {
    return scripted_provider_from(spec.transcript_path);
  }
  ProviderConfig pc;
  pc.base_url = spec.base_url;
  pc.api_key_env_name = spec.api_key_env;
  return std::make_shared<HttpChatProvider>(pc);
}

inline std::string out_path(const RunConfig& cfg, const std::string& name) {
  std::filesystem::create_directories(cfg.out_dir);
  return (std::filesystem::path(cfg.out_dir) / name).string();
}

}  // namespace detail

// ---------------------------------------------------------------------------
// Pipeline stages
// ---------------------------------------------------------------------------

struct StageSummary {
  size_t processed = 0;
  size_t flagged = 0;
  std::vector<std::string> warnings;
};

// transform: corpus -> transformed.jsonl (logic documents + consistency gate)
inline StageSummary cmd_transform(const RunConfig& cfg) {
  Corpus corpus = load_corpus(cfg.corpus_path);
  detail::require_file(cfg.translator_fixture, "translator fixture");
  auto translator = fixture_translator_from(cfg.translator_fixture);
  HashEmbedding embedder;

  StageSummary summary;
  std::vector<TransformedRecord> rows;
  for (const auto& rec : corpus.records()) {
    TransformedRecord row;
    row.request_id = rec.id;
    row.language = rec.language;
    row.category = rec.category;
    try {
      LogicPrompt lp = translate_to_logic(rec, *translator);
      row.doc = lp.doc;
      row.rendered = lp.rendered;
      row.back_text = back_translate(lp, *translator);
      row.consistency = check_consistency(rec.raw_text, row.back_text, embedder,
                                          cfg.tau, rec.language);
      row.flagged = !row.consistency.passes;
    } catch (const Error& e) {
      if (!cfg.keep_going) throw;
      row.error = e.what();
      row.flagged = true;
      summary.warnings.push_back(rec.id + ": " + e.what());
    }
    if (row.flagged) ++summary.flagged;
    ++summary.processed;
    rows.push_back(std::move(row));
  }
  detail::write_jsonl(detail::out_path(cfg, "transformed.jsonl"), cfg, "transformed",
                      rows, transformed_to_json);
  return summary;
}

// attack: transformed.jsonl -> trials.jsonl (n_trials per request group)
inline StageSummary cmd_attack(const RunConfig& cfg) {
  Corpus corpus = load_corpus(cfg.corpus_path);
  auto transformed = detail::read_jsonl<TransformedRecord>(
      detail::out_path(cfg, "transformed.jsonl"), "transformed", transformed_from_json);
  if (transformed.empty()) throw Error(Errc::empty_run, "no transformed records");

  auto templates = cfg.prompt_templates_path.empty()
                       ? std::map<std::string, PromptTemplate>{}
                       : prompt_templates_from_file(cfg.prompt_templates_path);
  auto template_for = [&](const std::string& lang) {
    auto it = templates.find(lang);
    if (it != templates.end()) return it->second;
    PromptTemplate t;
    t.language = lang;
    return t;
  };

  std::shared_ptr<ChatProvider> target = detail::make_chat_provider(cfg.target);

  MitigationConfig mit;
  if (cfg.mitigation == "guard_filter") {
    mit.kind = MitigationConfig::Kind::GuardFilter;
    mit.guard = detail::make_chat_provider(cfg.guard);
    mit.guard_model_id = cfg.guard.model_id;
    if (!cfg.guard_template_path.empty()) {
      mit.guard_template = judge_template_from_file(cfg.guard_template_path);
    }
  }

  StageSummary summary;
  std::vector<TrialResult> trials;
  for (const auto& row : transformed) {
    if (!row.error.empty()) continue;  // untranslatable; gate-flagged rows still run
    const RequestRecord* rec = corpus.find(row.request_id, row.language);
    if (!rec) throw Error(Errc::unknown_request, row.request_id);

    LogicPrompt lp{row.request_id, row.language, row.doc.value_or(fol::FolDocument{}),
                   row.rendered};
    AttackPrompt attack =
        compose_prompt(lp, template_for(row.language), cfg.variant, rec->raw_text);

    for (int i = 1; i <= cfg.n_trials; ++i) {
      TrialResult t;
      t.request_id = row.request_id;
      t.language = row.language;
      t.variant = cfg.variant;
      t.trial_index = i;
      t.prompt = attack.text;
      t.mitigation = cfg.mitigation == "none" ? "" : cfg.mitigation;
      try {
        if (cfg.mitigation == "guard_filter" && !guard_filter(attack.text, mit).allowed) {
          t.response = guard_refusal_text(row.language);  // target never queried
        } else {
          ChatRequest req;
          req.model_id = cfg.target.model_id;
          req.seed = static_cast<int64_t>(cfg.seed);
          if (cfg.mitigation == "self_reminder") {
            MitigationConfig sr;  // default reminder texts
            req.messages = self_reminder_wrap(attack.text, sr);
          } else {
            req.messages = {{"user", attack.text}};
          }
          t.response = target->complete(req).content;
        }
      } catch (const Error& e) {
        t.error = e.what();
        t.flagged = true;
        ++summary.flagged;
      }
      ++summary.processed;
      trials.push_back(std::move(t));
    }
  }
  detail::write_jsonl(detail::out_path(cfg, "trials.jsonl"), cfg, "trials", trials,
                      trial_to_json);
  return summary;
}

// judge: trials.jsonl -> judged.jsonl (one verdict per enabled judge per trial)
inline StageSummary cmd_judge(const RunConfig& cfg) {
  auto trials = detail::read_jsonl<TrialResult>(detail::out_path(cfg, "trials.jsonl"),
                                               "trials", trial_from_json);
  if (trials.empty()) throw Error(Errc::empty_run, "no trials to judge");
  if (cfg.judges.empty()) throw Error(Errc::config_error, "no judges enabled");

  struct ActiveJudge {
    JudgeConfig cfg;
    RefusalLexicon lexicon;
    JudgePromptTemplate tmpl;
    std::shared_ptr<ChatProvider> provider;
  };
  std::vector<ActiveJudge> active;
  for (const auto& jc : cfg.judges) {
    ActiveJudge aj;
    aj.cfg = jc;
    if (jc.kind == "rule") {
      aj.lexicon = jc.lexicon_path.empty() ? default_lexicon()
                                           : lexicon_from_file(jc.lexicon_path);
    } else {
      aj.tmpl = judge_template_from_file(jc.template_path);
      aj.provider = detail::make_chat_provider(jc.provider);
    }
    active.push_back(std::move(aj));
  }

  StageSummary summary;
  for (auto& t : trials) {
    for (auto& aj : active) {
      try {
        Verdict v = aj.cfg.kind == "rule"
                        ? rule_judge(t.response, aj.lexicon, t.language)
                        : llm_judge(t.prompt, t.response, aj.tmpl, *aj.provider,
                                    aj.cfg.id, aj.cfg.provider.model_id);
        v.judge_id = aj.cfg.id;
        t.verdicts.push_back(std::move(v));
      } catch (const Error& e) {
        t.flagged = true;
        t.error = e.what();
        ++summary.flagged;
      }
    }
    ++summary.processed;
  }
  detail::write_jsonl(detail::out_path(cfg, "judged.jsonl"), cfg, "judged", trials,
                      trial_to_json);
  return summary;
}

// report: judged.jsonl -> report.json + report.md + categories.csv, plus a
// mitigation comparison when a baseline judged file is supplied
inline RunReport cmd_report(const RunConfig& cfg,
                            const std::string& baseline_judged_path = "") {
  Corpus corpus = load_corpus(cfg.corpus_path);
  auto trials = detail::read_jsonl<TrialResult>(detail::out_path(cfg, "judged.jsonl"),
                                               "judged", trial_from_json);
  RunReport report = build_report(trials, corpus, cfg.n_trials);
  report.config_hash = config_hash(cfg);
  report.seed = cfg.seed;

  auto write_text = [&](const std::string& name, const std::string& body) {
    std::string path = detail::out_path(cfg, name);
    std::ofstream out(path, std::ios::binary);
    if (!out) throw Error(Errc::io_error, "cannot write " + path);
    out << body;
    if (!out.flush()) throw Error(Errc::io_error, "write failed for " + path);
  };
  std::string stamp = "config_hash=" + report.config_hash +
                      " seed=" + std::to_string(cfg.seed);
  write_text("report.json", report_to_json(report).dump(2) + "\n");
  write_text("report.md", report_to_markdown(report));
  write_text("categories.csv", "# " + stamp + "\n" + category_csv(report));

  if (!baseline_judged_path.empty()) {
    auto base_trials = detail::read_jsonl<TrialResult>(baseline_judged_path, "judged",
                                                       trial_from_json);
    RunReport base = build_report(base_trials, corpus, cfg.n_trials);
    auto rows = mitigation_report(base, report);
    write_text("mitigation.csv", "# " + stamp + "\n" + mitigation_table_csv(rows));
    write_text("mitigation.md", mitigation_table_markdown(rows, cfg.n_trials));
  }
  return report;
}

// project: transformed.jsonl -> scatter.csv + scatter.svg via t-SNE over the
// three views of every request
inline analysis::Projection cmd_project(const RunConfig& cfg,
                                        StageSummary* summary = nullptr) {
  Corpus corpus = load_corpus(cfg.corpus_path);
  auto transformed = detail::read_jsonl<TransformedRecord>(
      detail::out_path(cfg, "transformed.jsonl"), "transformed", transformed_from_json);

  auto templates = cfg.prompt_templates_path.empty()
                       ? std::map<std::string, PromptTemplate>{}
                       : prompt_templates_from_file(cfg.prompt_templates_path);

  std::vector<analysis::RequestViews> views;
  for (const auto& row : transformed) {
    const RequestRecord* rec = corpus.find(row.request_id, row.language);
    if (!rec) throw Error(Errc::unknown_request, row.request_id);
    PromptTemplate tmpl;
    auto it = templates.find(row.language);
    if (it != templates.end()) {
      tmpl = it->second;
    } else {
      tmpl.language = row.language;
    }
    std::string full;
    if (!row.rendered.empty()) {
      LogicPrompt lp{row.request_id, row.language,
                     row.doc.value_or(fol::FolDocument{}), row.rendered};
      full = compose_prompt(lp, tmpl, TransformVariant::Full).text;
    }
    views.push_back({row.request_id, row.language, rec->raw_text, row.rendered, full});
  }

  HashEmbedding embedder;
  std::vector<std::string> warnings;
  analysis::EmbeddingSet set = analysis::embed_corpus_views(views, embedder, &warnings);
  if (summary) {
    summary->processed = set.points.size();
    summary->warnings = warnings;
  }

  analysis::Projection proj =
      analysis::tsne(set.points, cfg.perplexity, cfg.tsne_iters, cfg.seed);
  std::string prefix = detail::out_path(cfg, "scatter");
  analysis::emit_scatter(proj, set.labels, prefix);

  // stamp both artifacts with the config hash and seed
  std::string stamp = "config_hash=" + config_hash(cfg) +
                      " seed=" + std::to_string(cfg.seed);
  auto prepend = [&](const std::string& path, const std::string& line) {
    std::ifstream in(path, std::ios::binary);
    std::string body((std::istreambuf_iterator<char>(in)),
                     std::istreambuf_iterator<char>());
    std::ofstream out(path, std::ios::binary);
    if (!out) throw Error(Errc::io_error, "cannot rewrite " + path);
    out << line << body;
    if (!out.flush()) throw Error(Errc::io_error, "write failed for " + path);
  };
  prepend(prefix + ".csv", "# " + stamp + "\n");
  prepend(prefix + ".svg", "<!-- " + stamp + " -->\n");
  return proj;
}

}  // namespace foleval

#endif  // FOLEVAL_PIPELINE_HPP
