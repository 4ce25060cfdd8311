#include <doctest.h>

#include "foleval/mitigations.hpp"

using namespace foleval;

namespace {

TrialResult make_trial(const std::string& id, int index, bool jailbroken) {
  TrialResult t;
  t.request_id = id;
  t.language = "en";
  t.trial_index = index;
  t.verdicts.push_back({"rule", jailbroken, std::nullopt, std::nullopt, std::nullopt});
  return t;
}

}  // namespace

TEST_CASE("self_reminder_wrap is definitional") {
  MitigationConfig cfg;
  cfg.kind = MitigationConfig::Kind::SelfReminder;
  cfg.reminder_prefix = "P";
  cfg.reminder_suffix = "S";
  auto msgs = self_reminder_wrap("Q", cfg);
  REQUIRE(msgs.size() == 2);
  CHECK(msgs[0].role == "system");
  CHECK(msgs[0].content == "P");
  CHECK(msgs[1].role == "user");
  CHECK(msgs[1].content == "Q\nS");
}

TEST_CASE("self_reminder_wrap with empty suffix leaves the prompt untouched") {
  MitigationConfig cfg;
  cfg.reminder_suffix = "";
  auto msgs = self_reminder_wrap("Q", cfg);
  CHECK(msgs[1].content == "Q");
}

TEST_CASE("self_reminder wrap then unwrap is an exact string inverse") {
  MitigationConfig cfg;
  const char* prompts[] = {"simple", "multi\nline\nprompt", "with trailing\n",
                           "unicode ∀x P(x) 测试"};
  for (const char* p : prompts) {
    CHECK(self_reminder_unwrap(self_reminder_wrap(p, cfg), cfg) == p);
  }
}

TEST_CASE("self_reminder_wrap never modifies the interior prompt bytes") {
  MitigationConfig cfg;
  std::string prompt = "inner prompt with \n and spaces  ";
  auto msgs = self_reminder_wrap(prompt, cfg);
  CHECK(msgs[1].content.substr(0, prompt.size()) == prompt);
}

TEST_CASE("wrong kind is rejected") {
  MitigationConfig cfg;
  cfg.kind = MitigationConfig::Kind::GuardFilter;
  try {
    self_reminder_wrap("Q", cfg);
    FAIL("expected WrongKind");
  } catch (const Error& e) {
    CHECK(e.code() == Errc::wrong_kind);
  }
}

TEST_CASE("guard_filter decisions") {
  MitigationConfig cfg;
  cfg.kind = MitigationConfig::Kind::GuardFilter;

  SUBCASE("unsafe blocks") {
    auto guard = std::make_shared<ScriptedChatProvider>();
    guard->set_default_responses({"unsafe"});
    cfg.guard = guard;
    GuardDecision d = guard_filter("anything", cfg);
    CHECK_FALSE(d.allowed);
    CHECK(d.label == "unsafe");
  }

  SUBCASE("safe allows") {
    auto guard = std::make_shared<ScriptedChatProvider>();
    guard->set_default_responses({"safe"});
    cfg.guard = guard;
    CHECK(guard_filter("anything", cfg).allowed);
  }

  SUBCASE("unparseable guard reply") {
    auto guard = std::make_shared<ScriptedChatProvider>();
    guard->set_default_responses({"maybe?"});
    cfg.guard = guard;
    CHECK_THROWS_AS(guard_filter("anything", cfg), Error);
  }
}

TEST_CASE("guard template routes the prompt through {REQUEST}") {
  MitigationConfig cfg;
  cfg.kind = MitigationConfig::Kind::GuardFilter;
  cfg.guard_template.text = "Classify: {REQUEST}\nAnswer safe or unsafe.";
  auto guard = std::make_shared<ScriptedChatProvider>();
  ChatRequest expected;
  expected.model_id = "guard-model";
  expected.messages = {{"user", "Classify: the prompt\nAnswer safe or unsafe."}};
  guard->add_entry_for(expected, {"safe"});
  cfg.guard = guard;
  CHECK(guard_filter("the prompt", cfg).allowed);
  CHECK(guard->calls() == 1);
}

TEST_CASE("bypass rate equals hand count on a 10-prompt scripted guard") {
  MitigationConfig cfg;
  cfg.kind = MitigationConfig::Kind::GuardFilter;
  auto guard = std::make_shared<ScriptedChatProvider>();
  // 10 distinct prompts; guard passes exactly 4
  for (int i = 0; i < 10; ++i) {
    ChatRequest req;
    req.model_id = "guard-model";
    req.messages = {{"user", "prompt " + std::to_string(i)}};
    guard->add_entry_for(req, {i < 4 ? "safe" : "unsafe"});
  }
  cfg.guard = guard;
  size_t allowed = 0;
  for (int i = 0; i < 10; ++i) {
    if (guard_filter("prompt " + std::to_string(i), cfg).allowed) ++allowed;
  }
  CHECK(allowed == 4);
  CHECK(bypass_rate(allowed, 10) == doctest::Approx(0.4));
}

TEST_CASE("mitigation_report deltas") {
  Corpus corpus;
  corpus.add({"A", "Privacy", "en", "t", std::nullopt, "sentinel"});
  corpus.add({"B", "Privacy", "en", "t", std::nullopt, "sentinel"});

  std::vector<TrialResult> attack = {make_trial("A", 1, true), make_trial("B", 1, true)};
  std::vector<TrialResult> mitigated = {make_trial("A", 1, false), make_trial("B", 1, true)};

  RunReport base = build_report(attack, corpus, 1);
  RunReport mit = build_report(mitigated, corpus, 1);

  SUBCASE("identical runs give zero deltas") {
    auto rows = mitigation_report(base, base);
    REQUIRE(rows.size() == 1);
    CHECK(rows[0].delta_1 == 0.0);
    CHECK(rows[0].delta_n == 0.0);
  }

  SUBCASE("deltas match hand subtraction") {
    auto rows = mitigation_report(base, mit);
    REQUIRE(rows.size() == 1);
    CHECK(rows[0].baseline_asr_1 == doctest::Approx(1.0));
    CHECK(rows[0].mitigated_asr_1 == doctest::Approx(0.5));
    CHECK(rows[0].delta_1 == doctest::Approx(-0.5));
  }

  SUBCASE("all-refuse mitigated run reports zero ASR") {
    std::vector<TrialResult> refused = {make_trial("A", 1, false), make_trial("B", 1, false)};
    auto rows = mitigation_report(base, build_report(refused, corpus, 1));
    CHECK(rows[0].mitigated_asr_1 == 0.0);
  }

  SUBCASE("mismatched runs rejected") {
    std::vector<TrialResult> extra = {make_trial("A", 1, true), make_trial("A", 2, true),
                                      make_trial("B", 1, true), make_trial("B", 2, true)};
    RunReport other = build_report(extra, corpus, 2);
    CHECK_THROWS_AS(mitigation_report(base, other), Error);
  }
}

TEST_CASE("guard refusal text reads as a refusal in every language") {
  auto lex = default_lexicon();
  for (const char* lang : {"en", "zh", "nl", "ja", "es"}) {
    CHECK_FALSE(rule_judge(guard_refusal_text(lang), lex, lang).jailbroken);
  }
}
