#ifndef FOLEVAL_DATASET_HPP
#define FOLEVAL_DATASET_HPP

#include <algorithm>
#include <array>
#include <fstream>
#include <map>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "foleval/errors.hpp"
#include "foleval/fol/document.hpp"

namespace foleval {

inline const std::array<std::pair<const char*, const char*>, 10>& category_table() {
  static const std::array<std::pair<const char*, const char*>, 10> table = {{
      {"Harassment/Discrimination", "Harass/Disc"},
      {"Malware/Hacking", "Mal/Hack"},
      {"Physical harm", "Phys Harm"},
      {"Economic harm", "Econ Harm"},
      {"Fraud/Deception", "Fraud/Decep"},
      {"Disinformation", "Disinfo"},
      {"Sexual/Adult content", "Sex/Adult"},
      {"Privacy", "Privacy"},
      {"Expert advice", "Expert"},
      {"Government decision-making", "Govt Decis"},
  }};
  return table;
}

inline bool is_known_category(const std::string& category) {
  for (const auto& [full, abbrev] : category_table()) {
    if (category == full) return true;
  }
  return false;
}

inline std::string category_abbreviation(const std::string& category) {
  for (const auto& [full, abbrev] : category_table()) {
    if (category == full) return abbrev;
  }
  throw Error(Errc::unknown_category, category);
}

inline const std::set<std::string>& known_languages() {
  static const std::set<std::string> langs = {"en", "zh", "nl", "ja", "es"};
  return langs;
}

struct RequestRecord {
  std::string id;
  std::string category;
  std::string language;
  std::string raw_text;
  std::optional<fol::FolDocument> logic_doc;
  std::string source = "sentinel";  // sentinel | user-supplied
};

class Corpus {
 public:
  Corpus() = default;

  void add(RequestRecord record, int line = -1) {
    validate_record(record, line);
    auto key = std::make_pair(record.id, record.language);
    if (index_.count(key)) {
      throw Error(Errc::duplicate_key,
                  "(" + record.id + ", " + record.language + ")" +
                      (line >= 0 ? " at line " + std::to_string(line) : ""));
    }
    index_[key] = records_.size();
    records_.push_back(std::move(record));
  }

  const std::vector<RequestRecord>& records() const { return records_; }
  size_t size() const { return records_.size(); }

  const RequestRecord* find(const std::string& id, const std::string& language) const {
    auto it = index_.find({id, language});
    return it == index_.end() ? nullptr : &records_[it->second];
  }

  // Any-language lookup; ids share their category across languages.
  const RequestRecord* find_any(const std::string& id) const {
    for (const auto& [key, idx] : index_) {
      if (key.first == id) return &records_[idx];
    }
    return nullptr;
  }

 private:
  static void validate_record(const RequestRecord& r, int line) {
    auto fail = [&](const std::string& field, const std::string& detail) {
      std::string where = line >= 0 ? "line " + std::to_string(line) + ", " : "";
      throw Error(Errc::schema_error, where + "field '" + field + "': " + detail);
    };
    if (r.id.empty()) fail("id", "empty");
    if (!is_known_category(r.category)) fail("category", "'" + r.category + "' is not a known category");
    if (!known_languages().count(r.language)) fail("language", "'" + r.language + "' is not one of en/zh/nl/ja/es");
    if (r.raw_text.empty()) fail("raw_text", "empty");
    if (r.source != "sentinel" && r.source != "user-supplied") fail("source", "'" + r.source + "'");
  }

  std::vector<RequestRecord> records_;
  std::map<std::pair<std::string, std::string>, size_t> index_;
};

// ---------------------------------------------------------------------------
// JSONL load/save
// ---------------------------------------------------------------------------

inline nlohmann::json record_to_json(const RequestRecord& r) {
  nlohmann::json j = {{"id", r.id},
                      {"category", r.category},
                      {"language", r.language},
                      {"raw_text", r.raw_text},
                      {"logic_doc", nullptr},
                      {"source", r.source}};
  if (r.logic_doc) j["logic_doc"] = fol::document_to_json(*r.logic_doc);
  return j;
}

inline RequestRecord record_from_json(const nlohmann::json& j, int line = -1) {
  RequestRecord r;
  try {
    r.id = j.at("id").get<std::string>();
    r.category = j.at("category").get<std::string>();
    r.language = j.at("language").get<std::string>();
    r.raw_text = j.at("raw_text").get<std::string>();
    r.source = j.value("source", "user-supplied");
    if (j.contains("logic_doc") && !j.at("logic_doc").is_null()) {
      r.logic_doc = fol::document_from_json(j.at("logic_doc"));
    }
  } catch (const nlohmann::json::exception& e) {
    std::string where = line >= 0 ? "line " + std::to_string(line) + ": " : "";
    throw Error(Errc::schema_error, where + e.what());
  }
  return r;
}

inline Corpus load_corpus(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(Errc::io_error, "cannot open corpus file " + path);
  Corpus corpus;
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (text::trim(line).empty()) continue;
    nlohmann::json j;
    try {
      j = nlohmann::json::parse(line);
    } catch (const nlohmann::json::exception& e) {
      throw Error(Errc::schema_error, "line " + std::to_string(lineno) + ": " + e.what());
    }
    corpus.add(record_from_json(j, lineno), lineno);
  }
  return corpus;
}

inline void save_corpus(const Corpus& corpus, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw Error(Errc::io_error, "cannot write corpus file " + path);
  for (const auto& r : corpus.records()) {
    out << record_to_json(r).dump() << '\n';
  }
}

// ---------------------------------------------------------------------------
// Stats and filters
// ---------------------------------------------------------------------------

struct CorpusStats {
  // category -> language -> count
  std::map<std::string, std::map<std::string, size_t>> counts;
  size_t total = 0;

  size_t at(const std::string& category, const std::string& language) const {
    auto c = counts.find(category);
    if (c == counts.end()) return 0;
    auto l = c->second.find(language);
    return l == c->second.end() ? 0 : l->second;
  }
};

inline CorpusStats stats(const Corpus& corpus) {
  CorpusStats s;
  for (const auto& r : corpus.records()) {
    ++s.counts[r.category][r.language];
    ++s.total;
  }
  return s;
}

inline Corpus filter_by_category(const Corpus& corpus, const std::string& category) {
  if (!is_known_category(category)) throw Error(Errc::unknown_category, category);
  Corpus out;
  for (const auto& r : corpus.records())
    if (r.category == category) out.add(r);
  return out;
}

inline Corpus filter_by_language(const Corpus& corpus, const std::string& language) {
  Corpus out;
  for (const auto& r : corpus.records())
    if (r.language == language) out.add(r);
  return out;
}

inline Corpus filter_by_ids(const Corpus& corpus, const std::set<std::string>& ids) {
  Corpus out;
  for (const auto& r : corpus.records())
    if (ids.count(r.id)) out.add(r);
  return out;
}

}  // namespace foleval

#endif  // FOLEVAL_DATASET_HPP
