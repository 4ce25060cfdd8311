#ifndef FOLEVAL_FOL_DOCUMENT_HPP
#define FOLEVAL_FOL_DOCUMENT_HPP

#include <string>

#include <json.hpp>

#include "foleval/errors.hpp"
#include "foleval/fol/ast.hpp"
#include "foleval/fol/parser.hpp"
#include "foleval/fol/render.hpp"

namespace foleval::fol {

// Structured-text record for a FolDocument. Formula fields are stored in
// ascii style; parse/render define them bit-exactly.
inline nlohmann::json document_to_json(const FolDocument& doc) {
  nlohmann::json defs = nlohmann::json::array();
  for (const auto& d : doc.definitions) {
    defs.push_back({{"name", d.name},
                    {"arity", d.arity},
                    {"gloss", d.gloss},
                    {"language", d.language}});
  }
  nlohmann::json axioms = nlohmann::json::array();
  for (const auto& a : doc.axioms) {
    axioms.push_back(render(a, RenderStyle::Ascii));
  }
  return {{"definitions", defs},
          {"axioms", axioms},
          {"goal", doc.goal ? render(doc.goal, RenderStyle::Ascii) : ""}};
}

inline FolDocument document_from_json(const nlohmann::json& j) {
  FolDocument doc;
  try {
    for (const auto& d : j.at("definitions")) {
      doc.definitions.push_back({d.at("name").get<std::string>(),
                                 d.at("arity").get<size_t>(),
                                 d.at("gloss").get<std::string>(),
                                 d.at("language").get<std::string>()});
    }
    for (const auto& a : j.at("axioms")) {
      doc.axioms.push_back(parse(a.get<std::string>()));
    }
    std::string goal = j.at("goal").get<std::string>();
    if (!goal.empty()) doc.goal = parse(goal);
  } catch (const nlohmann::json::exception& e) {
    throw Error(Errc::schema_error, std::string("fol document: ") + e.what());
  }
  return doc;
}

}  // namespace foleval::fol

#endif  // FOLEVAL_FOL_DOCUMENT_HPP
