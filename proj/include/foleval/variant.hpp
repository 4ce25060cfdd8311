#ifndef FOLEVAL_VARIANT_HPP
#define FOLEVAL_VARIANT_HPP

#include <string>

#include "foleval/errors.hpp"

namespace foleval {

// Prompt-composition variants: Full is the complete scaffold, the others are
// ablations (drop the context, swap the logic for the raw request, or send
// the raw request alone).
enum class TransformVariant { Full, NoContext, NoLogic, RawOnly };

inline const char* variant_name(TransformVariant v) {
  switch (v) {
    case TransformVariant::Full: return "full";
    case TransformVariant::NoContext: return "no_context";
    case TransformVariant::NoLogic: return "no_logic";
    case TransformVariant::RawOnly: return "raw_only";
  }
  return "?";
}

inline TransformVariant variant_from_name(const std::string& name) {
  if (name == "full") return TransformVariant::Full;
  if (name == "no_context") return TransformVariant::NoContext;
  if (name == "no_logic") return TransformVariant::NoLogic;
  if (name == "raw_only") return TransformVariant::RawOnly;
  throw Error(Errc::config_error, "unknown variant '" + name + "'");
}

}  // namespace foleval

#endif  // FOLEVAL_VARIANT_HPP
