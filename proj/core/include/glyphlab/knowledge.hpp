#pragma once

#include <array>
#include <cstdint>
#include <memory>
#include <string>
#include <vector>

#include "glyphlab/concept_world.hpp"
#include "glyphlab/types.hpp"

namespace glyphlab {

/// One strategist output: a permissible surrogate carrying the erased
/// concept's geometry, plus the color prior and the conditions used during
/// awakening and background generation.
struct SurrogatePlan {
  int index = 0;  // k, 1-based
  ConceptId surrogate;
  std::array<double, 3> color_prior{0, 0, 0};
  ConditionRef adjective_condition;
  ConditionRef context_condition;
};

struct KnowledgeQuery {
  ConceptId target;
  ConceptAttributes attributes;
  std::vector<ConceptId> erased_set;  // target plus anything else suppressed
  int count = 0;                      // K
  std::uint64_t seed = 0;
};

/// Opaque source of surrogate-plan drafts. The built-in table source derives
/// drafts from the world's attribute records; the HTTP source asks a remote
/// service and falls back to the table on any failure.
class KnowledgeSource {
 public:
  virtual ~KnowledgeSource() = default;
  virtual std::vector<SurrogatePlan> drafts(const KnowledgeQuery& query) const = 0;
  virtual std::string label() const = 0;
};

using KnowledgeSourcePtr = std::shared_ptr<const KnowledgeSource>;

/// Deterministic attribute-table source.
///
/// Surrogates are the non-erased concepts sharing the target's shape_class,
/// ranked by color distance to the target (ties by id order); tied leaders
/// alternate round-robin across k. The color prior is the target's canonical
/// color. Adjective and context conditions cycle through the target's tags;
/// a tag resolves to a concept condition when it names a world concept and
/// degrades to the null condition otherwise.
KnowledgeSourcePtr make_table_knowledge(const ConceptWorld& world);

/// Posts {target, attributes, erased_set, count, seed} as JSON to `url` and
/// expects a JSON array of plan drafts. Timeouts, transport errors, non-200
/// statuses and malformed bodies degrade to the table source with a warning
/// on stderr.
KnowledgeSourcePtr make_http_knowledge(std::string url,
                                       KnowledgeSourcePtr fallback,
                                       int timeout_seconds = 5);

}  // namespace glyphlab
