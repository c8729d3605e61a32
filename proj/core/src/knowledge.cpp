#include "glyphlab/knowledge.hpp"

#include <algorithm>
#include <cmath>
#include <iostream>
#include <stdexcept>

#include <httplib.h>
#include <json.hpp>

namespace glyphlab {

namespace {

double color_distance(const std::array<double, 3>& a,
                      const std::array<double, 3>& b) {
  double s = 0.0;
  for (int i = 0; i < 3; ++i) {
    const auto u = static_cast<std::size_t>(i);
    s += (a[u] - b[u]) * (a[u] - b[u]);
  }
  return std::sqrt(s);
}

ConditionRef tag_condition(const ConceptWorld& world, const std::string& tag) {
  return world.has_concept(tag) ? ConditionRef::of(tag) : ConditionRef::null();
}

class TableKnowledge final : public KnowledgeSource {
 public:
  explicit TableKnowledge(ConceptWorld world) : world_(std::move(world)) {}

  std::vector<SurrogatePlan> drafts(const KnowledgeQuery& q) const override {
    if (q.count < 1) {
      throw std::invalid_argument("knowledge: count must be >= 1");
    }
    const auto is_erased = [&](const ConceptId& id) {
      return std::find(q.erased_set.begin(), q.erased_set.end(), id) !=
             q.erased_set.end();
    };

    // shape-compatible permissible surrogates, best color match first
    struct Cand {
      ConceptId id;
      double cdist;
    };
    std::vector<Cand> cands;
    for (const auto& c : world_.concepts()) {
      if (c.id == q.target || is_erased(c.id)) continue;
      if (c.attributes.shape_class != q.attributes.shape_class) continue;
      cands.push_back({c.id, color_distance(c.attributes.color, q.attributes.color)});
    }
    if (cands.empty()) {
      throw std::runtime_error(
          "knowledge: no permissible surrogate shares shape_class '" +
          q.attributes.shape_class + "' with target '" + q.target + "'");
    }
    std::sort(cands.begin(), cands.end(), [](const Cand& a, const Cand& b) {
      if (a.cdist != b.cdist) return a.cdist < b.cdist;
      return a.id < b.id;
    });
    // leaders tied on color distance alternate across k
    std::vector<ConceptId> leaders;
    for (const auto& c : cands) {
      if (c.cdist == cands.front().cdist) leaders.push_back(c.id);
    }

    std::vector<ConditionRef> adj;
    for (const auto& tag : q.attributes.adjectives) {
      adj.push_back(tag_condition(world_, tag));
    }
    if (adj.empty()) adj.push_back(ConditionRef::null());
    std::vector<ConditionRef> ctx;
    for (const auto& tag : q.attributes.contexts) {
      ctx.push_back(tag_condition(world_, tag));
    }
    if (ctx.empty()) ctx.push_back(ConditionRef::null());

    std::vector<SurrogatePlan> plans;
    plans.reserve(static_cast<std::size_t>(q.count));
    for (int k = 1; k <= q.count; ++k) {
      SurrogatePlan p;
      p.index = k;
      p.surrogate = leaders[static_cast<std::size_t>(k - 1) % leaders.size()];
      p.color_prior = q.attributes.color;
      p.adjective_condition = adj[static_cast<std::size_t>(k - 1) % adj.size()];
      p.context_condition = ctx[static_cast<std::size_t>(k - 1) % ctx.size()];
      plans.push_back(std::move(p));
    }
    return plans;
  }

  std::string label() const override { return "table"; }

 private:
  ConceptWorld world_;
};

nlohmann::json query_to_json(const KnowledgeQuery& q) {
  nlohmann::json j;
  j["target"] = q.target;
  j["attributes"] = {
      {"shape_class", q.attributes.shape_class},
      {"color", q.attributes.color},
      {"adjectives", q.attributes.adjectives},
      {"contexts", q.attributes.contexts},
  };
  j["erased_set"] = q.erased_set;
  j["count"] = q.count;
  j["seed"] = q.seed;
  return j;
}

class HttpKnowledge final : public KnowledgeSource {
 public:
  HttpKnowledge(std::string url, KnowledgeSourcePtr fallback, int timeout_seconds)
      : url_(std::move(url)), fallback_(std::move(fallback)), timeout_(timeout_seconds) {}

  std::vector<SurrogatePlan> drafts(const KnowledgeQuery& q) const override {
    try {
      auto parsed = split_url(url_);
      httplib::Client client(parsed.first);
      client.set_connection_timeout(timeout_, 0);
      client.set_read_timeout(timeout_, 0);
      auto res = client.Post(parsed.second, query_to_json(q).dump(), "application/json");
      if (!res || res->status != 200) {
        std::cerr << "[glyphlab] knowledge endpoint " << url_
                  << (res ? " returned status " + std::to_string(res->status)
                          : " unreachable")
                  << "; falling back to table source\n";
        return fallback_->drafts(q);
      }
      return parse_drafts(res->body, q);
    } catch (const std::exception& e) {
      std::cerr << "[glyphlab] knowledge endpoint error: " << e.what()
                << "; falling back to table source\n";
      return fallback_->drafts(q);
    }
  }

  std::string label() const override { return "http:" + url_; }

 private:
  // "http://host:port/path" -> {"http://host:port", "/path"}
  static std::pair<std::string, std::string> split_url(const std::string& url) {
    const auto scheme = url.find("//");
    if (scheme == std::string::npos) return {url, "/"};
    const auto slash = url.find('/', scheme + 2);
    if (slash == std::string::npos) return {url, "/"};
    return {url.substr(0, slash), url.substr(slash)};
  }

  std::vector<SurrogatePlan> parse_drafts(const std::string& body,
                                          const KnowledgeQuery& q) const {
    const auto j = nlohmann::json::parse(body);
    if (!j.is_array()) {
      throw std::runtime_error("knowledge response must be a JSON array");
    }
    std::vector<SurrogatePlan> plans;
    int k = 1;
    for (const auto& item : j) {
      SurrogatePlan p;
      p.index = k++;
      p.surrogate = item.at("surrogate").get<std::string>();
      if (item.contains("color_prior")) {
        const auto c = item["color_prior"];
        for (int i = 0; i < 3; ++i) {
          p.color_prior[static_cast<std::size_t>(i)] = c.at(i).get<double>();
        }
      } else {
        p.color_prior = q.attributes.color;
      }
      const auto cond = [&](const char* key) {
        if (!item.contains(key) || item[key].is_null()) return ConditionRef::null();
        return ConditionRef::of(item[key].get<std::string>());
      };
      p.adjective_condition = cond("adjective_condition");
      p.context_condition = cond("context_condition");
      plans.push_back(std::move(p));
    }
    if (static_cast<int>(plans.size()) != q.count) {
      throw std::runtime_error("knowledge response has wrong plan count");
    }
    return plans;
  }

  std::string url_;
  KnowledgeSourcePtr fallback_;
  int timeout_;
};

}  // namespace

KnowledgeSourcePtr make_table_knowledge(const ConceptWorld& world) {
  return std::make_shared<TableKnowledge>(world);
}

KnowledgeSourcePtr make_http_knowledge(std::string url,
                                       KnowledgeSourcePtr fallback,
                                       int timeout_seconds) {
  if (!fallback) {
    throw std::invalid_argument("make_http_knowledge: fallback source required");
  }
  return std::make_shared<HttpKnowledge>(std::move(url), std::move(fallback),
                                         timeout_seconds);
}

}  // namespace glyphlab
