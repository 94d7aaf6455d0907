#include "mtbandit/config.hpp"

#include <fstream>
#include <set>

#include "mtbandit/error.hpp"

namespace mtbandit {

using json = nlohmann::json;

namespace {

const std::set<std::string>& top_level_keys() {
  static const std::set<std::string> keys = {"arms",  "dataset",  "synth",    "schedule",   "policy",
                                             "policies", "feedback", "features", "max_steps", "seeds",
                                             "output_dir", "heatmap_interval"};
  return keys;
}

void reject_unknown(const json& obj, const std::set<std::string>& known, const std::string& where) {
  for (auto it = obj.begin(); it != obj.end(); ++it)
    if (!known.count(it.key())) throw ConfigError("unknown key '" + where + it.key() + "'");
}

template <typename T>
T get_or(const json& obj, const char* key, T fallback, const std::string& where) {
  auto it = obj.find(key);
  if (it == obj.end()) return fallback;
  try {
    return it->get<T>();
  } catch (const json::exception&) {
    throw ConfigError("key '" + where + key + "' has the wrong type");
  }
}

PolicyConfig parse_policy(const json& p) {
  if (!p.is_object()) throw ConfigError("policy entries must be objects");
  reject_unknown(p, {"kind", "epsilon", "alpha", "lambda", "seed", "label", "resolve_interval"}, "policy.");
  PolicyConfig c;
  c.kind = policy_kind_from_string(get_or<std::string>(p, "kind", "epsilon_greedy", "policy."));
  c.epsilon = get_or(p, "epsilon", c.epsilon, "policy.");
  c.alpha = get_or(p, "alpha", c.alpha, "policy.");
  c.lambda = get_or(p, "lambda", c.lambda, "policy.");
  c.seed = get_or<std::uint64_t>(p, "seed", c.seed, "policy.");
  c.label = get_or<std::string>(p, "label", "", "policy.");
  c.resolve_interval = get_or<std::size_t>(p, "resolve_interval", c.resolve_interval, "policy.");
  c.validate();
  return c;
}

FeedbackConfig parse_feedback(const json& f) {
  reject_unknown(f, {"style", "bins", "sigma0", "shrink", "skew_factor", "seed"}, "feedback.");
  FeedbackConfig c;
  c.style = feedback_style_from_string(get_or<std::string>(f, "style", to_string(c.style), "feedback."));
  c.bins = get_or(f, "bins", c.bins, "feedback.");
  c.sigma0 = get_or(f, "sigma0", c.sigma0, "feedback.");
  c.shrink = get_or(f, "shrink", c.shrink, "feedback.");
  c.skew_factor = get_or(f, "skew_factor", c.skew_factor, "feedback.");
  c.seed_offset = get_or<std::uint64_t>(f, "seed", c.seed_offset, "feedback.");
  c.validate();
  return c;
}

FeatureConfig parse_features(const json& f, const std::filesystem::path& base_dir) {
  reject_unknown(f, {"blocks", "vocab", "oov_threshold", "len_bin_edges", "emb_prefix_len"}, "features.");
  FeatureConfig c;
  if (auto it = f.find("blocks"); it != f.end()) {
    c.blocks.clear();
    for (const auto& b : get_or<std::vector<std::string>>(f, "blocks", {}, "features."))
      c.blocks.push_back(feature_block_from_string(b));
  }
  if (auto it = f.find("vocab"); it != f.end()) {
    std::filesystem::path p = get_or<std::string>(f, "vocab", "", "features.");
    if (p.is_relative() && !base_dir.empty()) p = base_dir / p;
    c.vocab = load_vocabulary(p);
  }
  c.oov_threshold = get_or(f, "oov_threshold", c.oov_threshold, "features.");
  c.len_bin_edges = get_or(f, "len_bin_edges", c.len_bin_edges, "features.");
  c.emb_prefix_len = get_or(f, "emb_prefix_len", c.emb_prefix_len, "features.");
  c.validate();
  return c;
}

SchedulePlan parse_schedule(const json& s) {
  reject_unknown(s, {"kind", "block_size", "domain_order", "mixture_ratios", "seed"}, "schedule.");
  SchedulePlan p;
  p.kind = schedule_kind_from_string(get_or<std::string>(s, "kind", "sequential", "schedule."));
  p.block_size = get_or(s, "block_size", p.block_size, "schedule.");
  p.domain_order = get_or(s, "domain_order", p.domain_order, "schedule.");
  p.mixture_ratios = get_or(s, "mixture_ratios", p.mixture_ratios, "schedule.");
  p.seed = get_or<std::uint64_t>(s, "seed", p.seed, "schedule.");
  return p;
}

}  // namespace

SynthSpec parse_synth_spec(const json& s) {
  reject_unknown(s,
                 {"preset", "arms", "domains", "means", "sigma", "records_per_domain", "seed", "min_length",
                  "max_length", "domain_embedding"},
                 "synth.");
  SynthSpec spec;
  const auto preset = get_or<std::string>(s, "preset", "", "synth.");
  if (preset == "table1") {
    spec = table1_spec(100, 0.0, 0);
  } else if (!preset.empty()) {
    throw ConfigError("unknown synth preset '" + preset + "'");
  }
  spec.arms = get_or(s, "arms", spec.arms, "synth.");
  spec.domains = get_or(s, "domains", spec.domains, "synth.");
  if (auto it = s.find("means"); it != s.end()) {
    // Either [[...per domain...] per arm] or {arm: [...per domain...]} in arm order.
    spec.means.clear();
    if (it->is_object()) {
      for (const auto& arm : spec.arms) {
        if (!it->contains(arm)) throw ConfigError("synth.means lacks arm '" + arm + "'");
        spec.means.push_back((*it)[arm].get<std::vector<double>>());
      }
    } else {
      spec.means = get_or<std::vector<std::vector<double>>>(s, "means", {}, "synth.");
    }
  }
  spec.sigma = get_or(s, "sigma", spec.sigma, "synth.");
  spec.records_per_domain = get_or(s, "records_per_domain", spec.records_per_domain, "synth.");
  spec.seed = get_or<std::uint64_t>(s, "seed", spec.seed, "synth.");
  spec.min_length = get_or(s, "min_length", spec.min_length, "synth.");
  spec.max_length = get_or(s, "max_length", spec.max_length, "synth.");
  spec.domain_embedding = get_or(s, "domain_embedding", spec.domain_embedding, "synth.");
  spec.validate();
  return spec;
}

void apply_override(json& doc, const std::string& assignment) {
  auto eq = assignment.find('=');
  if (eq == std::string::npos || eq == 0) throw ConfigError("override '" + assignment + "' must look like key=value");
  const std::string path = assignment.substr(0, eq);
  const std::string text = assignment.substr(eq + 1);
  json value;
  try {
    value = json::parse(text);
  } catch (const json::parse_error&) {
    value = text;
  }
  json* node = &doc;
  std::size_t start = 0;
  while (true) {
    auto dot = path.find('.', start);
    const std::string key = path.substr(start, dot == std::string::npos ? std::string::npos : dot - start);
    if (key.empty()) throw ConfigError("override key '" + path + "' has an empty component");
    if (!node->is_object()) {
      if (!node->is_null()) throw ConfigError("override '" + path + "' descends into a non-object");
      *node = json::object();
    }
    if (dot == std::string::npos) {
      (*node)[key] = std::move(value);
      return;
    }
    node = &(*node)[key];
    start = dot + 1;
  }
}

ExperimentConfig parse_config(const json& doc, const std::filesystem::path& base_dir) {
  if (!doc.is_object()) throw ConfigError("config must be a JSON object");
  reject_unknown(doc, top_level_keys(), "");
  ExperimentConfig c;
  c.arms = get_or(doc, "arms", c.arms, "");

  const bool has_dataset = doc.contains("dataset");
  const bool has_synth = doc.contains("synth");
  if (has_dataset == has_synth) throw ConfigError("config needs exactly one of 'dataset' or 'synth'");
  if (has_dataset) {
    std::filesystem::path p = get_or<std::string>(doc, "dataset", "", "");
    if (p.is_relative() && !base_dir.empty()) p = base_dir / p;
    c.dataset = p;
  } else {
    json section = doc["synth"];
    if (section.is_object() && !section.contains("arms") && !c.arms.empty()) section["arms"] = c.arms;
    c.synth = parse_synth_spec(section);
    if (c.arms.empty()) c.arms = c.synth->arms;
    if (c.arms != c.synth->arms) throw ConfigError("'arms' disagrees with synth.arms");
  }
  if (c.arms.empty()) throw ConfigError("config needs 'arms'");
  static_cast<void>(ArmCatalog(c.arms));

  if (auto it = doc.find("schedule"); it != doc.end()) c.plan = parse_schedule(*it);

  if (doc.contains("policy") && doc.contains("policies")) throw ConfigError("use either 'policy' or 'policies'");
  if (auto it = doc.find("policies"); it != doc.end()) {
    if (!it->is_array() || it->empty()) throw ConfigError("'policies' must be a nonempty array");
    for (const auto& p : *it) c.policies.push_back(parse_policy(p));
  } else {
    c.policies.push_back(parse_policy(doc.value("policy", json::object())));
  }
  std::set<std::string> labels;
  for (const auto& p : c.policies)
    if (!labels.insert(p.display_name()).second) throw ConfigError("duplicate policy label '" + p.display_name() + "'");

  if (auto it = doc.find("feedback"); it != doc.end()) c.feedback = parse_feedback(*it);
  if (auto it = doc.find("features"); it != doc.end()) c.features = parse_features(*it, base_dir);
  for (const auto& p : c.policies)
    if (p.contextual() && !c.features) throw ConfigError(to_string(p.kind) + " requires a 'features' section");

  if (auto it = doc.find("max_steps"); it != doc.end() && !it->is_null())
    c.max_steps = get_or<std::size_t>(doc, "max_steps", 0, "");
  if (auto it = doc.find("seeds"); it != doc.end()) {
    c.seeds = get_or<std::vector<std::uint64_t>>(doc, "seeds", {}, "");
    if (c.seeds.empty()) throw ConfigError("'seeds' must be nonempty");
  }
  c.output_dir = get_or<std::string>(doc, "output_dir", c.output_dir.string(), "");
  c.heatmap_interval = get_or(doc, "heatmap_interval", c.heatmap_interval, "");
  if (c.heatmap_interval == 0) throw ConfigError("heatmap_interval must be positive");
  return c;
}

ExperimentConfig load_config(const std::filesystem::path& path, const std::vector<std::string>& overrides) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open config '" + path.string() + "'");
  json doc;
  try {
    doc = json::parse(in, nullptr, true, true);
  } catch (const json::parse_error& e) {
    throw ConfigError("config '" + path.string() + "': " + e.what());
  }
  for (const auto& o : overrides) apply_override(doc, o);
  return parse_config(doc, path.parent_path());
}

Dataset ExperimentConfig::materialize() const {
  ArmCatalog catalog(arms);
  if (dataset) return load_dataset(*dataset, catalog);
  Dataset ds;
  ds.catalog = catalog;
  ds.records = generate(*synth);
  return ds;
}

SimulationSetup ExperimentConfig::setup(const PolicyConfig& policy, std::uint64_t seed) const {
  SimulationSetup s;
  s.plan = plan;
  s.policy = policy;
  s.feedback = feedback;
  if (policy.contextual()) s.features = features;
  s.seed = seed;
  s.max_steps = max_steps;
  return s;
}

}  // namespace mtbandit
