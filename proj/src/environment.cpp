#include "mtbandit/environment.hpp"

#include <algorithm>
#include <fstream>
#include <numeric>
#include <set>
#include <sstream>

#include "json.hpp"
#include "mtbandit/error.hpp"
#include "mtbandit/rng.hpp"

namespace mtbandit {

using json = nlohmann::json;
using ordered_json = nlohmann::ordered_json;

Tokens split_tokens(const std::string& text) {
  Tokens out;
  std::istringstream in(text);
  std::string tok;
  while (in >> tok) out.push_back(std::move(tok));
  return out;
}

std::string join_tokens(const Tokens& tokens) {
  std::string out;
  for (std::size_t i = 0; i < tokens.size(); ++i) {
    if (i) out += ' ';
    out += tokens[i];
  }
  return out;
}

ArmCatalog::ArmCatalog(std::vector<std::string> names) : names_(std::move(names)) {
  if (names_.size() < 2) throw ConfigError("arm catalog needs at least 2 arms, got " + std::to_string(names_.size()));
  std::set<std::string> seen;
  for (const auto& n : names_) {
    if (n.empty()) throw ConfigError("arm catalog contains an empty name");
    if (!seen.insert(n).second) throw ConfigError("duplicate arm name '" + n + "'");
  }
}

std::optional<std::size_t> ArmCatalog::index_of(const std::string& name) const {
  auto it = std::find(names_.begin(), names_.end(), name);
  if (it == names_.end()) return std::nullopt;
  return static_cast<std::size_t>(it - names_.begin());
}

std::vector<std::string> Dataset::domains() const {
  std::vector<std::string> out;
  std::set<std::string> seen;
  for (const auto& r : records)
    if (seen.insert(r.domain).second) out.push_back(r.domain);
  return out;
}

void validate_record(const EvalRecord& record, std::size_t arm_count) {
  const std::string where = "record '" + record.id + "': ";
  if (record.source_tokens.empty()) throw DataError(where + "empty source");
  if (record.arm_scores.size() != arm_count)
    throw DataError(where + "scores has " + std::to_string(record.arm_scores.size()) + " entries, expected K=" +
                    std::to_string(arm_count));
  for (std::size_t k = 0; k < record.arm_scores.size(); ++k) {
    double s = record.arm_scores[k];
    if (!(s >= 0.0 && s <= 100.0))
      throw DataError(where + "score " + std::to_string(s) + " for arm " + std::to_string(k) + " outside [0,100]");
  }
  if (record.arm_hypotheses && record.arm_hypotheses->size() != arm_count)
    throw DataError(where + "hyps has " + std::to_string(record.arm_hypotheses->size()) + " entries, expected K=" +
                    std::to_string(arm_count));
}

std::string record_to_line(const EvalRecord& record) {
  ordered_json j;
  j["id"] = record.id;
  j["domain"] = record.domain;
  j["source"] = join_tokens(record.source_tokens);
  if (record.reference_tokens) j["ref"] = join_tokens(*record.reference_tokens);
  j["scores"] = record.arm_scores;
  if (record.arm_hypotheses) {
    ordered_json hyps = ordered_json::array();
    for (const auto& h : *record.arm_hypotheses) hyps.push_back(join_tokens(h));
    j["hyps"] = std::move(hyps);
  }
  if (record.embedding) j["emb"] = *record.embedding;
  return j.dump();
}

namespace {

const json& require(const json& obj, const char* key) {
  auto it = obj.find(key);
  if (it == obj.end()) throw DataError(std::string("missing field '") + key + "'");
  return *it;
}

std::string as_string(const json& v, const char* key) {
  if (!v.is_string()) throw DataError(std::string("field '") + key + "' must be a string, got " + v.type_name());
  return v.get<std::string>();
}

std::vector<double> as_numbers(const json& v, const char* key) {
  if (!v.is_array()) throw DataError(std::string("field '") + key + "' must be an array, got " + v.type_name());
  std::vector<double> out;
  out.reserve(v.size());
  for (const auto& e : v) {
    if (!e.is_number()) throw DataError(std::string("field '") + key + "' must hold numbers, got " + e.type_name());
    out.push_back(e.get<double>());
  }
  return out;
}

}  // namespace

EvalRecord record_from_line(const std::string& line, std::size_t arm_count) {
  json j;
  try {
    j = json::parse(line);
  } catch (const json::parse_error& e) {
    throw DataError(std::string("malformed JSON: ") + e.what());
  }
  if (!j.is_object()) throw DataError("record must be a JSON object");

  static const std::set<std::string> known = {"id", "domain", "source", "ref", "scores", "hyps", "emb"};
  for (auto it = j.begin(); it != j.end(); ++it)
    if (!known.count(it.key())) throw DataError("unknown field '" + it.key() + "'");

  EvalRecord r;
  r.id = as_string(require(j, "id"), "id");
  r.domain = as_string(require(j, "domain"), "domain");
  r.source_tokens = split_tokens(as_string(require(j, "source"), "source"));
  if (auto it = j.find("ref"); it != j.end()) r.reference_tokens = split_tokens(as_string(*it, "ref"));
  r.arm_scores = as_numbers(require(j, "scores"), "scores");
  if (auto it = j.find("hyps"); it != j.end()) {
    if (!it->is_array()) throw DataError(std::string("field 'hyps' must be an array, got ") + it->type_name());
    std::vector<Tokens> hyps;
    for (const auto& h : *it) hyps.push_back(split_tokens(as_string(h, "hyps")));
    r.arm_hypotheses = std::move(hyps);
  }
  if (auto it = j.find("emb"); it != j.end()) r.embedding = as_numbers(*it, "emb");
  validate_record(r, arm_count);
  return r;
}

Dataset read_dataset(std::istream& in, const ArmCatalog& catalog) {
  Dataset ds;
  ds.catalog = catalog;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    try {
      ds.records.push_back(record_from_line(line, catalog.size()));
    } catch (const DataError& e) {
      throw DataError("line " + std::to_string(lineno) + ": " + e.what());
    }
  }
  return ds;
}

Dataset load_dataset(const std::filesystem::path& path, const ArmCatalog& catalog) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open dataset '" + path.string() + "'");
  try {
    return read_dataset(in, catalog);
  } catch (const DataError& e) {
    throw DataError(path.string() + ": " + e.what());
  }
}

void write_dataset(std::ostream& out, const std::vector<EvalRecord>& records) {
  for (const auto& r : records) out << record_to_line(r) << '\n';
}

void write_dataset(const std::filesystem::path& path, const std::vector<EvalRecord>& records) {
  std::ofstream out(path);
  if (!out) throw DataError("cannot write '" + path.string() + "'");
  write_dataset(out, records);
}

std::string to_string(ScheduleKind kind) {
  switch (kind) {
    case ScheduleKind::sequential: return "sequential";
    case ScheduleKind::cyclic_blocks: return "cyclic_blocks";
    case ScheduleKind::shuffled_mixture: return "shuffled_mixture";
  }
  return "?";
}

ScheduleKind schedule_kind_from_string(const std::string& text) {
  if (text == "sequential") return ScheduleKind::sequential;
  if (text == "cyclic_blocks") return ScheduleKind::cyclic_blocks;
  if (text == "shuffled_mixture") return ScheduleKind::shuffled_mixture;
  throw ConfigError("unknown schedule kind '" + text + "'");
}

ScheduledStream::ScheduledStream(const Dataset& dataset, std::vector<std::size_t> order)
    : dataset_(&dataset), order_(std::move(order)) {
  for (auto i : order_)
    if (i >= dataset.size()) throw DataError("schedule index " + std::to_string(i) + " out of range");
}

const EvalRecord* ScheduledStream::next() {
  if (cursor_ >= order_.size()) return nullptr;
  return &dataset_->records[order_[cursor_++]];
}

namespace {

std::map<std::string, std::vector<std::size_t>> indices_by_domain(const Dataset& dataset) {
  std::map<std::string, std::vector<std::size_t>> out;
  for (std::size_t i = 0; i < dataset.size(); ++i) out[dataset.records[i].domain].push_back(i);
  return out;
}

std::vector<std::size_t> cyclic_order(const Dataset& dataset, const SchedulePlan& plan) {
  if (plan.block_size == 0) throw ConfigError("cyclic_blocks needs block_size >= 1");
  auto by_domain = indices_by_domain(dataset);
  auto domains = plan.domain_order.empty() ? dataset.domains() : plan.domain_order;
  if (domains.empty()) throw ConfigError("cyclic_blocks needs at least one domain");
  for (const auto& d : domains)
    if (by_domain[d].empty()) throw ConfigError("schedule references empty domain '" + d + "'");

  std::map<std::string, std::size_t> cursor;
  std::vector<std::size_t> order;
  order.reserve(dataset.size());
  for (std::size_t block = 0; order.size() < dataset.size(); ++block) {
    const auto& d = domains[block % domains.size()];
    const auto& pool = by_domain[d];
    for (std::size_t j = 0; j < plan.block_size && order.size() < dataset.size(); ++j) {
      auto& c = cursor[d];
      order.push_back(pool[c]);
      c = (c + 1) % pool.size();
    }
  }
  return order;
}

std::vector<std::size_t> shuffled_order(const Dataset& dataset, const SchedulePlan& plan) {
  auto by_domain = indices_by_domain(dataset);
  std::vector<std::string> domains;
  std::vector<double> weights;
  for (const auto& d : dataset.domains()) {
    domains.push_back(d);
    if (plan.mixture_ratios.empty()) {
      weights.push_back(1.0);
    } else {
      auto it = plan.mixture_ratios.find(d);
      weights.push_back(it == plan.mixture_ratios.end() ? 0.0 : it->second);
    }
  }
  double total = 0.0;
  for (const auto& [d, w] : plan.mixture_ratios) {
    if (!(w >= 0.0)) throw ConfigError("mixture ratio for '" + d + "' must be nonnegative");
    if (by_domain[d].empty()) throw ConfigError("schedule references empty domain '" + d + "'");
    total += w;
  }
  if (!plan.mixture_ratios.empty() && !(total > 0.0)) throw ConfigError("mixture ratios must sum to a positive value");

  std::vector<std::vector<std::size_t>> remaining;
  for (const auto& d : domains) remaining.push_back(by_domain[d]);

  Rng rng(derive_seed(plan.seed, {kScheduleStream}));
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  std::vector<std::size_t> order;
  order.reserve(dataset.size());
  std::vector<double> w(domains.size());
  while (order.size() < dataset.size()) {
    double sum = 0.0;
    for (std::size_t d = 0; d < domains.size(); ++d) {
      w[d] = remaining[d].empty() ? 0.0 : weights[d];
      sum += w[d];
    }
    // Only zero-weight domains are left: drain them proportionally to their size.
    if (sum <= 0.0) {
      for (std::size_t d = 0; d < domains.size(); ++d) {
        w[d] = static_cast<double>(remaining[d].size());
        sum += w[d];
      }
    }
    double u = unit(rng) * sum;
    std::size_t pick = domains.size();
    for (std::size_t d = 0; d < domains.size(); ++d) {
      if (w[d] <= 0.0) continue;
      pick = d;
      if (u < w[d]) break;
      u -= w[d];
    }

    auto& pool = remaining[pick];
    std::uniform_int_distribution<std::size_t> slot(0, pool.size() - 1);
    std::size_t s = slot(rng);
    order.push_back(pool[s]);
    pool[s] = pool.back();
    pool.pop_back();
  }
  return order;
}

}  // namespace

ScheduledStream build_schedule(const Dataset& dataset, const SchedulePlan& plan) {
  switch (plan.kind) {
    case ScheduleKind::sequential: {
      std::vector<std::size_t> order(dataset.size());
      std::iota(order.begin(), order.end(), std::size_t{0});
      return ScheduledStream(dataset, std::move(order));
    }
    case ScheduleKind::cyclic_blocks:
      return ScheduledStream(dataset, cyclic_order(dataset, plan));
    case ScheduleKind::shuffled_mixture:
      return ScheduledStream(dataset, shuffled_order(dataset, plan));
  }
  throw ConfigError("unknown schedule kind");
}

}  // namespace mtbandit
