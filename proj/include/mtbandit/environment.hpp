#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <map>
#include <optional>
#include <string>
#include <vector>

namespace mtbandit {

using Tokens = std::vector<std::string>;

/// Splits on runs of ASCII whitespace. Inputs are expected to be pre-tokenized.
Tokens split_tokens(const std::string& text);
std::string join_tokens(const Tokens& tokens);

/// Ordered, unique arm identifiers. Arm k in every score vector refers to names()[k].
class ArmCatalog {
 public:
  ArmCatalog() = default;
  explicit ArmCatalog(std::vector<std::string> names);

  std::size_t size() const { return names_.size(); }
  const std::vector<std::string>& names() const { return names_; }
  const std::string& name(std::size_t arm) const { return names_.at(arm); }
  std::optional<std::size_t> index_of(const std::string& name) const;

 private:
  std::vector<std::string> names_;
};

/// One source example with precomputed per-arm sentence scores on the 0-100 scale.
struct EvalRecord {
  std::string id;
  std::string domain;
  Tokens source_tokens;
  std::optional<Tokens> reference_tokens;
  std::vector<double> arm_scores;
  std::optional<std::vector<Tokens>> arm_hypotheses;
  std::optional<std::vector<double>> embedding;
};

/// Immutable after construction; safe to share read-only.
struct Dataset {
  ArmCatalog catalog;
  std::vector<EvalRecord> records;

  std::size_t size() const { return records.size(); }
  bool empty() const { return records.empty(); }
  /// Distinct domain labels in order of first appearance.
  std::vector<std::string> domains() const;
};

/// Throws DataError describing the first violated record invariant.
void validate_record(const EvalRecord& record, std::size_t arm_count);

/// One JSON object per line; field names id, domain, source, ref, scores, hyps, emb.
std::string record_to_line(const EvalRecord& record);
EvalRecord record_from_line(const std::string& line, std::size_t arm_count);

Dataset load_dataset(const std::filesystem::path& path, const ArmCatalog& catalog);
Dataset read_dataset(std::istream& in, const ArmCatalog& catalog);
void write_dataset(std::ostream& out, const std::vector<EvalRecord>& records);
void write_dataset(const std::filesystem::path& path, const std::vector<EvalRecord>& records);

enum class ScheduleKind { sequential, cyclic_blocks, shuffled_mixture };

std::string to_string(ScheduleKind kind);
ScheduleKind schedule_kind_from_string(const std::string& text);

struct SchedulePlan {
  ScheduleKind kind = ScheduleKind::sequential;
  std::size_t block_size = 100;
  /// Empty means the dataset's domains in order of first appearance.
  std::vector<std::string> domain_order;
  /// Empty means equal weight for every domain in the dataset.
  std::map<std::string, double> mixture_ratios;
  std::uint64_t seed = 0;
};

/// Single-consumer cursor over a schedule. The dataset must outlive the stream.
class ScheduledStream {
 public:
  ScheduledStream(const Dataset& dataset, std::vector<std::size_t> order);

  /// Record at the cursor, or nullptr once the stream is exhausted.
  const EvalRecord* next();

  const std::vector<std::size_t>& order() const { return order_; }
  std::size_t size() const { return order_.size(); }
  std::size_t cursor() const { return cursor_; }

 private:
  const Dataset* dataset_;
  std::vector<std::size_t> order_;
  std::size_t cursor_ = 0;
};

ScheduledStream build_schedule(const Dataset& dataset, const SchedulePlan& plan);

}  // namespace mtbandit
