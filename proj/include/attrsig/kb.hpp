#pragma once

#include <compare>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <shared_mutex>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include <json.hpp>

#include "attrsig/dictionary.hpp"
#include "attrsig/metrics.hpp"
#include "attrsig/signif.hpp"

namespace attrsig {

struct RecordKey {
  std::string domaine;
  std::string table;
  std::string attribut;

  auto operator<=>(const RecordKey&) const = default;
};

struct ReferenceScore {
  std::string reference;
  std::vector<int> taux;  // percentage per analysis batch
  int taux_final = 0;

  bool operator==(const ReferenceScore&) const = default;
};

/// Accumulated analyses of one attribute. `taille` holds the number of rows
/// analysed per batch; every reference has one rate per batch.
struct KbRecord {
  std::string domaine;
  std::string table;
  std::string attribut;
  std::vector<std::int64_t> taille;
  std::int64_t taille_totale = 0;
  std::vector<ReferenceScore> scoring;

  RecordKey key() const { return {domaine, table, attribut}; }
  /// Throws Error naming the first broken invariant.
  void validate() const;

  bool operator==(const KbRecord&) const = default;
};

using Rate = std::pair<std::string, int>;  // reference, percentage

/// Batch-size weighted mean of the rates, rounded half up.
int weighted_final_rate(std::span<const std::int64_t> taille, std::span<const int> taux);

/// True iff the attribute name scores at least `thresholds.accept`.
bool admit(std::string_view attribut, const Dictionary& dictionary, const MetricKind& metric,
           const Thresholds& thresholds);

/// Appends one analysis batch. References missing from `rates` get 0 for
/// this batch; new references get 0 for every earlier batch.
KbRecord merge_analysis(const std::optional<KbRecord>& existing, const RecordKey& key,
                        std::int64_t batch_size, std::span<const Rate> rates);

nlohmann::ordered_json to_json(const KbRecord& record);
KbRecord record_from_json(const nlohmann::json& json);

std::vector<KbRecord> load_kb(const std::filesystem::path& path);
void save_kb(std::span<const KbRecord> records, const std::filesystem::path& path);

/// One analysis result waiting to be merged into the knowledge base.
struct AnalysisBatch {
  RecordKey key;
  std::int64_t taille = 0;
  std::vector<Rate> rates;
};

/// {"Domaine","Table","Attribut","Taille":<rows>,"Scoring":[{"Référence","Taux"}]}
AnalysisBatch batch_from_json(const nlohmann::json& json);

struct KbQuery {
  std::optional<std::string> domaine;
  std::optional<std::string> table;
  std::optional<std::string> attribut;
};

/// In-memory knowledge base. Readers may run concurrently; writers are
/// serialized.
class KnowledgeBase {
 public:
  KnowledgeBase() = default;
  explicit KnowledgeBase(std::vector<KbRecord> records);

  static KnowledgeBase open(const std::filesystem::path& path);
  void save(const std::filesystem::path& path) const;

  std::optional<KbRecord> find(const RecordKey& key) const;
  std::vector<KbRecord> query(const KbQuery& filter) const;
  std::vector<KbRecord> records() const;
  std::size_t size() const;

  /// Merges the batch if its attribute name is admitted. Returns whether it
  /// was admitted.
  bool ingest(const AnalysisBatch& batch, const Dictionary& dictionary, const MetricKind& metric,
              const Thresholds& thresholds);

  void merge(const AnalysisBatch& batch);

 private:
  mutable std::shared_mutex mutex_;
  std::vector<KbRecord> records_;
};

}  // namespace attrsig
