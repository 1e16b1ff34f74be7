#include "attrsig/kb.hpp"

#include <algorithm>
#include <fstream>
#include <mutex>
#include <numeric>
#include <set>

#include "attrsig/error.hpp"

namespace attrsig {

namespace {

using nlohmann::json;
using nlohmann::ordered_json;

constexpr const char* kReference = "R\xC3\xA9" "f\xC3\xA9rence";  // "Référence"

const json& field(const json& object, const char* name) {
  if (!object.is_object()) {
    throw Error("expected a JSON object");
  }
  const auto it = object.find(name);
  if (it == object.end()) {
    throw Error(std::string("missing field '") + name + "'");
  }
  return *it;
}

std::string string_field(const json& object, const char* name) {
  const json& value = field(object, name);
  if (!value.is_string()) {
    throw Error(std::string("field '") + name + "' must be a string");
  }
  return value.get<std::string>();
}

std::int64_t integer_field(const json& object, const char* name) {
  const json& value = field(object, name);
  if (!value.is_number_integer()) {
    throw Error(std::string("field '") + name + "' must be an integer");
  }
  return value.get<std::int64_t>();
}

template <typename T>
std::vector<T> integer_array_field(const json& object, const char* name) {
  const json& value = field(object, name);
  if (!value.is_array()) {
    throw Error(std::string("field '") + name + "' must be an array");
  }
  std::vector<T> out;
  for (const auto& item : value) {
    if (!item.is_number_integer()) {
      throw Error(std::string("field '") + name + "' must hold integers");
    }
    out.push_back(item.get<T>());
  }
  return out;
}

void check_rate(int taux, const std::string& reference) {
  if (taux < 0 || taux > 100) {
    throw Error("Taux " + std::to_string(taux) + " for '" + reference + "' outside [0, 100]");
  }
}

bool matches(const std::optional<std::string>& wanted, const std::string& actual) {
  return !wanted || *wanted == actual;
}

}  // namespace

int weighted_final_rate(std::span<const std::int64_t> taille, std::span<const int> taux) {
  if (taille.size() != taux.size()) {
    throw Error("Taux and Taille lengths differ");
  }
  std::int64_t weighted = 0;
  std::int64_t total = 0;
  for (std::size_t k = 0; k < taille.size(); ++k) {
    weighted += taille[k] * taux[k];
    total += taille[k];
  }
  if (total <= 0) {
    throw Error("Taille_Totale must be positive");
  }
  return static_cast<int>((2 * weighted + total) / (2 * total));
}

void KbRecord::validate() const {
  if (taille.empty()) {
    throw Error("Taille must not be empty");
  }
  for (const auto size : taille) {
    if (size <= 0) {
      throw Error("Taille entries must be positive");
    }
  }
  const std::int64_t sum = std::accumulate(taille.begin(), taille.end(), std::int64_t{0});
  if (sum != taille_totale) {
    throw Error("Taille_Totale " + std::to_string(taille_totale) + " differs from sum of Taille " +
                std::to_string(sum));
  }
  std::set<std::string> seen;
  for (const auto& score : scoring) {
    if (score.reference.empty()) {
      throw Error(std::string(kReference) + " must not be empty");
    }
    if (!seen.insert(score.reference).second) {
      throw Error("duplicate " + std::string(kReference) + " '" + score.reference + "'");
    }
    if (score.taux.size() != taille.size()) {
      throw Error("Taux of '" + score.reference + "' has " + std::to_string(score.taux.size()) +
                  " entries, Taille has " + std::to_string(taille.size()));
    }
    for (const int t : score.taux) {
      check_rate(t, score.reference);
    }
    const int expected = weighted_final_rate(taille, score.taux);
    if (score.taux_final != expected) {
      throw Error("Taux_Final of '" + score.reference + "' is " +
                  std::to_string(score.taux_final) + ", expected " + std::to_string(expected));
    }
  }
}

bool admit(std::string_view attribut, const Dictionary& dictionary, const MetricKind& metric,
           const Thresholds& thresholds) {
  thresholds.validate();
  return score_name(attribut, dictionary, metric, thresholds).score >= thresholds.accept;
}

KbRecord merge_analysis(const std::optional<KbRecord>& existing, const RecordKey& key,
                        std::int64_t batch_size, std::span<const Rate> rates) {
  if (batch_size <= 0) {
    throw Error("batch size must be positive, got " + std::to_string(batch_size));
  }
  std::set<std::string> seen;
  for (const auto& [reference, taux] : rates) {
    if (reference.empty()) {
      throw Error(std::string(kReference) + " must not be empty");
    }
    if (!seen.insert(reference).second) {
      throw Error("duplicate " + std::string(kReference) + " '" + reference + "' in batch");
    }
    check_rate(taux, reference);
  }

  KbRecord record;
  if (existing) {
    record = *existing;
  } else {
    record.domaine = key.domaine;
    record.table = key.table;
    record.attribut = key.attribut;
  }
  const std::size_t earlier_batches = record.taille.size();
  record.taille.push_back(batch_size);
  record.taille_totale += batch_size;

  for (auto& score : record.scoring) {
    score.taux.push_back(0);
  }
  for (const auto& [reference, taux] : rates) {
    auto it = std::find_if(record.scoring.begin(), record.scoring.end(),
                           [&](const ReferenceScore& s) { return s.reference == reference; });
    if (it == record.scoring.end()) {
      ReferenceScore fresh{reference, std::vector<int>(earlier_batches + 1, 0), 0};
      record.scoring.push_back(std::move(fresh));
      it = std::prev(record.scoring.end());
    }
    it->taux.back() = taux;
  }
  for (auto& score : record.scoring) {
    score.taux_final = weighted_final_rate(record.taille, score.taux);
  }
  return record;
}

ordered_json to_json(const KbRecord& record) {
  ordered_json out;
  out["Domaine"] = record.domaine;
  out["Table"] = record.table;
  out["Attribut"] = record.attribut;
  out["Taille"] = record.taille;
  out["Taille_Totale"] = record.taille_totale;
  out["Scoring"] = ordered_json::array();
  for (const auto& score : record.scoring) {
    ordered_json entry;
    entry[kReference] = score.reference;
    entry["Taux"] = score.taux;
    entry["Taux_Final"] = score.taux_final;
    out["Scoring"].push_back(std::move(entry));
  }
  return out;
}

KbRecord record_from_json(const json& object) {
  KbRecord record;
  record.domaine = string_field(object, "Domaine");
  record.table = string_field(object, "Table");
  record.attribut = string_field(object, "Attribut");
  record.taille = integer_array_field<std::int64_t>(object, "Taille");
  record.taille_totale = integer_field(object, "Taille_Totale");
  const json& scoring = field(object, "Scoring");
  if (!scoring.is_array()) {
    throw Error("field 'Scoring' must be an array");
  }
  for (const auto& entry : scoring) {
    ReferenceScore score;
    score.reference = string_field(entry, kReference);
    score.taux = integer_array_field<int>(entry, "Taux");
    score.taux_final = static_cast<int>(integer_field(entry, "Taux_Final"));
    record.scoring.push_back(std::move(score));
  }
  record.validate();
  return record;
}

std::vector<KbRecord> load_kb(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) {
    throw Error("cannot open knowledge base '" + path.string() + "'");
  }
  std::vector<KbRecord> records;
  std::set<RecordKey> keys;
  std::string line;
  std::size_t line_number = 0;
  while (std::getline(in, line)) {
    ++line_number;
    if (line.find_first_not_of(" \t\r") == std::string::npos) {
      continue;
    }
    try {
      KbRecord record = record_from_json(json::parse(line));
      if (!keys.insert(record.key()).second) {
        throw Error("duplicate record for attribute '" + record.attribut + "'");
      }
      records.push_back(std::move(record));
    } catch (const json::exception& e) {
      throw Error(path.string() + ":" + std::to_string(line_number) + ": " + e.what());
    } catch (const Error& e) {
      throw Error(path.string() + ":" + std::to_string(line_number) + ": " + e.what());
    }
  }
  return records;
}

void save_kb(std::span<const KbRecord> records, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) {
    throw Error("cannot write knowledge base '" + path.string() + "'");
  }
  for (const auto& record : records) {
    out << to_json(record).dump() << '\n';
  }
  if (!out) {
    throw Error("write failed for '" + path.string() + "'");
  }
}

AnalysisBatch batch_from_json(const json& object) {
  AnalysisBatch batch;
  batch.key.domaine = string_field(object, "Domaine");
  batch.key.table = string_field(object, "Table");
  batch.key.attribut = string_field(object, "Attribut");
  batch.taille = integer_field(object, "Taille");
  const json& scoring = field(object, "Scoring");
  if (!scoring.is_array()) {
    throw Error("field 'Scoring' must be an array");
  }
  for (const auto& entry : scoring) {
    batch.rates.emplace_back(string_field(entry, kReference),
                             static_cast<int>(integer_field(entry, "Taux")));
  }
  return batch;
}

KnowledgeBase::KnowledgeBase(std::vector<KbRecord> records) : records_(std::move(records)) {
  std::set<RecordKey> keys;
  for (const auto& record : records_) {
    record.validate();
    if (!keys.insert(record.key()).second) {
      throw Error("duplicate record for attribute '" + record.attribut + "'");
    }
  }
}

KnowledgeBase KnowledgeBase::open(const std::filesystem::path& path) {
  if (!std::filesystem::exists(path)) {
    return KnowledgeBase();
  }
  return KnowledgeBase(load_kb(path));
}

void KnowledgeBase::save(const std::filesystem::path& path) const {
  const std::shared_lock lock(mutex_);
  save_kb(records_, path);
}

std::optional<KbRecord> KnowledgeBase::find(const RecordKey& key) const {
  const std::shared_lock lock(mutex_);
  for (const auto& record : records_) {
    if (record.key() == key) {
      return record;
    }
  }
  return std::nullopt;
}

std::vector<KbRecord> KnowledgeBase::query(const KbQuery& filter) const {
  const std::shared_lock lock(mutex_);
  std::vector<KbRecord> out;
  for (const auto& record : records_) {
    if (matches(filter.domaine, record.domaine) && matches(filter.table, record.table) &&
        matches(filter.attribut, record.attribut)) {
      out.push_back(record);
    }
  }
  return out;
}

std::vector<KbRecord> KnowledgeBase::records() const {
  const std::shared_lock lock(mutex_);
  return records_;
}

std::size_t KnowledgeBase::size() const {
  const std::shared_lock lock(mutex_);
  return records_.size();
}

bool KnowledgeBase::ingest(const AnalysisBatch& batch, const Dictionary& dictionary,
                           const MetricKind& metric, const Thresholds& thresholds) {
  if (!admit(batch.key.attribut, dictionary, metric, thresholds)) {
    return false;
  }
  merge(batch);
  return true;
}

void KnowledgeBase::merge(const AnalysisBatch& batch) {
  const std::unique_lock lock(mutex_);
  auto it = std::find_if(records_.begin(), records_.end(),
                         [&](const KbRecord& r) { return r.key() == batch.key; });
  if (it == records_.end()) {
    records_.push_back(merge_analysis(std::nullopt, batch.key, batch.taille, batch.rates));
  } else {
    *it = merge_analysis(*it, batch.key, batch.taille, batch.rates);
  }
}

}  // namespace attrsig
