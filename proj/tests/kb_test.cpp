#include "attrsig/kb.hpp"

#include <algorithm>
#include <fstream>
#include <random>
#include <sstream>
#include <thread>

#include <gtest/gtest.h>

#include "attrsig/error.hpp"
#include "test_support.hpp"

namespace attrsig {
namespace {

using testing::data_dir;
using testing::TempDir;

const RecordKey kClientN{"Vente", "Client", "Client_N"};
const RecordKey kClientPN{"Vente", "Client", "Client_PN"};

std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return buffer.str();
}

void write_file(const std::filesystem::path& path, const std::string& text) {
  std::ofstream(path, std::ios::binary) << text;
}

int final_rate(const KbRecord& record, std::string_view reference) {
  for (const auto& score : record.scoring) {
    if (score.reference == reference) {
      return score.taux_final;
    }
  }
  ADD_FAILURE() << "no reference " << reference;
  return -1;
}

KbRecord two_batches(const RecordKey& key, std::vector<Rate> first, std::vector<Rate> second) {
  const auto once = merge_analysis(std::nullopt, key, 120, first);
  return merge_analysis(once, key, 250, second);
}

TEST(WeightedFinalRateTest, Examples) {
  const std::vector<std::int64_t> taille{120, 250};
  EXPECT_EQ(weighted_final_rate(taille, std::vector<int>{60, 70}), 67);
  EXPECT_EQ(weighted_final_rate(taille, std::vector<int>{23, 25}), 24);
  EXPECT_EQ(weighted_final_rate(taille, std::vector<int>{5, 2}), 3);
  EXPECT_EQ(weighted_final_rate(taille, std::vector<int>{30, 27}), 28);
  EXPECT_EQ(weighted_final_rate(taille, std::vector<int>{80, 77}), 78);
  EXPECT_EQ(weighted_final_rate(taille, std::vector<int>{2, 0}), 1);
}

TEST(WeightedFinalRateTest, HalvesRoundUp) {
  const std::vector<std::int64_t> taille{1, 1};
  EXPECT_EQ(weighted_final_rate(taille, std::vector<int>{1, 0}), 1);
  EXPECT_EQ(weighted_final_rate(taille, std::vector<int>{2, 1}), 2);
  EXPECT_EQ(weighted_final_rate(taille, std::vector<int>{0, 0}), 0);
}

TEST(WeightedFinalRateTest, MatchesFloatingPointOracle) {
  std::mt19937_64 rng(5);
  for (int i = 0; i < 5000; ++i) {
    const std::size_t batches = 1 + rng() % 6;
    std::vector<std::int64_t> taille;
    std::vector<int> taux;
    long double weighted = 0;
    long double total = 0;
    for (std::size_t k = 0; k < batches; ++k) {
      taille.push_back(1 + static_cast<std::int64_t>(rng() % 100000));
      taux.push_back(static_cast<int>(rng() % 101));
      weighted += static_cast<long double>(taille.back()) * taux.back();
      total += taille.back();
    }
    const long double mean = weighted / total;
    const int got = weighted_final_rate(taille, taux);
    // Exact halves are rare enough here that floor(mean + 0.5) is reliable.
    if (std::abs(mean - std::floor(mean) - 0.5L) > 1e-9L) {
      ASSERT_EQ(got, static_cast<int>(std::floor(mean + 0.5L)));
    }
    ASSERT_GE(got, *std::min_element(taux.begin(), taux.end()));
    ASSERT_LE(got, *std::max_element(taux.begin(), taux.end()));
  }
}

TEST(MergeAnalysisTest, FirstBatchCreatesRecord) {
  const std::vector<Rate> rates{{"Nom personne", 60}, {"Rue", 5}};
  const auto record = merge_analysis(std::nullopt, kClientN, 120, rates);
  EXPECT_EQ(record.key(), kClientN);
  EXPECT_EQ(record.taille, std::vector<std::int64_t>{120});
  EXPECT_EQ(record.taille_totale, 120);
  ASSERT_EQ(record.scoring.size(), 2u);
  EXPECT_EQ(record.scoring[0].taux, std::vector<int>{60});
  EXPECT_EQ(record.scoring[0].taux_final, 60);
  EXPECT_NO_THROW(record.validate());
}

TEST(MergeAnalysisTest, ClientRecordsFromTwoBatches) {
  const auto client_n =
      two_batches(kClientN, {{"Nom personne", 60}, {"Prénom personne", 23}, {"Rue", 5}},
                  {{"Nom personne", 70}, {"Prénom personne", 25}, {"Rue", 2}});
  EXPECT_EQ(client_n.taille_totale, 370);
  EXPECT_EQ(final_rate(client_n, "Nom personne"), 67);
  EXPECT_EQ(final_rate(client_n, "Prénom personne"), 24);
  EXPECT_EQ(final_rate(client_n, "Rue"), 3);

  const auto client_pn =
      two_batches(kClientPN, {{"Nom personne", 30}, {"Prénom personne", 80}, {"Rue", 2}},
                  {{"Nom personne", 27}, {"Prénom personne", 77}, {"Rue", 0}});
  EXPECT_EQ(final_rate(client_pn, "Nom personne"), 28);
  EXPECT_EQ(final_rate(client_pn, "Prénom personne"), 78);
  EXPECT_EQ(final_rate(client_pn, "Rue"), 1);
}

TEST(MergeAnalysisTest, NewReferenceIsBackFilled) {
  const auto record = two_batches(kClientN, {{"Nom personne", 60}}, {{"Ville", 40}});
  ASSERT_EQ(record.scoring.size(), 2u);
  EXPECT_EQ(record.scoring[0].taux, (std::vector<int>{60, 0}));
  EXPECT_EQ(record.scoring[1].reference, "Ville");
  EXPECT_EQ(record.scoring[1].taux, (std::vector<int>{0, 40}));
  EXPECT_EQ(record.scoring[1].taux_final, 27);  // 40 * 250 / 370 = 27.03
  EXPECT_NO_THROW(record.validate());
}

TEST(MergeAnalysisTest, FinalRatesIgnoreBatchOrder) {
  std::mt19937_64 rng(9);
  const std::vector<std::string> references{"A", "B", "C", "D"};
  for (int trial = 0; trial < 200; ++trial) {
    std::vector<std::pair<std::int64_t, std::vector<Rate>>> batches;
    for (int b = 0; b < 4; ++b) {
      std::vector<Rate> rates;
      for (const auto& reference : references) {
        if (rng() % 3) {
          rates.emplace_back(reference, static_cast<int>(rng() % 101));
        }
      }
      batches.emplace_back(1 + static_cast<std::int64_t>(rng() % 500), rates);
    }
    auto fold = [&](const auto& order) {
      std::optional<KbRecord> record;
      for (const auto& [size, rates] : order) {
        record = merge_analysis(record, kClientN, size, rates);
      }
      return *record;
    };
    const KbRecord forward = fold(batches);
    std::shuffle(batches.begin(), batches.end(), rng);
    const KbRecord shuffled = fold(batches);
    ASSERT_EQ(forward.taille_totale, shuffled.taille_totale);
    for (const auto& score : forward.scoring) {
      ASSERT_EQ(score.taux_final, final_rate(shuffled, score.reference));
    }
  }
}

TEST(MergeAnalysisTest, RejectsBadInput) {
  const std::vector<Rate> ok{{"Rue", 5}};
  EXPECT_THROW(merge_analysis(std::nullopt, kClientN, 0, ok), Error);
  EXPECT_THROW(merge_analysis(std::nullopt, kClientN, -3, ok), Error);
  EXPECT_THROW(merge_analysis(std::nullopt, kClientN, 10, std::vector<Rate>{{"Rue", 101}}),
               Error);
  EXPECT_THROW(merge_analysis(std::nullopt, kClientN, 10, std::vector<Rate>{{"Rue", -1}}), Error);
  EXPECT_THROW(merge_analysis(std::nullopt, kClientN, 10, std::vector<Rate>{{"", 1}}), Error);
  EXPECT_THROW(
      merge_analysis(std::nullopt, kClientN, 10, std::vector<Rate>{{"Rue", 1}, {"Rue", 2}}),
      Error);
}

TEST(KbRecordTest, ValidateCatchesBrokenInvariants) {
  const auto good = two_batches(kClientN, {{"Rue", 5}}, {{"Rue", 2}});
  ASSERT_NO_THROW(good.validate());

  auto bad_total = good;
  bad_total.taille_totale = 371;
  EXPECT_THROW(bad_total.validate(), Error);

  auto bad_length = good;
  bad_length.scoring[0].taux.pop_back();
  EXPECT_THROW(bad_length.validate(), Error);

  auto bad_final = good;
  bad_final.scoring[0].taux_final = 4;
  EXPECT_THROW(bad_final.validate(), Error);

  auto empty = good;
  empty.taille.clear();
  empty.taille_totale = 0;
  for (auto& score : empty.scoring) {
    score.taux.clear();
  }
  EXPECT_THROW(empty.validate(), Error);
}

TEST(KbJsonTest, FixtureRoundTripsByteForByte) {
  const auto path = data_dir() / "client_kb.jsonl";
  const auto records = load_kb(path);
  ASSERT_EQ(records.size(), 2u);
  EXPECT_EQ(records[0].attribut, "Client_N");
  EXPECT_EQ(records[1].scoring[1].reference, "Prénom personne");

  TempDir dir;
  save_kb(records, dir / "out.jsonl");
  EXPECT_EQ(read_file(dir / "out.jsonl"), read_file(path));
}

TEST(KbJsonTest, MergedBatchesReproduceFixture) {
  KnowledgeBase kb;
  std::ifstream in(data_dir() / "client_batches.jsonl");
  for (std::string line; std::getline(in, line);) {
    kb.merge(batch_from_json(nlohmann::json::parse(line)));
  }
  EXPECT_EQ(kb.records(), load_kb(data_dir() / "client_kb.jsonl"));
}

TEST(KbJsonTest, KeyOrderFollowsRecordLayout) {
  const auto record = two_batches(kClientN, {{"Rue", 5}}, {{"Rue", 2}});
  EXPECT_EQ(to_json(record).dump(),
            R"({"Domaine":"Vente","Table":"Client","Attribut":"Client_N","Taille":[120,250],)"
            R"("Taille_Totale":370,"Scoring":[{"Référence":"Rue","Taux":[5,2],"Taux_Final":3}]})");
}

TEST(KbJsonTest, RecordErrorsNameTheField) {
  const std::string text = read_file(data_dir() / "client_kb.jsonl");
  const auto json = nlohmann::json::parse(text.substr(0, text.find('\n')));
  ASSERT_NO_THROW(record_from_json(json));

  auto missing = json;
  missing.erase("Table");
  try {
    record_from_json(missing);
    FAIL();
  } catch (const Error& e) {
    EXPECT_NE(std::string(e.what()).find("Table"), std::string::npos);
  }

  auto wrong_type = json;
  wrong_type["Taille"] = "120";
  EXPECT_THROW(record_from_json(wrong_type), Error);

  auto bad_final = json;
  bad_final["Scoring"][0]["Taux_Final"] = 66;
  EXPECT_THROW(record_from_json(bad_final), Error);

  EXPECT_THROW(record_from_json(nlohmann::json::array()), Error);
}

TEST(KbFileTest, ErrorsCarryLineNumbers) {
  TempDir dir;
  const std::string good = read_file(data_dir() / "client_kb.jsonl");
  write_file(dir / "broken.jsonl", good + "{not json}\n");
  try {
    load_kb(dir / "broken.jsonl");
    FAIL();
  } catch (const Error& e) {
    EXPECT_NE(std::string(e.what()).find("broken.jsonl:3:"), std::string::npos) << e.what();
  }

  const std::string first_line = good.substr(0, good.find('\n') + 1);
  write_file(dir / "dup.jsonl", first_line + first_line);
  EXPECT_THROW(load_kb(dir / "dup.jsonl"), Error);

  EXPECT_THROW(load_kb(dir / "absent.jsonl"), Error);
}

TEST(KbFileTest, EmptyAndBlankFilesHoldNoRecords) {
  TempDir dir;
  write_file(dir / "empty.jsonl", "");
  write_file(dir / "blank.jsonl", "\n  \n");
  EXPECT_TRUE(load_kb(dir / "empty.jsonl").empty());
  EXPECT_TRUE(load_kb(dir / "blank.jsonl").empty());
}

TEST(KnowledgeBaseTest, OpenMissingFileIsEmpty) {
  TempDir dir;
  const auto kb = KnowledgeBase::open(dir / "kb.jsonl");
  EXPECT_EQ(kb.size(), 0u);
}

TEST(KnowledgeBaseTest, IngestAdmitsOnlySignificantNames) {
  const Dictionary& dictionary = testing::fixture_dictionary();
  KnowledgeBase kb;
  const AnalysisBatch meaningful{{"Vente", "Client", "naissance"}, 10, {{"Date", 90}}};
  const AnalysisBatch meaningless{{"Vente", "Client", "abteofkf"}, 10, {{"Date", 90}}};
  EXPECT_TRUE(kb.ingest(meaningful, dictionary, MetricKind::levenshtein(), Thresholds{}));
  EXPECT_FALSE(kb.ingest(meaningless, dictionary, MetricKind::levenshtein(), Thresholds{}));
  EXPECT_EQ(kb.size(), 1u);
  EXPECT_TRUE(kb.find(meaningful.key).has_value());
  EXPECT_FALSE(kb.find(meaningless.key).has_value());

  EXPECT_TRUE(admit("naiss", dictionary, MetricKind::levenshtein(), Thresholds{}));
  EXPECT_FALSE(admit("", dictionary, MetricKind::levenshtein(), Thresholds{}));
}

TEST(KnowledgeBaseTest, QueryFiltersOnEveryKeyField) {
  auto kb = KnowledgeBase::open(data_dir() / "client_kb.jsonl");
  kb.merge({{"Achat", "Fournisseur", "Client_N"}, 5, {{"Rue", 100}}});
  EXPECT_EQ(kb.query({}).size(), 3u);
  EXPECT_EQ(kb.query({.domaine = "Vente"}).size(), 2u);
  EXPECT_EQ(kb.query({.attribut = "Client_N"}).size(), 2u);
  EXPECT_EQ(kb.query({.domaine = "Vente", .attribut = "Client_N"}).size(), 1u);
  EXPECT_EQ(kb.query({.table = "Fournisseur"}).at(0).domaine, "Achat");
  EXPECT_TRUE(kb.query({.table = "Nope"}).empty());
}

TEST(KnowledgeBaseTest, SaveThenOpenRestoresRecords) {
  TempDir dir;
  auto kb = KnowledgeBase::open(data_dir() / "client_kb.jsonl");
  kb.merge({kClientN, 30, {{"Ville", 10}}});
  kb.save(dir / "kb.jsonl");
  const auto reopened = KnowledgeBase::open(dir / "kb.jsonl");
  EXPECT_EQ(reopened.records(), kb.records());
  const auto client_n = *reopened.find(kClientN);
  EXPECT_EQ(client_n.taille, (std::vector<std::int64_t>{120, 250, 30}));
  EXPECT_EQ(final_rate(client_n, "Ville"), 1);  // 300 / 400
}

TEST(KnowledgeBaseTest, ConcurrentMergesAreAllApplied) {
  KnowledgeBase kb;
  {
    std::vector<std::jthread> threads;
    for (int t = 0; t < 4; ++t) {
      threads.emplace_back([&kb] {
        for (int i = 0; i < 50; ++i) {
          kb.merge({kClientN, 1, {{"Rue", 50}}});
          (void)kb.query({.attribut = "Client_N"});
        }
      });
    }
  }
  const auto record = *kb.find(kClientN);
  EXPECT_EQ(record.taille_totale, 200);
  EXPECT_EQ(record.taille.size(), 200u);
  EXPECT_EQ(final_rate(record, "Rue"), 50);
}

TEST(KnowledgeBaseTest, ConstructorRejectsDuplicates) {
  const auto records = load_kb(data_dir() / "client_kb.jsonl");
  std::vector<KbRecord> doubled{records[0], records[0]};
  EXPECT_THROW(KnowledgeBase(std::move(doubled)), Error);
}

}  // namespace
}  // namespace attrsig
