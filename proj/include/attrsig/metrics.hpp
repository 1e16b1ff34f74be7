#pragma once

// String-based similarity functions. All of them compare code points and
// expect already normalized input; none of them normalizes internally.
// Similarities lie in [0, 1], 1 meaning identical. Two empty strings are
// identical for every metric.

#include <array>
#include <cstddef>
#include <cstdint>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace attrsig {

std::size_t levenshtein_distance(std::u32string_view a, std::u32string_view b);

/// 1 - distance / max(|a|, |b|).
double levenshtein_sim(std::u32string_view a, std::u32string_view b);

double jaro(std::u32string_view a, std::u32string_view b);

/// Jaro plus the common-prefix boost, rounded to two decimals. The boost is
/// applied when Jaro is at least 0.7, uses the full common prefix and the
/// factor min(0.1, 1 / max(|a|, |b|)).
double jaro_winkler(std::u32string_view a, std::u32string_view b);

/// Kondrak n-gram similarity: an edit-distance DP over n-grams of the two
/// strings, both padded on the left with n - 1 sentinels. Substituting one
/// gram for another costs the fraction of mismatching positions (matching
/// sentinels are not counted), insertions and deletions cost 1.
/// Strings shorter than n fall back to positional character agreement.
double ngram_sim(std::u32string_view a, std::u32string_view b, int n);

/// |common unique n-grams| / |all unique n-grams|, no padding.
double ngram_set_ratio(std::u32string_view a, std::u32string_view b, int n);

/// Length of the longest contiguous run shared by both strings.
std::size_t longest_common_substring(std::u32string_view a, std::u32string_view b);

enum class MetricFamily { levenshtein, ngram, jaro, jaro_winkler };
enum class NgramMode { dp, set_ratio };

inline constexpr int kMaxNgram = 8;

struct MetricKind {
  MetricFamily family = MetricFamily::levenshtein;
  int n = 0;  // only meaningful for ngram
  NgramMode ngram_mode = NgramMode::dp;

  static MetricKind levenshtein() { return {}; }
  static MetricKind jaro() { return {MetricFamily::jaro, 0, NgramMode::dp}; }
  static MetricKind jaro_winkler() { return {MetricFamily::jaro_winkler, 0, NgramMode::dp}; }
  static MetricKind ngram(int n, NgramMode mode = NgramMode::dp);

  /// Accepts "levenshtein", "jaro", "jaro-winkler" and "<n>gram".
  static MetricKind parse(std::string_view name, NgramMode mode = NgramMode::dp);
  std::string name() const;

  bool operator==(const MetricKind&) const = default;
};

double similarity(const MetricKind& metric, std::u32string_view a, std::u32string_view b);

/// A metric bound to a fixed query string, for scoring one query against
/// many candidates. Per-query tables (Levenshtein bit masks, padded grams)
/// are built once.
class PreparedQuery {
 public:
  PreparedQuery(const MetricKind& metric, std::u32string_view query);

  double operator()(std::u32string_view candidate) const;

  /// An upper bound of operator() for any candidate of the given length.
  double upper_bound(std::size_t candidate_length) const;

  const MetricKind& metric() const { return metric_; }
  std::u32string_view query() const { return query_; }

 private:
  MetricKind metric_;
  std::u32string query_;
  // Levenshtein pattern masks (query length <= 64).
  std::array<std::uint64_t, 128> ascii_masks_{};
  std::vector<std::pair<char32_t, std::uint64_t>> other_masks_;
  bool bit_parallel_ = false;
};

}  // namespace attrsig
