#pragma once

#include <chrono>
#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "attrsig/dictionary.hpp"
#include "attrsig/metrics.hpp"

namespace attrsig {

/// Synthetic attribute names, cycling through three kinds: concatenations
/// of one or two dictionary words, abbreviations of a dictionary word
/// (vowels dropped or truncated), and random letter strings of length 5-10.
/// Deterministic for a given seed.
std::vector<std::string> generate_corpus(const Dictionary& dictionary, std::size_t size,
                                         std::uint64_t seed);

/// Pronounceable pseudo-words, used when no real dictionary of the wanted
/// size is at hand.
Dictionary synthetic_dictionary(std::size_t words, std::uint64_t seed);

struct BenchRow {
  MetricKind metric;
  std::size_t dict_words = 0;
  std::size_t group_size = 0;
  std::chrono::nanoseconds elapsed{0};  // median over repetitions
  double names_per_second = 0.0;
  double score_sum = 0.0;  // sum of scores of the timed run
};

struct BenchReport {
  std::vector<BenchRow> rows;

  /// metric,dict_words,group_size,elapsed_ms,names_per_sec
  std::string to_csv() const;
};

struct BenchOptions {
  unsigned repetitions = 5;
  unsigned workers = 1;
  std::uint64_t seed = 1;
};

/// Times has_signification over the first `size` names of one corpus, for
/// every metric and size.
BenchReport run_bench(const Dictionary& dictionary, std::span<const MetricKind> metrics,
                      std::span<const std::size_t> sizes, const BenchOptions& options = {});

}  // namespace attrsig
