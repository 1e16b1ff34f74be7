#pragma once

// Attribute-name signification scoring.
//
// A name is first decomposed: every dictionary word longer than three code
// points that occurs in it is removed, longest words first. If letters
// remain, the residual is compared against the whole dictionary and the
// best similarity is reinforced by an exponent that grows with the number of
// characters left unexplained:
//
//   score = sd ^ (s_bar / s)
//   s     = removed length + lcs(residual, best word)
//   s_bar = |residual| + |best word| - 2 * lcs(residual, best word)

#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "attrsig/dictionary.hpp"
#include "attrsig/metrics.hpp"
#include "attrsig/normalize.hpp"

namespace attrsig {

/// Scores at or above this count as fully meaningful.
inline constexpr double kMeaningfulScore = 0.995;

struct Thresholds {
  double accept = 0.7;    // knowledge-base admission
  double probable = 0.5;  // probable / meaningless boundary

  /// Throws Error unless 0 <= probable <= accept <= 1.
  void validate() const;
};

enum class Category { meaningful, probable, meaningless };

std::string_view to_string(Category category);
Category categorize(double score, const Thresholds& thresholds);

struct FirstPassResult {
  std::u32string app;     // residual after removing dictionary words
  std::size_t explained;  // code points removed
  std::vector<std::pair<std::string, std::size_t>> removed;  // word, occurrences
};

struct Match {
  std::string word;
  double sd = 0.0;
};

struct SignifResult {
  std::string attribut;
  std::string app;
  std::optional<std::string> mppd;
  double sd = 1.0;
  std::size_t s = 0;
  std::size_t s_bar = 0;
  double score = 0.0;
  Category category = Category::meaningless;
};

/// Toggles for the two stages, mainly to reproduce unreinforced baselines.
struct SignifOptions {
  bool decompose = true;  // first pass
  bool reinforce = true;  // exponent
};

FirstPassResult first_pass(const NormalizedName& name, const Dictionary& dictionary);

/// Best dictionary word for `app` over the whole dictionary. Equal
/// similarities go to the lexicographically greatest word.
Match best_match(std::u32string_view app, const Dictionary& dictionary, const MetricKind& metric);

/// sd ^ (s_bar / s); for s == 0 the limit: 1 if sd >= 1, else 0.
double reinforce(double sd, std::size_t s, std::size_t s_bar);

SignifResult score_name(std::string_view name, const Dictionary& dictionary,
                        const MetricKind& metric, const Thresholds& thresholds,
                        const SignifOptions& options = {});

/// Scores every name; results keep input order. `workers` > 1 spreads names
/// over threads.
std::vector<SignifResult> has_signification(std::span<const std::string> names,
                                            const Dictionary& dictionary,
                                            const MetricKind& metric,
                                            const Thresholds& thresholds,
                                            const SignifOptions& options = {},
                                            unsigned workers = 1);

}  // namespace attrsig
