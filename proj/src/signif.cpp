#include "attrsig/signif.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <limits>
#include <mutex>
#include <thread>

#include "attrsig/error.hpp"

namespace attrsig {

namespace {

// Removes every non-overlapping occurrence, scanning left to right once.
std::size_t erase_all(std::u32string& text, std::u32string_view word) {
  std::u32string out;
  out.reserve(text.size());
  std::size_t count = 0;
  std::size_t pos = 0;
  while (true) {
    const std::size_t hit = text.find(word, pos);
    if (hit == std::u32string::npos) {
      break;
    }
    out.append(text, pos, hit - pos);
    pos = hit + word.size();
    ++count;
  }
  out.append(text, pos, std::u32string::npos);
  text = std::move(out);
  return count;
}

// Smallest long-word rank >= `from` whose word occurs in `text`.
std::optional<std::size_t> next_contained_word(std::u32string_view text,
                                               const Dictionary& dictionary, std::size_t from) {
  std::optional<std::size_t> best;
  const std::size_t longest = std::min(text.size(), dictionary.max_length());
  for (std::size_t start = 0; start < text.size(); ++start) {
    const std::size_t room = std::min(longest, text.size() - start);
    for (std::size_t length = kMinDecompositionLength; length <= room; ++length) {
      const auto rank = dictionary.long_word_rank(text.substr(start, length));
      if (rank && *rank >= from && (!best || *rank < *best)) {
        best = rank;
      }
    }
  }
  return best;
}

}  // namespace

void Thresholds::validate() const {
  if (!(0.0 <= probable && probable <= accept && accept <= 1.0)) {
    throw Error("thresholds must satisfy 0 <= probable <= accept <= 1 (probable=" +
                std::to_string(probable) + ", accept=" + std::to_string(accept) + ")");
  }
}

std::string_view to_string(Category category) {
  switch (category) {
    case Category::meaningful:
      return "meaningful";
    case Category::probable:
      return "probable";
    case Category::meaningless:
      return "meaningless";
  }
  return "meaningless";
}

Category categorize(double score, const Thresholds& thresholds) {
  if (score >= kMeaningfulScore) {
    return Category::meaningful;
  }
  if (score >= thresholds.probable) {
    return Category::probable;
  }
  return Category::meaningless;
}

FirstPassResult first_pass(const NormalizedName& name, const Dictionary& dictionary) {
  FirstPassResult result{to_u32(name.normalized), 0, {}};
  // Equivalent to walking the long words in dictionary order and removing
  // each one the residual still contains: the next word removed is always
  // the lowest-ranked contained word after the previous one.
  std::size_t from = 0;
  while (from < dictionary.long_word_count()) {
    const auto rank = next_contained_word(result.app, dictionary, from);
    if (!rank) {
      break;
    }
    const auto& word = dictionary.words()[*rank];
    const std::size_t count = erase_all(result.app, word.points);
    result.explained += count * word.points.size();
    result.removed.emplace_back(word.text, count);
    from = *rank + 1;
  }
  return result;
}

Match best_match(std::u32string_view app, const Dictionary& dictionary, const MetricKind& metric) {
  if (app.empty()) {
    throw Error("best_match needs a non-empty residual");
  }
  if (dictionary.size() == 0) {
    throw Error("empty dictionary");
  }
  const PreparedQuery query(metric, app);
  const DictionaryWord* best = nullptr;
  double best_sd = -1.0;
  for (const auto& word : dictionary.words()) {
    if (query.upper_bound(word.points.size()) < best_sd) {
      continue;
    }
    const double sd = query(word.points);
    if (sd > best_sd || (sd == best_sd && word.points > best->points)) {
      best = &word;
      best_sd = sd;
    }
  }
  return {best->text, best_sd};
}

double reinforce(double sd, std::size_t s, std::size_t s_bar) {
  sd = std::clamp(sd, 0.0, 1.0);
  if (s == 0) {
    return sd >= 1.0 ? 1.0 : 0.0;
  }
  return std::pow(sd, static_cast<double>(s_bar) / static_cast<double>(s));
}

SignifResult score_name(std::string_view name, const Dictionary& dictionary,
                        const MetricKind& metric, const Thresholds& thresholds,
                        const SignifOptions& options) {
  const NormalizedName normalized = normalize(name);
  FirstPassResult pass = options.decompose
                             ? first_pass(normalized, dictionary)
                             : FirstPassResult{to_u32(normalized.normalized), 0, {}};

  SignifResult result;
  result.attribut = std::string(name);
  result.app = to_utf8(pass.app);

  if (!has_letters(pass.app)) {
    // Nothing left to explain. A name that had no letters to begin with
    // explains nothing either and scores 0.
    result.s = pass.explained;
    result.s_bar = pass.app.size();
    result.sd = pass.explained > 0 ? 1.0 : 0.0;
    result.score = result.sd;
    result.category = categorize(result.score, thresholds);
    return result;
  }

  const Match match = best_match(pass.app, dictionary, metric);
  const std::u32string mppd = to_u32(match.word);
  const std::size_t lcs = longest_common_substring(pass.app, mppd);
  result.mppd = match.word;
  result.sd = match.sd;
  result.s = pass.explained + lcs;
  result.s_bar = pass.app.size() + mppd.size() - 2 * lcs;
  result.score = options.reinforce ? reinforce(match.sd, result.s, result.s_bar) : match.sd;
  result.category = categorize(result.score, thresholds);
  return result;
}

std::vector<SignifResult> has_signification(std::span<const std::string> names,
                                            const Dictionary& dictionary,
                                            const MetricKind& metric,
                                            const Thresholds& thresholds,
                                            const SignifOptions& options, unsigned workers) {
  thresholds.validate();
  std::vector<SignifResult> results(names.size());
  workers = std::max(1u, std::min<unsigned>(workers, static_cast<unsigned>(names.size())));
  if (workers <= 1) {
    for (std::size_t i = 0; i < names.size(); ++i) {
      results[i] = score_name(names[i], dictionary, metric, thresholds, options);
    }
    return results;
  }

  std::atomic<std::size_t> next{0};
  std::exception_ptr failure;
  std::mutex failure_mutex;
  {
    std::vector<std::jthread> pool;
    pool.reserve(workers);
    for (unsigned w = 0; w < workers; ++w) {
      pool.emplace_back([&] {
        try {
          for (std::size_t i = next++; i < names.size(); i = next++) {
            results[i] = score_name(names[i], dictionary, metric, thresholds, options);
          }
        } catch (...) {
          const std::lock_guard lock(failure_mutex);
          if (!failure) {
            failure = std::current_exception();
          }
          next = names.size();
        }
      });
    }
  }
  if (failure) {
    std::rethrow_exception(failure);
  }
  return results;
}

}  // namespace attrsig
