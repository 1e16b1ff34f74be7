#include "attrsig/metrics.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <numeric>

#include "attrsig/error.hpp"

namespace attrsig {

namespace {

// Never a Unicode scalar value, so it cannot collide with input text.
constexpr char32_t kSentinel = 0xFFFFFFFFu;

std::uint64_t lookup_mask(const std::array<std::uint64_t, 128>& ascii,
                          const std::vector<std::pair<char32_t, std::uint64_t>>& other,
                          char32_t c) {
  if (c < 128) {
    return ascii[c];
  }
  for (const auto& [ch, mask] : other) {
    if (ch == c) {
      return mask;
    }
  }
  return 0;
}

void build_masks(std::u32string_view pattern, std::array<std::uint64_t, 128>& ascii,
                 std::vector<std::pair<char32_t, std::uint64_t>>& other) {
  ascii.fill(0);
  other.clear();
  for (std::size_t i = 0; i < pattern.size(); ++i) {
    const char32_t c = pattern[i];
    const std::uint64_t bit = std::uint64_t{1} << i;
    if (c < 128) {
      ascii[c] |= bit;
      continue;
    }
    auto it = std::find_if(other.begin(), other.end(),
                           [c](const auto& entry) { return entry.first == c; });
    if (it == other.end()) {
      other.emplace_back(c, bit);
    } else {
      it->second |= bit;
    }
  }
}

// Hyyrö's formulation of Myers' bit-vector algorithm for global edit
// distance. Requires 1 <= pattern_length <= 64.
std::size_t bit_parallel_distance(const std::array<std::uint64_t, 128>& ascii,
                                  const std::vector<std::pair<char32_t, std::uint64_t>>& other,
                                  std::size_t pattern_length, std::u32string_view text) {
  std::uint64_t pv = ~std::uint64_t{0};
  std::uint64_t mv = 0;
  std::size_t score = pattern_length;
  const std::uint64_t last = std::uint64_t{1} << (pattern_length - 1);
  for (char32_t c : text) {
    const std::uint64_t eq = lookup_mask(ascii, other, c);
    const std::uint64_t xv = eq | mv;
    const std::uint64_t xh = (((eq & pv) + pv) ^ pv) | eq;
    std::uint64_t ph = mv | ~(xh | pv);
    std::uint64_t mh = pv & xh;
    if (ph & last) {
      ++score;
    } else if (mh & last) {
      --score;
    }
    ph = (ph << 1) | 1;
    mh <<= 1;
    pv = mh | ~(xv | ph);
    mv = ph & xv;
  }
  return score;
}

std::size_t two_row_distance(std::u32string_view a, std::u32string_view b) {
  std::vector<std::size_t> row(b.size() + 1);
  std::iota(row.begin(), row.end(), std::size_t{0});
  for (std::size_t i = 1; i <= a.size(); ++i) {
    std::size_t diagonal = row[0];
    row[0] = i;
    for (std::size_t j = 1; j <= b.size(); ++j) {
      const std::size_t above = row[j];
      const std::size_t substitution = diagonal + (a[i - 1] == b[j - 1] ? 0 : 1);
      row[j] = std::min({row[j - 1] + 1, above + 1, substitution});
      diagonal = above;
    }
  }
  return row[b.size()];
}

double length_bound(std::size_t a, std::size_t b) {
  const std::size_t longest = std::max(a, b);
  if (longest == 0) {
    return 1.0;
  }
  const std::size_t diff = a > b ? a - b : b - a;
  // Slack covers rounding differences with the short-string fallback.
  return 1.0 - static_cast<double>(diff) / static_cast<double>(longest) + 1e-12;
}

std::int64_t lcm_up_to(int n) {
  std::int64_t value = 1;
  for (int k = 2; k <= n; ++k) {
    value = std::lcm(value, static_cast<std::int64_t>(k));
  }
  return value;
}

void check_ngram_order(int n) {
  if (n < 2 || n > kMaxNgram) {
    throw Error("n-gram order must be in [2, " + std::to_string(kMaxNgram) + "], got " +
                std::to_string(n));
  }
}

// Positional agreement used when a string is too short to hold one gram.
double short_string_agreement(std::u32string_view a, std::u32string_view b) {
  std::size_t same = 0;
  for (std::size_t i = 0, end = std::min(a.size(), b.size()); i < end; ++i) {
    if (a[i] == b[i]) {
      ++same;
    }
  }
  return static_cast<double>(same) / static_cast<double>(std::max(a.size(), b.size()));
}

// Kondrak DP with every cost scaled by lcm(1..n) so that the distance is an
// integer and equal rational distances compare equal.
double kondrak_similarity(std::u32string_view a, std::u32string_view b, int n) {
  if (a == b) {
    return 1.0;
  }
  if (a.empty() || b.empty()) {
    return 0.0;
  }
  const auto order = static_cast<std::size_t>(n);
  if (a.size() < order || b.size() < order) {
    return short_string_agreement(a, b);
  }

  const std::int64_t scale = lcm_up_to(n);
  std::u32string padded_a(order - 1, kSentinel);
  padded_a.append(a);
  std::u32string padded_b(order - 1, kSentinel);
  padded_b.append(b);

  const std::size_t sl = a.size();
  const std::size_t tl = b.size();
  thread_local std::vector<std::int64_t> prev;
  thread_local std::vector<std::int64_t> curr;
  prev.resize(sl + 1);
  curr.resize(sl + 1);
  for (std::size_t i = 0; i <= sl; ++i) {
    prev[i] = static_cast<std::int64_t>(i) * scale;
  }
  for (std::size_t j = 1; j <= tl; ++j) {
    const char32_t* gram_b = padded_b.data() + (j - 1);
    curr[0] = static_cast<std::int64_t>(j) * scale;
    for (std::size_t i = 1; i <= sl; ++i) {
      const char32_t* gram_a = padded_a.data() + (i - 1);
      int mismatches = 0;
      int counted = n;
      for (std::size_t k = 0; k < order; ++k) {
        if (gram_a[k] != gram_b[k]) {
          ++mismatches;
        } else if (gram_a[k] == kSentinel) {
          --counted;
        }
      }
      const std::int64_t substitution = prev[i - 1] + mismatches * (scale / counted);
      curr[i] = std::min({curr[i - 1] + scale, prev[i] + scale, substitution});
    }
    std::swap(prev, curr);
  }
  const double distance = static_cast<double>(prev[sl]);
  return 1.0 - distance / (static_cast<double>(scale) * static_cast<double>(std::max(sl, tl)));
}

std::vector<std::u32string_view> unique_grams(std::u32string_view s, std::size_t n) {
  std::vector<std::u32string_view> grams;
  if (s.size() >= n) {
    for (std::size_t i = 0; i + n <= s.size(); ++i) {
      grams.push_back(s.substr(i, n));
    }
  }
  std::sort(grams.begin(), grams.end());
  grams.erase(std::unique(grams.begin(), grams.end()), grams.end());
  return grams;
}

}  // namespace

std::size_t levenshtein_distance(std::u32string_view a, std::u32string_view b) {
  if (a.size() > b.size()) {
    std::swap(a, b);
  }
  if (a.empty()) {
    return b.size();
  }
  if (a.size() <= 64) {
    std::array<std::uint64_t, 128> ascii;
    std::vector<std::pair<char32_t, std::uint64_t>> other;
    build_masks(a, ascii, other);
    return bit_parallel_distance(ascii, other, a.size(), b);
  }
  return two_row_distance(a, b);
}

double levenshtein_sim(std::u32string_view a, std::u32string_view b) {
  const std::size_t longest = std::max(a.size(), b.size());
  if (longest == 0) {
    return 1.0;
  }
  return 1.0 - static_cast<double>(levenshtein_distance(a, b)) / static_cast<double>(longest);
}

double jaro(std::u32string_view a, std::u32string_view b) {
  if (a.empty() && b.empty()) {
    return 1.0;
  }
  if (a.empty() || b.empty()) {
    return 0.0;
  }
  // Canonical argument order keeps the greedy matching symmetric.
  if (a.size() > b.size() || (a.size() == b.size() && b < a)) {
    std::swap(a, b);
  }
  const std::size_t window = std::max(b.size() / 2, std::size_t{1}) - 1;
  std::vector<char> matched_a(a.size(), 0);
  std::vector<char> matched_b(b.size(), 0);
  std::size_t matches = 0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    const std::size_t lo = i > window ? i - window : 0;
    const std::size_t hi = std::min(i + window + 1, b.size());
    for (std::size_t j = lo; j < hi; ++j) {
      if (!matched_b[j] && a[i] == b[j]) {
        matched_a[i] = matched_b[j] = 1;
        ++matches;
        break;
      }
    }
  }
  if (matches == 0) {
    return 0.0;
  }
  std::size_t half_transpositions = 0;
  for (std::size_t i = 0, k = 0; i < a.size(); ++i) {
    if (!matched_a[i]) {
      continue;
    }
    while (!matched_b[k]) {
      ++k;
    }
    if (a[i] != b[k]) {
      ++half_transpositions;
    }
    ++k;
  }
  const double m = static_cast<double>(matches);
  const double t = static_cast<double>(half_transpositions / 2);
  return (m / static_cast<double>(a.size()) + m / static_cast<double>(b.size()) + (m - t) / m) /
         3.0;
}

double jaro_winkler(std::u32string_view a, std::u32string_view b) {
  const double base = jaro(a, b);
  double boosted = base;
  if (base >= 0.7) {
    std::size_t prefix = 0;
    while (prefix < a.size() && prefix < b.size() && a[prefix] == b[prefix]) {
      ++prefix;
    }
    const double scale = std::min(0.1, 1.0 / static_cast<double>(std::max(a.size(), b.size())));
    boosted = base + scale * static_cast<double>(prefix) * (1.0 - base);
  }
  return std::floor(boosted * 100.0 + 0.5) / 100.0;
}

double ngram_sim(std::u32string_view a, std::u32string_view b, int n) {
  check_ngram_order(n);
  return kondrak_similarity(a, b, n);
}

double ngram_set_ratio(std::u32string_view a, std::u32string_view b, int n) {
  check_ngram_order(n);
  if (a == b) {
    return 1.0;
  }
  const auto order = static_cast<std::size_t>(n);
  const auto grams_a = unique_grams(a, order);
  const auto grams_b = unique_grams(b, order);
  if (grams_a.empty() || grams_b.empty()) {
    return 0.0;
  }
  std::vector<std::u32string_view> common;
  std::set_intersection(grams_a.begin(), grams_a.end(), grams_b.begin(), grams_b.end(),
                        std::back_inserter(common));
  const std::size_t all = grams_a.size() + grams_b.size() - common.size();
  return static_cast<double>(common.size()) / static_cast<double>(all);
}

std::size_t longest_common_substring(std::u32string_view a, std::u32string_view b) {
  if (a.empty() || b.empty()) {
    return 0;
  }
  std::vector<std::size_t> prev(b.size() + 1, 0);
  std::vector<std::size_t> curr(b.size() + 1, 0);
  std::size_t best = 0;
  for (std::size_t i = 1; i <= a.size(); ++i) {
    for (std::size_t j = 1; j <= b.size(); ++j) {
      curr[j] = a[i - 1] == b[j - 1] ? prev[j - 1] + 1 : 0;
      best = std::max(best, curr[j]);
    }
    std::swap(prev, curr);
  }
  return best;
}

MetricKind MetricKind::ngram(int n, NgramMode mode) {
  check_ngram_order(n);
  return {MetricFamily::ngram, n, mode};
}

MetricKind MetricKind::parse(std::string_view name, NgramMode mode) {
  if (name == "levenshtein" || name == "lev") {
    return levenshtein();
  }
  if (name == "jaro") {
    return jaro();
  }
  if (name == "jaro-winkler" || name == "jaro_winkler" || name == "jw") {
    return jaro_winkler();
  }
  constexpr std::string_view kSetRatioSuffix = "-setratio";
  if (name.size() > kSetRatioSuffix.size() && name.ends_with(kSetRatioSuffix)) {
    name.remove_suffix(kSetRatioSuffix.size());
    mode = NgramMode::set_ratio;
  }
  std::string_view digits = name;
  if (digits.ends_with("-gram")) {
    digits.remove_suffix(5);
  } else if (digits.ends_with("gram")) {
    digits.remove_suffix(4);
  } else {
    throw Error("unknown metric '" + std::string(name) + "'");
  }
  int n = 0;
  const auto [ptr, ec] = std::from_chars(digits.data(), digits.data() + digits.size(), n);
  if (ec != std::errc{} || ptr != digits.data() + digits.size() || digits.empty()) {
    throw Error("unknown metric '" + std::string(name) + "'");
  }
  return ngram(n, mode);
}

std::string MetricKind::name() const {
  switch (family) {
    case MetricFamily::levenshtein:
      return "levenshtein";
    case MetricFamily::jaro:
      return "jaro";
    case MetricFamily::jaro_winkler:
      return "jaro-winkler";
    case MetricFamily::ngram:
      return std::to_string(n) + "gram" + (ngram_mode == NgramMode::set_ratio ? "-setratio" : "");
  }
  return "unknown";
}

double similarity(const MetricKind& metric, std::u32string_view a, std::u32string_view b) {
  switch (metric.family) {
    case MetricFamily::levenshtein:
      return levenshtein_sim(a, b);
    case MetricFamily::jaro:
      return jaro(a, b);
    case MetricFamily::jaro_winkler:
      return jaro_winkler(a, b);
    case MetricFamily::ngram:
      return metric.ngram_mode == NgramMode::dp ? ngram_sim(a, b, metric.n)
                                                : ngram_set_ratio(a, b, metric.n);
  }
  return 0.0;
}

PreparedQuery::PreparedQuery(const MetricKind& metric, std::u32string_view query)
    : metric_(metric), query_(query) {
  if (metric_.family == MetricFamily::ngram) {
    check_ngram_order(metric_.n);
  }
  if (metric_.family == MetricFamily::levenshtein && !query_.empty() && query_.size() <= 64) {
    build_masks(query_, ascii_masks_, other_masks_);
    bit_parallel_ = true;
  }
}

double PreparedQuery::operator()(std::u32string_view candidate) const {
  if (!bit_parallel_) {
    return similarity(metric_, query_, candidate);
  }
  if (candidate.empty()) {
    return 0.0;
  }
  const std::size_t distance =
      bit_parallel_distance(ascii_masks_, other_masks_, query_.size(), candidate);
  const std::size_t longest = std::max(query_.size(), candidate.size());
  return 1.0 - static_cast<double>(distance) / static_cast<double>(longest);
}

double PreparedQuery::upper_bound(std::size_t candidate_length) const {
  switch (metric_.family) {
    case MetricFamily::levenshtein:
      return length_bound(query_.size(), candidate_length);
    case MetricFamily::ngram:
      // Every alignment needs at least |la - lb| unit-cost indels.
      return metric_.ngram_mode == NgramMode::dp ? length_bound(query_.size(), candidate_length)
                                                 : 1.0;
    default:
      return 1.0;
  }
}

}  // namespace attrsig
