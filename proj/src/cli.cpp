#include "attrsig/cli.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>

#include <CLI11.hpp>

#include "attrsig/bench.hpp"
#include "attrsig/dictionary.hpp"
#include "attrsig/error.hpp"
#include "attrsig/kb.hpp"

namespace attrsig::cli {

namespace {

using nlohmann::json;
using nlohmann::ordered_json;

struct CliConfig {
  std::string dictionary;
  std::string stopwords;
  std::string metric = "levenshtein";
  std::string ngram_mode = "dp";
  Thresholds thresholds;
  std::string input = "-";
  std::string output = "-";
  std::string kb;
  std::vector<std::size_t> sizes{100, 1000, 2000, 5000, 10000};
  std::uint64_t seed = 1;
  unsigned repetitions = 5;
  unsigned workers = 1;
};

double round4(double value) { return std::round(value * 10000.0) / 10000.0; }

MetricKind parse_metric(const CliConfig& config) {
  NgramMode mode = NgramMode::dp;
  if (config.ngram_mode == "setratio") {
    mode = NgramMode::set_ratio;
  } else if (config.ngram_mode != "dp") {
    throw Error("unknown --ngram-mode '" + config.ngram_mode + "'");
  }
  return MetricKind::parse(config.metric, mode);
}

Dictionary load_dictionary(const CliConfig& config) {
  std::string path = config.dictionary;
  if (path.empty()) {
    if (const char* env = std::getenv(kDictionaryEnv); env != nullptr) {
      path = env;
    }
  }
  if (path.empty()) {
    throw Error(std::string("no dictionary given (use --dict or ") + kDictionaryEnv + ")");
  }
  if (!std::filesystem::exists(path)) {
    throw Error("dictionary file '" + path + "' not found");
  }
  std::optional<std::filesystem::path> stop;
  if (!config.stopwords.empty()) {
    stop = config.stopwords;
  }
  return Dictionary::load(path, stop);
}

// Reads from a file or, for "-", from the supplied stream.
class Input {
 public:
  Input(const std::string& path, std::istream& fallback) : stream_(&fallback) {
    if (path != "-") {
      file_.open(path);
      if (!file_) {
        throw Error("cannot open input '" + path + "'");
      }
      stream_ = &file_;
    }
  }
  std::istream& get() { return *stream_; }

 private:
  std::ifstream file_;
  std::istream* stream_;
};

class Output {
 public:
  Output(const std::string& path, std::ostream& fallback) : stream_(&fallback) {
    if (path != "-") {
      file_.open(path, std::ios::binary | std::ios::trunc);
      if (!file_) {
        throw Error("cannot open output '" + path + "'");
      }
      stream_ = &file_;
    }
  }
  std::ostream& get() { return *stream_; }

 private:
  std::ofstream file_;
  std::ostream* stream_;
};

void strip_cr(std::string& line) {
  if (!line.empty() && line.back() == '\r') {
    line.pop_back();
  }
}

bool blank(std::string_view line) {
  return line.find_first_not_of(" \t") == std::string_view::npos;
}

// Splits one CSV line; fields may be double-quoted with "" escapes.
std::optional<std::vector<std::string>> split_csv(std::string_view line) {
  std::vector<std::string> fields(1);
  bool quoted = false;
  for (std::size_t i = 0; i < line.size(); ++i) {
    const char c = line[i];
    if (quoted) {
      if (c == '"' && i + 1 < line.size() && line[i + 1] == '"') {
        fields.back().push_back('"');
        ++i;
      } else if (c == '"') {
        quoted = false;
      } else {
        fields.back().push_back(c);
      }
    } else if (c == '"') {
      quoted = true;
    } else if (c == ',') {
      fields.emplace_back();
    } else {
      fields.back().push_back(c);
    }
  }
  if (quoted) {
    return std::nullopt;
  }
  return fields;
}

bool is_csv_header(std::string line) {
  for (auto& c : line) {
    c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  }
  line.erase(std::remove(line.begin(), line.end(), ' '), line.end());
  return line == "domaine,table,attribut";
}

void add_scoring_options(CLI::App& cmd, CliConfig& config) {
  cmd.add_option("--dict", config.dictionary, "Dictionary file (default: $ATTRSIG_DICT)");
  cmd.add_option("--stopwords", config.stopwords, "Stopword file");
  cmd.add_option("--metric", config.metric, "levenshtein | 2gram | 3gram | jaro-winkler | jaro");
  cmd.add_option("--ngram-mode", config.ngram_mode, "dp | setratio")
      ->check(CLI::IsMember({"dp", "setratio"}));
  cmd.add_option("--accept", config.thresholds.accept, "Admission threshold")
      ->check(CLI::Range(0.0, 1.0));
  cmd.add_option("--probable", config.thresholds.probable, "Probable/meaningless boundary")
      ->check(CLI::Range(0.0, 1.0));
}

int cmd_check(const std::string& name, const CliConfig& config, std::ostream& out) {
  config.thresholds.validate();
  const Dictionary dictionary = load_dictionary(config);
  const SignifResult result = score_name(name, dictionary, parse_metric(config), config.thresholds);
  out << result_to_json(result).dump() << '\n';
  return result.score >= config.thresholds.accept ? kOk : kRejected;
}

int cmd_batch(const CliConfig& config, std::istream& in, std::ostream& out, std::ostream& err) {
  config.thresholds.validate();
  const Dictionary dictionary = load_dictionary(config);
  const MetricKind metric = parse_metric(config);

  Input input(config.input, in);
  struct Row {
    std::optional<std::pair<std::string, std::string>> context;  // domaine, table
    std::string attribut;
  };
  std::vector<Row> rows;
  std::string line;
  std::size_t line_number = 0;
  bool csv = false;
  bool first = true;
  while (std::getline(input.get(), line)) {
    ++line_number;
    strip_cr(line);
    if (first && line.starts_with("\xEF\xBB\xBF")) {
      line.erase(0, 3);
    }
    if (blank(line)) {
      continue;
    }
    if (first) {
      first = false;
      if (is_csv_header(line)) {
        csv = true;
        continue;
      }
    }
    if (!csv) {
      rows.push_back({std::nullopt, line});
      continue;
    }
    const auto fields = split_csv(line);
    if (!fields || fields->size() != 3) {
      err << config.input << ":" << line_number
          << ": skipped malformed CSV row (expected domaine,table,attribut)\n";
      continue;
    }
    rows.push_back({std::make_pair((*fields)[0], (*fields)[1]), (*fields)[2]});
  }

  std::vector<std::string> names;
  names.reserve(rows.size());
  for (const auto& row : rows) {
    names.push_back(row.attribut);
  }
  const auto results =
      has_signification(names, dictionary, metric, config.thresholds, {}, config.workers);

  Output output(config.output, out);
  for (std::size_t i = 0; i < results.size(); ++i) {
    ordered_json object;
    if (rows[i].context) {
      object["domaine"] = rows[i].context->first;
      object["table"] = rows[i].context->second;
    }
    object.update(result_to_json(results[i]));
    output.get() << object.dump() << '\n';
  }
  if (!output.get()) {
    throw Error("write failed for '" + config.output + "'");
  }
  return kOk;
}

int cmd_dict_build(const CliConfig& config, std::ostream& out, std::ostream& err) {
  if (config.input == "-" || config.output == "-") {
    throw Error("dict build needs --input and --output files");
  }
  std::optional<std::filesystem::path> stop;
  if (!config.stopwords.empty()) {
    stop = config.stopwords;
  }
  const Dictionary dictionary = Dictionary::load(config.input, stop);
  write_word_file(config.output, dictionary);
  err << "wrote " << dictionary.size() << " words (lengths " << dictionary.min_length() << "-"
      << dictionary.max_length() << ", " << dictionary.long_word_count()
      << " usable for decomposition)\n";
  ordered_json stats;
  stats["words"] = dictionary.size();
  stats["min_length"] = dictionary.min_length();
  stats["max_length"] = dictionary.max_length();
  stats["long_words"] = dictionary.long_word_count();
  out << stats.dump() << '\n';
  return kOk;
}

int cmd_kb_ingest(const CliConfig& config, std::istream& in, std::ostream& out,
                  std::ostream& err) {
  if (config.kb.empty()) {
    throw Error("kb ingest needs --kb");
  }
  config.thresholds.validate();
  const Dictionary dictionary = load_dictionary(config);
  const MetricKind metric = parse_metric(config);
  KnowledgeBase kb = KnowledgeBase::open(config.kb);

  Input input(config.input, in);
  std::size_t admitted = 0;
  std::size_t rejected = 0;
  std::size_t skipped = 0;
  std::string line;
  std::size_t line_number = 0;
  while (std::getline(input.get(), line)) {
    ++line_number;
    strip_cr(line);
    if (blank(line)) {
      continue;
    }
    try {
      const AnalysisBatch batch = batch_from_json(json::parse(line));
      if (kb.ingest(batch, dictionary, metric, config.thresholds)) {
        ++admitted;
      } else {
        ++rejected;
        err << "rejected '" << batch.key.attribut << "': name below acceptance threshold\n";
      }
    } catch (const json::exception& e) {
      ++skipped;
      err << config.input << ":" << line_number << ": skipped: " << e.what() << '\n';
    } catch (const Error& e) {
      ++skipped;
      err << config.input << ":" << line_number << ": skipped: " << e.what() << '\n';
    }
  }
  kb.save(config.kb);
  ordered_json summary;
  summary["admitted"] = admitted;
  summary["rejected"] = rejected;
  summary["skipped"] = skipped;
  summary["records"] = kb.size();
  out << summary.dump() << '\n';
  return kOk;
}

int cmd_kb_query(const CliConfig& config, const KbQuery& filter, std::ostream& out) {
  if (config.kb.empty()) {
    throw Error("kb query needs --kb");
  }
  if (!std::filesystem::exists(config.kb)) {
    throw Error("knowledge base '" + config.kb + "' not found");
  }
  const KnowledgeBase kb(load_kb(config.kb));
  Output output(config.output, out);
  for (const auto& record : kb.query(filter)) {
    output.get() << to_json(record).dump() << '\n';
  }
  return kOk;
}

int cmd_bench(const CliConfig& config, const std::vector<std::string>& metric_names,
              std::size_t synthetic_words, std::ostream& out, std::ostream& err) {
  std::optional<Dictionary> dictionary;
  if (synthetic_words > 0) {
    dictionary = synthetic_dictionary(synthetic_words, config.seed);
  } else {
    dictionary = load_dictionary(config);
  }
  NgramMode mode = config.ngram_mode == "setratio" ? NgramMode::set_ratio : NgramMode::dp;
  std::vector<MetricKind> metrics;
  for (const auto& name : metric_names) {
    metrics.push_back(MetricKind::parse(name, mode));
  }
  BenchOptions options;
  options.repetitions = config.repetitions;
  options.workers = config.workers;
  options.seed = config.seed;
  err << "corpus: synthetic stand-in names (seed " << config.seed << "), dictionary "
      << dictionary->size() << " words" << (synthetic_words > 0 ? " (synthetic)" : "") << ", "
      << config.workers << " worker(s)\n";
  const BenchReport report = run_bench(*dictionary, metrics, config.sizes, options);
  Output output(config.output, out);
  output.get() << report.to_csv();
  return kOk;
}

}  // namespace

ordered_json result_to_json(const SignifResult& result) {
  ordered_json out;
  out["attribut"] = result.attribut;
  out["app"] = result.app;
  out["mppd"] = result.mppd ? ordered_json(*result.mppd) : ordered_json(nullptr);
  out["sd"] = round4(result.sd);
  out["s"] = result.s;
  out["s_bar"] = result.s_bar;
  out["score"] = round4(result.score);
  out["category"] = std::string(to_string(result.category));
  return out;
}

int run(int argc, const char* const* argv, std::istream& in, std::ostream& out,
        std::ostream& err) {
  CLI::App app{"Attribute-name signification scoring and knowledge-base filtering", "attrsig"};
  app.require_subcommand(1);
  CliConfig config;

  std::string name;
  auto* check = app.add_subcommand("check", "Score one attribute name");
  check->add_option("name", name, "Attribute name")->required();
  add_scoring_options(*check, config);

  auto* batch = app.add_subcommand("batch", "Score one name per line (or domaine,table,attribut CSV)");
  add_scoring_options(*batch, config);
  batch->add_option("--input", config.input, "Input file, '-' for stdin");
  batch->add_option("--output", config.output, "JSONL output, '-' for stdout");
  batch->add_option("--workers", config.workers, "Scoring threads")->check(CLI::Range(1u, 256u));

  auto* dict = app.add_subcommand("dict", "Dictionary tools");
  dict->require_subcommand(1);
  auto* dict_build = dict->add_subcommand("build", "Normalize, filter and sort a raw word list");
  dict_build->add_option("--input", config.input, "Raw word list")->required();
  dict_build->add_option("--stopwords", config.stopwords, "Stopword file");
  dict_build->add_option("--output", config.output, "Dictionary file to write")->required();

  auto* kb = app.add_subcommand("kb", "Knowledge-base tools");
  kb->require_subcommand(1);
  auto* kb_ingest = kb->add_subcommand("ingest", "Admit and merge analysis batches (JSONL)");
  add_scoring_options(*kb_ingest, config);
  kb_ingest->add_option("--kb", config.kb, "Knowledge base JSONL file")->required();
  kb_ingest->add_option("--input", config.input, "Analysis batches, '-' for stdin");

  KbQuery filter;
  auto* kb_query = kb->add_subcommand("query", "Print matching records");
  kb_query->add_option("--kb", config.kb, "Knowledge base JSONL file")->required();
  kb_query->add_option("--domaine", filter.domaine);
  kb_query->add_option("--table", filter.table);
  kb_query->add_option("--attribut", filter.attribut);
  kb_query->add_option("--output", config.output, "'-' for stdout");

  std::vector<std::string> bench_metrics{"levenshtein", "2gram"};
  std::size_t synthetic_words = 0;
  auto* bench = app.add_subcommand("bench", "Benchmarks");
  bench->require_subcommand(1);
  auto* bench_run = bench->add_subcommand("run", "Time scoring per metric and group size (CSV)");
  bench_run->add_option("--dict", config.dictionary, "Dictionary file (default: $ATTRSIG_DICT)");
  bench_run->add_option("--stopwords", config.stopwords, "Stopword file");
  bench_run->add_option("--synthetic-words", synthetic_words,
                        "Use a generated dictionary of this many words instead of --dict");
  bench_run->add_option("--metric", bench_metrics, "Metrics to time")->delimiter(',');
  bench_run->add_option("--ngram-mode", config.ngram_mode, "dp | setratio")
      ->check(CLI::IsMember({"dp", "setratio"}));
  bench_run->add_option("--sizes", config.sizes, "Group sizes")->delimiter(',');
  bench_run->add_option("--seed", config.seed, "Corpus seed");
  bench_run->add_option("--reps", config.repetitions, "Repetitions (median reported)")
      ->check(CLI::Range(1u, 1000u));
  bench_run->add_option("--workers", config.workers, "Scoring threads")->check(CLI::Range(1u, 256u));
  bench_run->add_option("--output", config.output, "CSV output, '-' for stdout");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kOk : kFailure;
  }

  try {
    if (check->parsed()) {
      return cmd_check(name, config, out);
    }
    if (batch->parsed()) {
      return cmd_batch(config, in, out, err);
    }
    if (dict_build->parsed()) {
      return cmd_dict_build(config, out, err);
    }
    if (kb_ingest->parsed()) {
      return cmd_kb_ingest(config, in, out, err);
    }
    if (kb_query->parsed()) {
      return cmd_kb_query(config, filter, out);
    }
    if (bench_run->parsed()) {
      return cmd_bench(config, bench_metrics, synthetic_words, out, err);
    }
  } catch (const std::exception& e) {
    err << "attrsig: " << e.what() << '\n';
    return kFailure;
  }
  return kFailure;
}

}  // namespace attrsig::cli
