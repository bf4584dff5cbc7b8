#pragma once

// Run-directory orchestration: configuration, per-stage content hashing for
// skip/restart, a single-writer lock, and the stage bodies.
//
// Run directory layout:
//   manifest.json, raw/<id>.html, clean/<id>.txt, CleanHTML.txt   (fetch, extract)
//   summaries/<id>.txt, summaries/index.json, summary.txt          (summarize)
//   lsa_summary.txt                                                 (lsa)
//   model.bin                                                       (topics)
//   visdata.json                                                    (visdata)
//   rouge.json, rouge.txt                                           (rouge)
//   .stages.json, .lock                                             (bookkeeping)

#include <fcntl.h>
#include <signal.h>
#include <unistd.h>

#include <cerrno>
#include <chrono>
#include <cstring>
#include <json.hpp>
#include <optional>
#include <ostream>
#include <set>
#include <string>
#include <vector>

#include "topicsum/corpus.hpp"
#include "topicsum/error.hpp"
#include "topicsum/extractive.hpp"
#include "topicsum/fsutil.hpp"
#include "topicsum/lda.hpp"
#include "topicsum/lsa.hpp"
#include "topicsum/rouge.hpp"
#include "topicsum/text.hpp"
#include "topicsum/vis.hpp"
#include "topicsum/visdata_schema.hpp"

namespace topicsum {

struct RunConfig {
  fs::path base_dir = ".";  // relative paths in the config file resolve against this

  // corpus
  std::string corpus_id = "corpus";
  std::optional<fs::path> source_dir;  // local HTML files instead of the remote endpoint
  std::vector<std::string> query_terms;
  std::size_t max_articles = 100;
  std::string endpoint = kDefaultEndpoint;

  // per-document extractive summaries
  SummaryMethod method = SummaryMethod::frequency;
  std::size_t summary_n = 5;
  std::size_t max_words = kDefaultMaxWords;

  // corpus-level LSA summary
  std::size_t lsa_n = 3;
  TermWeighting lsa_weighting = TermWeighting::tf;

  LdaConfig lda;
  std::size_t min_doc_freq = 1;
  double max_doc_fraction = 1.0;

  std::size_t vis_R = kDefaultTermsShown;
  double lambda_step = kDefaultLambdaStep;

  std::vector<std::string> rouge_variants;           // empty means the full default set
  std::optional<fs::path> rouge_system;              // default <run>/summary.txt
  std::vector<fs::path> rouge_references;            // default <run>/CleanHTML.txt
  bool rouge_stem = true;
  std::size_t rouge_resamples = 1000;
  double rouge_level = 0.95;
  std::uint64_t rouge_seed = 42;

  std::string stopwords = "builtin";  // "builtin" or a file path

  void validate() const;
};

namespace detail {

[[noreturn]] inline void config_error(const std::string& msg) { fail(ErrorKind::config, "config: " + msg); }

inline void check_keys(const nlohmann::json& obj, const std::string& where,
                       std::initializer_list<const char*> allowed) {
  if (!obj.is_object()) config_error("'" + where + "' must be an object");
  for (const auto& [key, _] : obj.items()) {
    bool ok = false;
    for (const char* a : allowed) ok = ok || key == a;
    if (!ok) config_error("unknown field '" + (where.empty() ? key : where + "." + key) + "'");
  }
}

template <typename T>
T get_field(const nlohmann::json& obj, const char* key, const std::string& where, T fallback) {
  if (!obj.contains(key)) return fallback;
  const auto& v = obj.at(key);
  const std::string name = where + "." + key;
  if constexpr (std::is_same_v<T, bool>) {
    if (!v.is_boolean()) config_error("'" + name + "' must be a boolean");
  } else if constexpr (std::is_integral_v<T>) {
    if (!v.is_number_integer() || v.get<long long>() < 0)
      config_error("'" + name + "' must be a non-negative integer");
  } else if constexpr (std::is_floating_point_v<T>) {
    if (!v.is_number()) config_error("'" + name + "' must be a number");
  } else {
    if (!v.is_string()) config_error("'" + name + "' must be a string");
  }
  return v.get<T>();
}

inline std::vector<std::string> string_list(const nlohmann::json& obj, const char* key,
                                            const std::string& where) {
  std::vector<std::string> out;
  if (!obj.contains(key)) return out;
  const auto& v = obj.at(key);
  if (!v.is_array()) config_error("'" + where + "." + key + "' must be an array of strings");
  for (const auto& e : v) {
    if (!e.is_string()) config_error("'" + where + "." + key + "' must be an array of strings");
    out.push_back(e.get<std::string>());
  }
  return out;
}

inline fs::path resolve(const fs::path& base, const fs::path& p) {
  return p.is_absolute() ? p : base / p;
}

}  // namespace detail

inline SummaryMethod parse_summary_method(const std::string& s) {
  if (s == "frequency") return SummaryMethod::frequency;
  if (s == "centrality") return SummaryMethod::centrality;
  detail::config_error("summarizer.method must be 'frequency' or 'centrality', got '" + s + "'");
}

inline TermWeighting parse_weighting(const std::string& s) {
  if (s == "tf") return TermWeighting::tf;
  if (s == "tfidf") return TermWeighting::tfidf;
  detail::config_error("lsa.weighting must be 'tf' or 'tfidf', got '" + s + "'");
}

/// Reads a config document. Unknown fields and type mismatches are config
/// errors that name the offending field.
inline RunConfig config_from_json(const nlohmann::json& j, const fs::path& base_dir) {
  using detail::get_field;
  RunConfig c;
  c.base_dir = base_dir;
  detail::check_keys(j, "", {"corpus", "summarizer", "lsa", "lda", "vis", "rouge", "stopwords"});
  if (j.contains("corpus")) {
    const auto& s = j.at("corpus");
    detail::check_keys(s, "corpus", {"id", "source_dir", "query_terms", "max_articles", "endpoint"});
    c.corpus_id = get_field<std::string>(s, "id", "corpus", c.corpus_id);
    if (s.contains("source_dir"))
      c.source_dir = detail::resolve(base_dir, get_field<std::string>(s, "source_dir", "corpus", ""));
    c.query_terms = detail::string_list(s, "query_terms", "corpus");
    c.max_articles = get_field<std::size_t>(s, "max_articles", "corpus", c.max_articles);
    c.endpoint = get_field<std::string>(s, "endpoint", "corpus", c.endpoint);
  }
  if (j.contains("summarizer")) {
    const auto& s = j.at("summarizer");
    detail::check_keys(s, "summarizer", {"method", "n", "max_words"});
    c.method = parse_summary_method(get_field<std::string>(s, "method", "summarizer", "frequency"));
    c.summary_n = get_field<std::size_t>(s, "n", "summarizer", c.summary_n);
    c.max_words = get_field<std::size_t>(s, "max_words", "summarizer", c.max_words);
  }
  if (j.contains("lsa")) {
    const auto& s = j.at("lsa");
    detail::check_keys(s, "lsa", {"n", "weighting"});
    c.lsa_n = get_field<std::size_t>(s, "n", "lsa", c.lsa_n);
    c.lsa_weighting = parse_weighting(get_field<std::string>(s, "weighting", "lsa", "tf"));
  }
  if (j.contains("lda")) {
    const auto& s = j.at("lda");
    detail::check_keys(s, "lda", {"K", "alpha", "beta", "iterations", "burn_in", "seed",
                                  "average_samples", "min_doc_freq", "max_doc_fraction"});
    c.lda.K = get_field<std::size_t>(s, "K", "lda", c.lda.K);
    if (s.contains("alpha")) {
      const auto& a = s.at("alpha");
      if (a.is_number()) {
        c.lda.alpha.assign(c.lda.K, a.get<double>());
      } else if (a.is_array()) {
        for (const auto& e : a) {
          if (!e.is_number()) detail::config_error("'lda.alpha' entries must be numbers");
          c.lda.alpha.push_back(e.get<double>());
        }
      } else {
        detail::config_error("'lda.alpha' must be a number or an array of numbers");
      }
    }
    c.lda.beta = get_field<double>(s, "beta", "lda", c.lda.beta);
    c.lda.iterations = get_field<std::size_t>(s, "iterations", "lda", c.lda.iterations);
    c.lda.burn_in = get_field<std::size_t>(s, "burn_in", "lda", c.lda.burn_in);
    c.lda.seed = get_field<std::uint64_t>(s, "seed", "lda", c.lda.seed);
    c.lda.average_samples = get_field<bool>(s, "average_samples", "lda", c.lda.average_samples);
    c.min_doc_freq = get_field<std::size_t>(s, "min_doc_freq", "lda", c.min_doc_freq);
    c.max_doc_fraction = get_field<double>(s, "max_doc_fraction", "lda", c.max_doc_fraction);
  }
  if (j.contains("vis")) {
    const auto& s = j.at("vis");
    detail::check_keys(s, "vis", {"R", "lambda_step"});
    c.vis_R = get_field<std::size_t>(s, "R", "vis", c.vis_R);
    c.lambda_step = get_field<double>(s, "lambda_step", "vis", c.lambda_step);
  }
  if (j.contains("rouge")) {
    const auto& s = j.at("rouge");
    detail::check_keys(s, "rouge",
                       {"variants", "system", "references", "stem", "resamples", "level", "seed"});
    c.rouge_variants = detail::string_list(s, "variants", "rouge");
    if (s.contains("system"))
      c.rouge_system = detail::resolve(base_dir, get_field<std::string>(s, "system", "rouge", ""));
    for (const auto& r : detail::string_list(s, "references", "rouge"))
      c.rouge_references.push_back(detail::resolve(base_dir, r));
    c.rouge_stem = get_field<bool>(s, "stem", "rouge", c.rouge_stem);
    c.rouge_resamples = get_field<std::size_t>(s, "resamples", "rouge", c.rouge_resamples);
    c.rouge_level = get_field<double>(s, "level", "rouge", c.rouge_level);
    c.rouge_seed = get_field<std::uint64_t>(s, "seed", "rouge", c.rouge_seed);
  }
  if (j.contains("stopwords")) {
    if (!j.at("stopwords").is_string()) detail::config_error("'stopwords' must be a string");
    const auto v = j.at("stopwords").get<std::string>();
    c.stopwords = v == "builtin" ? v : detail::resolve(base_dir, v).string();
  }
  return c;
}

inline RunConfig load_config(const fs::path& path) {
  if (!fs::exists(path)) fail(ErrorKind::config, "config: file not found: " + path.string());
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(read_file(path));
  } catch (const nlohmann::json::parse_error& e) {
    fail(ErrorKind::config, std::string("config: invalid JSON: ") + e.what());
  }
  return config_from_json(j, path.parent_path().empty() ? fs::path(".") : path.parent_path());
}

inline void RunConfig::validate() const {
  using detail::config_error;
  if (source_dir && !fs::is_directory(*source_dir))
    config_error("corpus.source_dir is not a directory: " + source_dir->string());
  if (summary_n < 1) config_error("summarizer.n must be >= 1");
  if (max_words < 1) config_error("summarizer.max_words must be >= 1");
  if (lsa_n < 1) config_error("lsa.n must be >= 1");
  try {
    lda.validate();
  } catch (const Error& e) {
    config_error(e.what());
  }
  if (min_doc_freq < 1) config_error("lda.min_doc_freq must be >= 1");
  if (!(max_doc_fraction > 0.0 && max_doc_fraction <= 1.0))
    config_error("lda.max_doc_fraction must be in (0, 1]");
  if (vis_R < 1) config_error("vis.R must be >= 1");
  if (!(lambda_step > 0.0 && lambda_step <= 1.0)) config_error("vis.lambda_step must be in (0, 1]");
  for (const auto& v : rouge_variants) {
    try {
      parse_variant(v);
    } catch (const Error& e) {
      config_error(std::string("rouge.variants: ") + e.what());
    }
  }
  if (rouge_resamples < 1) config_error("rouge.resamples must be >= 1");
  if (!(rouge_level > 0.0 && rouge_level < 1.0)) config_error("rouge.level must be in (0, 1)");
  if (stopwords != "builtin" && !fs::is_regular_file(stopwords))
    config_error("stopwords file not found: " + stopwords);
}

inline StopwordSet load_stopwords(const RunConfig& c) {
  return c.stopwords == "builtin" ? StopwordSet::builtin() : StopwordSet::load(c.stopwords);
}

/// Exclusive claim on a run directory, released on destruction. A lock left
/// by a process that no longer exists is taken over.
class RunLock {
 public:
  explicit RunLock(const fs::path& run_dir) : path_(run_dir / ".lock") {
    fs::create_directories(run_dir);
    for (int attempt = 0; attempt < 2; ++attempt) {
      const int fd = ::open(path_.c_str(), O_CREAT | O_EXCL | O_WRONLY, 0644);
      if (fd >= 0) {
        const std::string pid = std::to_string(::getpid()) + "\n";
        [[maybe_unused]] auto n = ::write(fd, pid.data(), pid.size());
        ::close(fd);
        held_ = true;
        return;
      }
      if (errno != EEXIST) fail(ErrorKind::runtime, path_.string() + ": " + std::strerror(errno));
      if (!stale()) break;
      fs::remove(path_);
    }
    fail(ErrorKind::runtime, "run directory is locked by another process: " + path_.string());
  }
  ~RunLock() {
    if (held_) {
      std::error_code ec;
      fs::remove(path_, ec);
    }
  }
  RunLock(const RunLock&) = delete;
  RunLock& operator=(const RunLock&) = delete;

 private:
  bool stale() const {
    std::string content;
    try {
      content = read_file(path_);
    } catch (const Error&) {
      return false;
    }
    const long pid = std::strtol(content.c_str(), nullptr, 10);
    if (pid <= 0) return true;
    return ::kill(static_cast<pid_t>(pid), 0) != 0 && errno == ESRCH;
  }

  fs::path path_;
  bool held_ = false;
};

enum class Stage { fetch, extract, summarize, lsa, topics, visdata, rouge };

inline const char* to_string(Stage s) {
  switch (s) {
    case Stage::fetch: return "fetch";
    case Stage::extract: return "extract";
    case Stage::summarize: return "summarize";
    case Stage::lsa: return "lsa";
    case Stage::topics: return "topics";
    case Stage::visdata: return "visdata";
    case Stage::rouge: return "rouge";
  }
  return "?";
}

struct StageReport {
  Stage stage = Stage::fetch;
  bool skipped = false;  // inputs and outputs matched the recorded hashes
  std::vector<std::string> warnings;
  double seconds = 0.0;
};

inline constexpr const char* kStagesFile = ".stages.json";

class Run {
 public:
  Run(fs::path run_dir, RunConfig config, bool force = false)
      : dir_(std::move(run_dir)), config_(std::move(config)), force_(force) {
    config_.validate();
    fs::create_directories(dir_);
    if (fs::exists(dir_ / kStagesFile)) {
      try {
        records_ = nlohmann::json::parse(read_file(dir_ / kStagesFile));
      } catch (const nlohmann::json::parse_error&) {
        records_ = nlohmann::json::object();  // unreadable bookkeeping only costs a rerun
      }
      if (!records_.is_object()) records_ = nlohmann::json::object();
    }
  }

  const fs::path& dir() const { return dir_; }
  const RunConfig& config() const { return config_; }

  StageReport run(Stage stage) {
    const auto start = std::chrono::steady_clock::now();
    StageReport report;
    report.stage = stage;
    const std::string input_hash = input_digest(stage);
    if (!force_ && up_to_date(stage, input_hash)) {
      report.skipped = true;
    } else {
      std::vector<std::string> outputs;
      try {
        outputs = execute(stage, report.warnings);
      } catch (const Error& e) {
        if (e.kind() == ErrorKind::invalid_argument)
          fail(ErrorKind::runtime, std::string(to_string(stage)) + ": " + e.what());
        throw;
      }
      remember(stage, input_hash, outputs);
    }
    report.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    return report;
  }

  std::vector<StageReport> run_pipeline() {
    std::vector<StageReport> out;
    for (Stage s : {Stage::fetch, Stage::extract, Stage::summarize, Stage::lsa, Stage::topics,
                    Stage::visdata})
      out.push_back(run(s));
    return out;
  }

 private:
  // ---- bookkeeping ---------------------------------------------------------

  std::string file_digest(const std::string& rel) const {
    const fs::path p = dir_ / rel;
    if (!fs::is_regular_file(p)) fail(ErrorKind::missing_artifact, p.string() + ": missing");
    return sha256_hex(read_file(p));
  }

  bool up_to_date(Stage stage, const std::string& input_hash) const {
    const auto it = records_.find(to_string(stage));
    if (it == records_.end() || !it->is_object()) return false;
    if (it->value("inputs", "") != input_hash) return false;
    if (!it->contains("outputs") || !it->at("outputs").is_object()) return false;
    for (const auto& [rel, hash] : it->at("outputs").items()) {
      const fs::path p = dir_ / rel;
      if (!fs::is_regular_file(p)) return false;
      if (hash.is_string() && sha256_hex(read_file(p)) != hash.get<std::string>()) return false;
    }
    return true;
  }

  void remember(Stage stage, const std::string& input_hash, const std::vector<std::string>& outputs) {
    nlohmann::json out = nlohmann::json::object();
    for (const auto& rel : outputs) out[rel] = file_digest(rel);
    records_[to_string(stage)] = {{"inputs", input_hash}, {"outputs", out}};
    write_file_atomic(dir_ / kStagesFile, records_.dump(2) + "\n");
  }

  std::string stopword_digest() const {
    return config_.stopwords == "builtin" ? std::string("builtin") : sha256_hex(read_file(config_.stopwords));
  }

  Corpus extracted_corpus(const char* stage) const {
    Corpus c = load_corpus(dir_);
    const bool any = std::any_of(c.documents.begin(), c.documents.end(),
                                 [](const StoredDocument& d) { return d.clean_text.has_value(); });
    if (!any)
      fail(ErrorKind::missing_artifact,
           std::string(stage) + ": no extracted documents in " + dir_.string() + "; run extract first");
    return c;
  }

  std::string clean_digest(const char* stage) const {
    const Corpus c = extracted_corpus(stage);
    std::string acc;
    for (const auto& rec : c.manifest.records)
      if (rec.status == RecordStatus::complete) acc += rec.id + ":" + file_digest(rec.clean_path) + "\n";
    return acc;
  }

  std::string input_digest(Stage stage) const {
    nlohmann::json j;
    j["stage"] = to_string(stage);
    const auto& c = config_;
    switch (stage) {
      case Stage::fetch: {
        j["corpus_id"] = c.corpus_id;
        if (c.source_dir) {
          std::vector<std::string> files;
          for (const auto& e : fs::directory_iterator(*c.source_dir))
            if (e.is_regular_file())
              files.push_back(e.path().filename().string() + ":" + sha256_hex(read_file(e.path())));
          std::sort(files.begin(), files.end());
          j["source_files"] = files;
        } else {
          j["query_terms"] = c.query_terms;
          j["max_articles"] = c.max_articles;
          j["endpoint"] = resolve_endpoint(c.endpoint);
        }
        break;
      }
      case Stage::extract: {
        const Corpus corpus = load_corpus(dir_);
        std::string acc;
        for (const auto& rec : corpus.manifest.records)
          if (rec.status != RecordStatus::failed) acc += rec.id + ":" + file_digest(rec.raw_path) + "\n";
        j["raw"] = sha256_hex(acc);
        break;
      }
      case Stage::summarize:
        j["clean"] = sha256_hex(clean_digest("summarize"));
        j["method"] = to_string(c.method);
        j["n"] = c.summary_n;
        j["max_words"] = c.max_words;
        j["stopwords"] = stopword_digest();
        break;
      case Stage::lsa:
        j["clean"] = sha256_hex(clean_digest("lsa"));
        j["n"] = c.lsa_n;
        j["weighting"] = c.lsa_weighting == TermWeighting::tf ? "tf" : "tfidf";
        j["stopwords"] = stopword_digest();
        break;
      case Stage::topics: {
        const fs::path index = dir_ / "summaries" / "index.json";
        if (!fs::is_regular_file(index))
          fail(ErrorKind::missing_artifact, "topics: " + index.string() + " missing; run summarize first");
        std::string acc = file_digest("summaries/index.json");
        for (const auto& id : summary_ids()) acc += file_digest("summaries/" + id + ".txt");
        j["summaries"] = sha256_hex(acc);
        j["lda"] = {{"K", c.lda.K},
                    {"alpha", c.lda.alpha_vector()},
                    {"beta", c.lda.beta},
                    {"iterations", c.lda.iterations},
                    {"burn_in", c.lda.burn_in},
                    {"seed", c.lda.seed},
                    {"average_samples", c.lda.average_samples},
                    {"min_doc_freq", c.min_doc_freq},
                    {"max_doc_fraction", c.max_doc_fraction}};
        j["stopwords"] = stopword_digest();
        break;
      }
      case Stage::visdata:
        if (!fs::is_regular_file(dir_ / "model.bin"))
          fail(ErrorKind::missing_artifact, "visdata: " + (dir_ / "model.bin").string() + " missing; run topics first");
        j["model"] = file_digest("model.bin");
        j["R"] = c.vis_R;
        j["lambda_step"] = c.lambda_step;
        break;
      case Stage::rouge: {
        j["system"] = sha256_hex(read_required(rouge_system_path(), "rouge"));
        std::vector<std::string> refs;
        for (const auto& r : rouge_reference_paths()) refs.push_back(sha256_hex(read_required(r, "rouge")));
        j["references"] = refs;
        j["variants"] = c.rouge_variants;
        j["stem"] = c.rouge_stem;
        j["resamples"] = c.rouge_resamples;
        j["level"] = c.rouge_level;
        j["seed"] = c.rouge_seed;
        break;
      }
    }
    return sha256_hex(j.dump());
  }

  static std::string read_required(const fs::path& p, const char* stage) {
    if (!fs::is_regular_file(p)) fail(ErrorKind::missing_artifact, std::string(stage) + ": " + p.string() + " missing");
    return read_file(p);
  }

  fs::path rouge_system_path() const { return config_.rouge_system.value_or(dir_ / "summary.txt"); }

  std::vector<fs::path> rouge_reference_paths() const {
    if (config_.rouge_references.empty()) return {dir_ / "CleanHTML.txt"};
    return config_.rouge_references;
  }

  std::vector<std::string> summary_ids() const {
    nlohmann::json index;
    try {
      index = nlohmann::json::parse(read_file(dir_ / "summaries" / "index.json"));
    } catch (const nlohmann::json::parse_error& e) {
      fail(ErrorKind::format, std::string("summaries/index.json: invalid JSON: ") + e.what());
    }
    std::vector<std::string> ids;
    if (!index.is_array()) fail(ErrorKind::format, "summaries/index.json: expected an array");
    for (std::size_t i = 0; i < index.size(); ++i) {
      if (!index[i].is_object() || !index[i].contains("id") || !index[i]["id"].is_string())
        fail(ErrorKind::format, "summaries/index.json: missing field '[" + std::to_string(i) + "].id'");
      ids.push_back(index[i]["id"].get<std::string>());
    }
    return ids;
  }

  // ---- stage bodies --------------------------------------------------------

  std::vector<std::string> execute(Stage stage, std::vector<std::string>& warnings) {
    switch (stage) {
      case Stage::fetch: return do_fetch(warnings);
      case Stage::extract: return do_extract(warnings);
      case Stage::summarize: return do_summarize(warnings);
      case Stage::lsa: return do_lsa(warnings);
      case Stage::topics: return do_topics(warnings);
      case Stage::visdata: return do_visdata(warnings);
      case Stage::rouge: return do_rouge(warnings);
    }
    return {};
  }

  void clear_dir(const char* name) {
    std::error_code ec;
    fs::remove_all(dir_ / name, ec);
  }

  std::vector<std::string> do_fetch(std::vector<std::string>& warnings) {
    const auto& c = config_;
    Corpus corpus;
    if (c.source_dir) {
      corpus = ingest_directory(*c.source_dir, c.corpus_id);
    } else {
      if (c.query_terms.empty()) fail(ErrorKind::config, "fetch: corpus.query_terms is empty and no source_dir given");
      CorpusManifest manifest;
      manifest.corpus_id = c.corpus_id;
      manifest.query_terms = c.query_terms;
      manifest.created_at = utc_now_rfc3339();
      FetchOptions options;
      options.endpoint = resolve_endpoint(c.endpoint);
      const auto articles = fetch_articles(c.query_terms, c.max_articles, options, manifest);
      corpus = make_corpus(std::move(manifest), articles);
    }
    std::vector<std::string> outputs;
    std::size_t failed = 0;
    for (const auto& rec : corpus.manifest.records) {
      if (rec.status == RecordStatus::failed) ++failed;
      else outputs.push_back(rec.raw_path);
    }
    if (failed > 0) warnings.push_back(std::to_string(failed) + " record(s) failed to fetch");
    if (outputs.empty()) warnings.push_back("no documents were acquired");
    clear_dir("raw");
    clear_dir("clean");
    persist_corpus(corpus, dir_);
    return outputs;
  }

  std::vector<std::string> do_extract(std::vector<std::string>& warnings) {
    Corpus corpus = load_corpus(dir_);
    extract_corpus(corpus);
    clear_dir("clean");
    persist_corpus(corpus, dir_);
    std::vector<std::string> outputs{kManifestFile};
    std::string joined;
    for (const auto& rec : corpus.manifest.records) {
      if (rec.status != RecordStatus::complete) continue;
      outputs.push_back(rec.clean_path);
      const auto& doc = *std::find_if(corpus.documents.begin(), corpus.documents.end(),
                                      [&](const StoredDocument& d) { return d.id == rec.id; });
      if (doc.clean_text->empty()) warnings.push_back(rec.id + ": no paragraph text extracted");
      if (!joined.empty()) joined += "\n\n";
      joined += *doc.clean_text;
    }
    write_file_atomic(dir_ / "CleanHTML.txt", joined + "\n");
    outputs.push_back("CleanHTML.txt");
    return outputs;
  }

  std::vector<std::string> do_summarize(std::vector<std::string>& warnings) {
    const Corpus corpus = extracted_corpus("summarize");
    const StopwordSet stopwords = load_stopwords(config_);
    clear_dir("summaries");
    nlohmann::json index = nlohmann::json::array();
    std::vector<std::string> outputs;
    std::string all;
    for (const auto& doc : corpus.documents) {
      if (!doc.clean_text) continue;
      const SentenceList sentences = segment(*doc.clean_text);
      Summary summary;
      if (config_.method == SummaryMethod::centrality) {
        summary = select_by_centrality(sentences, config_.summary_n, config_.max_words);
      } else {
        const auto freqs = build_word_frequencies(sentences, stopwords);
        summary = select_top_n(score_sentences(sentences, freqs, config_.max_words), sentences,
                               config_.summary_n);
      }
      if (summary.short_result)
        warnings.push_back(doc.id + ": only " + std::to_string(summary.selected.size()) +
                           " eligible sentence(s) for n = " + std::to_string(config_.summary_n));
      const std::string rel = "summaries/" + doc.id + ".txt";
      write_file_atomic(dir_ / rel, summary.text + "\n");
      outputs.push_back(rel);
      index.push_back({{"id", doc.id}, {"sentences", summary.selected}, {"short", summary.short_result}});
      if (!summary.text.empty()) {
        if (!all.empty()) all.push_back(' ');
        all += summary.text;
      }
    }
    if (all.empty()) warnings.push_back("every document summary is empty");
    write_file_atomic(dir_ / "summaries" / "index.json", index.dump(2) + "\n");
    write_file_atomic(dir_ / "summary.txt", all + "\n");
    outputs.push_back("summaries/index.json");
    outputs.push_back("summary.txt");
    return outputs;
  }

  std::vector<std::string> do_lsa(std::vector<std::string>& warnings) {
    const Corpus corpus = extracted_corpus("lsa");
    SentenceList all;
    for (const auto& doc : corpus.documents) {
      if (!doc.clean_text) continue;
      for (auto s : segment(*doc.clean_text)) {
        s.index = all.size();
        all.push_back(std::move(s));
      }
    }
    if (all.empty()) fail(ErrorKind::runtime, "lsa: the extracted corpus contains no sentences");
    const Summary summary = lsa_summarize(all, load_stopwords(config_), config_.lsa_n, config_.lsa_weighting);
    if (summary.short_result)
      warnings.push_back("lsa: corpus has only " + std::to_string(all.size()) + " sentence(s)");
    write_file_atomic(dir_ / "lsa_summary.txt", summary.text + "\n");
    return {"lsa_summary.txt"};
  }

  std::vector<std::string> do_topics(std::vector<std::string>& warnings) {
    const StopwordSet stopwords = load_stopwords(config_);
    std::vector<std::vector<std::string>> docs;
    std::vector<std::string> ids;
    for (const auto& id : summary_ids()) {
      const std::string text = read_required(dir_ / "summaries" / (id + ".txt"), "topics");
      auto tokens = topic_tokens(text, stopwords);
      if (tokens.empty()) {
        warnings.push_back(id + ": summary has no modelable tokens; skipped");
        continue;
      }
      docs.push_back(std::move(tokens));
      ids.push_back(id);
    }
    if (docs.empty()) fail(ErrorKind::runtime, "topics: no summary has modelable tokens");
    const Dictionary dict = build_dictionary(docs, config_.min_doc_freq, config_.max_doc_fraction);
    std::vector<BowDocument> corpus;
    for (std::size_t d = 0; d < docs.size(); ++d) corpus.push_back(to_bow(docs[d], dict, ids[d]));
    const auto state = fit_lda(corpus, dict, config_.lda);
    save_model(make_fitted_model(config_.lda, dict, corpus, state), dir_ / "model.bin");
    return {"model.bin"};
  }

  std::vector<std::string> do_visdata(std::vector<std::string>& warnings) {
    const FittedModel model = load_model(dir_ / "model.bin");
    const auto payload = export_vis_json(model, config_.vis_R, config_.lambda_step, &warnings);
    const std::string text = payload.dump(1) + "\n";
    const auto report = validate_visdata(text);
    if (!report.valid)
      fail(ErrorKind::runtime, "visdata: payload violates the schema: " + report.errors.front());
    write_file_atomic(dir_ / "visdata.json", text);
    return {"visdata.json"};
  }

  std::vector<std::string> do_rouge(std::vector<std::string>&) {
    EvalOptions opts;
    opts.stem = config_.rouge_stem;
    const auto system = eval_tokenize(read_required(rouge_system_path(), "rouge"), opts);
    std::vector<EvalTokenSequence> refs;
    nlohmann::json ref_names = nlohmann::json::array();
    for (const auto& r : rouge_reference_paths()) {
      refs.push_back(eval_tokenize(read_required(r, "rouge"), opts));
      ref_names.push_back(r.string());
    }
    std::vector<RougeVariant> variants;
    if (config_.rouge_variants.empty()) variants = default_variants();
    for (const auto& v : config_.rouge_variants) variants.push_back(parse_variant(v));

    const auto result = evaluate(system, refs, variants);
    std::vector<RougeScore> rows;
    bool degenerate = false;
    for (std::size_t v = 0; v < variants.size(); ++v) {
      std::vector<RougeScore> pairs;
      for (const auto& per_ref : result.per_reference) pairs.push_back(per_ref[v]);
      const auto boot = bootstrap_ci(pairs, config_.rouge_level, config_.rouge_resamples, config_.rouge_seed);
      degenerate = degenerate || boot.degenerate;
      rows.push_back(boot.mean);
    }
    auto to_rows = [](const std::vector<RougeScore>& scores) {
      nlohmann::json a = nlohmann::json::array();
      for (const auto& s : scores) a.push_back(score_to_json(s));
      return a;
    };
    nlohmann::json per_ref = nlohmann::json::array();
    for (const auto& r : result.per_reference) per_ref.push_back(to_rows(r));
    const nlohmann::json out{{"system", rouge_system_path().string()},
                             {"references", ref_names},
                             {"stem", config_.rouge_stem},
                             {"degenerate_ci", degenerate},
                             {"rows", to_rows(rows)},
                             {"best", to_rows(result.best)},
                             {"per_reference", per_ref}};
    write_file_atomic(dir_ / "rouge.json", out.dump(2) + "\n");
    write_file_atomic(dir_ / "rouge.txt", format_table(rows));
    return {"rouge.json", "rouge.txt"};
  }

 public:
  /// Lowercased tokens with stopwords, bare numbers and single characters removed.
  static std::vector<std::string> topic_tokens(std::string_view text, const StopwordSet& stopwords) {
    std::vector<std::string> out;
    for (const auto& tok : tokenize(text)) {
      std::string t = utf8::to_lower(tok);
      if (utf8::decode(t).size() < 2 || stopwords.contains(t)) continue;
      if (std::all_of(t.begin(), t.end(), [](char ch) { return (ch >= '0' && ch <= '9') || ch == '-'; }))
        continue;
      out.push_back(std::move(t));
    }
    return out;
  }

 private:
  fs::path dir_;
  RunConfig config_;
  bool force_ = false;
  nlohmann::json records_ = nlohmann::json::object();
};

/// Process exit status for a failure category.
inline int exit_code_for(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::invalid_argument:
    case ErrorKind::config: return 1;
    case ErrorKind::missing_artifact: return 2;
    case ErrorKind::format:
    case ErrorKind::fetch:
    case ErrorKind::runtime: return 3;
  }
  return 3;
}

}  // namespace topicsum
