#pragma once

// Article acquisition and the on-disk corpus layout:
//
//   <root>/manifest.json
//   <root>/raw/<id>.html
//   <root>/clean/<id>.txt

#include <httplib.h>

#include <algorithm>
#include <chrono>
#include <cstdlib>
#include <filesystem>
#include <functional>
#include <json.hpp>
#include <optional>
#include <set>
#include <string>
#include <thread>
#include <vector>

#include "topicsum/error.hpp"
#include "topicsum/fsutil.hpp"
#include "topicsum/html_text.hpp"

namespace topicsum {

struct ArticleRecord {
  std::string id;
  std::string source_url;
  std::string raw_html;
  std::string fetched_at;
};

struct CleanDocument {
  std::string id;
  std::string text;
  std::size_t paragraph_count = 0;
};

enum class RecordStatus { fetched, complete, failed };

inline const char* to_string(RecordStatus s) {
  switch (s) {
    case RecordStatus::fetched: return "fetched";
    case RecordStatus::complete: return "complete";
    case RecordStatus::failed: return "failed";
  }
  return "failed";
}

inline std::optional<RecordStatus> parse_status(std::string_view s) {
  if (s == "fetched") return RecordStatus::fetched;
  if (s == "complete") return RecordStatus::complete;
  if (s == "failed") return RecordStatus::failed;
  return std::nullopt;
}

struct ManifestRecord {
  std::string id;
  std::string source_url;
  std::string raw_path;    // relative to the corpus root; empty when failed
  std::string clean_path;  // relative to the corpus root; empty until extracted
  RecordStatus status = RecordStatus::fetched;

  bool operator==(const ManifestRecord&) const = default;
};

struct CorpusManifest {
  std::string corpus_id;
  std::vector<std::string> query_terms;
  std::string created_at;
  std::vector<ManifestRecord> records;

  bool operator==(const CorpusManifest&) const = default;
};

/// Raw and (optionally) cleaned content for one manifest record.
struct StoredDocument {
  std::string id;
  std::string raw_html;
  std::optional<std::string> clean_text;

  bool operator==(const StoredDocument&) const = default;
};

struct Corpus {
  CorpusManifest manifest;
  std::vector<StoredDocument> documents;  // one per non-failed record, manifest order
};

inline constexpr const char* kManifestFile = "manifest.json";

inline std::string raw_relpath(const std::string& id) { return "raw/" + id + ".html"; }
inline std::string clean_relpath(const std::string& id) { return "clean/" + id + ".txt"; }

/// Maps an arbitrary name to a filesystem-safe identifier.
inline std::string make_record_id(std::string_view name) {
  std::string id;
  for (char c : name) {
    const bool ok = (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') || (c >= '0' && c <= '9') ||
                    c == '-' || c == '_' || c == '.';
    id.push_back(ok ? c : '_');
  }
  while (!id.empty() && id.front() == '.') id.erase(id.begin());
  return id.empty() ? std::string("doc") : id;
}

inline nlohmann::json manifest_to_json(const CorpusManifest& m) {
  nlohmann::json records = nlohmann::json::array();
  for (const auto& r : m.records) {
    records.push_back({{"id", r.id},
                       {"source_url", r.source_url},
                       {"raw_path", r.raw_path},
                       {"clean_path", r.clean_path},
                       {"status", to_string(r.status)}});
  }
  return {{"corpus_id", m.corpus_id},
          {"query_terms", m.query_terms},
          {"created_at", m.created_at},
          {"records", records}};
}

namespace detail {

inline const nlohmann::json& field(const nlohmann::json& obj, const std::string& key,
                                   const std::string& where) {
  if (!obj.is_object() || !obj.contains(key))
    fail(ErrorKind::format, "manifest.json: missing field '" + where + key + "'");
  return obj.at(key);
}

inline std::string string_field(const nlohmann::json& obj, const std::string& key,
                                const std::string& where) {
  const auto& v = field(obj, key, where);
  if (!v.is_string())
    fail(ErrorKind::format, "manifest.json: field '" + where + key + "' is not a string");
  return v.get<std::string>();
}

}  // namespace detail

inline CorpusManifest manifest_from_json(const nlohmann::json& j) {
  if (!j.is_object()) fail(ErrorKind::format, "manifest.json: top level is not an object");
  CorpusManifest m;
  m.corpus_id = detail::string_field(j, "corpus_id", "");
  m.created_at = detail::string_field(j, "created_at", "");
  const auto& terms = detail::field(j, "query_terms", "");
  if (!terms.is_array()) fail(ErrorKind::format, "manifest.json: field 'query_terms' is not an array");
  for (std::size_t i = 0; i < terms.size(); ++i) {
    if (!terms[i].is_string())
      fail(ErrorKind::format,
           "manifest.json: field 'query_terms[" + std::to_string(i) + "]' is not a string");
    m.query_terms.push_back(terms[i].get<std::string>());
  }
  const auto& records = detail::field(j, "records", "");
  if (!records.is_array()) fail(ErrorKind::format, "manifest.json: field 'records' is not an array");
  std::set<std::string> seen;
  for (std::size_t i = 0; i < records.size(); ++i) {
    const std::string where = "records[" + std::to_string(i) + "].";
    ManifestRecord r;
    r.id = detail::string_field(records[i], "id", where);
    r.source_url = detail::string_field(records[i], "source_url", where);
    r.raw_path = detail::string_field(records[i], "raw_path", where);
    r.clean_path = detail::string_field(records[i], "clean_path", where);
    const std::string status = detail::string_field(records[i], "status", where);
    const auto parsed = parse_status(status);
    if (!parsed)
      fail(ErrorKind::format, "manifest.json: field '" + where + "status' has unknown value '" +
                                  status + "'");
    r.status = *parsed;
    if (r.id.empty() || !seen.insert(r.id).second)
      fail(ErrorKind::format, "manifest.json: field '" + where + "id' is empty or duplicated");
    m.records.push_back(std::move(r));
  }
  return m;
}

/// Writes the manifest plus every document's raw and clean files. Records are
/// written in manifest order; a record without a matching document must be
/// marked failed.
inline void persist_corpus(const Corpus& corpus, const fs::path& root) {
  fs::create_directories(root);
  for (const auto& rec : corpus.manifest.records) {
    if (rec.status == RecordStatus::failed) continue;
    const auto doc = std::find_if(corpus.documents.begin(), corpus.documents.end(),
                                  [&](const StoredDocument& d) { return d.id == rec.id; });
    if (doc == corpus.documents.end())
      fail(ErrorKind::invalid_argument, "persist_corpus: no document for record '" + rec.id + "'");
    write_file_atomic(root / rec.raw_path, doc->raw_html);
    if (rec.status == RecordStatus::complete) {
      if (!doc->clean_text)
        fail(ErrorKind::invalid_argument,
             "persist_corpus: record '" + rec.id + "' is complete but has no clean text");
      write_file_atomic(root / rec.clean_path, *doc->clean_text);
    }
  }
  write_file_atomic(root / kManifestFile, manifest_to_json(corpus.manifest).dump(2) + "\n");
}

inline Corpus load_corpus(const fs::path& root) {
  const fs::path manifest_path = root / kManifestFile;
  if (!fs::exists(manifest_path))
    fail(ErrorKind::missing_artifact, manifest_path.string() + ": manifest missing");
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(read_file(manifest_path));
  } catch (const nlohmann::json::parse_error& e) {
    fail(ErrorKind::format, std::string("manifest.json: invalid JSON: ") + e.what());
  }
  Corpus corpus;
  corpus.manifest = manifest_from_json(j);
  for (std::size_t i = 0; i < corpus.manifest.records.size(); ++i) {
    const auto& rec = corpus.manifest.records[i];
    if (rec.status == RecordStatus::failed) continue;
    const std::string where = "records[" + std::to_string(i) + "].";
    StoredDocument doc;
    doc.id = rec.id;
    if (rec.raw_path.empty() || !fs::exists(root / rec.raw_path))
      fail(ErrorKind::format, "manifest.json: field '" + where + "raw_path' names a missing file");
    doc.raw_html = read_file(root / rec.raw_path);
    if (rec.status == RecordStatus::complete) {
      if (rec.clean_path.empty() || !fs::exists(root / rec.clean_path))
        fail(ErrorKind::format,
             "manifest.json: field '" + where + "clean_path' names a missing file");
      doc.clean_text = read_file(root / rec.clean_path);
    }
    corpus.documents.push_back(std::move(doc));
  }
  return corpus;
}

/// Runs extraction and cleaning over every fetched document and marks the
/// records complete.
inline void extract_corpus(Corpus& corpus) {
  for (auto& rec : corpus.manifest.records) {
    if (rec.status == RecordStatus::failed) continue;
    auto doc = std::find_if(corpus.documents.begin(), corpus.documents.end(),
                            [&](const StoredDocument& d) { return d.id == rec.id; });
    if (doc == corpus.documents.end())
      fail(ErrorKind::invalid_argument, "extract_corpus: no document for record '" + rec.id + "'");
    doc->clean_text = clean_text(extract_text(doc->raw_html).text);
    rec.clean_path = clean_relpath(rec.id);
    rec.status = RecordStatus::complete;
  }
}

/// Builds a corpus from every *.html / *.htm / *.xml file in `dir`, in
/// lexicographic filename order.
inline Corpus ingest_directory(const fs::path& dir, const std::string& corpus_id) {
  if (!fs::is_directory(dir)) fail(ErrorKind::missing_artifact, dir.string() + ": not a directory");
  std::vector<fs::path> files;
  for (const auto& entry : fs::directory_iterator(dir)) {
    if (!entry.is_regular_file()) continue;
    const auto ext = entry.path().extension().string();
    if (ext == ".html" || ext == ".htm" || ext == ".xml") files.push_back(entry.path());
  }
  std::sort(files.begin(), files.end());
  Corpus corpus;
  corpus.manifest.corpus_id = corpus_id;
  corpus.manifest.created_at = utc_now_rfc3339();
  std::set<std::string> used;
  for (const auto& f : files) {
    std::string id = make_record_id(f.stem().string());
    for (int n = 2; !used.insert(id).second; ++n) id = make_record_id(f.stem().string()) + "-" + std::to_string(n);
    std::string raw = read_file(f);
    ManifestRecord rec{id, "file://" + fs::absolute(f).string(), raw_relpath(id), "",
                       raw.empty() ? RecordStatus::failed : RecordStatus::fetched};
    if (rec.status == RecordStatus::failed) rec.raw_path.clear();
    else corpus.documents.push_back({id, std::move(raw), std::nullopt});
    corpus.manifest.records.push_back(std::move(rec));
  }
  return corpus;
}

// ---------------------------------------------------------------------------
// Remote acquisition over the NCBI E-utilities protocol:
//   GET <base>/esearch.fcgi?db=pmc&term=<t1>+AND+<t2>&retmax=<n>&retmode=json
//   GET <base>/efetch.fcgi?db=pmc&id=<id>
// ---------------------------------------------------------------------------

inline constexpr const char* kDefaultEndpoint = "https://eutils.ncbi.nlm.nih.gov/entrez/eutils";
inline constexpr const char* kEndpointEnv = "TOPICSUM_ENDPOINT";

struct FetchOptions {
  std::string endpoint = kDefaultEndpoint;
  double rate_limit = 3.0;  // requests per second
  int max_attempts = 3;
  std::chrono::milliseconds initial_backoff{500};
  std::chrono::seconds timeout{30};
  std::string database = "pmc";
};

/// Endpoint after applying the environment override.
inline std::string resolve_endpoint(const std::string& configured) {
  if (const char* env = std::getenv(kEndpointEnv); env && *env) return env;
  return configured;
}

namespace detail {

struct SplitUrl {
  std::string scheme_host_port;
  std::string path_prefix;
};

inline SplitUrl split_url(const std::string& url) {
  const auto scheme_end = url.find("://");
  if (scheme_end == std::string::npos) fail(ErrorKind::config, "endpoint '" + url + "' has no scheme");
  const auto path_start = url.find('/', scheme_end + 3);
  SplitUrl out;
  out.scheme_host_port = url.substr(0, path_start);
  out.path_prefix = path_start == std::string::npos ? "" : url.substr(path_start);
  while (!out.path_prefix.empty() && out.path_prefix.back() == '/') out.path_prefix.pop_back();
  return out;
}

inline std::string url_encode(std::string_view s) {
  static constexpr char kHex[] = "0123456789ABCDEF";
  std::string out;
  for (unsigned char c : s) {
    if (std::isalnum(c) || c == '-' || c == '_' || c == '.' || c == '~') {
      out.push_back(static_cast<char>(c));
    } else if (c == ' ') {
      out.push_back('+');
    } else {
      out.push_back('%');
      out.push_back(kHex[c >> 4]);
      out.push_back(kHex[c & 0xF]);
    }
  }
  return out;
}

class RateLimiter {
 public:
  explicit RateLimiter(double per_second)
      : interval_(per_second > 0 ? std::chrono::duration<double>(1.0 / per_second)
                                 : std::chrono::duration<double>(0)) {}

  void wait() {
    const auto now = std::chrono::steady_clock::now();
    if (last_ && now - *last_ < interval_)
      std::this_thread::sleep_for(interval_ - (now - *last_));
    last_ = std::chrono::steady_clock::now();
  }

 private:
  std::chrono::duration<double> interval_;
  std::optional<std::chrono::steady_clock::time_point> last_;
};

struct HttpOutcome {
  bool reached = false;  // any HTTP response was received
  int status = 0;
  std::string body;
};

inline bool transient(const HttpOutcome& o) {
  return !o.reached || o.status == 429 || o.status >= 500;
}

}  // namespace detail

/// Queries the search endpoint and downloads up to `max_count` articles.
/// Every attempted article gets a manifest record; failures are recorded
/// with status failed and fetching continues. Only successfully fetched
/// articles are returned. An unreachable search endpoint is fatal.
inline std::vector<ArticleRecord> fetch_articles(const std::vector<std::string>& query_terms,
                                                 std::size_t max_count, const FetchOptions& options,
                                                 CorpusManifest& manifest) {
  std::vector<ArticleRecord> out;
  if (max_count == 0) return out;

  const auto url = detail::split_url(options.endpoint);
  httplib::Client client(url.scheme_host_port);
  client.set_connection_timeout(options.timeout);
  client.set_read_timeout(options.timeout);
  client.set_follow_location(true);
  detail::RateLimiter limiter(options.rate_limit);

  auto get = [&](const std::string& path) {
    detail::HttpOutcome outcome;
    auto delay = options.initial_backoff;
    for (int attempt = 0; attempt < std::max(1, options.max_attempts); ++attempt) {
      if (attempt > 0) {
        std::this_thread::sleep_for(delay);
        delay *= 2;
      }
      limiter.wait();
      auto res = client.Get(path);
      outcome = {};
      if (res) {
        outcome.reached = true;
        outcome.status = res->status;
        outcome.body = res->body;
      }
      if (!detail::transient(outcome)) break;
    }
    return outcome;
  };

  std::string term;
  for (const auto& t : query_terms) {
    if (!term.empty()) term += "+AND+";
    term += detail::url_encode(t);
  }
  const std::string search_path = url.path_prefix + "/esearch.fcgi?db=" + options.database +
                                  "&term=" + term + "&retmax=" + std::to_string(max_count) +
                                  "&retmode=json";
  const auto search = get(search_path);
  if (!search.reached)
    fail(ErrorKind::fetch, "search endpoint unreachable: " + options.endpoint);
  if (search.status != 200)
    fail(ErrorKind::fetch, "search request failed with HTTP " + std::to_string(search.status));

  std::vector<std::string> ids;
  try {
    const auto j = nlohmann::json::parse(search.body);
    for (const auto& id : j.at("esearchresult").at("idlist")) ids.push_back(id.get<std::string>());
  } catch (const nlohmann::json::exception& e) {
    fail(ErrorKind::fetch, std::string("malformed search response: ") + e.what());
  }
  if (ids.size() > max_count) ids.resize(max_count);

  std::set<std::string> used;
  for (const auto& r : manifest.records) used.insert(r.id);
  for (const auto& raw_id : ids) {
    const std::string article_path =
        url.path_prefix + "/efetch.fcgi?db=" + options.database + "&id=" + detail::url_encode(raw_id);
    std::string id = make_record_id(options.database == "pmc" ? "PMC" + raw_id : raw_id);
    for (int n = 2; used.count(id); ++n) id = make_record_id(raw_id) + "-" + std::to_string(n);
    used.insert(id);

    const auto res = get(article_path);
    ManifestRecord rec{id, options.endpoint + article_path.substr(url.path_prefix.size()), "", "",
                       RecordStatus::failed};
    if (res.reached && res.status == 200 && !res.body.empty()) {
      rec.raw_path = raw_relpath(id);
      rec.status = RecordStatus::fetched;
      out.push_back({id, rec.source_url, res.body, utc_now_rfc3339()});
    }
    manifest.records.push_back(std::move(rec));
  }
  return out;
}

/// Pairs fetched articles with the manifest they were recorded in.
inline Corpus make_corpus(CorpusManifest manifest, const std::vector<ArticleRecord>& articles) {
  Corpus c;
  c.manifest = std::move(manifest);
  for (const auto& a : articles) c.documents.push_back({a.id, a.raw_html, std::nullopt});
  return c;
}

}  // namespace topicsum
