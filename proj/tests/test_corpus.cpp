#include <gtest/gtest.h>
#include <httplib.h>

#include <mutex>
#include <thread>

#include "support.hpp"
#include "topicsum/corpus.hpp"

using namespace topicsum;

namespace {

Corpus three_doc_corpus() {
  Corpus c;
  c.manifest.corpus_id = "demo";
  c.manifest.query_terms = {"gene", "disease"};
  c.manifest.created_at = "2021-01-01T00:00:00Z";
  for (const char* id : {"a", "b", "c"}) {
    c.manifest.records.push_back({id, std::string("http://x/") + id, raw_relpath(id), "",
                                  RecordStatus::fetched});
    c.documents.push_back({id, std::string("<p>Doc ") + id + " text [1].</p>", std::nullopt});
  }
  return c;
}

// Minimal E-utilities look-alike serving a fixed id list.
class FixtureServer {
 public:
  explicit FixtureServer(std::vector<std::string> ids) : ids_(std::move(ids)) {
    server_.Get("/eutils/esearch.fcgi", [this](const httplib::Request& req, httplib::Response& res) {
      log(req);
      std::size_t retmax = std::stoul(req.get_param_value("retmax"));
      nlohmann::json idlist = nlohmann::json::array();
      for (std::size_t i = 0; i < ids_.size() && i < retmax; ++i) idlist.push_back(ids_[i]);
      res.set_content(nlohmann::json{{"esearchresult", {{"idlist", idlist}}}}.dump(), "application/json");
    });
    server_.Get("/eutils/efetch.fcgi", [this](const httplib::Request& req, httplib::Response& res) {
      log(req);
      const std::string id = req.get_param_value("id");
      std::lock_guard<std::mutex> g(mu_);
      if (always_fail_.count(id)) {
        res.status = 404;
        return;
      }
      if (fail_once_.count(id)) {
        fail_once_.erase(id);
        res.status = 503;
        return;
      }
      res.set_content("<article><p>Article " + id + " about gene expression.</p></article>", "text/xml");
    });
    port_ = server_.bind_to_any_port("127.0.0.1");
    thread_ = std::thread([this] { server_.listen_after_bind(); });
    server_.wait_until_ready();
  }
  ~FixtureServer() {
    server_.stop();
    thread_.join();
  }

  std::string endpoint() const { return "http://127.0.0.1:" + std::to_string(port_) + "/eutils"; }
  void fail_always(const std::string& id) { always_fail_.insert(id); }
  void fail_once(const std::string& id) { fail_once_.insert(id); }
  std::vector<std::string> requests() {
    std::lock_guard<std::mutex> g(mu_);
    return log_;
  }

 private:
  void log(const httplib::Request& req) {
    std::lock_guard<std::mutex> g(mu_);
    std::string line = req.path;
    if (req.has_param("id")) line += "?id=" + req.get_param_value("id");
    log_.push_back(line);
  }

  std::vector<std::string> ids_;
  httplib::Server server_;
  std::thread thread_;
  int port_ = 0;
  std::mutex mu_;
  std::vector<std::string> log_;
  std::set<std::string> always_fail_, fail_once_;
};

FetchOptions fast_options(const std::string& endpoint) {
  FetchOptions o;
  o.endpoint = endpoint;
  o.rate_limit = 1000.0;
  o.initial_backoff = std::chrono::milliseconds(1);
  o.timeout = std::chrono::seconds(5);
  return o;
}

}  // namespace

TEST(Manifest, JsonHasExactKeys) {
  const auto j = manifest_to_json(three_doc_corpus().manifest);
  std::set<std::string> keys;
  for (const auto& [k, _] : j.items()) keys.insert(k);
  EXPECT_EQ(keys, (std::set<std::string>{"corpus_id", "query_terms", "created_at", "records"}));
  std::set<std::string> rkeys;
  for (const auto& [k, _] : j["records"][0].items()) rkeys.insert(k);
  EXPECT_EQ(rkeys, (std::set<std::string>{"id", "source_url", "raw_path", "clean_path", "status"}));
}

TEST(Manifest, MissingFieldIsNamed) {
  auto j = manifest_to_json(three_doc_corpus().manifest);
  j["records"][2].erase("status");
  try {
    manifest_from_json(j);
    FAIL() << "expected an error";
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::format);
    EXPECT_NE(std::string(e.what()).find("records[2].status"), std::string::npos) << e.what();
  }
}

TEST(Manifest, DuplicateIdsRejected) {
  auto m = three_doc_corpus().manifest;
  m.records[1].id = "a";
  EXPECT_THROW(manifest_from_json(manifest_to_json(m)), Error);
}

TEST(Persist, RoundTripAfterExtraction) {
  const auto root = support::temp_dir("roundtrip");
  Corpus c = three_doc_corpus();
  extract_corpus(c);
  persist_corpus(c, root);
  const Corpus back = load_corpus(root);
  EXPECT_EQ(back.manifest, c.manifest);
  ASSERT_EQ(back.documents.size(), 3u);
  for (std::size_t i = 0; i < 3; ++i) {
    EXPECT_EQ(back.documents[i].raw_html, c.documents[i].raw_html);
    EXPECT_EQ(back.documents[i].clean_text, c.documents[i].clean_text);
  }
  EXPECT_EQ(*back.documents[0].clean_text, "Doc a text.");
}

TEST(Persist, CleanFileMatchesExtraction) {
  const auto root = support::temp_dir("cleanmatch");
  Corpus c = ingest_directory(support::fixtures() / "html", "fixture");
  extract_corpus(c);
  persist_corpus(c, root);
  const Corpus back = load_corpus(root);
  for (const auto& rec : back.manifest.records) {
    ASSERT_EQ(rec.status, RecordStatus::complete);
    EXPECT_EQ(read_file(root / rec.clean_path), clean_text(extract_text(read_file(root / rec.raw_path)).text));
  }
}

TEST(Persist, FailedRecordHasNoCleanPath) {
  const auto root = support::temp_dir("failed");
  Corpus c = three_doc_corpus();
  c.manifest.records[1].status = RecordStatus::failed;
  c.manifest.records[1].raw_path.clear();
  c.documents.erase(c.documents.begin() + 1);
  extract_corpus(c);
  persist_corpus(c, root);
  const auto j = nlohmann::json::parse(read_file(root / "manifest.json"));
  EXPECT_EQ(j["records"][1]["status"], "failed");
  EXPECT_EQ(j["records"][1]["clean_path"], "");
  EXPECT_FALSE(fs::exists(root / "clean" / "b.txt"));
  EXPECT_EQ(load_corpus(root).documents.size(), 2u);
}

TEST(Persist, LoadFromEmptyDirectory) {
  const auto root = support::temp_dir("empty");
  try {
    load_corpus(root);
    FAIL() << "expected an error";
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::missing_artifact);
    EXPECT_NE(std::string(e.what()).find("manifest"), std::string::npos);
  }
}

TEST(Persist, CorruptManifestNamesField) {
  const auto root = support::temp_dir("corrupt");
  write_file_atomic(root / "manifest.json", R"({"corpus_id": "x", "query_terms": [], "created_at": "t"})");
  try {
    load_corpus(root);
    FAIL() << "expected an error";
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::format);
    EXPECT_NE(std::string(e.what()).find("records"), std::string::npos) << e.what();
  }
  write_file_atomic(root / "manifest.json", "{not json");
  EXPECT_THROW(load_corpus(root), Error);
}

TEST(Ingest, DirectoryInFilenameOrder) {
  const Corpus c = ingest_directory(support::fixtures() / "html", "fixture");
  ASSERT_EQ(c.manifest.records.size(), 10u);
  EXPECT_EQ(c.manifest.records.front().id, "pmc0001");
  EXPECT_EQ(c.manifest.records.back().id, "pmc0010");
  std::set<std::string> ids;
  for (const auto& r : c.manifest.records) ids.insert(r.id);
  EXPECT_EQ(ids.size(), 10u);
}

TEST(Fetch, ZeroCountMakesNoRequest) {
  FixtureServer server({"1", "2"});
  CorpusManifest m;
  EXPECT_TRUE(fetch_articles({"gene"}, 0, fast_options(server.endpoint()), m).empty());
  EXPECT_TRUE(server.requests().empty());
  EXPECT_TRUE(m.records.empty());
}

TEST(Fetch, ThreeDocumentsWithRoomForTen) {
  FixtureServer server({"11", "12", "13"});
  CorpusManifest m;
  const auto got = fetch_articles({"gene", "disease"}, 10, fast_options(server.endpoint()), m);
  ASSERT_EQ(got.size(), 3u);
  EXPECT_EQ(got[0].id, "PMC11");
  for (const auto& a : got) EXPECT_FALSE(a.raw_html.empty());
  const auto log = server.requests();
  ASSERT_EQ(log.size(), 4u);
  EXPECT_EQ(log[0], "/eutils/esearch.fcgi");
  EXPECT_EQ(log[1], "/eutils/efetch.fcgi?id=11");
  EXPECT_EQ(m.records.size(), 3u);
}

TEST(Fetch, NeverMoreArticleRequestsThanMaxCount) {
  FixtureServer server({"1", "2", "3", "4", "5", "6"});
  CorpusManifest m;
  const auto got = fetch_articles({"gene"}, 2, fast_options(server.endpoint()), m);
  EXPECT_EQ(got.size(), 2u);
  std::size_t article_requests = 0;
  for (const auto& line : server.requests()) article_requests += line.find("efetch") != std::string::npos;
  EXPECT_LE(article_requests, 2u);
}

TEST(Fetch, FailedArticleIsRecordedAndFetchContinues) {
  FixtureServer server({"1", "2", "3"});
  server.fail_always("2");
  server.fail_once("3");
  CorpusManifest m;
  const auto got = fetch_articles({"gene"}, 10, fast_options(server.endpoint()), m);
  ASSERT_EQ(got.size(), 2u);
  ASSERT_EQ(m.records.size(), 3u);
  EXPECT_EQ(m.records[0].status, RecordStatus::fetched);
  EXPECT_EQ(m.records[1].status, RecordStatus::failed);
  EXPECT_EQ(m.records[2].status, RecordStatus::fetched);  // 503 then success
  std::size_t tries_for_3 = 0, tries_for_2 = 0;
  for (const auto& line : server.requests()) {
    tries_for_3 += line == "/eutils/efetch.fcgi?id=3";
    tries_for_2 += line == "/eutils/efetch.fcgi?id=2";
  }
  EXPECT_EQ(tries_for_3, 2u);
  EXPECT_EQ(tries_for_2, 1u);  // 404 is not retried
}

TEST(Fetch, UnreachableEndpointIsFatal) {
  int port;
  {
    httplib::Server probe;
    port = probe.bind_to_any_port("127.0.0.1");
  }
  CorpusManifest m;
  auto options = fast_options("http://127.0.0.1:" + std::to_string(port) + "/eutils");
  options.timeout = std::chrono::seconds(1);
  try {
    fetch_articles({"gene"}, 5, options, m);
    FAIL() << "expected an error";
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::fetch);
  }
}

TEST(Fetch, EnvironmentOverridesEndpoint) {
  ::setenv(kEndpointEnv, "http://127.0.0.1:1/x", 1);
  EXPECT_EQ(resolve_endpoint(kDefaultEndpoint), "http://127.0.0.1:1/x");
  ::unsetenv(kEndpointEnv);
  EXPECT_EQ(resolve_endpoint(kDefaultEndpoint), kDefaultEndpoint);
}
