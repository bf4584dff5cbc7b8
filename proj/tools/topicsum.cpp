// topicsum: corpus acquisition, summarization, topic modelling and ROUGE
// evaluation over a run directory.
//
// Exit status: 0 ok, 1 usage or config error, 2 missing upstream artifact,
// 3 runtime failure. Failures print one JSON object on stderr.

#include <CLI11.hpp>
#include <cstdio>
#include <iostream>
#include <json.hpp>

#include "topicsum/pipeline.hpp"

namespace {

using namespace topicsum;

void report_error(const std::string& kind, const std::string& stage, const std::string& message) {
  nlohmann::json j{{"error", kind}, {"message", message}};
  if (!stage.empty()) j["stage"] = stage;
  std::cerr << j.dump() << std::endl;
}

void report_stage(const StageReport& r) {
  for (const auto& w : r.warnings) std::cerr << "topicsum: " << to_string(r.stage) << ": warning: " << w << "\n";
  char buf[128];
  std::snprintf(buf, sizeof buf, "topicsum: %s %s (%.2f s)\n", to_string(r.stage),
                r.skipped ? "up to date" : "done", r.seconds);
  std::cerr << buf;
}

struct Overrides {
  std::string config_path;
  std::string run_dir = ".";
  std::optional<std::uint64_t> seed;
  bool force = false;

  std::optional<std::string> source_dir;
  std::vector<std::string> query;
  std::optional<std::size_t> max_articles;
  std::optional<std::string> endpoint;

  std::optional<std::string> method;
  std::optional<std::size_t> summary_n;
  std::optional<std::size_t> max_words;

  std::optional<std::size_t> lsa_n;
  std::optional<std::string> weighting;

  std::optional<std::size_t> k;
  std::optional<std::size_t> iterations;
  std::optional<std::size_t> burn_in;
  std::optional<double> alpha;
  std::optional<double> beta;

  std::optional<std::size_t> R;
  std::optional<double> lambda_step;

  std::optional<std::string> system;
  std::vector<std::string> references;
  std::vector<std::string> variants;
  bool no_stem = false;
  std::optional<std::size_t> resamples;
  std::optional<double> level;
  std::optional<std::string> stopwords;
};

RunConfig build_config(const Overrides& o) {
  RunConfig c = o.config_path.empty() ? RunConfig{} : load_config(o.config_path);
  if (o.source_dir) c.source_dir = fs::path(*o.source_dir);
  if (!o.query.empty()) c.query_terms = o.query;
  if (o.max_articles) c.max_articles = *o.max_articles;
  if (o.endpoint) c.endpoint = *o.endpoint;
  if (o.method) c.method = parse_summary_method(*o.method);
  if (o.summary_n) c.summary_n = *o.summary_n;
  if (o.max_words) c.max_words = *o.max_words;
  if (o.lsa_n) c.lsa_n = *o.lsa_n;
  if (o.weighting) c.lsa_weighting = parse_weighting(*o.weighting);
  if (o.k) {
    const bool uniform = !c.lda.alpha.empty() &&
                         std::all_of(c.lda.alpha.begin(), c.lda.alpha.end(),
                                     [&](double a) { return a == c.lda.alpha.front(); });
    if (uniform) c.lda.alpha.assign(*o.k, c.lda.alpha.front());
    c.lda.K = *o.k;
  }
  if (o.alpha) c.lda.alpha.assign(c.lda.K, *o.alpha);
  if (o.beta) c.lda.beta = *o.beta;
  if (o.iterations) c.lda.iterations = *o.iterations;
  if (o.burn_in) c.lda.burn_in = *o.burn_in;
  if (o.seed) {
    c.lda.seed = *o.seed;
    c.rouge_seed = *o.seed;
  }
  if (o.R) c.vis_R = *o.R;
  if (o.lambda_step) c.lambda_step = *o.lambda_step;
  if (o.system) c.rouge_system = fs::path(*o.system);
  if (!o.references.empty()) c.rouge_references.assign(o.references.begin(), o.references.end());
  if (!o.variants.empty()) c.rouge_variants = o.variants;
  if (o.no_stem) c.rouge_stem = false;
  if (o.resamples) c.rouge_resamples = *o.resamples;
  if (o.level) c.rouge_level = *o.level;
  if (o.stopwords) c.stopwords = *o.stopwords;
  return c;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Corpus summarization, topic modelling and ROUGE evaluation"};
  app.require_subcommand(1);
  Overrides o;
  app.add_option("-c,--config", o.config_path, "JSON run configuration")->check(CLI::ExistingFile);
  app.add_option("-d,--run-dir", o.run_dir, "run directory (default: current directory)");
  app.add_option("--seed", o.seed, "seed for the topic sampler and bootstrap");
  app.add_flag("--force", o.force, "redo stages even when their inputs are unchanged");
  app.add_option("--stopwords", o.stopwords, "'builtin' or a stopword file");

  auto* fetch = app.add_subcommand("fetch", "acquire articles into raw/ and manifest.json");
  fetch->add_option("--source-dir", o.source_dir, "read *.html / *.xml files from a local directory");
  fetch->add_option("-q,--query", o.query, "search term (repeatable, combined with AND)");
  fetch->add_option("--max", o.max_articles, "maximum number of articles");
  fetch->add_option("--endpoint", o.endpoint, "E-utilities base URL");

  app.add_subcommand("extract", "paragraph text extraction into clean/");

  auto* summarize = app.add_subcommand("summarize", "per-document extractive summaries");
  summarize->add_option("--method", o.method, "frequency or centrality")
      ->check(CLI::IsMember({"frequency", "centrality"}));
  summarize->add_option("-n", o.summary_n, "sentences per document");
  summarize->add_option("--max-words", o.max_words, "sentences with this many words or more are skipped");

  auto* lsa = app.add_subcommand("lsa", "corpus-level LSA summary");
  lsa->add_option("-n", o.lsa_n, "number of sentences");
  lsa->add_option("--weighting", o.weighting, "tf or tfidf")->check(CLI::IsMember({"tf", "tfidf"}));

  auto* topics = app.add_subcommand("topics", "fit the LDA model on the summaries");
  topics->add_option("-k,--topics", o.k, "number of topics");
  topics->add_option("--iterations", o.iterations, "Gibbs sweeps");
  topics->add_option("--burn-in", o.burn_in, "sweeps before sample averaging");
  topics->add_option("--alpha", o.alpha, "symmetric document-topic prior");
  topics->add_option("--beta", o.beta, "topic-word prior");

  auto* visdata = app.add_subcommand("visdata", "export visdata.json");
  visdata->add_option("-R,--terms", o.R, "terms per topic");
  visdata->add_option("--lambda-step", o.lambda_step, "relevance slider step");

  auto* rouge = app.add_subcommand("rouge", "evaluate a summary against reference summaries");
  rouge->add_option("--system", o.system, "system summary (default: <run>/summary.txt)");
  rouge->add_option("--reference", o.references, "reference file (repeatable; default: <run>/CleanHTML.txt)");
  rouge->add_option("--variant", o.variants, "ROUGE variant, e.g. ROUGE-2, ROUGE-L, ROUGE-SU4 (repeatable)");
  rouge->add_flag("--no-stem", o.no_stem, "compare surface forms without stemming");
  rouge->add_option("--resamples", o.resamples, "bootstrap resamples");
  rouge->add_option("--level", o.level, "confidence level");

  auto* pipeline = app.add_subcommand("pipeline", "fetch, extract, summarize, lsa, topics, visdata");
  pipeline->add_option("--source-dir", o.source_dir, "read *.html / *.xml files from a local directory");
  pipeline->add_option("-q,--query", o.query, "search term (repeatable)");
  pipeline->add_option("--max", o.max_articles, "maximum number of articles");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    report_error("usage", "", e.what());
    return 1;
  }

  std::string stage_name;
  try {
    RunConfig config = build_config(o);
    config.validate();
    RunLock lock(o.run_dir);
    Run run(o.run_dir, std::move(config), o.force);
    const auto* sub = app.get_subcommands().front();
    stage_name = sub->get_name();
    if (stage_name == "pipeline") {
      for (Stage s : {Stage::fetch, Stage::extract, Stage::summarize, Stage::lsa, Stage::topics,
                      Stage::visdata}) {
        stage_name = to_string(s);
        report_stage(run.run(s));
      }
    } else {
      static const std::map<std::string, Stage> kStages{
          {"fetch", Stage::fetch},   {"extract", Stage::extract}, {"summarize", Stage::summarize},
          {"lsa", Stage::lsa},       {"topics", Stage::topics},   {"visdata", Stage::visdata},
          {"rouge", Stage::rouge}};
      report_stage(run.run(kStages.at(stage_name)));
    }
  } catch (const Error& e) {
    report_error(to_string(e.kind()), stage_name, e.what());
    return exit_code_for(e.kind());
  } catch (const std::exception& e) {
    report_error("runtime", stage_name, e.what());
    return 3;
  }
  return 0;
}
