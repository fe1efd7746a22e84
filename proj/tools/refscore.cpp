#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "refscore/corpus.hpp"
#include "refscore/demo.hpp"
#include "refscore/encoder.hpp"
#include "refscore/errors.hpp"
#include "refscore/evalharness.hpp"
#include "refscore/model.hpp"
#include "refscore/sampler.hpp"

namespace fs = std::filesystem;
using json = nlohmann::json;
using ordered_json = nlohmann::ordered_json;
using namespace refscore;

namespace {

struct RunConfig {
  fs::path base;

  std::string corpus_path;
  std::string human_scores_path;
  std::string abbreviations_path;
  double f_train = 0.8, f_val = 0.1, f_test = 0.1;

  SamplerConfig sampler;
  std::string method = "crosspair";

  std::string encoder_kind = "hashed_test";
  int dimension = 32;
  std::string unit = "sentence";
  double quantile = 0.8;
  int doc_limit = 0;  // 0 = derive from quantile
  int summary_limit = 0;
  int joint_budget = 512;
  std::string encoder_path;

  HeadConfig head;
  TrainConfig train;

  bool allow_partial = false;
  bool with_rouge = false;

  // cross-domain: name -> corpus path
  std::vector<std::pair<std::string, std::string>> domains;

  std::uint64_t seed = 0;
  bool seed_set = false;
};

std::string resolve(const RunConfig& cfg, const std::string& path) {
  if (path.empty() || fs::path(path).is_absolute()) return path;
  return (cfg.base / path).string();
}

std::string resolve_cache(const RunConfig& cfg, const std::string& path) {
  if (path.empty() || fs::path(path).is_absolute()) return path;
  if (const char* cache = std::getenv("REFSCORE_CACHE")) {
    fs::path cached = fs::path(cache) / path;
    if (fs::exists(cached)) return cached.string();
  }
  return resolve(cfg, path);
}

void reject_unknown(const json& j, std::initializer_list<const char*> known,
                    const std::string& section) {
  for (auto it = j.begin(); it != j.end(); ++it) {
    bool ok = false;
    for (const char* k : known)
      if (it.key() == k) ok = true;
    if (!ok)
      throw ConfigurationError("unknown config key \"" + it.key() + "\" in section " + section);
  }
}

RunConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigurationError("cannot open config file: " + path);
  json j;
  try {
    in >> j;
  } catch (const json::exception& e) {
    throw ConfigurationError(std::string("bad config JSON: ") + e.what());
  }
  reject_unknown(j, {"corpus", "sampler", "encoder", "model", "eval", "cross_domain", "seed"},
                 "(top level)");
  RunConfig cfg;
  cfg.base = fs::absolute(fs::path(path)).parent_path();
  if (!j.contains("seed")) throw ConfigurationError("config requires a \"seed\" key");
  cfg.seed = j["seed"].get<std::uint64_t>();
  cfg.seed_set = true;

  if (j.contains("corpus")) {
    const auto& c = j["corpus"];
    reject_unknown(c, {"path", "human_scores", "abbreviations", "fractions"}, "corpus");
    if (c.contains("path")) cfg.corpus_path = c["path"].get<std::string>();
    if (c.contains("human_scores")) cfg.human_scores_path = c["human_scores"].get<std::string>();
    if (c.contains("abbreviations"))
      cfg.abbreviations_path = c["abbreviations"].get<std::string>();
    if (c.contains("fractions")) {
      auto f = c["fractions"].get<std::vector<double>>();
      if (f.size() != 3) throw ConfigurationError("fractions must have 3 entries");
      cfg.f_train = f[0];
      cfg.f_val = f[1];
      cfg.f_test = f[2];
    }
  }
  if (j.contains("sampler")) {
    const auto& s = j["sampler"];
    reject_unknown(s, {"method", "negatives_per_article", "rate_distribution", "grid_step"},
                   "sampler");
    if (s.contains("method")) cfg.method = s["method"].get<std::string>();
    if (s.contains("negatives_per_article"))
      cfg.sampler.negatives_per_article = s["negatives_per_article"].get<std::size_t>();
    if (s.contains("rate_distribution")) {
      std::string rd = s["rate_distribution"].get<std::string>();
      if (rd == "uniform_grid")
        cfg.sampler.rate_distribution = RateDistribution::uniform_grid;
      else if (rd == "uniform_continuous")
        cfg.sampler.rate_distribution = RateDistribution::uniform_continuous;
      else
        throw ConfigurationError("unknown rate_distribution '" + rd + "'");
    }
    if (s.contains("grid_step")) cfg.sampler.grid_step = s["grid_step"].get<double>();
  }
  if (j.contains("encoder")) {
    const auto& e = j["encoder"];
    reject_unknown(e,
                   {"kind", "dimension", "unit", "quantile", "doc_limit", "summary_limit",
                    "joint_budget", "path"},
                   "encoder");
    if (e.contains("kind")) cfg.encoder_kind = e["kind"].get<std::string>();
    if (e.contains("dimension")) cfg.dimension = e["dimension"].get<int>();
    if (e.contains("unit")) cfg.unit = e["unit"].get<std::string>();
    if (e.contains("quantile")) cfg.quantile = e["quantile"].get<double>();
    if (e.contains("doc_limit")) cfg.doc_limit = e["doc_limit"].get<int>();
    if (e.contains("summary_limit")) cfg.summary_limit = e["summary_limit"].get<int>();
    if (e.contains("joint_budget")) cfg.joint_budget = e["joint_budget"].get<int>();
    if (e.contains("path")) cfg.encoder_path = e["path"].get<std::string>();
  }
  if (j.contains("model")) {
    const auto& m = j["model"];
    reject_unknown(m,
                   {"head", "loss", "fc_hidden", "cnn_filters", "cnn_kernel_rows", "lstm_units",
                    "learning_rate", "patience", "max_epochs", "batch_size"},
                   "model");
    if (m.contains("head")) cfg.head.kind = parse_head_kind(m["head"].get<std::string>());
    if (m.contains("loss")) cfg.train.loss = parse_loss(m["loss"].get<std::string>());
    if (m.contains("fc_hidden")) cfg.head.fc_hidden = m["fc_hidden"].get<int>();
    if (m.contains("cnn_filters")) cfg.head.cnn_filters = m["cnn_filters"].get<int>();
    if (m.contains("cnn_kernel_rows"))
      cfg.head.cnn_kernel_rows = m["cnn_kernel_rows"].get<int>();
    if (m.contains("lstm_units")) cfg.head.lstm_units = m["lstm_units"].get<int>();
    if (m.contains("learning_rate")) cfg.train.learning_rate = m["learning_rate"].get<double>();
    if (m.contains("patience")) cfg.train.early_stop_patience = m["patience"].get<int>();
    if (m.contains("max_epochs")) cfg.train.max_epochs = m["max_epochs"].get<int>();
    if (m.contains("batch_size")) cfg.train.batch_size = m["batch_size"].get<int>();
  }
  if (j.contains("eval")) {
    const auto& e = j["eval"];
    reject_unknown(e, {"allow_partial", "rouge"}, "eval");
    if (e.contains("allow_partial")) cfg.allow_partial = e["allow_partial"].get<bool>();
    if (e.contains("rouge")) cfg.with_rouge = e["rouge"].get<bool>();
  }
  if (j.contains("cross_domain")) {
    const auto& cd = j["cross_domain"];
    reject_unknown(cd, {"domains"}, "cross_domain");
    for (const auto& d : cd.at("domains"))
      cfg.domains.emplace_back(d.at("name").get<std::string>(),
                               d.at("corpus").get<std::string>());
  }
  return cfg;
}

std::shared_ptr<EncoderBinding> make_binding(const RunConfig& cfg, const Corpus& corpus) {
  PaddingPolicy policy;
  if (cfg.unit == "sentence")
    policy.unit = PaddingUnit::sentence;
  else if (cfg.unit == "word")
    policy.unit = PaddingUnit::word;
  else if (cfg.unit == "joint_token")
    policy.unit = PaddingUnit::joint_token;
  else
    throw ConfigurationError("unknown encoder unit '" + cfg.unit + "'");
  if (policy.unit != PaddingUnit::joint_token) {
    if (cfg.doc_limit > 0 && cfg.summary_limit > 0) {
      policy.doc_limit = cfg.doc_limit;
      policy.summary_limit = cfg.summary_limit;
    } else {
      PaddingPolicy derived = compute_padding_limits(corpus, cfg.quantile, policy.unit);
      policy.doc_limit = derived.doc_limit;
      policy.summary_limit = derived.summary_limit;
    }
  }
  policy.joint_budget = cfg.joint_budget;
  if (cfg.encoder_kind == "hashed_test")
    return make_hashed_binding(cfg.dimension, policy, cfg.seed);
  if (cfg.encoder_kind == "word_table")
    return load_word_table(resolve_cache(cfg, cfg.encoder_path), policy);
  if (cfg.encoder_kind == "precomputed")
    return load_precomputed(resolve_cache(cfg, cfg.encoder_path), policy);
  throw ConfigurationError("unknown encoder kind '" + cfg.encoder_kind + "'");
}

struct Pipeline {
  Corpus corpus;
  SplitAssignment split;
  Vocabulary vocab;
};

Pipeline load_pipeline(const RunConfig& cfg) {
  Pipeline p;
  if (cfg.corpus_path.empty()) throw ConfigurationError("config needs corpus.path");
  p.corpus = load_corpus(resolve(cfg, cfg.corpus_path));
  p.split = make_splits(p.corpus, cfg.f_train, cfg.f_val, cfg.f_test, cfg.seed);
  p.vocab = build_vocabulary(p.corpus, p.split.train);
  return p;
}

std::vector<LabeledSample> samples_for(const Pipeline& p, const RunConfig& cfg,
                                       const std::set<std::string>& split) {
  SamplerConfig sc = cfg.sampler;
  sc.seed = cfg.seed;
  return build_training_set(p.corpus, split, parse_method(cfg.method), sc, p.vocab);
}

ordered_json manifest_for(const std::vector<LabeledSample>& samples, const RunConfig& cfg) {
  std::map<std::string, std::size_t> histogram;
  for (const auto& s : samples) {
    std::ostringstream os;
    os.precision(10);
    os << s.label;
    ++histogram[os.str()];
  }
  ordered_json m;
  m["seed"] = cfg.seed;
  m["method"] = cfg.method;
  m["count"] = samples.size();
  m["label_histogram"] = histogram;
  return m;
}

int run(int argc, char** argv) {
  CLI::App app{"reference-free summary quality scoring"};
  app.require_subcommand(1);

  std::string config_path;
  std::uint64_t seed_override = 0;
  bool seed_overridden = false;
  int jobs = 1;
  bool deterministic = false;
  app.add_option("--config", config_path, "run configuration (JSON)")->required();
  app.add_option("--seed", seed_override, "override the config seed")
      ->each([&](const std::string&) { seed_overridden = true; });
  app.add_option("--jobs", jobs, "worker parallelism (1 = fully deterministic)");
  app.add_flag("--deterministic", deterministic, "force single-threaded execution");

  std::string out_path, manifest_path, split_name = "train";
  auto* gen = app.add_subcommand("gen-samples", "generate labeled samples");
  gen->add_option("--out", out_path, "sample JSONL output")->required();
  gen->add_option("--manifest", manifest_path, "manifest JSON output");
  gen->add_option("--split", split_name, "train | validation | test");

  std::string model_path, history_path;
  auto* tr = app.add_subcommand("train", "train a scoring model");
  tr->add_option("--model-out", model_path, "model file output")->required();
  tr->add_option("--history-out", history_path, "training history JSON output");

  std::string score_model, doc_file, summary_file;
  bool batch = false;
  auto* sc = app.add_subcommand("score", "score a (document, summary) pair");
  sc->add_option("--model", score_model, "trained model file")->required();
  sc->add_option("--doc", doc_file, "document text file (one doc per line in batch mode)")
      ->required();
  sc->add_option("--summary", summary_file, "summary text file")->required();
  sc->add_flag("--batch", batch, "line-aligned batch mode");

  std::string eval_model, report_path;
  auto* ev = app.add_subcommand("eval", "evaluate a model on the test split");
  ev->add_option("--model", eval_model, "trained model file")->required();
  ev->add_option("--report", report_path, "report JSON output")->required();

  std::string cd_report;
  auto* cd = app.add_subcommand("cross-domain", "train and evaluate across domains");
  cd->add_option("--report", cd_report, "report JSON output")->required();

  std::string align_model, candidates_path, align_report;
  auto* al = app.add_subcommand("align", "correlate model scores with human judgments");
  al->add_option("--model", align_model, "trained model file")->required();
  al->add_option("--candidates", candidates_path, "candidate/reference summaries JSONL")
      ->required();
  al->add_option("--report", align_report, "report JSON output")->required();

  std::string rouge_cand, rouge_ref;
  auto* rg = app.add_subcommand("rouge", "ROUGE scores between two text files");
  rg->add_option("--candidate", rouge_cand, "candidate text file")->required();
  rg->add_option("--reference", rouge_ref, "reference text file")->required();

  std::string demo_out;
  auto* dm = app.add_subcommand("gen-demo", "write the bundled synthetic demo corpus");
  dm->add_option("--out", demo_out, "corpus JSONL output")->required();

  CLI11_PARSE(app, argc, argv);
  (void)jobs;
  (void)deterministic;  // training and sampling are single-threaded already

  RunConfig cfg = load_config(config_path);
  if (seed_overridden) cfg.seed = seed_override;

  auto read_file = [](const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ParseError("cannot open file: " + path);
    std::ostringstream os;
    os << in.rdbuf();
    return os.str();
  };

  if (gen->parsed()) {
    Pipeline p = load_pipeline(cfg);
    const std::set<std::string>* split = &p.split.train;
    if (split_name == "validation") split = &p.split.validation;
    else if (split_name == "test") split = &p.split.test;
    else if (split_name != "train") throw ConfigurationError("bad --split '" + split_name + "'");
    auto samples = samples_for(p, cfg, *split);
    save_samples(samples, out_path);
    if (!manifest_path.empty())
      write_atomic(manifest_path, manifest_for(samples, cfg).dump(2) + "\n");
    std::cout << "wrote " << samples.size() << " samples to " << out_path << "\n";
    return 0;
  }

  if (tr->parsed()) {
    Pipeline p = load_pipeline(cfg);
    auto binding = make_binding(cfg, p.corpus);
    auto train_samples = samples_for(p, cfg, p.split.train);
    auto val_samples = samples_for(p, cfg, p.split.validation);
    TrainedScorer scorer =
        refscore::train(train_samples, val_samples, p.corpus, *binding, cfg.head, [&] {
          TrainConfig tc = cfg.train;
          tc.seed = cfg.seed;
          return tc;
        }());
    save_model(scorer, model_path);
    if (!history_path.empty()) {
      ordered_json h = ordered_json::array();
      for (const auto& r : scorer.history())
        h.push_back({{"epoch", r.epoch},
                     {"train_loss", r.train_loss},
                     {"val_loss", r.val_loss}});
      write_atomic(history_path, h.dump(2) + "\n");
    }
    std::cout << "trained " << head_kind_name(cfg.head.kind) << " head ("
              << scorer.history().size() << " epochs) -> " << model_path << "\n";
    return 0;
  }

  if (sc->parsed()) {
    TrainedScorer scorer = load_model(score_model);
    auto score_one = [&](const std::string& doc_text, const std::string& summary_text) {
      if (summary_text.find_first_not_of(" \t\r\n") == std::string::npos)
        throw DegenerateInputError("summary is empty");
      DocumentRecord doc;
      doc.doc_id = "adhoc";
      doc.text = doc_text;
      doc.sentences = split_sentences(doc_text);
      std::cout << scorer.predict(doc, summary_text) << "\n";
    };
    if (batch) {
      std::ifstream din(doc_file), sin(summary_file);
      if (!din || !sin) throw ParseError("cannot open batch input files");
      std::string dline, sline;
      while (std::getline(din, dline) && std::getline(sin, sline)) score_one(dline, sline);
    } else {
      score_one(read_file(doc_file), read_file(summary_file));
    }
    return 0;
  }

  if (ev->parsed()) {
    Pipeline p = load_pipeline(cfg);
    TrainedScorer scorer = load_model(eval_model);
    auto test_samples = samples_for(p, cfg, p.split.test);
    EvalTask task =
        cfg.method == "crosspair" ? EvalTask::classification : EvalTask::regression;
    EvalReport report = evaluate(as_score_fn(scorer), test_samples, p.corpus, task,
                                 cfg.corpus_path, score_model);
    write_atomic(report_path, eval_report_json(report));
    std::cout << eval_report_json(report);
    return 0;
  }

  if (cd->parsed()) {
    if (cfg.domains.size() < 2)
      throw ConfigurationError("cross-domain needs >= 2 domains in config");
    std::map<std::string, ScoreFn> scorers;
    std::map<std::string, EvalDataset> targets;
    std::vector<std::unique_ptr<Pipeline>> pipelines;
    std::vector<std::unique_ptr<TrainedScorer>> models;
    for (const auto& [name, path] : cfg.domains) {
      auto p = std::make_unique<Pipeline>();
      p->corpus = load_corpus(resolve(cfg, path));
      p->split = make_splits(p->corpus, cfg.f_train, cfg.f_val, cfg.f_test, cfg.seed);
      p->vocab = build_vocabulary(p->corpus, p->split.train);
      auto binding = make_binding(cfg, p->corpus);
      auto train_samples = samples_for(*p, cfg, p->split.train);
      auto val_samples = samples_for(*p, cfg, p->split.validation);
      TrainConfig tc = cfg.train;
      tc.seed = cfg.seed;
      auto scorer = std::make_unique<TrainedScorer>(
          refscore::train(train_samples, val_samples, p->corpus, *binding, cfg.head, tc));
      EvalDataset ds;
      ds.corpus = &p->corpus;
      ds.samples = samples_for(*p, cfg, p->split.test);
      targets[name] = std::move(ds);
      scorers[name] = as_score_fn(*scorer);
      models.push_back(std::move(scorer));
      pipelines.push_back(std::move(p));
    }
    auto cells = cross_domain_matrix(scorers, targets);
    write_atomic(cd_report, cross_domain_json(cells));
    std::cout << cross_domain_table(cells);
    return 0;
  }

  if (al->parsed()) {
    Pipeline p = load_pipeline(cfg);
    if (cfg.human_scores_path.empty())
      throw ConfigurationError("config needs corpus.human_scores for align");
    HumanEvalData human = load_human_scores(resolve(cfg, cfg.human_scores_path));
    TrainedScorer scorer = load_model(align_model);

    std::map<CandidateKey, std::string> candidates;
    std::map<std::string, std::vector<std::string>> references;
    std::ifstream in(candidates_path);
    if (!in) throw ParseError("cannot open candidates file: " + candidates_path);
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
      ++lineno;
      if (line.empty()) continue;
      json j = json::parse(line, nullptr, false);
      if (j.is_discarded())
        throw ParseError(candidates_path + ":" + std::to_string(lineno) + ": malformed line");
      std::string set_id = j.at("set_id").get<std::string>();
      if (j.contains("reference"))
        references[set_id].push_back(j["reference"].get<std::string>());
      else
        candidates[{set_id, j.at("summarizer_id").get<std::string>()}] =
            j.at("summary").get<std::string>();
    }

    AlignmentReport report = align_with_humans(as_score_fn(scorer), human.sets, candidates,
                                               human.scores, p.corpus, cfg.allow_partial);
    if (cfg.with_rouge) {
      std::vector<RougeVariantSpec> variants = {{RougeVariant::rouge_n, 1, 0},
                                                {RougeVariant::rouge_n, 2, 0},
                                                {RougeVariant::rouge_n, 4, 0},
                                                {RougeVariant::rouge_w, 0, 1.2}};
      auto rows = rouge_baseline(candidates, references, human.scores, variants);
      report.rows.insert(report.rows.end(), rows.begin(), rows.end());
    }
    write_atomic(align_report, alignment_report_json(report));
    std::cout << alignment_report_table(report);
    return 0;
  }

  if (rg->parsed()) {
    auto cand = tokenize(read_file(rouge_cand)).tokens;
    auto ref = tokenize(read_file(rouge_ref)).tokens;
    for (int n : {1, 2, 4}) {
      RougeScore s = rouge_n(cand, ref, n);
      std::cout << "ROUGE-" << n << " P=" << s.precision << " R=" << s.recall << " F=" << s.f1
                << "\n";
    }
    RougeScore w = rouge_w(cand, ref, 1.2);
    std::cout << "ROUGE-W-1.2 P=" << w.precision << " R=" << w.recall << " F=" << w.f1 << "\n";
    return 0;
  }

  if (dm->parsed()) {
    DemoConfig demo;
    demo.seed = cfg.seed;
    save_corpus(make_demo_corpus(demo), demo_out);
    std::cout << "wrote demo corpus to " << demo_out << "\n";
    return 0;
  }

  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  try {
    return run(argc, argv);
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return static_cast<int>(e.error_class());
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return static_cast<int>(ErrorClass::runtime);
  }
}
