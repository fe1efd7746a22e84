#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cstdio>
#include <fstream>
#include <sstream>

#include "refscore/demo.hpp"
#include "refscore/errors.hpp"
#include "refscore/evalharness.hpp"
#include "refscore/rng.hpp"

using namespace refscore;

namespace {

// scorer that just looks the answer up in a table keyed by summary text
ScoreFn table_scorer(std::map<std::string, double> table, double fallback = 0.0) {
  return [table = std::move(table), fallback](const DocumentRecord&, const std::string& summary) {
    auto it = table.find(summary);
    return it != table.end() ? it->second : fallback;
  };
}

Corpus tiny_corpus(int n, const std::string& prefix = "d") {
  Corpus c;
  for (int i = 0; i < n; ++i) {
    DocumentRecord d;
    d.doc_id = prefix + std::to_string(i);
    d.text = "Document " + std::to_string(i) + " text.";
    c.add_document(std::move(d));
    SummaryRecord s;
    s.summary_id = "s-" + prefix + std::to_string(i);
    s.doc_id = prefix + std::to_string(i);
    s.text = "Summary " + std::to_string(i) + ".";
    c.add_summary(std::move(s));
  }
  return c;
}

std::vector<LabeledSample> samples_for(const Corpus& c, double label) {
  std::vector<LabeledSample> out;
  for (const auto& id : c.doc_ids()) {
    LabeledSample s;
    s.doc_id = id;
    s.summary_tokens = tokenize(c.reference_summary(id)->text);
    s.label = label;
    s.provenance = label == 1.0 ? Provenance::original : Provenance::crosspair;
    out.push_back(std::move(s));
  }
  return out;
}

}  // namespace

TEST_CASE("evaluate: perfect and inverted classifiers") {
  Corpus c = tiny_corpus(10);
  auto pos = samples_for(c, 1.0);
  auto neg = samples_for(c, 0.0);
  std::vector<LabeledSample> all = pos;
  all.insert(all.end(), neg.begin(), neg.end());
  // duplicate (doc, summary) rows with opposite labels: a scorer agreeing with
  // the positive copy must disagree with the negative one
  ScoreFn always_yes = [](const DocumentRecord&, const std::string&) { return 0.9; };
  EvalReport r = evaluate(always_yes, all, c, EvalTask::classification, "tiny", "yes");
  CHECK(r.metric == doctest::Approx(50.0));
  CHECK(r.sample_count == 20);
  CHECK(r.dataset_id == "tiny");
  CHECK(r.model_id == "yes");
  EvalReport p = evaluate(always_yes, pos, c, EvalTask::classification);
  CHECK(p.metric == doctest::Approx(100.0));
}

TEST_CASE("evaluate: random scorer sits near 50 on balanced labels") {
  Corpus c = tiny_corpus(200);
  auto pos = samples_for(c, 1.0);
  auto neg = samples_for(c, 0.0);
  std::vector<LabeledSample> all = pos;
  all.insert(all.end(), neg.begin(), neg.end());
  auto rng = std::make_shared<Rng>(3);
  ScoreFn coin = [rng](const DocumentRecord&, const std::string&) { return rng->next_real(); };
  EvalReport r = evaluate(coin, all, c, EvalTask::classification);
  CHECK(r.metric > 40.0);
  CHECK(r.metric < 60.0);
}

TEST_CASE("evaluate: classification rejects fractional labels, regression embraces them") {
  Corpus c = tiny_corpus(5);
  auto frac = samples_for(c, 0.7);
  ScoreFn dummy = [](const DocumentRecord&, const std::string&) { return 0.5; };
  CHECK_THROWS_AS(evaluate(dummy, frac, c, EvalTask::classification), ConfigurationError);

  // regression PCC x 100: scorer that recovers the label plus affine shift
  std::vector<LabeledSample> graded;
  std::map<std::string, double> table;
  int i = 0;
  for (const auto& id : c.doc_ids()) {
    LabeledSample s;
    s.doc_id = id;
    s.summary_tokens = tokenize("grade " + std::to_string(i));
    s.label = 0.1 + 0.2 * i;
    graded.push_back(s);
    table[s.summary_tokens.joined()] = 0.05 + 0.1 * i;  // r = 1 exactly
    ++i;
  }
  EvalReport r = evaluate(table_scorer(table), graded, c, EvalTask::regression);
  CHECK(r.metric == doctest::Approx(100.0));
  CHECK_THROWS_AS(evaluate(dummy, graded, c, EvalTask::regression), UndefinedCorrelationError);
}

TEST_CASE("evaluate with no samples fails loudly") {
  Corpus c = tiny_corpus(2);
  ScoreFn dummy = [](const DocumentRecord&, const std::string&) { return 0.5; };
  CHECK_THROWS_AS(evaluate(dummy, {}, c, EvalTask::classification), InsufficientDataError);
}

TEST_CASE("cross_domain_matrix mechanics on a 2x2 grid") {
  Corpus news = tiny_corpus(10, "n");
  Corpus mail = tiny_corpus(10, "m");
  std::map<std::string, EvalDataset> targets;
  targets["news"] = {&news, samples_for(news, 1.0)};
  targets["mail"] = {&mail, samples_for(mail, 1.0)};
  // the news model recognizes news summaries only; the mail model everything
  ScoreFn news_model = [](const DocumentRecord& d, const std::string&) {
    return d.doc_id[0] == 'n' ? 0.9 : 0.1;
  };
  ScoreFn mail_model = [](const DocumentRecord&, const std::string&) { return 0.9; };
  std::map<std::string, ScoreFn> scorers = {{"news", news_model}, {"mail", mail_model}};
  auto cells = cross_domain_matrix(scorers, targets);
  REQUIRE(cells.size() == 4);
  std::map<std::pair<std::string, std::string>, CrossDomainCell> grid;
  for (const auto& c : cells) grid[{c.source, c.target}] = c;
  CHECK(grid[{"news", "news"}].accuracy == doctest::Approx(100.0));
  CHECK(grid[{"news", "news"}].in_domain);
  CHECK(grid[{"news", "mail"}].accuracy == doctest::Approx(0.0));
  CHECK_FALSE(grid[{"news", "mail"}].in_domain);
  CHECK(grid[{"mail", "news"}].accuracy == doctest::Approx(100.0));
  CHECK(grid[{"mail", "mail"}].accuracy == doctest::Approx(100.0));
  // deltas are measured against the target's own in-domain model
  CHECK(grid[{"news", "mail"}].delta_vs_in_domain == doctest::Approx(-100.0));
  CHECK(grid[{"mail", "news"}].delta_vs_in_domain == doctest::Approx(0.0));
  CHECK(grid[{"news", "news"}].delta_vs_in_domain == doctest::Approx(0.0));
  CHECK(grid[{"news", "news"}].target_size == 10);
}

TEST_CASE("set_score is the plain sum over the document set") {
  Corpus c = tiny_corpus(10);
  DocumentSet set;
  set.set_id = "D1";
  set.doc_ids = c.doc_ids();
  ScoreFn half = [](const DocumentRecord&, const std::string&) { return 0.5; };
  CHECK(set_score(half, set, "anything", c) == doctest::Approx(5.0));

  DocumentSet one;
  one.set_id = "D2";
  one.doc_ids = {c.doc_ids()[3]};
  ScoreFn varied = [](const DocumentRecord& d, const std::string& s) {
    return 0.01 * static_cast<double>(d.doc_id.size() + s.size());
  };
  CHECK(set_score(varied, one, "xy", c) ==
        doctest::Approx(varied(c.document(one.doc_ids[0]), "xy")));

  // loop-accumulated oracle
  double expected = 0.0;
  for (const auto& id : set.doc_ids) expected += varied(c.document(id), "xy");
  CHECK(set_score(varied, set, "xy", c) == doctest::Approx(expected).epsilon(1e-12));
}

TEST_CASE("align_with_humans: proxy scorer correlates perfectly") {
  Corpus c = tiny_corpus(12);
  std::vector<DocumentSet> sets;
  std::vector<HumanScoreRecord> humans;
  std::map<CandidateKey, std::string> candidates;
  std::map<std::string, double> per_doc;
  for (int g = 0; g < 4; ++g) {
    DocumentSet s;
    s.set_id = "D" + std::to_string(g);
    for (int k = 0; k < 3; ++k) s.doc_ids.push_back(c.doc_ids()[g * 3 + k]);
    sets.push_back(s);
    HumanScoreRecord h;
    h.set_id = s.set_id;
    h.summarizer_id = "m1";
    h.overall = 1.0 + g;
    h.modified_pyramid = 0.2 * (4 - g);  // descending: negative correlation
    h.linguistic_quality = 3.0;          // constant: undefined correlation
    humans.push_back(h);
    std::string cand = "candidate " + std::to_string(g);
    candidates[{s.set_id, "m1"}] = cand;
    per_doc[cand] = h.overall / 3.0;  // set_score sums back to the human score
  }
  ScoreFn proxy = table_scorer(per_doc);
  AlignmentReport r = align_with_humans(proxy, sets, candidates, humans, c);
  REQUIRE(r.rows.size() == 1);
  CHECK(r.pair_count == 4);
  CHECK(r.rows[0].name == "model");
  REQUIRE(r.rows[0].overall.pearson.has_value());
  CHECK(*r.rows[0].overall.pearson == doctest::Approx(1.0));
  CHECK(*r.rows[0].overall.spearman == doctest::Approx(1.0));
  CHECK(*r.rows[0].modified_pyramid.pearson == doctest::Approx(-1.0));
  // constant human column: correlation undefined, reported as absent not 0
  CHECK_FALSE(r.rows[0].linguistic_quality.pearson.has_value());
  CHECK_FALSE(r.rows[0].linguistic_quality.spearman.has_value());

  // a human record without a matching candidate: strict mode throws, partial
  // mode reports the drop
  HumanScoreRecord orphan;
  orphan.set_id = "D0";
  orphan.summarizer_id = "m9";
  auto with_orphan = humans;
  with_orphan.push_back(orphan);
  CHECK_THROWS_AS(align_with_humans(proxy, sets, candidates, with_orphan, c, false),
                  ReferentialIntegrityError);
  AlignmentReport partial = align_with_humans(proxy, sets, candidates, with_orphan, c, true);
  CHECK(partial.pair_count == 4);
  REQUIRE(partial.dropped.size() == 1);
  CHECK(partial.dropped[0].find("m9") != std::string::npos);
}

TEST_CASE("rouge_baseline emits P/R/F rows per variant") {
  std::vector<HumanScoreRecord> humans;
  std::map<CandidateKey, std::string> candidates;
  std::map<std::string, std::vector<std::string>> references;
  // candidates with increasing overlap against a fixed reference; the human
  // "overall" column is defined as the ROUGE-1 F of the candidate, so that
  // row must correlate exactly
  std::vector<std::string> cands = {
      "alpha beta gamma delta", "alpha beta gamma zz", "alpha beta yy zz", "alpha xx yy zz"};
  for (int g = 0; g < 4; ++g) {
    std::string set_id = "D" + std::to_string(g);
    references[set_id] = {"alpha beta gamma delta"};
    candidates[{set_id, "m1"}] = cands[static_cast<std::size_t>(g)];
    HumanScoreRecord h;
    h.set_id = set_id;
    h.summarizer_id = "m1";
    h.overall =
        rouge_n(tokenize(cands[static_cast<std::size_t>(g)]).tokens,
                tokenize(references[set_id][0]).tokens, 1)
            .f1;
    h.modified_pyramid = h.overall;
    h.linguistic_quality = h.overall;
    humans.push_back(h);
  }
  std::vector<RougeVariantSpec> variants = {
      {RougeVariant::rouge_n, 1, 1.2}, {RougeVariant::rouge_n, 2, 1.2},
      {RougeVariant::rouge_n, 4, 1.2}, {RougeVariant::rouge_w, 1, 1.2}};
  auto rows = rouge_baseline(candidates, references, humans, variants);
  REQUIRE(rows.size() == 12);
  CHECK(rows[0].name == "ROUGE-1 P");
  CHECK(rows[1].name == "ROUGE-1 R");
  CHECK(rows[2].name == "ROUGE-1 F");
  CHECK(rows[11].name == "ROUGE-W-1.2 F");
  REQUIRE(rows[2].overall.pearson.has_value());
  CHECK(*rows[2].overall.pearson == doctest::Approx(1.0));

  // missing reference set fails referential integrity
  auto short_refs = references;
  short_refs.erase("D3");
  CHECK_THROWS_AS(rouge_baseline(candidates, short_refs, humans, variants),
                  ReferentialIntegrityError);
}

TEST_CASE("rouge_baseline takes the max over multiple references") {
  std::map<CandidateKey, std::string> candidates = {{{"D0", "m1"}, "alpha beta"},
                                                    {{"D1", "m1"}, "gamma delta"}};
  std::map<std::string, std::vector<std::string>> references = {
      {"D0", {"zz yy", "alpha beta"}}, {"D1", {"gamma delta", "qq pp"}}};
  std::vector<HumanScoreRecord> humans(2);
  humans[0].set_id = "D0";
  humans[0].summarizer_id = "m1";
  humans[1].set_id = "D1";
  humans[1].summarizer_id = "m1";
  humans[0].overall = 1.0;
  humans[1].overall = 2.0;
  // both candidates match one of their references exactly, so with max
  // combination every P/R/F value is 1 and correlations are undefined
  auto rows = rouge_baseline(candidates, references, humans, {{RougeVariant::rouge_n, 1, 1.2}});
  REQUIRE(rows.size() == 3);
  for (const auto& row : rows) {
    CHECK_FALSE(row.overall.pearson.has_value());  // constant scores
  }
}

TEST_CASE("alignment report serialization regenerates byte-identically") {
  AlignmentReport report;
  AlignmentRow row;
  row.name = "model";
  row.overall.pearson = 0.87654321;
  row.overall.spearman = 0.75;
  row.modified_pyramid.pearson = -0.5;
  // spearman left undefined on purpose
  report.rows.push_back(row);
  report.pair_count = 46 * 43;
  report.dropped.push_back("(D1, m9): missing summary");
  std::string a = alignment_report_json(report);
  std::string b = alignment_report_json(report);
  CHECK(a == b);
  CHECK(a.find("undefined") != std::string::npos);
  CHECK(a.find("0.8765") != std::string::npos);
  std::string table = alignment_report_table(report);
  CHECK(table.find("model") != std::string::npos);

  std::string path = "/tmp/refscore_test_report.json";
  write_atomic(path, a);
  std::ifstream in(path);
  std::stringstream buf;
  buf << in.rdbuf();
  CHECK(buf.str() == a);
  std::remove(path.c_str());
}

TEST_CASE("cross-domain report serialization") {
  std::vector<CrossDomainCell> cells(2);
  cells[0] = {"news", "news", 100, 95.0, true, 0.0};
  cells[1] = {"news", "mail", 80, 88.5, false, -6.5};
  std::string a = cross_domain_json(cells);
  CHECK(a == cross_domain_json(cells));
  CHECK(a.find("88.5") != std::string::npos);
  std::string table = cross_domain_table(cells);
  CHECK(table.find("news") != std::string::npos);
  CHECK(table.find("mail") != std::string::npos);
}

TEST_CASE("eval report serialization carries task and metric") {
  EvalReport r;
  r.task = EvalTask::regression;
  r.metric = 84.25;
  r.dataset_id = "val";
  r.model_id = "m";
  r.sample_count = 123;
  std::string j = eval_report_json(r);
  CHECK(j == eval_report_json(r));
  CHECK(j.find("84.25") != std::string::npos);
  CHECK(j.find("regression") != std::string::npos);
  CHECK(j.find("123") != std::string::npos);
}
