#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cstdio>
#include <fstream>

#include "refscore/corpus.hpp"
#include "refscore/demo.hpp"
#include "refscore/errors.hpp"

using namespace refscore;

namespace {

std::string write_temp(const std::string& name, const std::string& content) {
  std::string path = "/tmp/refscore_test_" + name;
  std::ofstream out(path);
  out << content;
  return path;
}

}  // namespace

TEST_CASE("load_corpus round trip") {
  std::string path = write_temp("corpus.jsonl",
      R"({"kind":"doc","doc_id":"d1","text":"First doc. Two sentences.","domain":"news"})" "\n"
      R"({"kind":"doc","doc_id":"d2","text":"Second doc.","domain":"news"})" "\n"
      R"({"kind":"summary","summary_id":"s1","doc_id":"d1","text":"Summary one.","origin":"reference"})" "\n"
      R"({"kind":"summary","summary_id":"s2","doc_id":"d2","text":"Summary two.","origin":"reference"})" "\n");
  Corpus c = load_corpus(path);
  CHECK(c.num_documents() == 2);
  CHECK(c.num_summaries() == 2);
  CHECK(c.count_origin(SummaryOrigin::reference) == 2);
  CHECK(c.document("d1").sentences.size() == 2);

  std::string copy = "/tmp/refscore_test_corpus_copy.jsonl";
  save_corpus(c, copy);
  Corpus c2 = load_corpus(copy);
  CHECK(c2.num_documents() == c.num_documents());
  CHECK(c2.num_summaries() == c.num_summaries());
  CHECK(c2.document("d1").text == c.document("d1").text);
  CHECK(c2.summaries()[0].text == c.summaries()[0].text);
  std::remove(path.c_str());
  std::remove(copy.c_str());
}

TEST_CASE("load_corpus reports the offending line") {
  std::string path = write_temp("bad.jsonl",
      R"({"kind":"doc","doc_id":"d1","text":"ok."})" "\n"
      R"({"kind":"doc","doc_id":"d2"})" "\n");
  CHECK_THROWS_WITH_AS(load_corpus(path), doctest::Contains(":2:"), ParseError);
  std::remove(path.c_str());
}

TEST_CASE("dangling summary reference names the doc") {
  std::string path = write_temp("dangling.jsonl",
      R"({"kind":"doc","doc_id":"d1","text":"ok."})" "\n"
      R"({"kind":"summary","summary_id":"s1","doc_id":"x9","text":"t.","origin":"reference"})" "\n");
  CHECK_THROWS_WITH_AS(load_corpus(path), doctest::Contains("x9"), ReferentialIntegrityError);
  std::remove(path.c_str());
}

TEST_CASE("make_splits sizes and determinism") {
  DemoConfig cfg;
  cfg.n_docs = 10;
  Corpus c = make_demo_corpus(cfg);
  SplitAssignment a = make_splits(c, 0.8, 0.1, 0.1, 7);
  CHECK(a.train.size() == 8);
  CHECK(a.validation.size() == 1);
  CHECK(a.test.size() == 1);
  SplitAssignment b = make_splits(c, 0.8, 0.1, 0.1, 7);
  CHECK(a.train == b.train);
  CHECK(a.validation == b.validation);
  CHECK(a.test == b.test);
}

TEST_CASE("make_splits rejects tiny corpora") {
  Corpus c;
  DocumentRecord d;
  d.doc_id = "only";
  d.text = "x.";
  c.add_document(d);
  CHECK_THROWS_AS(make_splits(c, 0.8, 0.1, 0.1, 1), InsufficientDataError);
}

TEST_CASE("split leakage property over random corpora and seeds") {
  for (int trial = 0; trial < 20; ++trial) {
    DemoConfig cfg;
    cfg.n_docs = 5 + trial * 7;
    cfg.seed = static_cast<std::uint64_t>(trial);
    Corpus c = make_demo_corpus(cfg);
    SplitAssignment s = make_splits(c, 0.8, 0.1, 0.1, static_cast<std::uint64_t>(trial * 13));
    for (const auto& id : s.train) {
      CHECK(s.test.count(id) == 0);
      CHECK(s.validation.count(id) == 0);
    }
    for (const auto& id : s.validation) CHECK(s.test.count(id) == 0);
    CHECK(s.train.size() + s.validation.size() + s.test.size() == c.num_documents());
  }
}

TEST_CASE("human score ingestion") {
  std::string path = write_temp("human.jsonl",
      R"({"kind":"docset","set_id":"D1","doc_ids":["a","b"]})" "\n"
      R"({"kind":"human","set_id":"D1","summarizer_id":"m1","modified_pyramid":0.4,"linguistic_quality":3.1,"overall":2.5})" "\n");
  HumanEvalData data = load_human_scores(path);
  CHECK(data.sets.size() == 1);
  CHECK(data.scores.size() == 1);
  CHECK(data.scores[0].modified_pyramid == doctest::Approx(0.4));
  std::remove(path.c_str());
}

TEST_CASE("human scores: empty file is fine, duplicates are not") {
  std::string empty = write_temp("human_empty.jsonl", "");
  HumanEvalData data = load_human_scores(empty);
  CHECK(data.sets.empty());
  CHECK(data.scores.empty());
  std::remove(empty.c_str());

  std::string dup = write_temp("human_dup.jsonl",
      R"({"kind":"docset","set_id":"D1","doc_ids":["a"]})" "\n"
      R"({"kind":"human","set_id":"D1","summarizer_id":"m1","modified_pyramid":1,"linguistic_quality":1,"overall":1})" "\n"
      R"({"kind":"human","set_id":"D1","summarizer_id":"m1","modified_pyramid":2,"linguistic_quality":2,"overall":2})" "\n");
  CHECK_THROWS_AS(load_human_scores(dup), DuplicationError);
  std::remove(dup.c_str());

  std::string orphan = write_temp("human_orphan.jsonl",
      R"({"kind":"human","set_id":"NOPE","summarizer_id":"m1","modified_pyramid":1,"linguistic_quality":1,"overall":1})" "\n");
  CHECK_THROWS_AS(load_human_scores(orphan), ReferentialIntegrityError);
  std::remove(orphan.c_str());
}

TEST_CASE("build_vocabulary counts match a single-pass recount") {
  DemoConfig cfg;
  cfg.n_docs = 100;
  Corpus c = make_demo_corpus(cfg);
  std::set<std::string> all(c.doc_ids().begin(), c.doc_ids().end());
  Vocabulary v = build_vocabulary(c, all);

  std::map<std::string, std::size_t> recount;
  for (const auto& id : c.doc_ids())
    for (const auto& t : tokenize(c.document(id).text).tokens) ++recount[t];
  for (const auto& s : c.summaries())
    for (const auto& t : tokenize(s.text).tokens) ++recount[t];
  CHECK(v.counts() == recount);
}
