#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cstdio>
#include <fstream>

#include "refscore/demo.hpp"
#include "refscore/encoder.hpp"
#include "refscore/errors.hpp"
#include "refscore/rng.hpp"

using namespace refscore;

TEST_CASE("plan_joint_truncation under budget pads to the full budget") {
  auto plan = plan_joint_truncation(400, 50, 512);
  CHECK(plan.doc_keep == 400);
  CHECK(plan.summary_keep == 50);
  CHECK(plan.kControlTokens + plan.doc_keep + plan.summary_keep + plan.pad == 512);
}

TEST_CASE("plan_joint_truncation over budget scales both in parallel") {
  auto plan = plan_joint_truncation(900, 100, 512);
  CHECK(plan.kControlTokens + plan.doc_keep + plan.summary_keep == 512);
  CHECK(plan.pad == 0);
  // document share rounds down from 509 * 900/1000 = 458.1
  CHECK(plan.doc_keep == 458);
  CHECK(plan.summary_keep == 51);
}

TEST_CASE("plan_joint_truncation budget conservation and ratio over random lengths") {
  Rng rng(123);
  for (int i = 0; i < 500; ++i) {
    int nd = static_cast<int>(rng.next_below(2000));
    int ns = static_cast<int>(rng.next_below(300));
    auto plan = plan_joint_truncation(nd, ns, 512);
    CHECK(plan.kControlTokens + plan.doc_keep + plan.summary_keep + plan.pad == 512);
    if (nd + ns > 512 - plan.kControlTokens) {
      double ideal = 509.0 * nd / (nd + ns);
      CHECK(std::abs(plan.doc_keep - ideal) <= 1.0);
    }
  }
}

TEST_CASE("compute_padding_limits picks the order statistic") {
  Corpus c;
  for (int i = 1; i <= 10; ++i) {
    DocumentRecord d;
    d.doc_id = "d" + std::to_string(i);
    std::string text;
    for (int s = 0; s < i; ++s) text += "Sentence " + std::to_string(s) + " here. ";
    d.text = text;
    c.add_document(std::move(d));
    SummaryRecord sum;
    sum.summary_id = "s" + std::to_string(i);
    sum.doc_id = "d" + std::to_string(i);
    sum.text = "One line. Two lines. Three lines.";
    c.add_summary(std::move(sum));
  }
  PaddingPolicy p = compute_padding_limits(c, 0.8, PaddingUnit::sentence);
  CHECK(p.doc_limit == 8);
  CHECK(p.summary_limit == 3);  // constant distribution
}

TEST_CASE("hashed encoder is a pure function of (seed, text)") {
  PaddingPolicy policy;
  policy.doc_limit = 4;
  policy.summary_limit = 2;
  auto a = make_hashed_binding(16, policy, 42);
  auto b = make_hashed_binding(16, policy, 42);
  CHECK((a->embed_unit("same sentence here") - b->embed_unit("same sentence here")).norm() == 0.0f);
  CHECK((a->embed_unit("one") - a->embed_unit("two")).norm() > 0.0f);
  auto c = make_hashed_binding(16, policy, 43);
  CHECK((a->embed_unit("one") - c->embed_unit("one")).norm() > 0.0f);
  CHECK(a->embed_unit("hello world").norm() == doctest::Approx(1.0f));
}

TEST_CASE("encode_sequence pads, truncates and masks") {
  PaddingPolicy policy;
  policy.doc_limit = 47;
  policy.summary_limit = 3;
  auto binding = make_hashed_binding(8, policy, 1);
  DocumentRecord doc;
  doc.doc_id = "d";
  doc.text = "First sentence. Second sentence.";
  doc.sentences = split_sentences(doc.text);
  EmbeddingSequence seq = encode_sequence(doc, "A summary.", *binding);
  CHECK(seq.matrix.rows() == 50);
  CHECK(seq.matrix.cols() == 8);
  CHECK(seq.mask[0]);
  CHECK(seq.mask[1]);
  CHECK_FALSE(seq.mask[2]);
  CHECK(seq.matrix.row(2).norm() == 0.0f);
  CHECK(seq.mask[47]);  // first summary row
  CHECK_FALSE(seq.mask[48]);

  // 60-sentence doc truncates to the first 47 rows
  std::string longtext;
  for (int i = 0; i < 60; ++i) longtext += "Sentence number " + std::to_string(i) + " stop. ";
  DocumentRecord big;
  big.doc_id = "big";
  big.text = longtext;
  big.sentences = split_sentences(longtext);
  REQUIRE(big.sentences.size() == 60);
  EmbeddingSequence seq2 = encode_sequence(big, "A summary.", *binding);
  CHECK(seq2.matrix.rows() == 50);
  for (int r = 0; r < 47; ++r) CHECK(seq2.mask[static_cast<std::size_t>(r)]);
}

TEST_CASE("mask rows are exactly the zero rows") {
  PaddingPolicy policy;
  policy.doc_limit = 5;
  policy.summary_limit = 2;
  auto binding = make_hashed_binding(8, policy, 7);
  DocumentRecord doc;
  doc.doc_id = "d";
  doc.text = "Alpha beta. Gamma delta. Epsilon zeta.";
  doc.sentences = split_sentences(doc.text);
  EmbeddingSequence seq = encode_sequence(doc, "Short one.", *binding);
  for (int r = 0; r < seq.matrix.rows(); ++r)
    CHECK(seq.mask[static_cast<std::size_t>(r)] == (seq.matrix.row(r).norm() > 0.0f));
}

TEST_CASE("word table loading and OOV policy") {
  std::string path = "/tmp/refscore_test_glove.txt";
  {
    std::ofstream out(path);
    out << "cat 0.1 0.2 0.3 0.4\n";
    out << "dog 0.5 0.6 0.7 0.8\n";
    out << "sat 0.0 1.0 0.0 1.0\n";
  }
  PaddingPolicy policy;
  policy.unit = PaddingUnit::word;
  policy.doc_limit = 1091;
  policy.summary_limit = 55;
  auto binding = load_word_table(path, policy);
  CHECK(binding->dimension() == 4);
  CHECK(binding->embed_unit("zzqq").norm() == 0.0f);
  CHECK(binding->embed_unit("cat")(0) == doctest::Approx(0.1f));
  std::remove(path.c_str());
}

TEST_CASE("ragged word table is rejected") {
  std::string path = "/tmp/refscore_test_glove_bad.txt";
  {
    std::ofstream out(path);
    out << "cat 0.1 0.2\n";
    out << "dog 0.5\n";
  }
  CHECK_THROWS_AS(load_word_table(path, PaddingPolicy{}), FormatError);
  std::remove(path.c_str());
}

TEST_CASE("precomputed sidecar round trip and missing keys") {
  std::string path = "/tmp/refscore_test_sidecar.jsonl";
  std::map<std::string, MatF> entries;
  MatF rows(2, 3);
  rows << 1, 2, 3, 4, 5, 6;
  entries["doc:d1"] = rows;
  MatF srow(1, 3);
  srow << 7, 8, 9;
  entries["sum:" + std::string("aaaa")] = srow;
  save_precomputed_sequence(path, entries);

  PaddingPolicy policy;
  policy.doc_limit = 4;
  policy.summary_limit = 2;
  auto binding = load_precomputed(path, policy);
  CHECK(binding->dimension() == 3);

  DocumentRecord doc;
  doc.doc_id = "d1";
  doc.text = "Whatever. Content.";
  doc.sentences = split_sentences(doc.text);
  // doc rows resolve from the sidecar; the summary hash key is absent
  CHECK_THROWS_WITH_AS(encode_sequence(doc, "missing summary", *binding),
                       doctest::Contains("sum:"), MissingEmbeddingError);

  DocumentRecord unknown;
  unknown.doc_id = "nope";
  unknown.text = "X.";
  unknown.sentences = {"X."};
  CHECK_THROWS_WITH_AS(encode_sequence(unknown, "s", *binding), doctest::Contains("nope"),
                       MissingEmbeddingError);
  std::remove(path.c_str());
}

TEST_CASE("binding identity round trips for hashed encoders") {
  PaddingPolicy policy;
  policy.doc_limit = 4;
  policy.summary_limit = 2;
  auto binding = make_hashed_binding(16, policy, 42);
  auto restored = binding_from_identity(binding->identity());
  CHECK(restored->identity() == binding->identity());
  CHECK((restored->embed_unit("check me") - binding->embed_unit("check me")).norm() == 0.0f);
}

TEST_CASE("joint encoding: hashed joint vector and empty summary") {
  PaddingPolicy policy;
  policy.unit = PaddingUnit::joint_token;
  policy.joint_budget = 512;
  auto binding = make_hashed_binding(32, policy, 5);
  std::vector<std::string> doc_tokens(600, "tok");
  std::vector<std::string> sum_tokens(40, "sum");
  JointEncoding enc = encode_joint(doc_tokens, sum_tokens, *binding);
  CHECK(enc.vector.size() == 32);
  CHECK(enc.vector.norm() == doctest::Approx(1.0f));
  JointEncoding empty_sum = encode_joint(doc_tokens, {}, *binding);
  CHECK(empty_sum.vector.size() == 32);
}
