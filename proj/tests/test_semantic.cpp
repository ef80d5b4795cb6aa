#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <random>

#include "hmrank/error.hpp"
#include "hmrank/semantic.hpp"
#include "test_util.hpp"

using namespace hmrank;
using V = std::vector<std::string>;

TEST_CASE("segment_sentences") {
  CHECK(segment_sentences("A b. C d? E") == V{"A b.", "C d?", "E"});
  CHECK(segment_sentences("no terminators here") == V{"no terminators here"});
  CHECK(segment_sentences("Dr. Smith said so.") == V{"Dr.", "Smith said so."});
  CHECK(segment_sentences("").empty());
  CHECK(segment_sentences("  \n ").empty());
  CHECK(segment_sentences("3.14 is pi!Really?  Yes.\n\nNext") ==
        V{"3.14 is pi!Really?", "Yes.", "Next"});
  CHECK(segment_sentences("Wait... what?!") == V{"Wait...", "what?!"});
}

TEST_CASE("truncate_for_embedding") {
  std::string five;
  for (int i = 0; i < 5; ++i) five += "Sentence " + std::to_string(i) + ".  ";
  CHECK(truncate_for_embedding(five) ==
        "Sentence 0. Sentence 1. Sentence 2. Sentence 3. Sentence 4.");

  std::string many, first20;
  for (int i = 0; i < 25; ++i) {
    const std::string s = "S" + std::to_string(i) + " words here.";
    many += s + " ";
    if (i < 20) first20 += (i ? " " : "") + s;
  }
  CHECK(truncate_for_embedding(many, 20) == first20);
  CHECK(segment_sentences(truncate_for_embedding(many, 20)).size() == 20);
  CHECK(truncate_for_embedding(many, 1) == "S0 words here.");
  CHECK(truncate_for_embedding("").empty());
  CHECK_THROWS_AS(truncate_for_embedding("x", 0), ValidationError);
}

TEST_CASE("cosine worked examples") {
  const std::vector<double> x{0.3, -2.0, 5.0};
  CHECK(cosine(x, x) == doctest::Approx(1.0).epsilon(1e-15));
  CHECK(cosine(std::vector<double>{1, 0}, std::vector<double>{0, 1}) == 0.0);
  CHECK(cosine(std::vector<double>{1, 1}, std::vector<double>{1, 0}) ==
        doctest::Approx(1.0 / std::sqrt(2.0)).epsilon(1e-12));
  CHECK(cosine(std::vector<double>{0, 0}, std::vector<double>{1, 0}) == 0.0);
  CHECK_THROWS_AS(cosine(std::vector<double>{1}, std::vector<double>{1, 2}), ValidationError);
}

TEST_CASE("cosine stays in [-1, 1] and is scale-free") {
  std::mt19937 rng(5);
  std::normal_distribution<double> g;
  for (int trial = 0; trial < 200; ++trial) {
    std::vector<double> u(8), v(8);
    for (auto& x : u) x = g(rng);
    for (auto& x : v) x = g(rng);
    const double c = cosine(u, v);
    CHECK(c >= -1.0);
    CHECK(c <= 1.0);
    auto scaled = u;
    for (auto& x : scaled) x *= 4.0;  // power of two: exact
    CHECK(cosine(scaled, v) == c);
  }
}

TEST_CASE("hashed provider") {
  HashedEmbeddingProvider provider;
  CHECK(provider.dim() == kDefaultHashedDim);
  auto v = provider.embed_text("Vitamin C and the common cold");
  double norm = 0;
  for (double x : v) {
    CHECK(x >= 0.0);
    norm += x * x;
  }
  CHECK(norm == doctest::Approx(1.0));
  CHECK(provider.embed_text("") == std::vector<double>(kDefaultHashedDim, 0.0));
  CHECK(provider.embed_text("a b") == provider.embed_text("A  B!"));
  CHECK(hash_token("abc") == hash_token("abc"));
  CHECK(hash_token("abc", 1) != hash_token("abc", 2));

  // Document vectors only see the first max_sentences sentences.
  HashedEmbeddingProvider::Options opts;
  opts.max_sentences = 1;
  HashedEmbeddingProvider short_provider(opts);
  Document d{"d", "", "alpha beta. gamma delta."};
  CHECK(short_provider.document_vector(d) == short_provider.embed_text("alpha beta."));

  Topic t{"1", "zinc", "zinc lozenges for colds"};
  opts = {};
  opts.topic_text = TopicText::both;
  CHECK(HashedEmbeddingProvider(opts).topic_vector(t) ==
        provider.embed_text("zinc zinc lozenges for colds"));
  CHECK(parse_topic_text("description") == TopicText::description);
  CHECK_THROWS_AS(parse_topic_text("title"), ValidationError);
}

TEST_CASE("semantic_rank with the hashed provider") {
  HashedEmbeddingProvider provider;
  Topic topic{"1", "does honey soothe a cough", ""};
  Document copy{"z_copy", "", "does honey soothe a cough"};
  Document other{"a_other", "", "stock market prices fell sharply"};
  std::vector<const Document*> cands{&other, &copy};
  auto list = semantic_rank(topic, cands, provider);
  REQUIRE(list.size() == 2);
  CHECK(list.entries[0].doc_id == "z_copy");
  CHECK(list.entries[0].score == doctest::Approx(1.0));
  CHECK(list.entries[0].rank == 1);

  std::vector<const Document*> one{&other};
  auto single = semantic_rank(topic, one, provider);
  REQUIRE(single.size() == 1);
  CHECK(single.entries[0].rank == 1);

  Document empty{"e", "", ""};
  std::vector<const Document*> with_empty{&empty};
  CHECK(semantic_rank(topic, with_empty, provider).entries[0].score == 0.0);
}

TEST_CASE("semantic_rank with file-backed vectors equals a hand sort") {
  hmrank::testing::TempDir dir("sem");
  // Topic vector (1, 0, 0); the cosine of each document is x / |v|.
  auto path = dir.write("e.txt",
                        "3\n"
                        "101 2 0 0\n"
                        "d0 1 0 0\n"   // 1
                        "d1 0 1 0\n"   // 0
                        "d2 1 1 0\n"   // 0.70711
                        "d3 -1 0 0\n"  // -1
                        "d4 3 4 0\n"   // 0.6
                        "d5 4 3 0\n"   // 0.8
                        "d6 2 0 0\n"   // 1 (tie with d0)
                        "d7 1 2 2\n"   // 1/3
                        "d8 0 0 0\n"   // 0 (zero norm, tie with d1)
                        "d9 5 0 12\n"  // 5/13
  );
  FileEmbeddingProvider provider(load_embeddings(path));
  std::vector<Document> docs;
  for (int i = 9; i >= 0; --i) docs.push_back({"d" + std::to_string(i), "", ""});
  std::vector<const Document*> cands;
  for (const auto& d : docs) cands.push_back(&d);
  auto list = semantic_rank(Topic{"101", "ignored", ""}, cands, provider);
  const V expected{"d0", "d6", "d5", "d2", "d4", "d9", "d7", "d1", "d8", "d3"};
  V got;
  for (const auto& e : list.entries) got.push_back(e.doc_id);
  CHECK(got == expected);
  CHECK(list.entries[3].score == doctest::Approx(1.0 / std::sqrt(2.0)));

  Document missing{"nope", "", ""};
  std::vector<const Document*> bad{&missing};
  CHECK_THROWS_AS(semantic_rank(Topic{"101", "q", ""}, bad, provider), ValidationError);
}

TEST_CASE("semantic_rank is a permutation and scale-invariant") {
  std::mt19937 rng(9);
  std::uniform_real_distribution<double> u(-1, 1);
  hmrank::testing::TempDir dir("sem_perm");
  for (int trial = 0; trial < 20; ++trial) {
    std::vector<EmbeddingRecord> recs{{"q", {u(rng), u(rng), u(rng), u(rng)}}};
    std::vector<Document> docs;
    for (int i = 0; i < 30; ++i) {
      docs.push_back({"d" + std::to_string(i), "", ""});
      recs.push_back({docs.back().doc_id, {u(rng), u(rng), u(rng), u(rng)}});
    }
    auto scaled = recs;
    for (auto& r : scaled)
      for (auto& x : r.vector) x *= 0.125;
    write_embeddings(dir / "a", 4, recs);
    write_embeddings(dir / "b", 4, scaled);
    std::vector<const Document*> cands;
    for (const auto& d : docs) cands.push_back(&d);
    const Topic topic{"q", "", ""};
    auto a = semantic_rank(topic, cands, FileEmbeddingProvider(load_embeddings(dir / "a")));
    auto b = semantic_rank(topic, cands, FileEmbeddingProvider(load_embeddings(dir / "b")));
    V ia, ib, in;
    for (const auto& e : a.entries) ia.push_back(e.doc_id);
    for (const auto& e : b.entries) ib.push_back(e.doc_id);
    for (const auto& d : docs) in.push_back(d.doc_id);
    CHECK(ia == ib);
    std::sort(ia.begin(), ia.end());
    std::sort(in.begin(), in.end());
    CHECK(ia == in);
  }
}
