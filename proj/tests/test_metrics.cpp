#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <map>
#include <random>
#include <set>
#include <sstream>

#include "hmrank/error.hpp"
#include "hmrank/evaluation.hpp"
#include "hmrank/metrics.hpp"
#include "oracles.hpp"

using namespace hmrank;
using Ids = std::vector<std::string>;

namespace {

RankedList make_list(const Ids& ids, std::string topic = "1", std::string tag = "t") {
  RankedList l{std::move(topic), std::move(tag), {}};
  for (std::size_t i = 0; i < ids.size(); ++i)
    l.entries.push_back({ids[i], 100.0 - static_cast<double>(i), static_cast<int>(i + 1)});
  return l;
}

StringSet set_of(std::initializer_list<const char*> ids) {
  StringSet s;
  for (auto id : ids) s.insert(id);
  return s;
}

AspectJudgment judge(std::string topic, std::string doc, int u, int c, int cr) {
  return {std::move(topic), std::move(doc), u, static_cast<BinaryLabel>(c),
          static_cast<BinaryLabel>(cr)};
}

}  // namespace

TEST_CASE("ndcg worked examples") {
  GainMap gains{{"d1", 2.0}, {"d2", 1.0}, {"d3", 0.0}};
  auto v = ndcg(make_list({"d2", "d1", "d3"}), gains, 1000);
  REQUIRE(v);
  CHECK(*v == doctest::Approx(0.85972).epsilon(1e-5));
  CHECK(std::abs(*v - (1.0 + 2.0 / std::log2(3.0)) / (2.0 + 1.0 / std::log2(3.0))) < 1e-12);
  CHECK(*ndcg(make_list({"d1", "d2", "d3"}), gains, 1000) == 1.0);
  CHECK(*ndcg(make_list({"x", "y"}), gains, 1000) == 0.0);
  CHECK(*ndcg(make_list({}), gains, 1000) == 0.0);
  CHECK_FALSE(ndcg(make_list({"d1"}), GainMap{{"d1", 0.0}}, 1000).has_value());
  // Depth cuts both the run and the ideal.
  CHECK(*ndcg(make_list({"d1", "d2"}), gains, 1) == 1.0);
}

TEST_CASE("precision_at worked examples") {
  Ids ten;
  for (int i = 0; i < 10; ++i) ten.push_back("d" + std::to_string(i));
  StringSet all(ten.begin(), ten.end());
  CHECK(precision_at(make_list(ten), all) == 1.0);
  CHECK(precision_at(make_list(ten), set_of({"d0", "d5", "d9", "zz"})) ==
        doctest::Approx(0.3).epsilon(1e-15));
  CHECK(precision_at(make_list({"a", "b", "c", "d"}), set_of({"a", "c"})) ==
        doctest::Approx(0.2).epsilon(1e-15));
  CHECK_THROWS_AS(precision_at(make_list({"a"}), set_of({"a"}), 0), ValidationError);
}

TEST_CASE("average_precision worked examples") {
  CHECK(*average_precision(make_list({"a", "b"}), set_of({"a"})) == 1.0);
  CHECK(*average_precision(make_list({"a", "x", "b"}), set_of({"a", "b"})) ==
        doctest::Approx(0.83333).epsilon(1e-5));
  CHECK(*average_precision(make_list({"x", "y"}), set_of({"a"})) == 0.0);
  CHECK_FALSE(average_precision(make_list({"a"}), StringSet{}).has_value());
  // Documents past the depth do not count.
  CHECK(*average_precision(make_list({"x", "a"}), set_of({"a"}), 1) == 0.0);
}

TEST_CASE("cam worked examples") {
  const std::vector<double> half{0.5, 0.5}, third{1.0 / 3, 1.0 / 3, 1.0 / 3};
  CHECK(cam(std::vector<double>{0.4, 0.2}, half) == doctest::Approx(0.3).epsilon(1e-12));
  CHECK(cam(std::vector<double>{0.3, 0.6, 0.9}, third) == doctest::Approx(0.6).epsilon(1e-12));
  CHECK(cam(std::vector<double>{0.7, 0.7}, half) == doctest::Approx(0.7).epsilon(1e-15));
  CHECK_THROWS_AS(cam(std::vector<double>{0.1}, half), ValidationError);
  CHECK_THROWS_AS(cam(std::vector<double>{0.1, 0.2}, std::vector<double>{0.7, 0.7}),
                  ValidationError);
  CHECK_THROWS_AS(cam(std::vector<double>{0.1, 0.2}, std::vector<double>{1.5, -0.5}),
                  ValidationError);
}

TEST_CASE("rbo worked examples") {
  const Ids ab{"a", "b"}, ba{"b", "a"}, cd{"c", "d"};
  CHECK(rbo(ab, ba, 0.5, 2) == doctest::Approx(0.25).epsilon(1e-15));
  CHECK(rbo(ab, cd, 0.9, 10) == 0.0);
  CHECK(rbo(ab, ab, 0.5, 2) == doctest::Approx(1.0 - 0.25).epsilon(1e-15));
  Ids x;
  for (int i = 0; i < 400; ++i) x.push_back(std::to_string(i));
  CHECK(rbo(x, x, 0.9, 400) == doctest::Approx(1.0 - std::pow(0.9, 400)).epsilon(1e-12));
  CHECK_THROWS_AS(rbo(ab, ab, 1.0, 2), ValidationError);
  CHECK_THROWS_AS(rbo(ab, ab, 0.5, 0), ValidationError);
}

TEST_CASE("compatibility worked examples") {
  std::vector<AspectJudgment> judged{
      judge("1", "d1", 2, 0, 1), judge("1", "d2", 2, 1, 1), judge("1", "d3", 0, -1, 0),
      judge("1", "d4", 1, 1, 1), judge("1", "d5", 1, 0, -1),
  };
  const auto helpful = ideal_ranking(judged, Polarity::helpful);
  CHECK(helpful == Ids{"d2", "d4"});
  CHECK(ideal_ranking(judged, Polarity::harmful) == Ids{"d1", "d5"});

  // run = [d1, d4, d2, d3, d5]; overlaps with the ideal by depth: 0, 1, 2, 2, ...
  // self overlaps: 1, 2, 2, ...
  double tail = 0.0;
  for (int d = 3; d <= 10; ++d) tail += std::pow(0.95, d - 1) * 2.0 / d;
  const double hand = (0.95 * 0.5 + tail) / (1.0 + 0.95 + tail);
  const Ids run{"d1", "d4", "d2", "d3", "d5"};
  auto v = compatibility(run, helpful, 0.95, 10);
  REQUIRE(v);
  CHECK(*v == doctest::Approx(hand).epsilon(1e-12));
  CHECK(*v == doctest::Approx(0.6506536).epsilon(1e-6));

  CHECK(*compatibility(Ids{"d2", "d4", "zz"}, helpful, 0.95, 10) == doctest::Approx(1.0));
  CHECK(*compatibility(Ids{"d1", "d3"}, helpful, 0.95, 10) == 0.0);
  CHECK_FALSE(compatibility(run, Ids{}, 0.95, 10).has_value());
}

TEST_CASE("metrics agree with brute force on random instances") {
  std::mt19937 rng(2024);
  for (int trial = 0; trial < 100; ++trial) {
    Ids universe;
    for (int i = 0; i < 12; ++i) universe.push_back("d" + std::to_string(i));
    std::shuffle(universe.begin(), universe.end(), rng);
    Ids run(universe.begin(), universe.begin() + 1 + rng() % 12);
    std::shuffle(universe.begin(), universe.end(), rng);
    Ids other(universe.begin(), universe.begin() + 1 + rng() % 12);

    std::map<std::string, double> gains_o;
    GainMap gains;
    std::set<std::string> rel_o;
    StringSet rel;
    for (const auto& d : universe) {
      const int g = static_cast<int>(rng() % 3);
      if (rng() % 3 == 0) continue;  // unjudged
      gains_o[d] = g;
      gains[d] = g;
      if (g > 0) {
        rel_o.insert(d);
        rel.insert(d);
      }
    }
    const auto list = make_list(run);
    const std::size_t depth = 1 + rng() % 12;
    const double expect_ndcg = oracle::ndcg(run, gains_o, depth);
    auto got_ndcg = ndcg(list, gains, depth);
    if (expect_ndcg < 0)
      CHECK_FALSE(got_ndcg.has_value());
    else
      CHECK(std::abs(*got_ndcg - expect_ndcg) < 1e-12);

    CHECK(std::abs(precision_at(list, rel, 10) - oracle::precision(run, rel_o, 10)) < 1e-15);
    const double expect_ap = oracle::ap(run, rel_o);
    auto got_ap = average_precision(list, rel);
    if (expect_ap < 0)
      CHECK_FALSE(got_ap.has_value());
    else
      CHECK(std::abs(*got_ap - expect_ap) < 1e-12);

    const double p = 0.1 + 0.85 * (rng() % 100) / 100.0;
    const double r1 = rbo(run, other, p, depth);
    CHECK(std::abs(r1 - oracle::rbo(run, other, p, depth)) < 1e-12);
    CHECK(r1 == doctest::Approx(rbo(other, run, p, depth)).epsilon(1e-14));
    CHECK(r1 >= 0.0);
    CHECK(r1 <= 1.0);
    auto c = compatibility(run, other, p, depth);
    CHECK(std::abs(*c - oracle::rbo(run, other, p, depth) / oracle::rbo(other, other, p, depth)) <
          1e-12);
  }
}

TEST_CASE("ndcg: ideal permutation scores exactly 1 and tail reordering is inert") {
  std::mt19937 rng(8);
  for (int trial = 0; trial < 50; ++trial) {
    GainMap gains;
    std::vector<std::pair<double, std::string>> judged;
    for (int i = 0; i < 8; ++i) {
      const double g = static_cast<double>(rng() % 4);
      gains["d" + std::to_string(i)] = g;
      judged.emplace_back(g, "d" + std::to_string(i));
    }
    std::sort(judged.begin(), judged.end(), [](auto& a, auto& b) { return a.first > b.first; });
    if (judged.front().first == 0) continue;
    Ids ideal;
    for (auto& j : judged) ideal.push_back(j.second);
    CHECK(*ndcg(make_list(ideal), gains, 1000) == 1.0);

    Ids tail = ideal;
    tail.push_back("u1");
    tail.push_back("u2");
    auto swapped = tail;
    std::swap(swapped[8], swapped[9]);
    CHECK(*ndcg(make_list(tail), gains, 1000) == *ndcg(make_list(swapped), gains, 1000));
  }
}

namespace {

Qrels small_qrels() {
  Qrels q;
  // topic 1
  q.add(judge("1", "a", 2, 1, 1));
  q.add(judge("1", "b", 1, 0, 1));
  q.add(judge("1", "c", 0, -1, 0));
  q.add(judge("1", "d", 1, 1, -1));
  q.add(judge("1", "e", 2, 0, 0));
  // topic 2: nothing correct, nothing helpful
  q.add(judge("2", "a", 1, 0, 0));
  q.add(judge("2", "f", 0, -1, 1));
  return q;
}

}  // namespace

TEST_CASE("evaluate_runs against hand-built oracle values") {
  const Qrels qrels = small_qrels();
  Run run{"r", {make_list({"e", "a", "x", "b", "d"}, "1", "r"),
                make_list({"f", "a"}, "2", "r"), make_list({"a"}, "9", "r")}};
  EvalOptions opts;
  auto table = evaluate_runs(std::vector<Run>{run}, qrels, opts, "r");
  REQUIRE(table.columns.size() == kEvalColumns);
  CHECK(table.columns == std::vector<std::string>{"1", "2", "3", "4", "5", "6", "7", "8",
                                                  "harmful", "helpful"});
  const auto& row = table.rows.at(0);
  CHECK(row.skipped_topics == Ids{"9"});

  const Ids r1{"e", "a", "x", "b", "d"}, r2{"f", "a"};
  // 1: graded usefulness nDCG, both topics
  const double c1 = (oracle::ndcg(r1, {{"a", 2}, {"b", 1}, {"c", 0}, {"d", 1}, {"e", 2}}, 1000) +
                     oracle::ndcg(r2, {{"a", 1}, {"f", 0}}, 1000)) / 2;
  CHECK(row.cells[0].value == doctest::Approx(c1).epsilon(1e-12));
  // 2: useful-correct {a, d}; topic 2 has none and is excluded
  CHECK(row.cells[1].value ==
        doctest::Approx(oracle::ndcg(r1, {{"a", 1}, {"b", 0}, {"c", 0}, {"d", 1}, {"e", 0}}, 1000))
            .epsilon(1e-12));
  CHECK(row.cells[1].topics_used == 1);
  CHECK(row.cells[1].topics_excluded == 1);
  // 3: P@10 with padding
  CHECK(row.cells[2].value == doctest::Approx(0.2).epsilon(1e-12));
  // 4: useful-credible {a, b}; topic 2 none
  CHECK(row.cells[3].value ==
        doctest::Approx(oracle::ndcg(r1, {{"a", 1}, {"b", 1}, {"c", 0}, {"d", 0}, {"e", 0}}, 1000))
            .epsilon(1e-12));
  // 5: all three {a}
  CHECK(row.cells[4].value ==
        doctest::Approx(oracle::ndcg(r1, {{"a", 1}, {"b", 0}, {"c", 0}, {"d", 0}, {"e", 0}}, 1000))
            .epsilon(1e-12));
  // 6: CAM over correct and credible. MAP_correct uses topic 1 only;
  // MAP_credible averages both topics.
  const double map_correct = oracle::ap(r1, {"a", "d"});
  const double map_credible = (oracle::ap(r1, {"a", "b"}) + oracle::ap(r2, {"f"})) / 2;
  CHECK(row.cells[5].value == doctest::Approx((map_correct + map_credible) / 2).epsilon(1e-12));
  // 7: useful and credible
  const double map_useful = (oracle::ap(r1, {"a", "b", "d", "e"}) + oracle::ap(r2, {"a"})) / 2;
  CHECK(row.cells[6].value == doctest::Approx((map_useful + map_credible) / 2).epsilon(1e-12));
  // 8: all three aspects
  CHECK(row.cells[7].value ==
        doctest::Approx((map_useful + map_correct + map_credible) / 3).epsilon(1e-12));
  // harmful ideals: topic 1 [e, b], topic 2 [a]; helpful: topic 1 [a] only
  const double harm = (oracle::rbo(r1, {"e", "b"}, 0.95, 1000) /
                           oracle::rbo({"e", "b"}, {"e", "b"}, 0.95, 1000) +
                       oracle::rbo(r2, {"a"}, 0.95, 1000) / oracle::rbo({"a"}, {"a"}, 0.95, 1000)) /
                      2;
  CHECK(row.cells[8].value == doctest::Approx(harm).epsilon(1e-12));
  CHECK(row.cells[9].value == doctest::Approx(oracle::rbo(r1, {"a"}, 0.95, 1000) /
                                              oracle::rbo({"a"}, {"a"}, 0.95, 1000))
                                  .epsilon(1e-12));
  CHECK(row.cells[9].topics_excluded == 1);

  // Reflexivity: a run is never better than itself.
  for (const auto& cell : row.cells) CHECK_FALSE(cell.better_than_baseline);
}

TEST_CASE("baseline flags") {
  const Qrels qrels = small_qrels();
  Run good{"good", {make_list({"a", "d", "b"}, "1", "good"), make_list({"f"}, "2", "good")}};
  Run bad{"bad", {make_list({"c", "e", "x"}, "1", "bad"), make_list({"z"}, "2", "bad")}};
  auto table = evaluate_runs(std::vector<Run>{bad, good}, qrels, EvalOptions{}, "bad");
  const auto& g = table.rows[1].cells;
  CHECK(g[0].better_than_baseline);
  CHECK(g[9].better_than_baseline);
  // Harmful compatibility: lower wins.
  CHECK(g[8].value < table.rows[0].cells[8].value);
  CHECK(g[8].better_than_baseline);
  for (const auto& cell : table.rows[0].cells) CHECK_FALSE(cell.better_than_baseline);

  CHECK_THROWS_AS(evaluate_runs(std::vector<Run>{good}, qrels, EvalOptions{}, "nope"),
                  ValidationError);
  auto unflagged = evaluate_runs(std::vector<Run>{bad, good}, qrels, EvalOptions{}, "");
  for (const auto& row : unflagged.rows)
    for (const auto& cell : row.cells) CHECK_FALSE(cell.better_than_baseline);

  std::ostringstream text, tsv;
  write_table_text(text, table);
  write_table_tsv(tsv, table);
  CHECK(text.str().find('*') != std::string::npos);
  const std::string t = tsv.str();
  CHECK(t.rfind("run_tag\tspec_id\tvalue\tbetter_than_baseline\n", 0) == 0);
  CHECK(std::count(t.begin(), t.end(), '\n') == 1 + 2 * 10);
  CHECK(t.find("good\thelpful\t1.000000\t1\n") != std::string::npos);
}

TEST_CASE("group_runs keeps first-appearance order") {
  std::vector<RankedList> lists{make_list({"a"}, "1", "y"), make_list({"a"}, "1", "x"),
                                make_list({"a"}, "2", "y")};
  auto runs = group_runs(lists);
  REQUIRE(runs.size() == 2);
  CHECK(runs[0].tag == "y");
  CHECK(runs[0].lists.size() == 2);
  CHECK(runs[1].tag == "x");
}
