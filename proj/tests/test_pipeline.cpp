#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cstdlib>
#include <sstream>

#include <sys/wait.h>

#include "hmrank/config.hpp"
#include "hmrank/error.hpp"
#include "hmrank/pipeline.hpp"
#include "hmrank/run_io.hpp"
#include "test_util.hpp"

using namespace hmrank;
using hmrank::testing::read_file;
using hmrank::testing::TempDir;

namespace {

const std::filesystem::path kFixture = HMRANK_FIXTURE_DIR;

PipelineConfig fixture_config(const std::filesystem::path& out) {
  auto kv = KeyValueConfig::load(kFixture / "pipeline.conf");
  kv.set("output_dir", out.string());
  return PipelineConfig::from(kv);
}

int run_cli(const std::string& args, const std::filesystem::path& capture) {
  const std::string cmd =
      std::string("\"") + HMRANK_CLI + "\" " + args + " >\"" + capture.string() + "\" 2>&1";
  const int status = std::system(cmd.c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

}  // namespace

TEST_CASE("config parsing") {
  std::istringstream in(
      "# comment\n"
      "corpus = docs.jsonl\n"
      "k1 = 1.2\n"
      "hash_seed = 0x10\n"
      "run = a bm25\n"
      "run = b bm25,semantic 30\n"
      "baseline = a\n");
  auto kv = KeyValueConfig::parse(in, "mem", "/base");
  auto c = PipelineConfig::from(kv);
  CHECK(c.corpus == std::filesystem::path("/base/docs.jsonl"));
  CHECK(c.bm25.k1 == 1.2);
  CHECK(c.bm25.b == 0.4);
  CHECK(c.hash_seed == 16);
  REQUIRE(c.runs.size() == 2);
  CHECK(c.runs[1].rrf_k == 30.0);
  CHECK_NOTHROW(c.validate_runs());

  auto bad = [](const std::string& text) {
    std::istringstream s(text);
    return PipelineConfig::from(KeyValueConfig::parse(s, "mem", "."));
  };
  CHECK_THROWS_AS(bad("nonsense = 1\n"), ValidationError);
  CHECK_THROWS_AS(bad("k1 = -1\n"), ValidationError);
  CHECK_THROWS_AS(bad("b = 2\n"), ValidationError);
  CHECK_THROWS_AS(bad("rbo_p = 1\n"), ValidationError);
  CHECK_THROWS_AS(bad("depth = 0\n"), ValidationError);
  CHECK_THROWS_AS(bad("usefulness_threshold = 3\n"), ValidationError);
  CHECK_THROWS_AS(bad("no equals sign\n"), ParseError);
  CHECK_THROWS_AS(bad("baseline = ghost\n").validate_runs(), ValidationError);
  CHECK_THROWS_AS(bad("run = a bm25\nrun = a semantic\n").validate_runs(), ValidationError);

  // Defaults: the six standard runs against upv_bm25.
  auto d = bad("");
  CHECK(d.runs == standard_run_configs());
  CHECK(d.baseline == "upv_bm25");
  CHECK(d.depth == 1000);
  CHECK(d.rrf_k == 60.0);
}

TEST_CASE("run_all on the fixture") {
  TempDir a("pipe_a"), b("pipe_b");
  auto ra = run_all(fixture_config(a.path()));
  auto rb = run_all(fixture_config(b.path()));

  REQUIRE(ra.run_files.size() == 6);
  for (std::size_t i = 0; i < 6; ++i) {
    CHECK(ra.run_files[i].filename() == rb.run_files[i].filename());
    CHECK(read_file(ra.run_files[i]) == read_file(rb.run_files[i]));
  }
  CHECK(read_file(ra.eval_tsv) == read_file(rb.eval_tsv));
  CHECK(read_file(a / "index.txt") == read_file(b / "index.txt"));

  REQUIRE(ra.table.rows.size() == 6);
  CHECK(ra.table.columns.size() == 10);
  for (const auto& cell : ra.table.rows[0].cells) CHECK_FALSE(cell.better_than_baseline);

  // Each run file holds five topics, tagged with its run name.
  for (const auto& f : ra.run_files) {
    auto lists = read_run(f);
    CHECK(lists.size() == 5);
    for (const auto& l : lists) CHECK(l.run_tag == f.stem().string());
  }

  // The manifest reproduces the run when fed back as a config.
  TempDir c("pipe_c");
  auto kv = KeyValueConfig::load(ra.manifest);
  kv.set("output_dir", c.path().string());
  auto rc = run_all(PipelineConfig::from(kv));
  for (std::size_t i = 0; i < 6; ++i) CHECK(read_file(ra.run_files[i]) == read_file(rc.run_files[i]));

  // Worker count does not change any output.
  TempDir w("pipe_w");
  auto cw = fixture_config(w.path());
  cw.workers = 4;
  auto rw = run_all(cw);
  for (std::size_t i = 0; i < 6; ++i) CHECK(read_file(ra.run_files[i]) == read_file(rw.run_files[i]));
}

TEST_CASE("run_all rejects bad inputs before running") {
  TempDir t("pipe_bad");
  auto c = fixture_config(t.path());
  c.corpus = t / "missing.jsonl";
  CHECK_THROWS_AS(run_all(c), ValidationError);
  CHECK_FALSE(std::filesystem::exists(t / "runs"));
}

TEST_CASE("cli") {
  TempDir t("cli");
  const auto log = t / "log.txt";
  auto corpus = t.write("c.jsonl",
                        "{\"doc_id\":\"a\",\"url\":\"u\",\"text\":\"honey cough\"}\n"
                        "{\"doc_id\":\"b\",\"url\":\"u\",\"text\":\"zinc\"}\n"
                        "{\"doc_id\":\"c\",\"url\":\"u\",\"text\":\"honey honey\"}\n");
  CHECK(run_cli("index --corpus \"" + corpus.string() + "\" -o \"" + (t / "i.txt").string() + "\"",
                log) == 0);
  CHECK(read_file(log).find("3 documents") != std::string::npos);
  CHECK(std::filesystem::exists(t / "i.txt"));

  CHECK(run_cli("index --corpus \"" + (t / "none.jsonl").string() + "\" -o \"" +
                    (t / "j.txt").string() + "\"",
                log) == 1);
  CHECK(run_cli("index --k1 -3 --corpus \"" + corpus.string() + "\"", log) == 1);
  CHECK(run_cli("no-such-command", log) == 1);

  const std::string conf = (kFixture / "pipeline.conf").string();
  const std::string out = (t / "all").string();
  CHECK(run_cli("run-all --config \"" + conf + "\" --output-dir \"" + out + "\"", log) == 0);
  CHECK(std::filesystem::exists(t / "all" / "runs" / "upv_fuse_9.run"));
  CHECK(std::filesystem::exists(t / "all" / "eval.tsv"));

  // Separate steps reproduce the run-all files.
  const auto bm = t / "bm.run", sem = t / "sem.run", fused = t / "fused.run";
  const std::string common = " --config \"" + conf + "\" --output-dir \"" + out + "\"";
  CHECK(run_cli("search" + common + " -o \"" + bm.string() + "\"", log) == 0);
  CHECK(read_file(bm) == read_file(t / "all" / "runs" / "upv_bm25.run"));
  CHECK(run_cli("rerank --method semantic --tag semantic" + common + " -o \"" + sem.string() + "\"",
                log) == 0);
  CHECK(run_cli("fuse --tag upv_fuse_2 -i \"" + bm.string() + "\" \"" + sem.string() + "\" -o \"" +
                    fused.string() + "\"",
                log) == 0);
  CHECK(read_file(fused) == read_file(t / "all" / "runs" / "upv_fuse_2.run"));

  CHECK(run_cli("eval" + common + " --baseline upv_fuse_2 -i \"" + bm.string() + "\" \"" +
                    fused.string() + "\"",
                log) == 0);
  CHECK(read_file(log).find("upv_fuse_2") != std::string::npos);

  // Corrupt run file: parse failure is a validation error.
  auto broken = t.write("broken.run", "101 Q0 a 1 x tag\n");
  CHECK(run_cli("eval" + common + " -i \"" + broken.string() + "\"", log) == 1);
}
