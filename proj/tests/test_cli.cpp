#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <filesystem>
#include <fstream>
#include <sstream>

#include "doctest.h"
#include "evoflow/cli.hpp"
#include "evoflow/fasta.hpp"
#include "evoflow/rng.hpp"
#include "evoflow/trainer.hpp"

using namespace evoflow;
namespace fs = std::filesystem;

namespace {

struct TempDir {
  fs::path dir;
  TempDir() {
    dir = fs::temp_directory_path() / ("evoflow_cli_" + std::to_string(Rng(uint64_t(
                                           std::chrono::steady_clock::now().time_since_epoch().count()))
                                                            .next_u64()));
    fs::create_directories(dir);
  }
  ~TempDir() { fs::remove_all(dir); }
  std::string path(const std::string& name) const { return (dir / name).string(); }
};

void write_file(const std::string& path, const std::string& content) {
  std::ofstream out(path);
  out << content;
}

std::string read_file(const std::string& path) {
  std::ifstream in(path);
  return std::string((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
}

// A tiny homolog cluster over the full amino alphabet: point mutants of a
// common template.
std::string toy_cluster_fasta(int members, uint64_t seed) {
  const std::string base = "ARNDCQEGHILKMFPSTWYVARNDCQEGHILK";
  Rng rng(seed);
  std::ostringstream out;
  for (int n = 0; n < members; ++n) {
    std::string s = base;
    for (int m = 0; m < 3; ++m)
      s[size_t(rng.uniform_int(int(s.size())))] = "ARNDCQEGHILKMFPSTWYV"[rng.uniform_int(20)];
    out << ">m" << n << "\n" << s << "\n";
  }
  return out.str();
}

}  // namespace

TEST_CASE("ingest validates and summarizes") {
  TempDir tmp;
  const std::string fasta = tmp.path("in.fasta");

  SUBCASE("valid file") {
    write_file(fasta, ">a\nARND\n>b\nARNDC\n>c\nARN\n");
    CHECK(run_command({"ingest", "--input", fasta}) == 0);
  }
  SUBCASE("unknown symbol is rejected with nonzero status") {
    write_file(fasta, ">a\nARND\n>bad\nARzD\n");
    CHECK(run_command({"ingest", "--input", fasta}) != 0);
  }
  SUBCASE("empty file is rejected") {
    write_file(fasta, "");
    CHECK(run_command({"ingest", "--input", fasta}) != 0);
  }
  SUBCASE("missing file is rejected") {
    CHECK(run_command({"ingest", "--input", tmp.path("missing.fasta")}) != 0);
  }
  SUBCASE("aligned mode accepts gaps") {
    write_file(fasta, ">a\nAR-ND\n>b\nARN-D\n>c\nARND-\n");
    CHECK(run_command({"ingest", "--input", fasta, "--aligned"}) == 0);
    CHECK(run_command({"ingest", "--input", fasta}) != 0);
  }
}

TEST_CASE("train / sample round trip through files") {
  TempDir tmp;
  const std::string fasta = tmp.path("cluster.fasta");
  write_file(fasta, toy_cluster_fasta(6, 7));
  const std::string ckpt = tmp.path("model.ckpt");
  const std::string trace = tmp.path("loss.csv");

  const std::vector<std::string> train_args{
      "train",        "--input",  fasta,   "--output", ckpt,     "--loss-trace", trace,
      "--seed",       "3",        "--epochs", "2",     "--batch", "4",
      "--encoder",    "window_mlp", "--window", "5",   "--embed-dim", "16",
      "--fractions",  "0.7,0.15,0.15"};
  REQUIRE(run_command(train_args) == 0);
  CHECK(fs::exists(ckpt));
  CHECK(fs::exists(trace));

  SUBCASE("checkpoint reloads bit-identically") {
    const Checkpoint a = load_checkpoint(ckpt);
    const std::string ckpt2 = tmp.path("model2.ckpt");
    save_checkpoint(a, ckpt2);
    CHECK(read_file(ckpt) == read_file(ckpt2));
  }
  SUBCASE("same seed reproduces the loss trace file") {
    const std::string trace2 = tmp.path("loss2.csv");
    const std::string ckpt2 = tmp.path("model2.ckpt");
    auto args = train_args;
    args[4] = ckpt2;
    args[6] = trace2;
    REQUIRE(run_command(args) == 0);
    CHECK(read_file(trace) == read_file(trace2));
  }
  SUBCASE("missing input fails cleanly") {
    CHECK(run_command({"train", "--input", tmp.path("nope.fasta"), "--output", ckpt}) != 0);
  }
  SUBCASE("sampling with clock zero returns the inputs") {
    const std::string inputs = tmp.path("x0.fasta");
    write_file(inputs, ">x0\nARNDCQEGHILKMFPSTWYVARNDCQEGHILK\n");
    const std::string out = tmp.path("out.fasta");
    REQUIRE(run_command({"sample", "--checkpoint", ckpt, "--inputs", inputs, "--output", out,
                         "--clock-norm", "0", "--seed", "5"}) == 0);
    const auto recs = read_fasta_file(out);
    REQUIRE(recs.size() == 1);
    CHECK(recs[0].seq == "ARNDCQEGHILKMFPSTWYVARNDCQEGHILK");
  }
  SUBCASE("sampling is reproducible and writes trajectories") {
    const std::string inputs = tmp.path("x0.fasta");
    write_file(inputs, ">x0\nARNDCQEGHILKMFPSTWYVARNDCQEGHILK\n");
    const std::string o1 = tmp.path("s1.fasta"), o2 = tmp.path("s2.fasta");
    const std::string t1 = tmp.path("t1.log");
    REQUIRE(run_command({"sample", "--checkpoint", ckpt, "--inputs", inputs, "--output", o1,
                         "--trajectories", t1, "--seed", "9", "--num", "2"}) == 0);
    REQUIRE(run_command({"sample", "--checkpoint", ckpt, "--inputs", inputs, "--output", o2,
                         "--seed", "9", "--num", "2"}) == 0);
    CHECK(read_file(o1) == read_file(o2));
    CHECK(read_file(t1).find("# trajectory") != std::string::npos);
    const auto recs = read_fasta_file(o1);
    CHECK(recs.size() == 2);
  }
  SUBCASE("corrupt checkpoint fails") {
    std::string bytes = read_file(ckpt);
    bytes[bytes.size() / 2] = char(bytes[bytes.size() / 2] ^ 0x7);
    const std::string bad = tmp.path("bad.ckpt");
    write_file(bad, bytes);
    const std::string inputs = tmp.path("x0.fasta");
    write_file(inputs, ">x0\nARND\n");
    CHECK(run_command({"sample", "--checkpoint", bad, "--inputs", inputs, "--output",
                       tmp.path("o.fasta")}) != 0);
  }
}

TEST_CASE("baselines command") {
  TempDir tmp;
  const std::string train = tmp.path("train.fasta");
  write_file(train, toy_cluster_fasta(8, 21));
  const std::string inputs = tmp.path("x0.fasta");
  write_file(inputs, ">x0\nARNDCQEGHILKMFPSTWYVARNDCQEGHILK\n");

  for (const std::string method :
       {"random_pairing", "profile_infill", "profile_infill_forced", "random_mutation"}) {
    const std::string out = tmp.path("out_" + method + ".fasta");
    REQUIRE(run_command({"baselines", "--method", method, "--train", train, "--inputs", inputs,
                         "--output", out, "--expected-edits", "3", "--seed", "11"}) == 0);
    const auto recs = read_fasta_file(out);
    REQUIRE(recs.size() == 1);
    CHECK(!recs[0].seq.empty());
  }
  CHECK(run_command({"baselines", "--method", "bogus", "--train", train, "--inputs", inputs}) !=
        0);
}

TEST_CASE("eval command produces reports and identity rows") {
  TempDir tmp;
  const std::string holdout = tmp.path("holdout.fasta");
  write_file(holdout, toy_cluster_fasta(6, 31));
  const std::string inputs = tmp.path("x0.fasta");
  write_file(inputs, toy_cluster_fasta(3, 32));

  const std::string prefix = tmp.path("eval");
  REQUIRE(run_command({"eval", "--generated", "self=" + holdout, "--generated",
                       "inputs_copy=" + inputs, "--holdout", holdout, "--inputs", inputs,
                       "--output-prefix", prefix}) == 0);
  const std::string comparison = read_file(prefix + ".comparison.csv");
  CHECK(comparison.find("method,mmd2") != std::string::npos);
  CHECK(comparison.find("self,") != std::string::npos);

  // generated == holdout: mmd2 and KL are zero.
  std::istringstream cs(comparison);
  std::string line;
  bool found = false;
  while (std::getline(cs, line)) {
    if (line.rfind("self,", 0) == 0) {
      found = true;
      std::istringstream ls(line);
      std::string cell;
      std::getline(ls, cell, ',');  // method
      std::getline(ls, cell, ',');  // mmd2
      CHECK(std::stod(cell) == 0.0);
      std::getline(ls, cell, ',');  // kl to holdout
      CHECK(std::stod(cell) == doctest::Approx(0.0).epsilon(1e-12));
    }
    if (line.rfind("inputs_copy,", 0) == 0) {
      std::istringstream ls(line);
      std::string cell;
      for (int i = 0; i < 6; ++i) std::getline(ls, cell, ',');  // mean_lev_to_x0
      CHECK(std::stod(cell) == 0.0);
    }
  }
  CHECK(found);
  CHECK(fs::exists(prefix + ".self.txt"));
}

TEST_CASE("config file supplies defaults and flags override") {
  TempDir tmp;
  const std::string fasta = tmp.path("in.fasta");
  write_file(fasta, ">a\nARND\n>b\nARNDC\n>c\nARN\n");
  const std::string cfg = tmp.path("run.cfg");
  write_file(cfg, "schema-version=1\n[ingest]\ninput=\"" + fasta + "\"\n");
  CHECK(run_command({"--config", cfg, "ingest"}) == 0);

  // Command-line flags win over config values.
  const std::string other = tmp.path("other.fasta");
  write_file(other, ">z\nWWWW\n");
  CHECK(run_command({"--config", cfg, "ingest", "--input", other}) == 0);

  // Bad schema version is rejected.
  const std::string cfg2 = tmp.path("run2.cfg");
  write_file(cfg2, "schema-version=9\n[ingest]\ninput=\"" + fasta + "\"\n");
  CHECK(run_command({"--config", cfg2, "ingest"}) != 0);
}

TEST_CASE("bench-det in oracle mode emits schema-complete tables") {
  TempDir tmp;
  const std::string prefix = tmp.path("bench");
  REQUIRE(run_command({"bench-det", "--oracle", "--eval-cases", "12", "--len-min", "30",
                       "--len-max", "50", "--clocks", "0.5,1.0", "--bootstrap", "50",
                       "--output-prefix", prefix, "--seed", "2"}) == 0);
  const std::string table = read_file(prefix + ".table.csv");
  CHECK(table.find("class,clock,precision,recall,f1,ci_low,ci_high") != std::string::npos);
  int rows = 0;
  std::istringstream ts(table);
  std::string line;
  while (std::getline(ts, line))
    if (!line.empty() && line[0] != '#' && line.find("class,") != 0) ++rows;
  CHECK(rows == 8);  // 4 classes x 2 clocks
  const std::string report = read_file(prefix + ".report.txt");
  CHECK(report.find("confusion") != std::string::npos);
}
