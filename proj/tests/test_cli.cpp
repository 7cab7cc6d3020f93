#include <doctest.h>

#include <cstdlib>
#include <fstream>
#include <sstream>

#include "helpers.hpp"
#include "roar/io.hpp"

using testutil::TempDir;

namespace {

int run_cli(const std::string& args) {
  std::string cmd = std::string(ROAR_CLI_PATH) + " " + args + " >/dev/null 2>&1";
  int status = std::system(cmd.c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

std::string first_lines(const std::filesystem::path& p, int n) {
  std::ifstream in(p);
  std::string out, line;
  for (int i = 0; i < n && std::getline(in, line); ++i) out += line + "\n";
  return out;
}

}  // namespace

TEST_CASE("cli pipeline: gen, gt, build, search, report golden schemas") {
  TempDir dir;
  std::string d = dir.path().string();

  REQUIRE(run_cli("gen --seed 5 --n-base 500 --n-ood 600 --n-id 50 --dim 8"
                  " --out-base " + d + "/base.fbin --out-ood " + d + "/ood.fbin"
                  " --out-id " + d + "/id.fbin") == 0);
  REQUIRE(run_cli("gt --base " + d + "/base.fbin --queries " + d + "/ood.fbin --k 8 --out " +
                  d + "/gt.bin") == 0);
  REQUIRE(run_cli("build --base " + d + "/base.fbin --queries " + d + "/ood.fbin --gt " + d +
                  "/gt.bin --nq 8 --m 4 --l 24 --out " + d + "/x.roar") == 0);

  // eval ground truth for recall
  REQUIRE(run_cli("gt --base " + d + "/base.fbin --queries " + d + "/id.fbin --k 10 --out " +
                  d + "/eval.bin") == 0);
  REQUIRE(run_cli("search --index " + d + "/x.roar --base " + d + "/base.fbin --queries " + d +
                  "/id.fbin --gt " + d + "/eval.bin --k 10 --l-sweep 10,20,50 --reps 2 --out " +
                  d + "/sweep.csv") == 0);

  std::string head = first_lines(dir.file("sweep.csv"), 2);
  CHECK(head == "# schema=roar-search-v1\nL,recall,qps,mean_hops,mean_visited\n");
  {
    std::ifstream in(dir.file("sweep.csv"));
    std::string line;
    int rows = 0;
    while (std::getline(in, line)) ++rows;
    CHECK(rows == 2 + 3);  // schema + header + one row per sweep value
  }

  REQUIRE(run_cli("report --inputs " + d + "/sweep.csv --labels roar --out " + d +
                  "/report.csv") == 0);
  CHECK(first_lines(dir.file("report.csv"), 2) ==
        "# schema=roar-report-v1\nlabel,L,recall,qps,mean_hops,mean_visited\n");
}

TEST_CASE("cli gen is bit-identical for a fixed seed") {
  TempDir dir;
  std::string d = dir.path().string();
  REQUIRE(run_cli("gen --seed 9 --threads 1 --n-base 200 --n-ood 100 --n-id 50 --dim 8 "
                  "--out-base " + d + "/a.fbin") == 0);
  REQUIRE(run_cli("gen --seed 9 --threads 1 --n-base 200 --n-ood 100 --n-id 50 --dim 8 "
                  "--out-base " + d + "/b.fbin") == 0);
  CHECK(testutil::slurp(dir.file("a.fbin")) == testutil::slurp(dir.file("b.fbin")));
}

TEST_CASE("cli error paths use user-error exit codes") {
  TempDir dir;
  std::string d = dir.path().string();
  CHECK(run_cli("frobnicate") == 1);                       // unknown subcommand
  CHECK(run_cli("search --bogus-flag 1") == 1);            // unknown flag
  CHECK(run_cli("gt --base " + d + "/missing.fbin --queries " + d +
                "/missing.fbin --k 5 --out " + d + "/gt.bin") == 1);  // missing file
}

TEST_CASE("cli analyze emits json and csv") {
  TempDir dir;
  std::string d = dir.path().string();
  REQUIRE(run_cli("gen --seed 6 --n-base 400 --n-ood 50 --n-id 50 --dim 8"
                  " --out-base " + d + "/base.fbin --out-ood " + d + "/ood.fbin") == 0);
  REQUIRE(run_cli("analyze --what mahalanobis --base " + d + "/base.fbin --queries " + d +
                  "/ood.fbin --out-csv " + d + "/m.csv --out-json " + d + "/m.json") == 0);
  CHECK(first_lines(dir.file("m.csv"), 2) == "# schema=roar-mahalanobis-v1\nquery,distance\n");
  std::string js = first_lines(dir.file("m.json"), 1);
  CHECK(js.find("{") != std::string::npos);

  REQUIRE(run_cli("analyze --what w2 --base " + d + "/base.fbin --second " + d +
                  "/ood.fbin --epsilon 0.5 --out-json " + d + "/w2.json") == 0);
  CHECK(first_lines(dir.file("w2.json"), 1).find("{") != std::string::npos);
}

TEST_CASE("cli config file loses to explicit flags") {
  TempDir dir;
  std::string d = dir.path().string();
  {
    std::ofstream cfg(dir.file("roar.cfg"));
    cfg << "gen.n-base=100\ngen.dim=8\n";
  }
  // config supplies n-base; flag overrides dim
  REQUIRE(run_cli("--config " + d + "/roar.cfg gen --seed 3 --dim 6 --n-ood 10 --n-id 10 "
                  "--out-base " + d + "/c.fbin") == 0);
  roar::VectorSet set = roar::read_fbin(dir.file("c.fbin"));
  CHECK(set.count == 100);
  CHECK(set.dim == 6);
}
