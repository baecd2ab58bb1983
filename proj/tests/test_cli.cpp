#include <sys/wait.h>

#include <chrono>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "bitbranch/commands.hpp"
#include "bitbranch/parser.hpp"
#include "doctest.h"
#include "json.hpp"

using namespace bitbranch;
namespace fs = std::filesystem;

namespace {

const std::string kSource = BITBRANCH_SOURCE_DIR;

std::string slurp(const fs::path& p) {
  std::ifstream in(p);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

struct TempDir {
  fs::path path;
  TempDir() {
    path = fs::temp_directory_path() /
           ("bitbranch-test-" + std::to_string(std::chrono::steady_clock::now().time_since_epoch().count()));
    fs::create_directories(path);
  }
  ~TempDir() { fs::remove_all(path); }
  fs::path write(const std::string& name, const std::string& text) const {
    std::ofstream(path / name) << text;
    return path / name;
  }
};

int exe(const std::string& args) {
  std::string cmd = std::string(BITBRANCH_EXE) + " " + args + " >/dev/null 2>&1";
  int status = std::system(cmd.c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

int count_bwb(const std::string& text) {
  int n = 0;
  for (std::size_t pos = 0; (pos = text.find("// bwb: ", pos)) != std::string::npos; ++pos) ++n;
  return n;
}

}  // namespace

TEST_CASE("transform reproduces the golden file") {
  TempDir tmp;
  std::ostringstream out, err;
  fs::path dst = tmp.path / "and_loop.bwb.c";
  fs::path stats = tmp.path / "and_loop.json";
  int code = cmd_transform(kSource + "/tests/golden/and_loop.in.c", dst.string(), {},
                           stats.string(), out, err);
  CHECK(code == kExitOk);
  std::string text = slurp(dst);
  CHECK(text == slurp(kSource + "/tests/golden/and_loop.c"));

  auto j = nlohmann::json::parse(slurp(stats));
  int total = 0;
  for (auto& [key, value] : j.items())
    if (key.rfind("fired.", 0) == 0) total += value.get<int>();
  CHECK(total == count_bwb(text));
  CHECK(j["rules_fired"] == total);
  CHECK(j["fired.W-And-Pos"] == 1);
}

TEST_CASE("golden AST comparison") {
  ParseOptions o;
  o.allow_reserved = true;
  Program golden = parse(slurp(kSource + "/tests/golden/and_loop.c"), o);
  Program input = parse(slurp(kSource + "/tests/golden/and_loop.in.c"));
  auto [transformed, rep] = transform_program(input, TransformConfig{});
  CHECK(struct_eq(canonicalize_generated_names(golden), canonicalize_generated_names(transformed)));

  const While* loop = transformed.body[2].as<While>();
  REQUIRE(loop);
  const If* g = loop->body[1].as<If>();
  REQUIRE(g);
  CHECK(print_expr(g->cond) == "x >= 0 && a >= 0");
  CHECK(struct_eq(g->then_body[1], assign("x", nondet())));
  CHECK(print_expr(g->then_body[2].as<Assume>()->cond).find("x <= a") != std::string::npos);
}

TEST_CASE("transform with rewrite-only strategy") {
  TempDir tmp;
  fs::path src = tmp.write("t.c", "int x; int a; x = x & a;");
  TransformFlags f;
  f.strategy = Strategy::RewriteOnly;
  std::ostringstream out, err;
  CHECK(cmd_transform(src.string(), "-", f, "", out, err) == kExitOk);
  CHECK(out.str().find("x = x == 0 ? 0 :") != std::string::npos);
  CHECK(out.str().find("if (") == std::string::npos);
  CHECK(count_bwb(out.str()) == 7);
}

TEST_CASE("transform errors") {
  TempDir tmp;
  fs::path bad = tmp.write("bad.c", "int x = 1;\nx = x & ;\n");
  std::ostringstream out, err;
  CHECK(cmd_transform(bad.string(), "-", {}, "", out, err) == kExitFailure);
  CHECK(err.str().find("bad.c:2:9: error:") != std::string::npos);

  std::ostringstream out2, err2;
  CHECK(cmd_transform((tmp.path / "missing.c").string(), "-", {}, "", out2, err2) == kExitFailure);
  CHECK(err2.str().find("cannot read") != std::string::npos);
}

TEST_CASE("check-rules") {
  std::ostringstream out, err;
  CheckFlags f;
  f.widths = {4};
  auto t0 = std::chrono::steady_clock::now();
  CHECK(cmd_check_rules(f, out, err) == kExitOk);
  CHECK(std::chrono::steady_clock::now() - t0 < std::chrono::seconds(5));
  CHECK(out.str().find("STATUS=fail") == std::string::npos);
  CHECK(out.str().find("RULE=W-XOr-Mix VARIANT=3 RELOP=>= W=4 STATUS=pass") != std::string::npos);

  std::ostringstream mout, merr;
  CheckFlags m;
  m.widths = {8};
  m.mutation = "R-And-LBS:drop-guard";
  CHECK(cmd_check_rules(m, mout, merr) != kExitOk);
  CHECK(mout.str().find("RULE=R-And-LBS VARIANT=0 RELOP=none W=8 STATUS=fail CEX e1=-127 e2=1") !=
        std::string::npos);
}

TEST_CASE("replay") {
  TempDir tmp;
  fs::path src = tmp.write("and_loop.c", slurp(kSource + "/corpus/and_loop.c"));
  ReplayFlags f;
  std::ostringstream out, err;
  CHECK(cmd_replay(src.string(), f, out, err) == kExitOk);
  CHECK(out.str().find("1000/1000 seeds ok") != std::string::npos);

  ReplayFlags tight;
  tight.transform.mutation = "W-And-Pos:strict";
  std::ostringstream tout, terr;
  CHECK(cmd_replay(src.string(), tight, tout, terr) == kExitViolation);
  CHECK(terr.str().find("violation: seed ") != std::string::npos);

  ReplayFlags none;
  none.seeds = 0;
  std::ostringstream nout, nerr;
  CHECK(cmd_replay(src.string(), none, nout, nerr) == kExitOk);
  CHECK(nerr.str().find("warning") != std::string::npos);

  ReplayFlags dump;
  dump.seeds = 1;
  dump.dump_trace = true;
  std::ostringstream dout, derr;
  CHECK(cmd_replay(src.string(), dump, dout, derr) == kExitOk);
  CHECK(dout.str().find("# original, seed 0") != std::string::npos);
}

TEST_CASE("corpus") {
  ReplayFlags f;
  f.seeds = 50;
  CorpusReport r = run_corpus(kSource + "/corpus", f);
  CHECK(r.entries.size() >= 20);
  CHECK(r.exit_code() == kExitOk);
  CHECK(r.total_fired().size() >= 10);
  CHECK(std::is_sorted(r.entries.begin(), r.entries.end(),
                       [](const CorpusEntry& a, const CorpusEntry& b) { return a.file < b.file; }));
  std::string lines = r.json_lines();
  CHECK(static_cast<std::size_t>(std::count(lines.begin(), lines.end(), '\n')) ==
        r.entries.size() + 1);
  auto totals = nlohmann::json::parse(lines.substr(lines.rfind('\n', lines.size() - 2) + 1));
  CHECK(totals["record"] == "totals");
  CHECK(totals["seeds_run"] == r.total_seeds());

  TempDir empty;
  std::ostringstream eout, eerr;
  CHECK(cmd_corpus(empty.path.string(), f, "", eout, eerr) == kExitOk);
  CHECK(eerr.str().find("warning") != std::string::npos);

  TempDir mixed;
  mixed.write("a.c", "int x = *; x = x | 1;");
  mixed.write("b.c", "int x = ;");
  mixed.write("c.c", "int y = *; y = ~y;");
  std::ostringstream mout, merr;
  fs::path sidecar = mixed.path / "report.jsonl";
  CHECK(cmd_corpus(mixed.path.string(), f, sidecar.string(), mout, merr) == kExitFailure);
  CorpusReport mr = run_corpus(mixed.path.string(), f);
  REQUIRE(mr.entries.size() == 3);
  CHECK(mr.entries[0].status == "ok");
  CHECK(mr.entries[1].status == "parse-error");
  CHECK(mr.entries[2].status == "ok");
  CHECK(slurp(sidecar).find("\"status\":\"parse-error\"") != std::string::npos);
}

TEST_CASE("executable exit codes") {
  TempDir tmp;
  fs::path ok = tmp.write("ok.c", "int x = *; x = x ^ 3;");
  fs::path bad = tmp.write("bad.c", "int x; x = x &;");
  CHECK(exe("transform " + ok.string()) == 0);
  CHECK(exe("transform " + bad.string()) == 1);
  CHECK(exe("transform " + ok.string() + " --strategy nope") == 1);
  CHECK(exe("transform " + ok.string() + " --mutate Nope:strict") == 1);
  CHECK(exe("replay " + ok.string() + " --seeds 20") == 0);
  CHECK(exe("replay " + ok.string() + " --seeds 0") == 0);
  CHECK(exe("replay " + kSource + "/corpus/and_loop.c --mutate W-And-Pos:strict") == 3);
  CHECK(exe("check-rules --widths 4") == 0);
  CHECK(exe("check-rules --widths 8 --mutate R-And-LBS:drop-guard") == 1);
  CHECK(exe("catalog --dump") == 0);
  CHECK(exe("corpus " + tmp.path.string() + " --seeds 5") == 1);
}
