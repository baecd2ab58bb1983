#include <iostream>

#include "CLI11.hpp"
#include "bitbranch/commands.hpp"

using namespace bitbranch;

namespace {

void add_transform_options(CLI::App* app, TransformFlags& f, std::string& strategy) {
  app->add_option("--width", f.width, "Integer width in bits")->check(CLI::Range(2, 64));
  app->add_option("--strategy", strategy,
                  "weaken-first | rewrite-first | rewrite-only | weaken-only");
  app->add_flag("--no-normalize", [&f](std::int64_t) { f.normalize = false; },
                "Skip temporary hoisting");
  app->add_option("--mutate", f.mutation, "Use a mutated catalog (<row>:<kind>)");
}

void add_replay_options(CLI::App* app, ReplayFlags& f) {
  app->add_option("--seed", f.seed, "First replay seed");
  app->add_option("--seeds", f.seeds, "Number of sequential seeds");
  app->add_option("--budget", f.budget, "Loop-iteration budget per run");
  app->add_flag("--dump-trace", f.dump_trace, "Print the first (or violating) trace pair");
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"bitbranch: guarded integer approximation of bitwise operations"};
  app.require_subcommand(1);

  TransformFlags tflags;
  ReplayFlags rflags;
  CheckFlags cflags;
  std::string strategy;
  std::string input;
  std::string output;
  std::string stats_json;
  std::string dir;
  bool dump_catalog = false;

  auto* transform = app.add_subcommand("transform", "Rewrite a mini-C program");
  transform->add_option("input", input, "Input file")->required();
  transform->add_option("-o,--output", output, "Output file (default: stdout)");
  transform->add_option("--stats-json", stats_json, "Write rule-firing counts as JSON");
  transform->add_flag("--dump-catalog", dump_catalog, "Print the catalog before transforming");
  add_transform_options(transform, tflags, strategy);

  auto* check = app.add_subcommand("check-rules", "Exhaustively check every catalog rule");
  check->add_option("--widths", cflags.widths, "Widths to enumerate")
      ->delimiter(',')
      ->check(CLI::Range(2, 32));
  check->add_option("--mutate", cflags.mutation, "Check a mutated catalog (<row>:<kind>)");
  check->add_option("--max-valuations", cflags.options.max_valuations,
                    "Skip checks with a larger valuation space");
  check->add_option("--threads", cflags.options.threads, "Worker threads (0 = all cores)");

  auto* replay = app.add_subcommand("replay", "Shadow-replay a program against its transform");
  replay->add_option("input", input, "Input file")->required();
  add_transform_options(replay, rflags.transform, strategy);
  add_replay_options(replay, rflags);

  auto* corpus = app.add_subcommand("corpus", "Transform and replay every .c file in a directory");
  corpus->add_option("dir", dir, "Corpus directory")->required();
  corpus->add_option("--stats-json", stats_json, "Write per-file records as JSON lines");
  add_transform_options(corpus, rflags.transform, strategy);
  add_replay_options(corpus, rflags);

  auto* cat = app.add_subcommand("catalog", "Print the expanded rule catalog");
  cat->add_flag("--dump", dump_catalog, "Print one rule per line (default)");
  add_transform_options(cat, tflags, strategy);

  CLI11_PARSE(app, argc, argv);

  if (!strategy.empty()) {
    auto s = parse_strategy(strategy);
    if (!s) {
      std::cerr << "unknown strategy '" << strategy << "'\n";
      return kExitFailure;
    }
    tflags.strategy = *s;
    rflags.transform.strategy = *s;
  }
  for (const TransformFlags* f : {&tflags, &rflags.transform}) {
    if (f->mutation.empty()) continue;
    try {
      f->make_catalog();
    } catch (const std::invalid_argument& e) {
      std::cerr << e.what() << '\n';
      return kExitFailure;
    }
  }

  if (*transform) {
    if (dump_catalog) cmd_catalog(tflags, std::cerr, std::cerr);
    return cmd_transform(input, output, tflags, stats_json, std::cout, std::cerr);
  }
  if (*check) return cmd_check_rules(cflags, std::cout, std::cerr);
  if (*replay) return cmd_replay(input, rflags, std::cout, std::cerr);
  if (*corpus) return cmd_corpus(dir, rflags, stats_json, std::cout, std::cerr);
  return cmd_catalog(tflags, std::cout, std::cerr);
}
