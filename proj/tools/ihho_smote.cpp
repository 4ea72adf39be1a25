// Command-line front end: ihho_smote {cleanse,run,bench,metrics,inspect}.

#include <iostream>

#include "CLI11.hpp"
#include "ihho/cli.hpp"

namespace {

std::string join_methods(const std::vector<std::string>& m) {
  std::string s;
  for (const auto& x : m) s += (s.empty() ? "" : ",") + x;
  return s;
}

}  // namespace

int main(int argc, char** argv) {
  using namespace ihho;
  CLI::App app{"iHHO-SMOTe: DBSCAN minority cleansing and HHO-tuned SMOTE"};
  app.require_subcommand(1);
  app.fallthrough();

  std::string config_path, format = "json";
  std::optional<std::uint64_t> seed;
  cli::Options opt;
  app.add_option("--config", config_path, "config file ([section] key = value)")->check(CLI::ExistingFile);
  app.add_option("--seed", seed, "master seed (overrides the config)");
  app.add_option("--out", opt.out, "output directory");
  app.add_option("--format", format, "report format")->check(CLI::IsMember({"json", "csv"}));
  app.add_option("--threads", opt.threads, "worker threads")->check(CLI::PositiveNumber);
  app.add_flag("--full", opt.full, "do not subsample large datasets");
  app.add_option("--label", opt.label, "CSV label column (name or 0-based index; default last)");
  app.add_flag("--ordinal-nominal", opt.ordinal_nominal, "encode KEEL nominal inputs by declaration order");

  std::string input;
  auto* cleanse = app.add_subcommand("cleanse", "remove noisy/border minority rows");
  cleanse->add_option("input", input, "dataset (.csv or KEEL .dat)")->required();
  auto* run = app.add_subcommand("run", "full pipeline: cleanse, tune s, oversample, evaluate");
  run->add_option("input", input, "dataset (.csv or KEEL .dat)")->required();
  auto* bench = app.add_subcommand("bench", "compare resamplers over a dataset registry");
  bench->add_option("registry", input, "registry file")->required();
  bool before_after = false;
  std::string methods;
  std::optional<std::size_t> repeats;
  bench->add_flag("--before-after", before_after, "paired runs with and without cleansing");
  bench->add_option("--methods", methods, "comma-separated method list");
  bench->add_option("--repeats", repeats, "repeats per dataset")->check(CLI::PositiveNumber);
  auto* metrics = app.add_subcommand("metrics", "score a predictions CSV (truth,prediction[,score])");
  metrics->add_option("input", input, "predictions CSV")->required();
  std::string positive;
  metrics->add_option("--positive", positive, "positive class (default: rarer truth value)");
  auto* inspect = app.add_subcommand("inspect", "summarize a dataset");
  inspect->add_option("input", input, "dataset (.csv or KEEL .dat)")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : cli::kParseError;
  }

  return cli::guarded(std::cerr, [&] {
    if (!config_path.empty()) opt.config = parse_config(read_file(config_path));
    if (seed) opt.config.seed = *seed;
    if (!methods.empty()) {
      opt.config = parse_config("[bench]\nmethods = " + methods + "\n", opt.config);
    }
    if (repeats) opt.config.bench.repeats = *repeats;
    opt.format = format == "csv" ? cli::OutputFormat::Csv : cli::OutputFormat::Json;

    if (*cleanse) return cli::cmd_cleanse(input, opt);
    if (*run) return cli::cmd_run(input, opt);
    if (*bench) {
      std::cerr << "bench: methods " << join_methods(opt.config.bench.methods) << ", " << opt.config.bench.repeats
                << " repeats\n";
      return cli::cmd_bench(input, opt, before_after);
    }
    if (*metrics) return cli::cmd_metrics(input, positive, opt);
    return cli::cmd_inspect(input, opt);
  });
}
