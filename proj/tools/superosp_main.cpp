#include <CLI11.hpp>

#include <iostream>

#include "superosp/pipeline.hpp"

// superosp: construct orthosymplectic Lie superalgebras over finite
// supercommutative coefficient algebras and machine-check their derivation
// structure.

int main(int argc, char** argv) {
  CLI::App app{"exact orthosymplectic Lie superalgebra toolkit"};
  app.require_subcommand(1);

  std::string spec_path;
  std::string report_format = "json";
  superosp::CmdOptions opt;
  opt.max_dim = superosp::default_max_dim();

  auto add_common = [&](CLI::App* cmd) {
    cmd->add_option("spec", spec_path, "instance spec (JSON)")->required();
    cmd->add_option("--report", report_format, "json|text")
        ->check(CLI::IsMember({"json", "text"}));
    cmd->add_option("--seed", opt.seed, "seed for the randomized sweeps");
    cmd->add_option("--samples", opt.samples, "random samples per sweep");
    cmd->add_option("--max-dim", opt.max_dim,
                    "guardrail on dim L (env SUPEROSP_MAX_DIM)");
    cmd->add_flag("--force", opt.force, "ignore the dimension guardrail");
  };

  CLI::App* verify =
      app.add_subcommand("verify", "validate tables, forms and the bracket");
  CLI::App* derive =
      app.add_subcommand("derive", "full derivation-structure pipeline");
  CLI::App* jordan =
      app.add_subcommand("jordan", "Jordan superalgebra and module checks");
  CLI::App* dims = app.add_subcommand("dims", "dimension summary");
  for (CLI::App* c : {verify, derive, jordan, dims}) add_common(c);

  CLI11_PARSE(app, argc, argv);

  superosp::CmdResult res;
  try {
    if (app.got_subcommand(verify))
      res = superosp::cmd_verify(spec_path, opt);
    else if (app.got_subcommand(derive))
      res = superosp::cmd_derive(spec_path, opt);
    else if (app.got_subcommand(jordan))
      res = superosp::cmd_jordan(spec_path, opt);
    else
      res = superosp::cmd_dims(spec_path, opt);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }

  if (report_format == "text")
    std::cout << superosp::report_text(res.report);
  else
    std::cout << res.report.dump(2) << "\n";
  return res.exit_code;
}
