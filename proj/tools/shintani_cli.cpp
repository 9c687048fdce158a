#include <iostream>

#include "CLI11.hpp"
#include "shintani/cli.hpp"

int main(int argc, char** argv) {
  using namespace shintani::cli;
  SessionConfig cfg;
  CLI::App app{"Shintani descent, almost characters and character sheaves for finite groups with Frobenius"};
  app.require_subcommand(1);
  app.add_option("--spec", cfg.spec_path, "group spec (JSON)")->required();
  app.add_option("--format", cfg.format, "output format")->check(CLI::IsMember({"csv", "json"}));
  app.add_option("--field-cap", cfg.field_cap, "largest field degree D");
  app.add_option("--order-cap", cfg.order_cap, "largest group order");
  app.add_option("--cyclo-cap", cfg.cyclotomic_cap, "largest cyclotomic order");
  app.add_option("--mmax", cfg.m_max, "default scan bound");
  app.add_option("--cache-dir", cfg.cache_dir, "result cache (default: $SHINTANI_CACHE)");
  app.add_flag("--tiebreak-override", cfg.tiebreak_override, "pick the last extension character instead of the first");

  CommandRequest req;
  auto param = [&](CLI::App* sub, const std::string& name, const std::string& help) {
    sub->add_option_function<std::string>("--" + name, [&req, name](const std::string& v) { req.params[name] = v; }, help);
  };
  app.add_subcommand("classes", "twisted classes and the orbit space R_{id,F}");
  param(app.add_subcommand("irreps", "irreducible characters of all inner forms at level m"), "m", "level");
  auto* sh = app.add_subcommand("shintani", "Shintani basis Sh_m");
  param(sh, "m", "level");
  sh->get_option("--m")->required();
  app.add_subcommand("theta", "twisting operator on Fun([G],F)");
  auto* scan = app.add_subcommand("scan", "stabilization scan for almost characters");
  param(scan, "mmax", "largest level");
  param(scan, "stride", "level step (default: order of F)");
  param(app.add_subcommand("csheaf", "Drinfeld double simples and their trace functions"), "sigma", "auto or identity");
  param(app.add_subcommand("verify", "run exact checks"), "suite", "suite name or all");

  CLI11_PARSE(app, argc, argv);
  req.command = app.get_subcommands().front()->get_name();
  return run_command(cfg, req, std::cout, std::cerr);
}
