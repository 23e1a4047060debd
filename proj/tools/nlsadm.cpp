#include "nlsadm/cli/commands.hpp"

#include <CLI11.hpp>

#include <iostream>
#include <map>
#include <string>

namespace {

const char* const kKeys[] = {"alpha", "omega", "c", "lambda", "family", "K", "c2", "sign", "window", "resolution",
                             "cut-strategy", "tol-root", "tol-membership", "tol-geometry", "tol-integrator", "out",
                             "format", "seed", "samples", "range", "inject-fault", "profile"};

const char* help_of(const std::string& k) {
  static const std::map<std::string, const char*> h = {
      {"c", "Neumann coefficient as re,im"},
      {"lambda", "+1 defocusing, -1 focusing"},
      {"family", "A..E: generate the triple from family parameters"},
      {"K", "real double/triple zero (families B, E)"},
      {"c2", "Im c (families B, E)"},
      {"sign", "sign of c1 for generated triples"},
      {"window", "x0,x1,y0,y1"},
      {"resolution", "nx,ny"},
      {"cut-strategy", "default | gamma | loop:re,im,r | pairs:i-j,..."},
      {"out", "output path"},
      {"format", "json | csv | svg"},
      {"range", "scan ranges name=lo:hi[:n];..."},
      {"inject-fault", "verify test hook: flip-coefficient"},
  };
  auto it = h.find(k);
  return it == h.end() ? "" : it->second;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Admissibility of single-exponential boundary data for the half-line NLS"};
  app.require_subcommand(1);
  app.set_version_flag("--version", nlsadm::cli::kVersion);
  std::string config_path;
  app.add_option("--config", config_path, "key = value config file; flags override it");

  std::map<std::string, std::string> values;
  const char* const commands[][2] = {
      {"classify", "classify a triple"},
      {"roots", "zeros of Omega^2 with multiplicities"},
      {"curves", "trace Gamma and the cuts"},
      {"regions", "label D1..D4 and test connectivity of D1 minus the cuts"},
      {"figure", "SVG, CSV point chains and sign grid"},
      {"verify", "run the invariant suite"},
      {"scan", "sweep a family on a lattice"},
      {"jump", "jump of B/A across the quartic cuts and the global-relation verdict"},
  };
  std::map<std::string, CLI::App*> subs;
  for (const auto& c : commands) {
    auto* sub = app.add_subcommand(c[0], c[1]);
    sub->add_option("--config", config_path, "key = value config file; flags override it");
    for (const char* k : kKeys) sub->add_option(std::string("--") + k, values[std::string(c[0]) + "\n" + k], help_of(k));
    subs[c[0]] = sub;
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  std::string command;
  for (const auto& [name, sub] : subs)
    if (sub->parsed()) command = name;

  try {
    std::map<std::string, std::string> kv;
    if (!config_path.empty()) kv = nlsadm::cli::load_config_file(config_path);
    for (const char* k : kKeys)
      if (subs[command]->count(std::string("--") + k) > 0) kv[k] = values[command + "\n" + k];
    const auto cfg = nlsadm::cli::config_from_map(command, kv);
    return nlsadm::cli::execute(cfg, std::cout, std::cerr);
  } catch (const nlsadm::Error& e) {
    std::cerr << "nlsadm: " << e.what() << "\n";
    return nlsadm::cli::exit_code_of(e.code());
  }
}
