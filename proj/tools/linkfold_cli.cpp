#include <iostream>
#include <string>

#include "CLI11.hpp"
#include "linkfold/report.hpp"

namespace {

struct Overrides {
  std::string config_path;
  std::string f, g, out;
  int n = 0;
  double epsilon = 0, theta = 0, eta_angle = 0;
  std::uint64_t seed = 0;
  CLI::Option* f_opt = nullptr;
  CLI::Option* g_opt = nullptr;
  CLI::Option* n_opt = nullptr;
  CLI::Option* eps_opt = nullptr;
  CLI::Option* seed_opt = nullptr;
  CLI::Option* out_opt = nullptr;
  CLI::Option* theta_opt = nullptr;
  CLI::Option* eta_opt = nullptr;

  void attach(CLI::App* cmd, bool morse) {
    cmd->add_option("--config", config_path, "Flat key = value config file");
    f_opt = cmd->add_option("--f", f, "Polynomial f in z1..z{n+1}");
    g_opt = cmd->add_option("--g", g, "Polynomial g in z1..z{n+1}");
    n_opt = cmd->add_option("--n", n, "Link dimension parameter n");
    eps_opt = cmd->add_option("--epsilon", epsilon, "Sphere radius");
    seed_opt = cmd->add_option("--seed", seed, "RNG seed");
    out_opt = cmd->add_option("--out", out, "Output directory");
    if (morse) {
      theta_opt = cmd->add_option("--theta", theta, "Ray angle of the slice");
      eta_opt = cmd->add_option("--eta-angle", eta_angle, "Angle of the linear functional eta");
    }
  }

  linkfold::RunConfig resolve() const {
    linkfold::RunConfig config;
    if (!config_path.empty()) config = linkfold::load_config_file(config_path);
    if (f_opt->count()) config.f_text = f;
    if (g_opt->count()) config.g_text = g;
    if (n_opt->count()) config.n = n;
    if (eps_opt->count()) config.epsilon = epsilon;
    if (seed_opt->count()) config.rng_seed = seed;
    if (out_opt->count()) config.out_dir = out;
    if (theta_opt && theta_opt->count()) config.theta = theta;
    if (eta_opt && eta_opt->count()) config.eta_angle = eta_angle;
    return config;
  }
};

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Singular sets and fold classification of maps on links of hypersurface singularities"};
  app.require_subcommand(1);

  int verify_n = 2;
  std::string verify_out = ".";
  std::uint64_t verify_seed = 42;
  auto* verify = app.add_subcommand("verify-a1", "Check the round fold map of the A1 example");
  verify->add_option("--n", verify_n, "Link dimension parameter n")->required();
  verify->add_option("--out", verify_out, "Output directory");
  verify->add_option("--seed", verify_seed, "RNG seed");

  Overrides singular, svg, morse;
  singular.attach(app.add_subcommand("singular-set", "Trace S(h) and write singular_set.csv"), false);
  svg.attach(app.add_subcommand("image-svg", "Render h(S(h)) to image.svg"), false);
  morse.attach(app.add_subcommand("morse", "Slice and composed Morse data, written to morse.json"), true);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : linkfold::kExitConfig;
  }

  const auto run = [](const Overrides& o, int (*cmd)(const linkfold::RunConfig&, std::ostream&)) {
    try {
      return cmd(o.resolve(), std::cerr);
    } catch (const linkfold::Error& e) {
      std::cerr << "error: " << e.what() << "\n";
      return linkfold::exit_code_for(e.kind());
    }
  };

  if (*verify) return linkfold::cmd_verify_a1(verify_n, verify_out, verify_seed, std::cerr);
  if (app.got_subcommand("singular-set")) return run(singular, linkfold::cmd_singular_set);
  if (app.got_subcommand("image-svg")) return run(svg, linkfold::cmd_image_svg);
  return run(morse, linkfold::cmd_morse);
}
