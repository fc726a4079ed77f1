#include <cstdlib>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "hypwa/report.hpp"

namespace {

std::vector<std::string> split_list(const std::string& s) {
  std::vector<std::string> out;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, ','))
    if (!item.empty()) out.push_back(item);
  return out;
}

// "0..5" or "0,2,4"
std::vector<int> parse_int_list(const std::string& s) {
  std::vector<int> out;
  for (const auto& item : split_list(s)) {
    const auto dots = item.find("..");
    try {
      if (dots == std::string::npos) {
        out.push_back(std::stoi(item));
      } else {
        const int a = std::stoi(item.substr(0, dots)), b = std::stoi(item.substr(dots + 2));
        if (b < a) throw hypwa::InputError("empty range '" + item + "'");
        for (int v = a; v <= b; ++v) out.push_back(v);
      }
    } catch (const hypwa::InputError&) {
      throw;
    } catch (const std::exception&) {
      throw hypwa::InputError("cannot parse integer list '" + s + "'");
    }
  }
  if (out.empty()) throw hypwa::InputError("empty integer list");
  return out;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Corridor factorizations and Schur multiplier norms on hyperbolic graphs"};
  app.require_subcommand(1);

  std::string input, mode = "empirical", z_list, n_list, out = "hypwa_out", profile_mode = "auto";
  std::vector<int> free_group, tree;
  int line = 0, cycle = 0, schedule = 4, section = 16;
  double rho = 0, tol = 1e-9, sdp_tol = 1e-6, delta = 0;
  int r1 = 0, n_max = 0;
  std::uint64_t seed = 0, budget = 2000;

  std::vector<CLI::App*> subs;
  for (const char* name : {"profile", "verify", "norms", "all"}) {
    auto* s = app.add_subcommand(name);
    auto* src = s->add_option_group("graph", "graph source");
    src->add_option("--input", input, "edge list file");
    src->add_option("--free-group", free_group, "RANK RADIUS")->expected(2);
    src->add_option("--tree", tree, "B D (vertex degree, depth)")->expected(2);
    src->add_option("--line", line, "path with N edges");
    src->add_option("--cycle", cycle, "cycle with N vertices");
    src->require_option(1);
    s->add_option("--mode", mode, "paper | empirical")->check(CLI::IsMember({"paper", "empirical"}));
    s->add_option("--rho", rho, "corridor radius override");
    s->add_option("--r1", r1, "R1 override");
    s->add_option("--delta", delta, "hyperbolicity constant override (multiple of 1/2)");
    s->add_option("--z", z_list, "comma list: 0.5, -0.7, 0.2+0.3i, 0.9@45");
    s->add_option("--n", n_list, "comma list or range a..b");
    s->add_option("--schedule", schedule, "witness schedule length");
    s->add_option("--tol", tol, "truncation tolerance");
    s->add_option("--sdp-tol", sdp_tol, "cb norm bracket tolerance");
    s->add_option("--seed", seed);
    s->add_option("--section", section, "section size for dense kernels (<= 64)");
    s->add_option("--n-max", n_max, "verify up to this n (default: horizon)");
    s->add_option("--profile-mode", profile_mode, "auto | exact | sampled");
    s->add_option("--sample-budget", budget);
    s->add_option("--out", out, "output directory");
    subs.push_back(s);
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : hypwa::kExitInput;
  }

  CLI::App* chosen = nullptr;
  for (auto* s : subs)
    if (s->parsed()) chosen = s;

  try {
    hypwa::RunConfig cfg;
    auto& p = cfg.provider;
    if (!input.empty()) {
      p.kind = hypwa::ProviderKind::edge_list_file;
      p.path = input;
    } else if (!free_group.empty()) {
      p.kind = hypwa::ProviderKind::free_group;
      p.rank = free_group[0];
      p.size = free_group[1];
    } else if (!tree.empty()) {
      p.kind = hypwa::ProviderKind::regular_tree;
      p.branching = tree[0];
      p.size = tree[1];
    } else if (chosen->count("--line")) {
      p.kind = hypwa::ProviderKind::line;
      p.size = line;
    } else {
      p.kind = hypwa::ProviderKind::cycle;
      p.size = cycle;
    }
    cfg.mode = mode == "paper" ? hypwa::ParamMode::paper : hypwa::ParamMode::empirical;
    if (chosen->count("--rho")) cfg.rho = rho;
    if (chosen->count("--r1")) cfg.R1 = r1;
    if (chosen->count("--delta")) {
      const double twice = 2 * delta;
      if (twice != std::floor(twice) || delta < 0) throw hypwa::InputError("delta must be a non-negative multiple of 1/2");
      cfg.delta = hypwa::HalfInt::from_twice(static_cast<std::int64_t>(twice));
    }
    if (chosen->count("--z")) {
      cfg.z.clear();
      for (const auto& s : split_list(z_list)) cfg.z.push_back(hypwa::parse_complex(s));
      if (cfg.z.empty()) throw hypwa::InputError("empty z list");
    }
    if (chosen->count("--n")) cfg.n = parse_int_list(n_list);
    if (chosen->count("--n-max")) cfg.n_max = n_max;
    cfg.schedule = schedule;
    cfg.tol = tol;
    cfg.sdp_tol = sdp_tol;
    cfg.seed = seed;
    cfg.section = section;
    cfg.profile_mode = profile_mode;
    cfg.sample_budget = budget;
    cfg.out = out;

    const auto rep = hypwa::run_command(chosen->get_name(), cfg);
    hypwa::write_report(out, rep);
    for (const auto& c : rep.json["checks"])
      std::cout << (c["inconclusive"].get<bool>() ? "INCONCLUSIVE " : c["passed"].get<bool>() ? "PASS " : "FAIL ")
                << c["name"].get<std::string>() << "  [" << c["domain"].get<std::string>() << "]\n";
    std::cout << "report: " << (std::filesystem::path(out) / (chosen->get_name() + ".json")).string() << '\n';
    return rep.exit_code;
  } catch (const hypwa::InputError& e) {
    std::cerr << "input error: " << e.what() << '\n';
    return hypwa::kExitInput;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return hypwa::kExitInconclusive;
  }
}
