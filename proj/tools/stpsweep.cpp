// SPDX-License-Identifier: Apache-2.0
//
// stpsweep: simulation, SAT sweeping, equivalence checking and identity
// proving from the command line.
//
// Exit codes: 0 success / equivalent / proved, 1 inequivalent / refuted,
// 2 usage error, 3 input error.

#include "stps/cec.hpp"
#include "stps/expr.hpp"
#include "stps/io.hpp"
#include "stps/simulator.hpp"
#include "stps/sweeper.hpp"

#include <CLI11.hpp>

#include <fstream>
#include <iostream>
#include <sstream>

namespace {

constexpr int kOk = 0;
constexpr int kNegative = 1;
constexpr int kUsage = 2;
constexpr int kInput = 3;

/// Raised for bad user input that is not a file parse error.
struct InputError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

std::string node_label(const stps::Network &net, stps::NodeId id) {
  const auto &n = net.node(id);
  return n.name.empty() ? "n" + std::to_string(id.value) : n.name;
}

std::vector<stps::NodeId> resolve_targets(const stps::Network &net,
                                          const std::vector<std::string> &names) {
  std::vector<stps::NodeId> out;
  for (const auto &name : names) {
    if (auto id = net.find(name)) {
      out.push_back(*id);
      continue;
    }
    if (name.size() > 1 && name[0] == 'n' &&
        name.find_first_not_of("0123456789", 1) == std::string::npos) {
      const auto v = static_cast<uint32_t>(std::stoul(name.substr(1)));
      if (v < net.size() && !net.node(stps::NodeId{v}).dead) {
        out.push_back(stps::NodeId{v});
        continue;
      }
    }
    throw InputError("unknown target '" + name + "'");
  }
  return out;
}

std::string read_file(const std::string &path) {
  std::ifstream in(path, std::ios::binary);
  if (!in)
    throw InputError("cannot open '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

struct SimArgs {
  std::string input;
  std::size_t patterns = 1024;
  std::string pattern_file;
  std::vector<std::string> targets;
  std::string mode = "all";
  uint64_t seed = 1;
};

int cmd_sim(const SimArgs &a) {
  const stps::Network net = stps::read_network(a.input);
  const stps::PatternSet p =
      a.pattern_file.empty()
          ? stps::gen_random_patterns(net.pis().size(), a.patterns, a.seed)
          : stps::parse_patterns(read_file(a.pattern_file), net.pis().size());

  if (a.mode == "all") {
    const auto sigs = stps::simulate_all(net, p);
    const auto targets = resolve_targets(net, a.targets);
    if (!targets.empty()) {
      for (auto t : targets)
        std::cout << node_label(net, t) << '\t' << sigs.signature(t).to_string() << '\n';
      return kOk;
    }
    for (auto id : stps::topo_order(net))
      std::cout << node_label(net, id) << '\t' << sigs.signature(id).to_string() << '\n';
    return kOk;
  }

  const auto targets = resolve_targets(net, a.targets);
  if (targets.empty())
    throw CLI::ValidationError("--targets", "--mode targets needs at least one target");
  const auto sigs = stps::simulate_specified(net, p, targets);
  for (std::size_t i = 0; i < targets.size(); ++i) {
    // A target whose support admits exhaustive enumeration within the
    // pattern budget is reported as its exhaustive signature.
    const stps::NodeId t[1] = {targets[i]};
    const auto support = stps::structural_support(net, t);
    std::string bits;
    const auto m = static_cast<unsigned>(support.size());
    if (m <= 20 && (std::size_t{1} << m) <= p.n_patterns) {
      bits = stps::exhaustive_window_sim(net, t, m)->signatures[0].to_string();
    } else {
      bits = sigs[i].to_string();
    }
    std::cout << node_label(net, targets[i]) << '\t' << bits << '\n';
  }
  return kOk;
}

struct SweepArgs {
  std::string input;
  std::string output;
  std::size_t tfi_limit = 1000;
  uint64_t conflict_limit = 0;
  std::size_t base_patterns = 2048;
  uint64_t seed = 1;
};

int cmd_sweep(const SweepArgs &a) {
  stps::Network net = stps::read_network(a.input);
  stps::SweepConfig cfg;
  cfg.tfi_bound = a.tfi_limit;
  cfg.conflict_limit = a.conflict_limit;
  cfg.n_base_patterns = a.base_patterns;
  cfg.seed = a.seed;
  const auto res = stps::sweep(std::move(net), cfg);
  std::ofstream out(a.output, std::ios::binary);
  if (!out)
    throw InputError("cannot write '" + a.output + "'");
  out << stps::write_blif(res.net);
  std::cout << stps::stats_csv_header() << '\n' << stps::stats_csv_row(res.stats) << '\n';
  std::cerr << stps::stats_report(res.stats);
  return kOk;
}

int cmd_cec(const std::string &a, const std::string &b) {
  const auto na = stps::read_network(a);
  const auto nb = stps::read_network(b);
  stps::CecResult r;
  try {
    r = stps::check_equivalence(na, nb);
  } catch (const std::invalid_argument &e) {
    throw InputError(e.what());
  }
  if (r.equivalent) {
    std::cout << "equivalent (" << r.method << ")\n";
    return kOk;
  }
  std::cout << "inequivalent (" << r.method << ") at output " << r.failing_po << "\n";
  std::cout << "counter-example:";
  for (const auto &[name, v] : r.ce)
    std::cout << ' ' << name << '=' << v;
  std::cout << '\n';
  return kNegative;
}

int cmd_prove(const std::string &a, const std::string &b) {
  stps::ParsedExpressions parsed;
  try {
    parsed = stps::parse_expressions({a, b});
  } catch (const std::invalid_argument &e) {
    throw InputError(e.what());
  }
  const auto n = static_cast<unsigned>(parsed.names.size());
  if (n > 20)
    throw InputError("at most 20 variables are supported");
  const auto ma = stps::canonical_form(parsed.exprs[0], n);
  const auto mb = stps::canonical_form(parsed.exprs[1], n);
  std::cout << "M_a = " << ma.to_string() << "\nM_b = " << mb.to_string() << '\n';
  if (ma == mb) {
    std::cout << "proved\n";
    return kOk;
  }
  // Columns left to right, i.e. from the all-true assignment down.
  for (uint64_t p = 0; p < ma.num_columns(); ++p) {
    if (ma.column_top(p) == mb.column_top(p))
      continue;
    const uint64_t m = ma.num_columns() - 1 - p;
    std::cout << "refuted at";
    for (unsigned i = 0; i < n; ++i)
      std::cout << ' ' << parsed.names[i] << '=' << ((m >> (n - 1 - i)) & 1);
    std::cout << '\n';
    break;
  }
  return kNegative;
}

int cmd_stats(const std::string &input) {
  const auto net = stps::read_network(input);
  std::size_t max_fanin = 0;
  std::vector<std::size_t> level(net.size(), 0);
  std::size_t depth = 0;
  for (auto id : stps::topo_order(net)) {
    const auto &n = net.node(id);
    max_fanin = std::max(max_fanin, n.fanins.size());
    for (auto f : n.fanins)
      level[id.value] = std::max(level[id.value], level[f.value] + 1);
    depth = std::max(depth, level[id.value]);
  }
  std::cout << "name=" << net.name() << '\n'
            << "pis=" << net.pis().size() << '\n'
            << "pos=" << net.pos().size() << '\n'
            << "luts=" << net.lut_count() << '\n'
            << "max_fanin=" << max_fanin << '\n'
            << "depth=" << depth << '\n';
  return kOk;
}

} // namespace

int main(int argc, char **argv) {
  CLI::App app{"STP-based LUT network simulation and SAT sweeping"};
  app.require_subcommand(1);

  SimArgs sim;
  auto *sim_cmd = app.add_subcommand("sim", "Simulate a network and print signatures");
  sim_cmd->add_option("input", sim.input, "BLIF or ASCII AIGER file")->required();
  auto *n_opt = sim_cmd->add_option("--patterns", sim.patterns, "Number of random patterns")
                    ->check(CLI::PositiveNumber);
  sim_cmd->add_option("--pattern-file", sim.pattern_file, "One 0/1 row per PI")
      ->excludes(n_opt);
  sim_cmd->add_option("--targets", sim.targets, "Comma-separated node names")->delimiter(',');
  sim_cmd->add_option("--mode", sim.mode, "all or targets")
      ->check(CLI::IsMember({"all", "targets"}));
  sim_cmd->add_option("--seed", sim.seed, "Random seed");

  SweepArgs sw;
  auto *sweep_cmd = app.add_subcommand("sweep", "SAT-sweep a network and write BLIF");
  sweep_cmd->add_option("input", sw.input)->required();
  sweep_cmd->add_option("output", sw.output)->required();
  sweep_cmd->add_option("--tfi-limit", sw.tfi_limit, "TFI nodes examined per class member");
  sweep_cmd->add_option("--conflict-limit", sw.conflict_limit, "0 disables the limit");
  sweep_cmd->add_option("--base-patterns", sw.base_patterns, "Random patterns before refinement")
      ->check(CLI::PositiveNumber);
  sweep_cmd->add_option("--seed", sw.seed, "Random seed");

  std::string cec_a, cec_b;
  auto *cec_cmd = app.add_subcommand("cec", "Check two networks for equivalence");
  cec_cmd->add_option("a", cec_a)->required();
  cec_cmd->add_option("b", cec_b)->required();

  std::string expr_a, expr_b;
  auto *prove_cmd = app.add_subcommand("prove", "Prove two Boolean expressions equal");
  prove_cmd->add_option("expr_a", expr_a)->required();
  prove_cmd->add_option("expr_b", expr_b)->required();

  std::string stats_in;
  auto *stats_cmd = app.add_subcommand("stats", "Print network statistics");
  stats_cmd->add_option("input", stats_in)->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError &e) {
    const int code = app.exit(e);
    return code == 0 ? kOk : kUsage;
  }

  try {
    if (*sim_cmd)
      return cmd_sim(sim);
    if (*sweep_cmd)
      return cmd_sweep(sw);
    if (*cec_cmd)
      return cmd_cec(cec_a, cec_b);
    if (*prove_cmd)
      return cmd_prove(expr_a, expr_b);
    if (*stats_cmd)
      return cmd_stats(stats_in);
  } catch (const CLI::Error &e) {
    std::cerr << "error: " << e.what() << '\n';
    return kUsage;
  } catch (const stps::ParseError &e) {
    std::cerr << "error: " << e.what() << '\n';
    return kInput;
  } catch (const InputError &e) {
    std::cerr << "error: " << e.what() << '\n';
    return kInput;
  } catch (const std::invalid_argument &e) {
    std::cerr << "error: " << e.what() << '\n';
    return kInput;
  } catch (const std::exception &e) {
    std::cerr << "error: " << e.what() << '\n';
    return kInput;
  }
  return kUsage;
}
