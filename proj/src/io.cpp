// SPDX-License-Identifier: Apache-2.0

#include "stps/io.hpp"

#include <algorithm>
#include <fstream>
#include <set>
#include <sstream>
#include <unordered_map>
#include <unordered_set>

namespace stps {

namespace {

struct Line {
  std::size_t number;
  std::vector<std::string> tokens;
};

std::vector<std::string> split_ws(std::string_view s) {
  std::vector<std::string> out;
  std::size_t i = 0;
  while (i < s.size()) {
    while (i < s.size() && std::isspace(static_cast<unsigned char>(s[i])))
      ++i;
    std::size_t j = i;
    while (j < s.size() && !std::isspace(static_cast<unsigned char>(s[j])))
      ++j;
    if (j > i)
      out.emplace_back(s.substr(i, j - i));
    i = j;
  }
  return out;
}

/// Splits BLIF text into logical lines: comments stripped, backslash
/// continuations joined, blank lines dropped.
std::vector<Line> blif_lines(std::string_view text) {
  std::vector<Line> out;
  std::string pending;
  std::size_t pending_line = 0;
  std::size_t number = 0;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    std::size_t end = text.find('\n', pos);
    if (end == std::string_view::npos)
      end = text.size();
    std::string_view raw = text.substr(pos, end - pos);
    pos = end + 1;
    ++number;
    if (auto hash = raw.find('#'); hash != std::string_view::npos)
      raw = raw.substr(0, hash);
    while (!raw.empty() && (raw.back() == '\r' || raw.back() == ' ' || raw.back() == '\t'))
      raw.remove_suffix(1);
    bool cont = false;
    if (!raw.empty() && raw.back() == '\\') {
      raw.remove_suffix(1);
      cont = true;
    }
    if (pending.empty())
      pending_line = number;
    pending.append(raw);
    pending.push_back(' ');
    if (cont)
      continue;
    auto toks = split_ws(pending);
    if (!toks.empty())
      out.push_back(Line{pending_line, std::move(toks)});
    pending.clear();
    if (end == text.size())
      break;
  }
  return out;
}

struct NamesDef {
  std::vector<std::string> inputs;
  std::string output;
  std::vector<std::pair<std::string, char>> rows;
  std::size_t line = 0;
};

LogicMatrix cover_to_tt(const NamesDef &def) {
  const unsigned k = static_cast<unsigned>(def.inputs.size());
  LogicMatrix tt(k);
  if (def.rows.empty())
    return tt;
  const char phase = def.rows.front().second;
  for (const auto &[pattern, out] : def.rows)
    if (out != phase)
      throw ParseError("cover of '" + def.output + "' mixes on-set and off-set rows", def.line);
  for (const auto &row : def.rows) {
    const std::string &pattern = row.first;
    for (uint64_t m = 0; m < tt.num_columns(); ++m) {
      bool match = true;
      for (unsigned i = 0; i < k && match; ++i) {
        const bool bit = (m >> (k - 1 - i)) & 1;
        if (pattern[i] == '1')
          match = bit;
        else if (pattern[i] == '0')
          match = !bit;
      }
      if (match)
        tt.set_value(m, true);
    }
  }
  return phase == '1' ? tt : tt.complement();
}

bool valid_cover_pattern(std::string_view p) {
  return std::all_of(p.begin(), p.end(), [](char c) { return c == '0' || c == '1' || c == '-'; });
}

} // namespace

Network parse_blif(std::string_view text, const ParseOptions &options) {
  std::string model = "top";
  std::vector<std::pair<std::string, std::size_t>> inputs;
  std::vector<std::pair<std::string, std::size_t>> outputs;
  std::vector<NamesDef> defs;
  std::unordered_map<std::string, std::size_t> def_of;
  NamesDef *current = nullptr;
  bool ended = false;

  for (const Line &line : blif_lines(text)) {
    const auto &t = line.tokens;
    if (ended)
      break;
    if (t[0][0] == '.') {
      current = nullptr;
      const std::string &d = t[0];
      if (d == ".model") {
        if (t.size() > 1)
          model = t[1];
      } else if (d == ".inputs") {
        for (std::size_t i = 1; i < t.size(); ++i)
          inputs.emplace_back(t[i], line.number);
      } else if (d == ".outputs") {
        for (std::size_t i = 1; i < t.size(); ++i)
          outputs.emplace_back(t[i], line.number);
      } else if (d == ".names") {
        if (t.size() < 2)
          throw ParseError(".names needs at least an output signal", line.number);
        NamesDef def;
        def.inputs.assign(t.begin() + 1, t.end() - 1);
        def.output = t.back();
        def.line = line.number;
        if (def.inputs.size() > options.max_fanin)
          throw ParseError("'" + def.output + "' has " + std::to_string(def.inputs.size()) +
                               " fanins, more than the limit of " +
                               std::to_string(options.max_fanin),
                           line.number);
        if (!def_of.emplace(def.output, defs.size()).second)
          throw ParseError("signal '" + def.output + "' is defined twice", line.number);
        defs.push_back(std::move(def));
        current = &defs.back();
      } else if (d == ".end") {
        ended = true;
      } else {
        throw ParseError("unsupported directive '" + d + "'", line.number);
      }
      continue;
    }
    if (!current)
      throw ParseError("cover row outside of a .names block", line.number);
    const std::size_t k = current->inputs.size();
    if (k == 0) {
      if (t.size() != 1 || (t[0] != "0" && t[0] != "1"))
        throw ParseError("constant cover row must be '0' or '1'", line.number);
      current->rows.emplace_back("", t[0][0]);
    } else {
      if (t.size() != 2 || t[0].size() != k || !valid_cover_pattern(t[0]) ||
          (t[1] != "0" && t[1] != "1"))
        throw ParseError("malformed cover row for '" + current->output + "'", line.number);
      current->rows.emplace_back(t[0], t[1][0]);
    }
  }

  Network net(model);
  std::unordered_map<std::string, NodeId> built;
  for (const auto &[name, ln] : inputs) {
    if (built.count(name))
      throw ParseError("input '" + name + "' declared twice", ln);
    if (def_of.count(name))
      throw ParseError("input '" + name + "' is also driven by .names", ln);
    built.emplace(name, net.add_pi(name));
  }

  std::unordered_set<std::string> used_as_input;
  for (const auto &d : defs)
    used_as_input.insert(d.inputs.begin(), d.inputs.end());
  std::unordered_map<std::string, std::size_t> output_uses;
  for (const auto &o : outputs)
    ++output_uses[o.first];

  // 1-input buffers/inverters that only feed a PO become PO phases.
  std::unordered_map<std::string, std::pair<std::string, bool>> absorbed;
  for (const auto &[name, ln] : outputs) {
    auto it = def_of.find(name);
    if (it == def_of.end() || used_as_input.count(name) || output_uses[name] != 1)
      continue;
    const NamesDef &d = defs[it->second];
    if (d.inputs.size() != 1 || d.inputs[0] == name)
      continue;
    const LogicMatrix tt = cover_to_tt(d);
    if (tt == LogicMatrix::identity())
      absorbed.emplace(name, std::make_pair(d.inputs[0], false));
    else if (tt == structural_matrix(LogicOp::Not))
      absorbed.emplace(name, std::make_pair(d.inputs[0], true));
  }

  enum class Mark : uint8_t { None, Active };
  std::unordered_map<std::string, Mark> mark;
  auto resolve = [&](const std::string &root, std::size_t use_line) -> NodeId {
    if (auto it = built.find(root); it != built.end())
      return it->second;
    if (!def_of.count(root))
      throw ParseError("signal '" + root + "' is never defined", use_line);
    std::vector<std::pair<std::size_t, std::size_t>> stack; // def index, next fanin
    stack.emplace_back(def_of.at(root), 0);
    mark[root] = Mark::Active;
    while (!stack.empty()) {
      const std::size_t di = stack.back().first;
      const NamesDef &d = defs[di];
      if (stack.back().second < d.inputs.size()) {
        const std::string in = d.inputs[stack.back().second++];
        if (built.count(in))
          continue;
        auto dit = def_of.find(in);
        if (dit == def_of.end())
          throw ParseError("signal '" + in + "' is never defined", d.line);
        if (mark[in] == Mark::Active)
          throw ParseError("combinational cycle through '" + in + "'", d.line);
        mark[in] = Mark::Active;
        stack.emplace_back(dit->second, 0);
        continue;
      }
      std::vector<NodeId> fanins;
      fanins.reserve(d.inputs.size());
      for (const auto &in : d.inputs)
        fanins.push_back(built.at(in));
      built.emplace(d.output, net.add_lut(std::move(fanins), cover_to_tt(d), d.output));
      mark[d.output] = Mark::None;
      stack.pop_back();
    }
    return built.at(root);
  };

  for (const auto &d : defs)
    if (!absorbed.count(d.output))
      resolve(d.output, d.line);
  for (const auto &[name, ln] : outputs) {
    if (auto it = absorbed.find(name); it != absorbed.end()) {
      net.add_po(resolve(it->second.first, ln), it->second.second, name);
      continue;
    }
    net.add_po(resolve(name, ln), false, name);
  }
  return net;
}

std::string write_blif(const Network &net) {
  const auto order = topo_order(net);
  std::unordered_set<std::string> taken;
  std::unordered_map<std::string, NodeId> po_plain_driver;
  for (NodeId pi : net.pis())
    taken.insert(net.node(pi).name);
  std::unordered_set<std::string> po_names;
  for (const auto &po : net.pos()) {
    po_names.insert(po.name);
    if (!po.inverted)
      po_plain_driver.emplace(po.name, po.driver);
  }

  std::vector<std::string> name(net.size());
  for (NodeId pi : net.pis())
    name[pi.value] = net.node(pi).name;

  auto fresh = [&](NodeId id) {
    std::string base = "n" + std::to_string(id.value);
    std::string s = base;
    for (unsigned k = 1; taken.count(s) || po_names.count(s); ++k)
      s = base + "_" + std::to_string(k);
    return s;
  };

  for (NodeId id : order) {
    const LutNode &n = net.node(id);
    if (n.is_pi())
      continue;
    std::string chosen;
    auto claims_po = [&](const std::string &s) {
      auto it = po_plain_driver.find(s);
      return it != po_plain_driver.end() && it->second == id && !taken.count(s);
    };
    if (!n.name.empty() && claims_po(n.name)) {
      chosen = n.name;
    } else if (!n.name.empty() && !taken.count(n.name) && !po_names.count(n.name)) {
      chosen = n.name;
    } else if (n.name.empty()) {
      for (const auto &po : net.pos())
        if (!po.inverted && po.driver == id && claims_po(po.name)) {
          chosen = po.name;
          break;
        }
    }
    if (chosen.empty())
      chosen = fresh(id);
    taken.insert(chosen);
    name[id.value] = chosen;
  }

  std::ostringstream os;
  os << ".model " << net.name() << "\n.inputs";
  for (NodeId pi : net.pis())
    os << ' ' << net.node(pi).name;
  os << "\n.outputs";
  for (const auto &po : net.pos())
    os << ' ' << po.name;
  os << '\n';

  for (NodeId id : order) {
    const LutNode &n = net.node(id);
    if (n.is_pi())
      continue;
    os << ".names";
    for (NodeId f : n.fanins)
      os << ' ' << name[f.value];
    os << ' ' << name[id.value] << '\n';
    const unsigned k = n.tt.arity();
    for (uint64_t m = 0; m < n.tt.num_columns(); ++m) {
      if (!n.tt.value(m))
        continue;
      for (unsigned i = 0; i < k; ++i)
        os << (((m >> (k - 1 - i)) & 1) ? '1' : '0');
      os << (k ? " 1\n" : "1\n");
    }
  }
  for (const auto &po : net.pos()) {
    if (!po.inverted && name[po.driver.value] == po.name)
      continue;
    os << ".names " << name[po.driver.value] << ' ' << po.name << '\n'
       << (po.inverted ? "0 1\n" : "1 1\n");
  }
  os << ".end\n";
  return os.str();
}

Network parse_aiger_ascii(std::string_view text) {
  std::vector<Line> lines;
  {
    std::size_t number = 0;
    std::size_t pos = 0;
    while (pos < text.size()) {
      std::size_t end = text.find('\n', pos);
      if (end == std::string_view::npos)
        end = text.size();
      ++number;
      auto toks = split_ws(text.substr(pos, end - pos));
      pos = end + 1;
      if (!toks.empty() && toks[0] == "c")
        break;
      if (!toks.empty())
        lines.push_back(Line{number, std::move(toks)});
    }
  }
  if (lines.empty() || lines[0].tokens[0] != "aag")
    throw ParseError("missing 'aag' header", lines.empty() ? 0 : lines[0].number);
  const auto &h = lines[0].tokens;
  if (h.size() < 6)
    throw ParseError("malformed header, expected 'aag M I L O A'", lines[0].number);
  std::vector<uint64_t> hv;
  try {
    for (std::size_t i = 1; i < h.size(); ++i)
      hv.push_back(std::stoull(h[i]));
  } catch (const std::exception &) {
    throw ParseError("malformed header, expected 'aag M I L O A'", lines[0].number);
  }
  const uint64_t max_var = hv[0], n_in = hv[1], n_latch = hv[2], n_out = hv[3], n_and = hv[4];
  if (n_latch != 0)
    throw ParseError("latches are not supported (combinational AIGER only)", lines[0].number);
  for (std::size_t i = 5; i < hv.size(); ++i)
    if (hv[i] != 0)
      throw ParseError("bad-state, constraint, justice and fairness sections are not supported",
                       lines[0].number);
  if (lines.size() < 1 + n_in + n_out + n_and)
    throw ParseError("file ends before all inputs, outputs and gates are listed", 0);

  auto literal = [&](const Line &l, std::size_t idx) -> uint64_t {
    if (idx >= l.tokens.size())
      throw ParseError("missing literal", l.number);
    uint64_t v = 0;
    try {
      v = std::stoull(l.tokens[idx]);
    } catch (const std::exception &) {
      throw ParseError("malformed literal '" + l.tokens[idx] + "'", l.number);
    }
    if (v / 2 > max_var)
      throw ParseError("literal " + l.tokens[idx] + " exceeds the maximum variable index",
                       l.number);
    return v;
  };

  std::size_t li = 1;
  std::vector<uint64_t> input_lits, output_lits;
  std::vector<std::size_t> output_lines;
  for (uint64_t i = 0; i < n_in; ++i, ++li) {
    const uint64_t lit = literal(lines[li], 0);
    if (lit < 2 || (lit & 1))
      throw ParseError("input literal must be a positive variable", lines[li].number);
    input_lits.push_back(lit);
  }
  for (uint64_t i = 0; i < n_out; ++i, ++li) {
    output_lits.push_back(literal(lines[li], 0));
    output_lines.push_back(lines[li].number);
  }
  struct AndDef {
    uint64_t rhs0, rhs1;
    std::size_t line;
  };
  std::unordered_map<uint64_t, AndDef> ands;
  std::vector<uint64_t> and_order;
  for (uint64_t i = 0; i < n_and; ++i, ++li) {
    const Line &l = lines[li];
    const uint64_t lhs = literal(l, 0);
    if (lhs < 2 || (lhs & 1))
      throw ParseError("AND output must be a positive variable", l.number);
    if (!ands.emplace(lhs / 2, AndDef{literal(l, 1), literal(l, 2), l.number}).second)
      throw ParseError("variable defined twice", l.number);
    and_order.push_back(lhs / 2);
  }

  std::unordered_map<uint64_t, std::string> in_names, out_names;
  for (; li < lines.size(); ++li) {
    const auto &t = lines[li].tokens;
    if (t[0].size() < 2 || (t[0][0] != 'i' && t[0][0] != 'o'))
      continue;
    try {
      const uint64_t idx = std::stoull(t[0].substr(1));
      std::string nm;
      for (std::size_t k = 1; k < t.size(); ++k)
        nm += (k > 1 ? " " : "") + t[k];
      (t[0][0] == 'i' ? in_names : out_names)[idx] = nm;
    } catch (const std::exception &) {
      throw ParseError("malformed symbol entry", lines[li].number);
    }
  }

  Network net("aig");
  std::unordered_map<uint64_t, NodeId> node_of;
  for (uint64_t i = 0; i < input_lits.size(); ++i) {
    auto it = in_names.find(i);
    const uint64_t var = input_lits[i] / 2;
    if (node_of.count(var))
      throw ParseError("input variable declared twice", lines[1 + i].number);
    node_of.emplace(var, net.add_pi(it != in_names.end() ? it->second : "i" + std::to_string(i)));
  }

  std::unordered_set<uint64_t> active;
  auto build = [&](uint64_t root) {
    std::vector<std::pair<uint64_t, int>> stack{{root, 0}};
    active.insert(root);
    while (!stack.empty()) {
      auto &[var, step] = stack.back();
      const AndDef &d = ands.at(var);
      const uint64_t lits[2] = {d.rhs0, d.rhs1};
      if (step < 2) {
        const uint64_t v = lits[step++] / 2;
        if (v == 0 || node_of.count(v))
          continue;
        if (!ands.count(v))
          throw ParseError("variable " + std::to_string(v) + " is never defined", d.line);
        if (!active.insert(v).second)
          throw ParseError("combinational cycle through variable " + std::to_string(v), d.line);
        stack.emplace_back(v, 0);
        continue;
      }
      std::vector<NodeId> fanins;
      std::vector<uint64_t> fanin_lits;
      for (uint64_t lit : lits)
        if (lit >= 2) {
          fanins.push_back(node_of.at(lit / 2));
          fanin_lits.push_back(lit);
        }
      LogicMatrix tt(static_cast<unsigned>(fanins.size()));
      for (uint64_t m = 0; m < tt.num_columns(); ++m) {
        bool v = true;
        std::size_t fi = 0;
        for (uint64_t lit : lits) {
          if (lit < 2) {
            v = v && lit == 1;
            continue;
          }
          const bool x = (m >> (fanins.size() - 1 - fi)) & 1;
          v = v && (x != static_cast<bool>(lit & 1));
          ++fi;
        }
        tt.set_value(m, v);
      }
      node_of.emplace(var, net.add_lut(std::move(fanins), std::move(tt), "n" + std::to_string(var)));
      active.erase(var);
      stack.pop_back();
    }
  };
  for (uint64_t var : and_order)
    if (!node_of.count(var))
      build(var);

  for (uint64_t i = 0; i < output_lits.size(); ++i) {
    const uint64_t lit = output_lits[i];
    auto it = out_names.find(i);
    std::string nm = it != out_names.end() ? it->second : "o" + std::to_string(i);
    if (lit < 2) {
      net.add_po(net.constant_zero(), lit == 1, std::move(nm));
      continue;
    }
    auto nit = node_of.find(lit / 2);
    if (nit == node_of.end())
      throw ParseError("output refers to an undefined variable", output_lines[i]);
    net.add_po(nit->second, lit & 1, std::move(nm));
  }
  return net;
}

Network parse_network(std::string_view text, const ParseOptions &options) {
  std::size_t i = 0;
  while (i < text.size() && std::isspace(static_cast<unsigned char>(text[i])))
    ++i;
  if (text.substr(i, 3) == "aag")
    return parse_aiger_ascii(text);
  return parse_blif(text, options);
}

Network read_network(const std::filesystem::path &path, const ParseOptions &options) {
  std::ifstream in(path, std::ios::binary);
  if (!in)
    throw ParseError("cannot open '" + path.string() + "'", 0);
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_network(ss.str(), options);
}

} // namespace stps
