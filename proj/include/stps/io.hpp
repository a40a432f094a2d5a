// SPDX-License-Identifier: Apache-2.0
//
// Netlist readers and writers.
//
// BLIF subset: .model .inputs .outputs .names .end, cover rows "[01-]+ [01]".
// AIGER: ASCII "aag", combinational only.

#pragma once

#include "stps/network.hpp"

#include <filesystem>
#include <stdexcept>
#include <string>
#include <string_view>

namespace stps {

class ParseError : public std::runtime_error {
public:
  ParseError(const std::string &what, std::size_t line)
      : std::runtime_error(line ? "line " + std::to_string(line) + ": " + what : what),
        line_(line) {}

  /// 1-based line number, or 0 when the error is not tied to a line.
  std::size_t line() const { return line_; }

private:
  std::size_t line_;
};

struct ParseOptions {
  /// Largest accepted LUT fanin count.
  unsigned max_fanin = 6;
};

/// Parses BLIF. Don't-care cover rows are expanded to minterms; a 1-input
/// buffer or inverter that only feeds a PO is folded into the PO phase.
Network parse_blif(std::string_view text, const ParseOptions &options = {});

/// Writes BLIF with one cover row per on-set minterm. POs that need a
/// different name or an inversion get a 1-input buffer or inverter.
std::string write_blif(const Network &net);

/// Parses ASCII AIGER. Each AND gate becomes a 2-LUT; input inversions are
/// absorbed into its truth table and output inversions into the PO phase.
Network parse_aiger_ascii(std::string_view text);

/// Dispatches on content: text starting with "aag" is AIGER, anything else
/// BLIF.
Network parse_network(std::string_view text, const ParseOptions &options = {});

/// Reads a file and parses it with parse_network. Throws ParseError if the
/// file cannot be read.
Network read_network(const std::filesystem::path &path, const ParseOptions &options = {});

} // namespace stps
