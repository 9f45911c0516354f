#pragma once

#include <filesystem>
#include <fstream>

#include "cpac/classes.hpp"
#include "cpac/learn.hpp"

namespace cpac {

/*
 * Text file formats.
 *
 * Class spec (one `key = value` per line, `#` comments):
 *
 *     base = thd | ivl | fin | thd-omega | init
 *     membership = all
 *     membership = explicit: 1,2,5
 *     membership = decidable: <program-file>
 *     membership = enumerable: <program-file>
 *     budget = <n>             # optional, per-call machine budget
 *
 * Program files are resolved relative to the spec file. Sample files hold
 * `x<TAB>y` lines; distribution files hold `x<TAB>y<TAB>num/den` lines.
 */

inline std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ParseError("cannot open " + path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

inline Program load_program_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ParseError("cannot open program file " + path.string());
  return parse_program_text(in);
}

inline ClassSpec parse_class_spec_text(const std::string& text,
                                       const std::filesystem::path& base_dir,
                                       Nat default_budget = kDefaultBudget) {
  std::optional<Base> base;
  std::optional<Membership> membership;
  Nat budget = default_budget;
  std::istringstream in(text);
  std::string line;
  Nat line_no = 0;
  std::string pending_machine;  // "decidable" or "enumerable" waits for the budget line
  std::filesystem::path pending_path;

  while (std::getline(in, line)) {
    ++line_no;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.resize(hash);
    const auto eq = line.find('=');
    const auto trim = [](std::string s) {
      const auto a = s.find_first_not_of(" \t\r");
      const auto b = s.find_last_not_of(" \t\r");
      return a == std::string::npos ? std::string() : s.substr(a, b - a + 1);
    };
    if (trim(line).empty()) continue;
    if (eq == std::string::npos)
      throw ParseError("class spec line " + std::to_string(line_no) + ": expected key = value");
    const std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));
    if (key == "base") {
      base = base_from_name(value);
    } else if (key == "membership") {
      if (value == "all") {
        membership = MembershipAll{};
      } else if (value.rfind("explicit:", 0) == 0 || value == "explicit") {
        std::vector<Nat> indices;
        std::istringstream items(value.size() > 9 ? value.substr(9) : "");
        std::string item;
        while (std::getline(items, item, ',')) {
          const std::string t = trim(item);
          if (!t.empty()) indices.push_back(std::stoull(t));
        }
        membership = MembershipExplicit::of(std::move(indices));
      } else if (value.rfind("decidable:", 0) == 0 || value.rfind("enumerable:", 0) == 0) {
        pending_machine = value.substr(0, value.find(':'));
        pending_path = base_dir / trim(value.substr(value.find(':') + 1));
      } else {
        throw ParseError("class spec line " + std::to_string(line_no) +
                         ": unknown membership '" + value + "'");
      }
    } else if (key == "budget") {
      budget = std::stoull(value);
    } else {
      throw ParseError("class spec line " + std::to_string(line_no) + ": unknown key '" + key +
                       "'");
    }
  }
  if (!pending_machine.empty()) {
    const ProgramIndex idx = encode_program(load_program_file(pending_path));
    const BudgetPolicy policy{budget, false, budget};
    if (pending_machine == "decidable")
      membership = MembershipDecidable{idx, policy};
    else
      membership = MembershipEnumerable{idx, policy};
  }
  if (!base) throw ParseError("class spec: missing base");
  if (!membership) throw ParseError("class spec: missing membership");
  return ClassSpec{*base, *membership};
}

inline ClassSpec load_class_spec(const std::filesystem::path& path,
                                 Nat default_budget = kDefaultBudget) {
  return parse_class_spec_text(read_file(path), path.parent_path(), default_budget);
}

inline Sample parse_sample_text(const std::string& text) {
  Sample s;
  std::istringstream in(text);
  std::string line;
  Nat line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.resize(hash);
    std::istringstream ls(line);
    Nat x, y;
    if (!(ls >> x)) continue;
    if (!(ls >> y) || y > 1)
      throw ParseError("sample line " + std::to_string(line_no) + ": expected x<TAB>y with y in {0,1}");
    s.pairs.push_back({x, static_cast<std::uint8_t>(y)});
  }
  if (s.pairs.empty()) throw ParseError("sample file holds no pairs");
  return s;
}

inline Sample load_sample(const std::filesystem::path& path) {
  return parse_sample_text(read_file(path));
}

inline FiniteDistribution parse_distribution_text(const std::string& text) {
  std::vector<DistAtom> atoms;
  std::istringstream in(text);
  std::string line;
  Nat line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.resize(hash);
    std::istringstream ls(line);
    Nat x, y;
    std::string w;
    if (!(ls >> x)) continue;
    if (!(ls >> y >> w) || y > 1)
      throw ParseError("distribution line " + std::to_string(line_no) +
                       ": expected x<TAB>y<TAB>num/den");
    atoms.push_back(DistAtom{x, static_cast<std::uint8_t>(y), rational_from_string(w)});
  }
  return FiniteDistribution::make(std::move(atoms));
}

inline FiniteDistribution load_distribution(const std::filesystem::path& path) {
  return parse_distribution_text(read_file(path));
}

}  // namespace cpac
