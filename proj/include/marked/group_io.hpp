#pragma once

#include <filesystem>
#include <fstream>
#include <map>
#include <string>
#include <vector>

#include "marked/coset_engine.hpp"
#include "marked/free_engine.hpp"
#include "marked/free_product_engine.hpp"
#include "marked/group.hpp"
#include "marked/hn_engine.hpp"
#include "marked/lamplighter_engine.hpp"
#include "marked/metabelian_engine.hpp"

namespace marked {

/// Line-oriented group definition:
///   engine = coset-table
///   generators = a b
///   relators = a^2 b^2 (a b)^3
/// plus engine parameters (max_cosets, verify_exponent, hn_rank, lamp_range,
/// base = <file>, factor = <file> repeated). '#' starts a comment.
struct GroupFile {
  std::string path;
  std::vector<std::pair<std::string, std::string>> entries;
  std::vector<int> lines;

  std::string get(const std::string& key, const std::string& fallback = "") const {
    for (size_t i = 0; i < entries.size(); ++i) {
      if (entries[i].first == key) return entries[i].second;
    }
    return fallback;
  }
  std::vector<std::string> get_all(const std::string& key) const {
    std::vector<std::string> out;
    for (const auto& [k, v] : entries) {
      if (k == key) out.push_back(v);
    }
    return out;
  }
  bool has(const std::string& key) const {
    for (const auto& [k, v] : entries) {
      if (k == key) return true;
    }
    return false;
  }
};

inline GroupFile read_group_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open group file \"" + path + "\"");
  GroupFile gf;
  gf.path = path;
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    size_t hash = line.find('#');
    if (hash != std::string::npos) line.resize(hash);
    size_t b = line.find_first_not_of(" \t\r");
    if (b == std::string::npos) continue;
    size_t e = line.find_last_not_of(" \t\r");
    line = line.substr(b, e - b + 1);
    size_t eq = line.find('=');
    if (eq == std::string::npos) {
      throw ConfigError(path + ":" + std::to_string(lineno) + ": expected key = value");
    }
    auto trim = [](std::string s) {
      size_t x = s.find_first_not_of(" \t");
      if (x == std::string::npos) return std::string();
      size_t y = s.find_last_not_of(" \t");
      return s.substr(x, y - x + 1);
    };
    std::string key = trim(line.substr(0, eq));
    std::string val = trim(line.substr(eq + 1));
    if (key.empty() || val.empty()) {
      throw ConfigError(path + ":" + std::to_string(lineno) + ": empty key or value");
    }
    gf.entries.emplace_back(key, val);
    gf.lines.push_back(lineno);
  }
  return gf;
}

inline std::vector<std::string> split_names(const std::string& s) {
  std::vector<std::string> out;
  size_t pos = 0;
  while (pos < s.size()) {
    while (pos < s.size() && (s[pos] == ' ' || s[pos] == '\t')) ++pos;
    size_t start = pos;
    while (pos < s.size() && s[pos] != ' ' && s[pos] != '\t') ++pos;
    if (pos > start) out.push_back(s.substr(start, pos - start));
  }
  return out;
}

inline MarkedGroup load_group(const std::string& path);

inline MarkedGroup make_group(const GroupFile& gf) {
  const std::string engine = gf.get("engine");
  if (engine.empty()) throw ConfigError(gf.path + ": missing \"engine =\" line");
  auto where = [&](const std::string& what) { return gf.path + ": " + what; };

  if (engine == "free") {
    auto gens = split_names(gf.get("generators"));
    if (gens.empty()) throw ConfigError(where("free engine needs generators"));
    return make_free_group(gens);
  }
  if (engine == "coset-table") {
    FinitePresentation pres;
    pres.generators = split_names(gf.get("generators"));
    if (pres.generators.empty()) throw ConfigError(where("coset-table engine needs generators"));
    WordParser wp(pres.generators);
    for (size_t ei = 0; ei < gf.entries.size(); ++ei) {
      if (gf.entries[ei].first != "relators") continue;
      const std::string& rs = gf.entries[ei].second;
      const std::string line_ctx = gf.path + ":" + std::to_string(gf.lines[ei]) + ": ";
      // a relators line holds whitespace-separated relator words; words with
      // parens are one token each, so parse the whole line then split on
      // top-level boundaries by parsing each token group
      // simplest faithful rule: each line is a list of words, one relator per
      // parenthesized-or-plain token sequence separated by two spaces is
      // ambiguous -- instead treat every maximal token with its ^k as one
      // relator when separated by whitespace at paren depth 0.
      int depth = 0;
      std::string cur;
      std::vector<std::string> parts;
      for (char c : rs) {
        if (c == '(') ++depth;
        if (c == ')') --depth;
        if ((c == ' ' || c == '\t') && depth == 0) {
          // a space at depth 0 only splits if the next token starts a new
          // relator; relator words here are single tokens like a^2 or (a b)^3
          if (!cur.empty()) parts.push_back(cur);
          cur.clear();
        } else {
          cur.push_back(c);
        }
      }
      if (!cur.empty()) parts.push_back(cur);
      for (const std::string& p : parts) {
        Word r;
        try {
          r = reduce_word(wp.parse(p));
        } catch (const ConfigError& e) {
          throw ConfigError(line_ctx + e.what());
        }
        if (r.empty()) {
          throw ConfigError(line_ctx + "relator \"" + p + "\" reduces to the empty word");
        }
        pres.relators.push_back(r);
      }
    }
    if (pres.relators.empty()) throw ConfigError(where("coset-table engine needs relators"));
    std::uint64_t cap = 1'000'000;
    if (gf.has("max_cosets")) cap = std::stoull(gf.get("max_cosets"));
    MarkedGroup G = coset_enumerate(pres, cap);
    if (gf.has("verify_exponent")) {
      unsigned q = static_cast<unsigned>(std::stoul(gf.get("verify_exponent")));
      // self-validation: exhaustively check the law, augment and re-enumerate
      for (int round = 0; round < 16; ++round) {
        const auto& eng = dynamic_cast<const CosetEngine&>(G.engine());
        bool ok = true;
        for (std::uint32_t i = 0; i < eng.order() && ok; ++i) {
          GroupElement g = eng.element_at(i), p = G.identity();
          for (unsigned k = 0; k < q; ++k) p = G.multiply(p, g);
          if (!p.is_identity()) {
            pres.relators.push_back(
                reduce_word(pow_word(eng.element_word(g), static_cast<int>(q))));
            ok = false;
          }
        }
        if (ok) return G;
        G = coset_enumerate(pres, cap);
      }
      throw InvariantViolated(where("exponent law failed to stabilize"));
    }
    return G;
  }
  if (engine == "hn") {
    if (!gf.has("hn_rank")) throw ConfigError(where("hn engine needs hn_rank"));
    return make_hn_group(std::stoi(gf.get("hn_rank")));
  }
  if (engine == "lamplighter") {
    if (!gf.has("lamp_range")) throw ConfigError(where("lamplighter engine needs lamp_range"));
    return make_lamplighter_group(std::stoi(gf.get("lamp_range")));
  }
  if (engine == "free-product") {
    std::vector<MarkedGroup> factors;
    std::filesystem::path dir = std::filesystem::path(gf.path).parent_path();
    for (const std::string& f : gf.get_all("factor")) {
      factors.push_back(load_group((dir / f).string()));
    }
    if (factors.size() < 2) throw ConfigError(where("free-product engine needs >= 2 factors"));
    return make_free_product(std::move(factors));
  }
  if (engine == "metabelianized") {
    if (!gf.has("base")) throw ConfigError(where("metabelianized engine needs base = <file>"));
    std::filesystem::path dir = std::filesystem::path(gf.path).parent_path();
    MarkedGroup base = load_group((dir / gf.get("base")).string());
    return metabelianize(base).cover;
  }
  throw ConfigError(where("unknown engine \"" + engine + "\""));
}

inline MarkedGroup load_group(const std::string& path) {
  return make_group(read_group_file(path));
}

}  // namespace marked
