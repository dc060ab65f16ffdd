#pragma once

#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "relsim/errors.hpp"
#include "relsim/finrel.hpp"

namespace relsim {

// Line format:
//   dom: a b c
//   cod: x y
//   a -> x
// Blank lines and lines starting with '#' are ignored. The carrier headers are
// optional when the caller supplies carriers.

inline std::string to_text(const FinRel& r) {
  std::ostringstream os;
  os << "dom:";
  for (const auto& n : r.dom().names()) os << ' ' << n;
  os << "\ncod:";
  for (const auto& n : r.cod().names()) os << ' ' << n;
  os << '\n';
  for (auto [x, y] : r.pairs()) os << r.dom().name(x) << " -> " << r.cod().name(y) << '\n';
  return os.str();
}

namespace detail {

inline std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

inline std::vector<std::string> split_ws(const std::string& s) {
  std::istringstream is(s);
  std::vector<std::string> out;
  for (std::string w; is >> w;) out.push_back(w);
  return out;
}

inline std::size_t lookup(const FinSet& s, const std::string& name, std::size_t line) {
  auto i = s.index_of(name);
  if (!i) throw ParseError("unknown element '" + name + "'", line);
  return *i;
}

}  // namespace detail

/// Parse the line format. Carriers given as arguments take precedence over headers.
inline FinRel relation_from_text(const std::string& text, std::optional<FinSet> dom = std::nullopt,
                                 std::optional<FinSet> cod = std::nullopt) {
  std::istringstream is(text);
  std::vector<std::pair<std::string, std::string>> raw;
  std::vector<std::size_t> raw_lines;
  std::size_t lineno = 0;
  for (std::string line; std::getline(is, line);) {
    ++lineno;
    line = detail::trim(line);
    if (line.empty() || line[0] == '#') continue;
    if (line.rfind("dom:", 0) == 0) {
      if (!dom) dom = FinSet(detail::split_ws(line.substr(4)));
      continue;
    }
    if (line.rfind("cod:", 0) == 0) {
      if (!cod) cod = FinSet(detail::split_ws(line.substr(4)));
      continue;
    }
    const auto arrow = line.find("->");
    if (arrow == std::string::npos) throw ParseError("expected 'x -> y'", lineno);
    auto lhs = detail::trim(line.substr(0, arrow));
    auto rhs = detail::trim(line.substr(arrow + 2));
    if (lhs.empty() || rhs.empty()) throw ParseError("empty element name", lineno);
    raw.emplace_back(std::move(lhs), std::move(rhs));
    raw_lines.push_back(lineno);
  }
  if (!dom || !cod) throw ParseError("missing dom:/cod: header and no carriers supplied", lineno);
  FinRel r(*dom, *cod);
  for (std::size_t k = 0; k < raw.size(); ++k)
    r.set(detail::lookup(*dom, raw[k].first, raw_lines[k]),
          detail::lookup(*cod, raw[k].second, raw_lines[k]));
  return r;
}

inline nlohmann::json to_json(const FinRel& r) {
  nlohmann::json j;
  j["dom"] = r.dom().names();
  j["cod"] = r.cod().names();
  j["pairs"] = nlohmann::json::array();
  for (auto [x, y] : r.pairs()) j["pairs"].push_back({r.dom().name(x), r.cod().name(y)});
  return j;
}

inline FinRel relation_from_json(const nlohmann::json& j, std::optional<FinSet> dom = std::nullopt,
                                 std::optional<FinSet> cod = std::nullopt) {
  try {
    if (!dom) dom = FinSet(j.at("dom").get<std::vector<std::string>>());
    if (!cod) cod = FinSet(j.at("cod").get<std::vector<std::string>>());
    FinRel r(*dom, *cod);
    std::size_t k = 0;
    for (const auto& p : j.at("pairs")) {
      ++k;
      if (!p.is_array() || p.size() != 2) throw ParseError("pair must be a 2-element array", k);
      r.set(detail::lookup(*dom, p[0].get<std::string>(), k),
            detail::lookup(*cod, p[1].get<std::string>(), k));
    }
    return r;
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(std::string("bad relation JSON: ") + e.what(), 0);
  }
}

}  // namespace relsim
