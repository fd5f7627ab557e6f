#pragma once

#include <cstdio>
#include <map>
#include <set>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "vodfog/error.hpp"
#include "vodfog/milp/linear_model.hpp"
#include "vodfog/util.hpp"

namespace vodfog::milp {

// Fixed-format MPS.
//
// Field columns (1-based): F1 2-3, F2 5-12, F3 15-22, F4 25-36, F5 40-47,
// F6 50-61. Names are at most 8 characters and numbers at most 12. Every
// integer column carries explicit bounds, since a bare integer column between
// markers reads as binary in most solvers.

struct MpsNames {
  std::vector<std::string> columns;  // MPS name per variable
  std::vector<std::string> rows;     // MPS name per constraint
  std::string objective;
};

namespace detail {

inline std::string base36(std::size_t v, std::size_t width) {
  static constexpr char kDigits[] = "0123456789ABCDEFGHIJKLMNOPQRSTUVWXYZ";
  std::string s;
  do {
    s.insert(s.begin(), kDigits[v % 36]);
    v /= 36;
  } while (v > 0);
  while (s.size() < width) s.insert(s.begin(), '0');
  return s;
}

inline std::string sanitize(std::string_view name) {
  std::string s(name);
  for (auto& c : s)
    if (c == ' ' || c == '\t' || c == '$' || c == '*') c = '_';
  return s;
}

// Short names for one namespace. A name keeps its first eight characters
// unless that collides; collisions become a two-letter prefix plus a base-36
// sequence number.
inline std::vector<std::string> shorten(const std::vector<std::string>& full, std::set<std::string> reserved = {}) {
  std::vector<std::string> out;
  out.reserve(full.size());
  std::set<std::string>& used = reserved;
  std::size_t seq = 0;
  for (const auto& name : full) {
    std::string cand = sanitize(name).substr(0, 8);
    if (cand.empty() || used.count(cand)) {
      const std::string prefix = sanitize(name).substr(0, 2);
      do cand = prefix + base36(seq++, 8 - prefix.size());
      while (used.count(cand));
    }
    used.insert(cand);
    out.push_back(std::move(cand));
  }
  return out;
}

inline std::string field_line(std::initializer_list<std::pair<int, std::string_view>> fields) {
  std::string line;
  for (const auto& [col, text] : fields) {
    if (text.empty()) continue;
    const std::size_t at = static_cast<std::size_t>(col - 1);
    if (line.size() < at) line.resize(at, ' ');
    else if (line.size() > at) line.push_back(' ');
    line += text;
  }
  return line;
}

}  // namespace detail

inline MpsNames mps_names(const LinearModel& m) {
  MpsNames n;
  std::vector<std::string> cols, rows;
  for (const auto& v : m.vars()) cols.push_back(v.name);
  for (const auto& r : m.rows()) rows.push_back(r.name);
  n.objective = detail::sanitize(m.objective_name()).substr(0, 8);
  n.columns = detail::shorten(cols);
  n.rows = detail::shorten(rows, {n.objective});
  return n;
}

// Shortest %g rendering that fits the 12-character numeric field.
inline std::string mps_number(double v) {
  if (v == 0.0) return "0";
  char buf[40];
  for (int prec = 12; prec >= 1; --prec) {
    std::snprintf(buf, sizeof buf, "%.*g", prec, v);
    std::string s(buf);
    if (s.size() <= 12) return s;
    // Drop the exponent's leading zero and plus sign when that makes it fit.
    if (auto e = s.find("e+0"); e != std::string::npos) s.erase(e + 1, 2);
    else if (auto e2 = s.find("e-0"); e2 != std::string::npos) s.erase(e2 + 2, 1);
    else if (auto e3 = s.find("e+"); e3 != std::string::npos) s.erase(e3 + 1, 1);
    if (s.size() <= 12) return s;
  }
  throw Error("number cannot be written in 12 characters");
}

struct MpsOutput {
  std::string text;
  std::string name_map;  // sidecar: `C|R <mps name> <full name>` per renamed entry
  MpsNames names;
};

inline MpsOutput emit_mps(const LinearModel& m, bool relax_integrality = false) {
  m.validate();
  MpsOutput out;
  out.names = mps_names(m);
  const auto& cn = out.names.columns;
  const auto& rn = out.names.rows;
  std::string& t = out.text;
  auto line = [&](std::initializer_list<std::pair<int, std::string_view>> f) {
    t += detail::field_line(f);
    t += '\n';
  };
  line({{1, "NAME"}, {15, detail::sanitize(m.name()).substr(0, 8)}});
  t += "ROWS\n";
  line({{2, "N"}, {5, out.names.objective}});
  auto sense_code = [](Sense s) { return s == Sense::le ? "L" : s == Sense::ge ? "G" : "E"; };
  for (std::size_t r = 0; r < m.rows().size(); ++r) line({{2, sense_code(m.rows()[r].sense)}, {5, rn[r]}});

  // Column-major coefficient lists, row order preserved.
  std::vector<std::vector<std::pair<int, double>>> by_col(m.vars().size());
  for (int r = 0; r < m.row_count(); ++r) {
    std::map<int, double> merged;
    for (const auto& term : m.rows()[r].terms) merged[term.var] += term.coef;
    for (const auto& [var, coef] : merged)
      if (coef != 0.0) by_col[var].emplace_back(r, coef);
  }
  t += "COLUMNS\n";
  bool in_int = false;
  int marker = 0;
  for (int c = 0; c < m.var_count(); ++c) {
    const auto& v = m.vars()[c];
    const bool is_int = v.integer && !relax_integrality;
    if (is_int != in_int) {
      const std::string mname = "M" + detail::base36(marker++, 7);
      line({{5, mname}, {15, "'MARKER'"}, {40, is_int ? "'INTORG'" : "'INTEND'"}});
      in_int = is_int;
    }
    std::vector<std::pair<std::string, std::string>> entries;
    if (v.obj != 0.0) entries.emplace_back(out.names.objective, mps_number(v.obj));
    for (const auto& [r, coef] : by_col[c]) entries.emplace_back(rn[r], mps_number(coef));
    if (entries.empty()) entries.emplace_back(out.names.objective, "0");
    for (std::size_t i = 0; i < entries.size(); i += 2) {
      if (i + 1 < entries.size())
        line({{5, cn[c]}, {15, entries[i].first}, {25, entries[i].second}, {40, entries[i + 1].first},
              {50, entries[i + 1].second}});
      else
        line({{5, cn[c]}, {15, entries[i].first}, {25, entries[i].second}});
    }
  }
  if (in_int) line({{5, "M" + detail::base36(marker++, 7)}, {15, "'MARKER'"}, {40, "'INTEND'"}});

  t += "RHS\n";
  for (int r = 0; r < m.row_count(); ++r)
    if (m.rows()[r].rhs != 0.0) line({{5, "RHS"}, {15, rn[r]}, {25, mps_number(m.rows()[r].rhs)}});
  t += "RANGES\n";
  for (int r = 0; r < m.row_count(); ++r)
    if (m.rows()[r].range) line({{5, "RNG"}, {15, rn[r]}, {25, mps_number(*m.rows()[r].range)}});
  t += "BOUNDS\n";
  for (int c = 0; c < m.var_count(); ++c) {
    const auto& v = m.vars()[c];
    const bool is_int = v.integer && !relax_integrality;
    auto bound = [&](const char* code, std::string_view value) { line({{2, code}, {5, "BND"}, {15, cn[c]}, {25, value}}); };
    if (v.lb == -kInf && v.ub == kInf) {
      bound("FR", "");
    } else if (v.lb == v.ub) {
      bound("FX", mps_number(v.lb));
    } else {
      if (v.lb == -kInf) bound("MI", "");
      else if (v.lb != 0.0) bound("LO", mps_number(v.lb));
      if (v.ub != kInf) bound("UP", mps_number(v.ub));
      else if (is_int) bound("PL", "");
    }
  }
  t += "ENDATA\n";

  for (int c = 0; c < m.var_count(); ++c)
    if (cn[c] != m.vars()[c].name) out.name_map += "C " + cn[c] + " " + m.vars()[c].name + "\n";
  for (int r = 0; r < m.row_count(); ++r)
    if (rn[r] != m.rows()[r].name) out.name_map += "R " + rn[r] + " " + m.rows()[r].name + "\n";
  return out;
}

// Reads MPS (fixed layout, or any whitespace-separated layout without spaces
// in names) back into a model whose names are the MPS names.
inline LinearModel parse_mps(std::string_view doc) {
  enum class Section { none, rows, columns, rhs, ranges, bounds, done };
  Section sec = Section::none;
  std::string name = "MODEL", objective;
  LinearModel tmp;
  std::vector<Constraint> rows;
  std::unordered_map<std::string, int> row_index;
  struct Col {
    std::string name;
    bool integer = false;
    double obj = 0;
    double lb = 0, ub = kInf;
    bool ub_set = false;
  };
  std::vector<Col> cols;
  std::unordered_map<std::string, int> col_index;
  bool in_int = false;
  int lineno = 0;
  auto col_of = [&](const std::string& n) {
    auto it = col_index.find(n);
    if (it != col_index.end()) return it->second;
    col_index.emplace(n, static_cast<int>(cols.size()));
    cols.push_back({n, in_int});
    return static_cast<int>(cols.size()) - 1;
  };
  auto row_ref = [&](const std::string& n) -> int {
    if (n == objective) return -1;
    auto it = row_index.find(n);
    if (it == row_index.end()) throw ParseError("unknown row '" + n + "'", lineno);
    return it->second;
  };
  for (const auto& raw : text::lines(doc)) {
    ++lineno;
    if (raw.empty() || raw[0] == '*') continue;
    const auto tok = text::split_ws(raw);
    if (tok.empty()) continue;
    if (raw[0] != ' ' && raw[0] != '\t') {
      const auto& head = tok[0];
      if (head == "NAME") name = tok.size() > 1 ? tok[1] : "MODEL";
      else if (head == "ROWS") sec = Section::rows;
      else if (head == "COLUMNS") sec = Section::columns;
      else if (head == "RHS") sec = Section::rhs;
      else if (head == "RANGES") sec = Section::ranges;
      else if (head == "BOUNDS") sec = Section::bounds;
      else if (head == "ENDATA") sec = Section::done;
      else throw ParseError("unknown section '" + head + "'", lineno);
      continue;
    }
    auto num = [&](const std::string& s) { return text::require_double(s, "MPS value", lineno); };
    switch (sec) {
      case Section::rows: {
        if (tok.size() != 2) throw ParseError("bad ROWS entry", lineno);
        if (tok[0] == "N") {
          if (objective.empty()) objective = tok[1];
          continue;
        }
        const Sense s = tok[0] == "L" ? Sense::le : tok[0] == "G" ? Sense::ge : Sense::eq;
        if (tok[0] != "L" && tok[0] != "G" && tok[0] != "E") throw ParseError("bad row type", lineno);
        row_index.emplace(tok[1], static_cast<int>(rows.size()));
        rows.push_back({tok[1], {}, s, 0.0, std::nullopt});
        break;
      }
      case Section::columns: {
        if (tok.size() >= 3 && tok[1] == "'MARKER'") {
          if (tok.back() == "'INTORG'") in_int = true;
          else if (tok.back() == "'INTEND'") in_int = false;
          else throw ParseError("bad marker", lineno);
          continue;
        }
        if (tok.size() != 3 && tok.size() != 5) throw ParseError("bad COLUMNS entry", lineno);
        const int c = col_of(tok[0]);
        for (std::size_t i = 1; i + 1 < tok.size(); i += 2) {
          const int r = row_ref(tok[i]);
          const double v = num(tok[i + 1]);
          if (r < 0) cols[c].obj += v;
          else rows[r].terms.push_back({c, v});
        }
        break;
      }
      case Section::rhs:
      case Section::ranges: {
        if (tok.size() != 3 && tok.size() != 5) throw ParseError("bad RHS/RANGES entry", lineno);
        for (std::size_t i = 1; i + 1 < tok.size(); i += 2) {
          const int r = row_ref(tok[i]);
          if (r < 0) continue;
          if (sec == Section::rhs) rows[r].rhs = num(tok[i + 1]);
          else rows[r].range = num(tok[i + 1]);
        }
        break;
      }
      case Section::bounds: {
        if (tok.size() < 3) throw ParseError("bad BOUNDS entry", lineno);
        auto it = col_index.find(tok[2]);
        if (it == col_index.end()) throw ParseError("bound on unknown column '" + tok[2] + "'", lineno);
        auto& col = cols[it->second];
        const auto& code = tok[0];
        const bool has_value = tok.size() >= 4;
        if ((code == "UP" || code == "LO" || code == "FX" || code == "LI" || code == "UI") && !has_value)
          throw ParseError("bound needs a value", lineno);
        if (code == "UP" || code == "UI") {
          col.ub = num(tok[3]);
          col.ub_set = true;
        } else if (code == "LO" || code == "LI") col.lb = num(tok[3]);
        else if (code == "FX") col.lb = col.ub = num(tok[3]), col.ub_set = true;
        else if (code == "FR") col.lb = -kInf, col.ub = kInf, col.ub_set = true;
        else if (code == "MI") col.lb = -kInf;
        else if (code == "PL") col.ub = kInf, col.ub_set = true;
        else if (code == "BV") col.lb = 0, col.ub = 1, col.integer = true, col.ub_set = true;
        else throw ParseError("unknown bound type '" + code + "'", lineno);
        break;
      }
      case Section::none:
      case Section::done: throw ParseError("data outside a section", lineno);
    }
  }
  if (sec != Section::done) throw ParseError("missing ENDATA");
  LinearModel m(name, objective.empty() ? "COST" : objective);
  for (const auto& c : cols) {
    // Integer columns without an explicit upper bound are binary.
    const double ub = c.integer && !c.ub_set ? 1.0 : c.ub;
    m.add_var(c.name, c.lb, ub, c.integer, c.obj);
  }
  for (auto& r : rows) m.add_row(r.name, std::move(r.terms), r.sense, r.rhs, r.range);
  return m;
}

}  // namespace vodfog::milp
