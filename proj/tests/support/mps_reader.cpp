#include "support/mps_reader.hpp"

#include <cstdlib>
#include <fstream>
#include <limits>
#include <sstream>
#include <stdexcept>
#include <unordered_map>
#include <vector>

namespace esstest {

using ess::MilpModel;
using ess::Row;
using ess::RowSense;
using ess::VarKind;
using ess::Variable;

namespace {

std::vector<std::string> tokens(const std::string& line) {
  std::vector<std::string> out;
  std::istringstream ss(line);
  std::string t;
  while (ss >> t) out.push_back(t);
  return out;
}

double to_num(const std::string& t) {
  char* end = nullptr;
  double v = std::strtod(t.c_str(), &end);
  if (end == nullptr || *end != '\0')
    throw std::runtime_error("mps reader: bad number '" + t + "'");
  return v;
}

struct RawVar {
  std::string name;
  bool integer = false;
  bool saw_lo = false, saw_up = false, fixed = false;
  double lb = 0;
  double ub = std::numeric_limits<double>::infinity();
  double obj = 0;
};

}  // namespace

MilpModel read_mps_text(const std::string& text) {
  std::istringstream in(text);
  std::string line;

  MilpModel model;
  model.maximize = false;

  std::string section;
  std::string obj_row;
  bool integer_open = false;
  bool pending_objsense = false;

  std::vector<RawVar> raw;
  std::unordered_map<std::string, int> var_of;
  std::unordered_map<std::string, int> row_of;

  auto var_slot = [&](const std::string& name) -> RawVar& {
    auto it = var_of.find(name);
    if (it == var_of.end()) {
      var_of.emplace(name, static_cast<int>(raw.size()));
      raw.push_back(RawVar{name, integer_open, false, false, false, 0,
                           std::numeric_limits<double>::infinity(), 0});
      return raw.back();
    }
    return raw[it->second];
  };

  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    if (line[0] == '*') continue;  // comment

    bool indented = line[0] == ' ' || line[0] == '\t';
    auto tok = tokens(line);
    if (tok.empty()) continue;

    if (!indented) {
      pending_objsense = false;
      section = tok[0];
      if (section == "NAME") {
        model.name = tok.size() > 1 ? tok[1] : "";
      } else if (section == "OBJSENSE") {
        if (tok.size() > 1) {
          model.maximize = tok[1] == "MAX" || tok[1] == "MAXIMIZE";
        } else {
          pending_objsense = true;
        }
      } else if (section == "ENDATA") {
        break;
      }
      continue;
    }

    if (pending_objsense) {
      model.maximize = tok[0] == "MAX" || tok[0] == "MAXIMIZE";
      pending_objsense = false;
      continue;
    }

    if (section == "ROWS") {
      if (tok.size() != 2) throw std::runtime_error("mps reader: bad ROWS line: " + line);
      if (tok[0] == "N") {
        if (obj_row.empty()) obj_row = tok[1];
        continue;
      }
      RowSense s;
      if (tok[0] == "L")
        s = RowSense::LE;
      else if (tok[0] == "G")
        s = RowSense::GE;
      else if (tok[0] == "E")
        s = RowSense::EQ;
      else
        throw std::runtime_error("mps reader: unknown row sense: " + line);
      row_of.emplace(tok[1], static_cast<int>(model.rows.size()));
      Row r;
      r.name = tok[1];
      r.sense = s;
      model.rows.push_back(std::move(r));
    } else if (section == "COLUMNS") {
      if (tok.size() >= 3 && tok[1] == "'MARKER'") {
        const std::string& mark = tok.back();
        if (mark == "'INTORG'")
          integer_open = true;
        else if (mark == "'INTEND'")
          integer_open = false;
        else
          throw std::runtime_error("mps reader: unknown marker: " + line);
        continue;
      }
      if (tok.size() < 3 || tok.size() % 2 == 0)
        throw std::runtime_error("mps reader: bad COLUMNS line: " + line);
      RawVar& v = var_slot(tok[0]);
      int vi = var_of[tok[0]];
      for (size_t k = 1; k + 1 < tok.size(); k += 2) {
        double coef = to_num(tok[k + 1]);
        if (tok[k] == obj_row) {
          v.obj = coef;
          continue;
        }
        auto it = row_of.find(tok[k]);
        if (it == row_of.end())
          throw std::runtime_error("mps reader: entry for unknown row " + tok[k]);
        model.rows[it->second].terms.push_back({vi, coef});
      }
    } else if (section == "RHS") {
      if (tok.size() < 3 || tok.size() % 2 == 0)
        throw std::runtime_error("mps reader: bad RHS line: " + line);
      for (size_t k = 1; k + 1 < tok.size(); k += 2) {
        if (tok[k] == obj_row) continue;  // objective offset, unused
        auto it = row_of.find(tok[k]);
        if (it == row_of.end())
          throw std::runtime_error("mps reader: rhs for unknown row " + tok[k]);
        model.rows[it->second].rhs = to_num(tok[k + 1]);
      }
    } else if (section == "BOUNDS") {
      if (tok.size() < 3) throw std::runtime_error("mps reader: bad BOUNDS line: " + line);
      const std::string& kind = tok[0];
      auto it = var_of.find(tok[2]);
      if (it == var_of.end())
        throw std::runtime_error("mps reader: bound for unknown variable " + tok[2]);
      RawVar& v = raw[it->second];
      if (kind == "FX") {
        v.lb = v.ub = to_num(tok[3]);
        v.fixed = true;
      } else if (kind == "LO") {
        v.lb = to_num(tok[3]);
        v.saw_lo = true;
      } else if (kind == "UP") {
        v.ub = to_num(tok[3]);
        v.saw_up = true;
      } else if (kind == "BV") {
        v.integer = true;
        v.lb = 0;
        v.ub = 1;
      } else if (kind == "MI") {
        v.lb = -std::numeric_limits<double>::infinity();
      } else if (kind == "PL") {
        v.ub = std::numeric_limits<double>::infinity();
      } else {
        throw std::runtime_error("mps reader: unsupported bound kind " + kind);
      }
    } else if (section == "RANGES") {
      throw std::runtime_error("mps reader: RANGES not supported");
    }
  }

  if (obj_row.empty()) throw std::runtime_error("mps reader: no objective row");

  for (const auto& rv : raw) {
    Variable v;
    v.name = rv.name;
    v.kind = rv.integer ? VarKind::Binary : VarKind::Continuous;
    v.lb = rv.lb;
    v.ub = rv.ub;
    v.obj = rv.obj;
    model.vars.push_back(v);
  }
  // Rebuild the name lookup used by var_index().
  MilpModel out;
  out.name = model.name;
  out.maximize = model.maximize;
  for (const auto& v : model.vars) out.add_var(v.name, v.lb, v.ub, v.obj, v.kind);
  for (auto& r : model.rows) out.add_row(r.name, r.sense, r.rhs, std::move(r.terms));
  return out;
}

MilpModel read_mps_file(const std::string& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw std::runtime_error("mps reader: cannot open " + path);
  std::ostringstream ss;
  ss << f.rdbuf();
  return read_mps_text(ss.str());
}

}  // namespace esstest
