#include "libess/mps.hpp"

#include <charconv>
#include <fstream>

#include "libess/errors.hpp"

namespace ess {

std::string format_exact(double v) {
  char buf[40];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v);
  if (ec != std::errc())
    throw io_error("number formatting failed");
  return std::string(buf, ptr);
}

namespace {

void pad_to(std::string& line, size_t col) {
  if (line.size() >= col) {
    line += ' ';
    return;
  }
  line.resize(col, ' ');
}

void check_name(const std::string& name, const char* what) {
  if (name.empty() || name.size() > 8)
    throw config_error(std::string(what) + " name must be 1..8 characters: '" + name + "'");
  for (char c : name)
    if (c <= ' ' || c == '\'' || c == '"')
      throw config_error(std::string(what) + " name has unsupported characters: '" + name +
                         "'");
}

}  // namespace

std::string mps_to_string(const MilpModel& model) {
  model.validate();
  check_name(model.name, "model");
  for (const auto& v : model.vars) check_name(v.name, "variable");
  for (const auto& r : model.rows) check_name(r.name, "row");

  std::string out;
  out.reserve(64 * (model.vars.size() + model.rows.size()) + 256);

  out += "NAME          " + model.name + "\n";
  if (model.maximize) {
    out += "OBJSENSE\n";
    out += "    MAX\n";
  }

  out += "ROWS\n";
  out += " N  OBJ\n";
  for (const auto& r : model.rows) {
    char s = r.sense == RowSense::LE ? 'L' : (r.sense == RowSense::GE ? 'G' : 'E');
    out += ' ';
    out += s;
    out += "  ";
    out += r.name;
    out += '\n';
  }

  // Column-wise coefficient lists.
  std::vector<std::vector<std::pair<const std::string*, double>>> cols(model.vars.size());
  for (const auto& r : model.rows)
    for (const auto& [idx, coef] : r.terms) cols[idx].push_back({&r.name, coef});

  out += "COLUMNS\n";
  bool integer_open = false;
  int marker = 0;
  auto entry = [&out](const std::string& col, const std::string& row, double v) {
    std::string line = "    ";
    line += col;
    pad_to(line, 14);
    line += row;
    pad_to(line, 24);
    line += format_exact(v);
    line += '\n';
    out += line;
  };
  for (size_t j = 0; j < model.vars.size(); ++j) {
    const Variable& v = model.vars[j];
    bool want_int = v.kind == VarKind::Binary;
    if (want_int != integer_open) {
      std::string line = "    M";
      line += std::to_string(marker++);
      pad_to(line, 14);
      line += "'MARKER'";
      pad_to(line, 39);
      line += want_int ? "'INTORG'" : "'INTEND'";
      line += '\n';
      out += line;
      integer_open = want_int;
    }
    if (v.obj != 0.0 || cols[j].empty()) entry(v.name, "OBJ", v.obj);
    for (const auto& [rname, coef] : cols[j]) entry(v.name, *rname, coef);
  }
  if (integer_open) {
    std::string line = "    M";
    line += std::to_string(marker++);
    pad_to(line, 14);
    line += "'MARKER'";
    pad_to(line, 39);
    line += "'INTEND'";
    line += '\n';
    out += line;
  }

  out += "RHS\n";
  for (const auto& r : model.rows) {
    if (r.rhs == 0.0) continue;
    std::string line = "    RHS";
    pad_to(line, 14);
    line += r.name;
    pad_to(line, 24);
    line += format_exact(r.rhs);
    line += '\n';
    out += line;
  }

  out += "BOUNDS\n";
  for (const auto& v : model.vars) {
    auto bline = [&out, &v](const char* kind, double val, bool with_value) {
      std::string line = " ";
      line += kind;
      line += " BND";
      pad_to(line, 14);
      line += v.name;
      if (with_value) {
        pad_to(line, 24);
        line += format_exact(val);
      }
      line += '\n';
      out += line;
    };
    if (v.lb == v.ub) {
      bline("FX", v.lb, true);
    } else {
      bline("LO", v.lb, true);
      bline("UP", v.ub, true);
    }
  }

  out += "ENDATA\n";
  return out;
}

void write_mps(const MilpModel& model, const std::string& path) {
  std::string text = mps_to_string(model);
  std::ofstream f(path, std::ios::binary);
  if (!f) throw io_error("cannot write MPS file " + path);
  f << text;
  if (!f) throw io_error("short write on MPS file " + path);
}

}  // namespace ess
