#pragma once

#include <fstream>
#include <sstream>
#include <stdexcept>
#include <string>

#include "ppw/parser.hpp"
#include "ppw/printer.hpp"

namespace ppw::test {

inline std::string models_dir() { return PPW_MODELS_DIR; }
inline std::string model_path(const std::string& name) { return models_dir() + "/" + name; }

inline std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot read " + path);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

inline std::string join_diagnostics(const std::vector<Diagnostic>& diags) {
  std::string out;
  for (const auto& d : diags) out += to_string(d) + "\n";
  return out;
}

inline Program program(const std::string& text) {
  auto r = parse_program(text);
  if (!ok(r)) throw std::runtime_error("parse failed:\n" + join_diagnostics(std::get<1>(r)));
  return std::get<0>(r);
}

inline Program model(const std::string& name) { return program(read_file(model_path(name))); }

inline Formula formula(const std::string& text) {
  auto r = parse_formula(text);
  if (!ok(r)) throw std::runtime_error("formula parse failed:\n" + join_diagnostics(std::get<1>(r)));
  return std::get<0>(r);
}

inline Term term(const std::string& text) {
  auto r = parse_term(text);
  if (!ok(r)) throw std::runtime_error("term parse failed:\n" + join_diagnostics(std::get<1>(r)));
  return std::get<0>(r);
}

}  // namespace ppw::test
