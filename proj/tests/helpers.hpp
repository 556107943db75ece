#pragma once

#include <fstream>
#include <sstream>
#include <string>

#include "mpst/parser.hpp"
#include "mpst/term.hpp"

namespace mpst::testing {

inline std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw MpstError("cannot open " + path);
  std::ostringstream os;
  os << in.rdbuf();
  return os.str();
}

inline std::string corpus_path(const std::string& name) {
  return std::string(MPST_CORPUS_DIR) + "/" + name;
}

inline ProtocolSpec load_corpus(const std::string& name) {
  return parse_protocol(read_file(corpus_path(name)));
}

inline Endpoint ep(const std::string& role, const std::string& index = "0",
                   bool crashed = false) {
  return Endpoint{Identity{role, index}, crashed};
}

inline Identity id(const std::string& role, const std::string& index = "0") {
  return Identity{role, index};
}

}  // namespace mpst::testing
