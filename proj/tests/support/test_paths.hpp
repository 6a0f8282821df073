#pragma once

#include <fstream>
#include <sstream>
#include <string>

#ifndef JITVD_TEST_DATA
#error "JITVD_TEST_DATA must point at tests/data"
#endif

namespace jitvd {

inline std::string fixture_path(const std::string& name) { return std::string(JITVD_TEST_DATA) + "/" + name; }

inline std::string read_fixture(const std::string& name) {
  std::ifstream in(fixture_path(name), std::ios::binary);
  if (!in) throw std::runtime_error("missing fixture " + name);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

}  // namespace jitvd
