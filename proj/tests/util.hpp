#pragma once

#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <sstream>
#include <string>

#include "mhksc/common.hpp"

// Scratch directory removed on scope exit.
struct TempDir {
  std::string path;

  TempDir() {
    std::string tmpl = (std::filesystem::temp_directory_path() / "mhksc_test_XXXXXX").string();
    if (!mkdtemp(tmpl.data())) std::abort();
    path = tmpl;
  }
  ~TempDir() {
    std::error_code ec;
    std::filesystem::remove_all(path, ec);
  }
  TempDir(const TempDir&) = delete;
  TempDir& operator=(const TempDir&) = delete;

  std::string file(const std::string& name) const { return path + "/" + name; }
};

inline void write_file(const std::string& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  out << content;
}

inline std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

// Runs f, which must throw mhksc::Error; hands the error to inspect.
inline mhksc::Error catch_error(const std::function<void()>& f) {
  try {
    f();
  } catch (const mhksc::Error& e) {
    return e;
  }
  return mhksc::Error(static_cast<mhksc::errc>(0), "(no error thrown)");
}
