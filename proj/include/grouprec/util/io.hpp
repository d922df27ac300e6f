/* Copyright 2026 The grouprec Authors. All Rights Reserved.

Licensed under the Apache License, Version 2.0 (the "License");
you may not use this file except in compliance with the License.
You may obtain a copy of the License at

    http://www.apache.org/licenses/LICENSE-2.0

Unless required by applicable law or agreed to in writing, software
distributed under the License is distributed on an "AS IS" BASIS,
WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
See the License for the specific language governing permissions and
limitations under the License.
==============================================================================*/
#pragma once

#include <filesystem>
#include <fstream>
#include <string>
#include <vector>

#include "grouprec/util/error.hpp"
#include "grouprec/util/hash.hpp"

namespace grouprec {

inline std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  require(in.good(), "cannot open file for reading: ", path.string());
  std::string data((std::istreambuf_iterator<char>(in)),
                   std::istreambuf_iterator<char>());
  return data;
}

inline std::vector<std::string> read_lines(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  require(in.good(), "cannot open file for reading: ", path.string());
  std::vector<std::string> lines;
  std::string line;
  while (std::getline(in, line)) lines.push_back(line);
  return lines;
}

// Writes via a temp file + rename so partially written artifacts never
// shadow a completed stage.
inline void write_file(const std::filesystem::path& path,
                       const std::string& data) {
  if (path.has_parent_path())
    std::filesystem::create_directories(path.parent_path());
  const std::filesystem::path tmp = path.string() + ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    require(out.good(), "cannot open file for writing: ", tmp.string());
    out.write(data.data(), static_cast<std::streamsize>(data.size()));
    require(out.good(), "write failed: ", tmp.string());
  }
  std::filesystem::rename(tmp, path);
}

inline std::uint64_t file_hash(const std::filesystem::path& path) {
  return fnv1a64(read_file(path));
}

}  // namespace grouprec
