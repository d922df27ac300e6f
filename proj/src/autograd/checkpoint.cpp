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
#include "grouprec/autograd/checkpoint.hpp"

#include <sstream>

#include "grouprec/util/error.hpp"
#include "grouprec/util/io.hpp"
#include "grouprec/util/strings.hpp"

namespace grouprec::autograd {

void Checkpoint::add(const std::string& name, const Tensor& t) {
  for (const auto& [existing, _] : entries) {
    require(existing != name, "Checkpoint: duplicate tensor name '",
                  name, "'");
  }
  entries.emplace_back(name, t);
}

const Tensor& Checkpoint::get(const std::string& name) const {
  for (const auto& [n, t] : entries) {
    if (n == name) return t;
  }
  fail("Checkpoint: no tensor named '", name, "'");
}

bool Checkpoint::has(const std::string& name) const {
  for (const auto& [n, _] : entries) {
    if (n == name) return true;
  }
  return false;
}

std::string Checkpoint::serialize() const {
  std::ostringstream os;
  os << "grouprec-checkpoint v1\n";
  os << "tensors " << entries.size() << "\n";
  for (const auto& [name, t] : entries) {
    os << "tensor " << name << " shape";
    for (std::size_t d : t.shape()) os << ' ' << d;
    os << "\n";
    const double* p = t.data();
    for (std::size_t i = 0; i < t.numel(); ++i) {
      if (i) os << ' ';
      os << fmt_double(p[i]);
    }
    os << "\n";
  }
  return os.str();
}

void Checkpoint::save(const std::string& path) const {
  write_file(path, serialize());
}

Checkpoint Checkpoint::deserialize(const std::string& text) {
  std::vector<std::string> lines = split(text, '\n');
  require(!lines.empty() && lines[0] == "grouprec-checkpoint v1",
                "Checkpoint: bad header");
  require(lines.size() >= 2, "Checkpoint: truncated file");
  std::vector<std::string> count_parts = split(lines[1], ' ');
  require(count_parts.size() == 2 && count_parts[0] == "tensors",
                "Checkpoint: bad tensor count line");
  const std::size_t count =
      static_cast<std::size_t>(parse_int(count_parts[1]));

  Checkpoint ckpt;
  std::size_t line = 2;
  for (std::size_t ti = 0; ti < count; ++ti) {
    require(line + 1 < lines.size() + 1 && line < lines.size(),
                  "Checkpoint: truncated at tensor ", ti);
    std::vector<std::string> head = split(lines[line], ' ');
    require(head.size() >= 3 && head[0] == "tensor" &&
                      head[2] == "shape",
                  "Checkpoint: bad tensor header at line ", line + 1);
    const std::string& name = head[1];
    Shape shape;
    for (std::size_t i = 3; i < head.size(); ++i) {
      shape.push_back(static_cast<std::size_t>(parse_int(head[i])));
    }
    std::size_t numel = 1;
    for (std::size_t d : shape) numel *= d;
    require(line + 1 < lines.size(), "Checkpoint: missing values for '",
                  name, "'");
    std::vector<std::string> value_parts = split(lines[line + 1], ' ');
    if (numel == 0 && value_parts.size() == 1 && value_parts[0].empty()) {
      value_parts.clear();
    }
    require(value_parts.size() == numel, "Checkpoint: tensor '", name,
                  "' expects ", numel, " values, found ", value_parts.size());
    std::vector<double> values(numel);
    for (std::size_t i = 0; i < numel; ++i) {
      values[i] = parse_double(value_parts[i]);
    }
    ckpt.add(name, Tensor::from_values(shape, values));
    line += 2;
  }
  return ckpt;
}

Checkpoint Checkpoint::load(const std::string& path) {
  return deserialize(read_file(path));
}

}  // namespace grouprec::autograd
