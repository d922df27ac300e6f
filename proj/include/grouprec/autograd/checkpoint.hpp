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

#include <map>
#include <string>
#include <vector>

#include "grouprec/autograd/tensor.hpp"

namespace grouprec::autograd {

// Named parameter collection serialized as text. Doubles are written with
// enough digits to round-trip exactly, so save -> load -> save is
// byte-identical.
struct Checkpoint {
  // Insertion-ordered list of (name, tensor).
  std::vector<std::pair<std::string, Tensor>> entries;

  void add(const std::string& name, const Tensor& t);
  const Tensor& get(const std::string& name) const;
  bool has(const std::string& name) const;

  void save(const std::string& path) const;
  static Checkpoint load(const std::string& path);

  std::string serialize() const;
  static Checkpoint deserialize(const std::string& text);
};

}  // namespace grouprec::autograd
