// Copyright 2026 The wjdot Authors. All Rights Reserved.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef WJDOT_KVFILE_HPP_
#define WJDOT_KVFILE_HPP_

// `key = <json value>` text files: one entry per line, `#` starts a comment
// line, blank lines are ignored. Shared by model checkpoints and experiment
// configs.

#include <istream>
#include <string>
#include <vector>

#include "json.hpp"

namespace wjdot {

struct KeyValue {
  std::string key;
  nlohmann::json value;
  std::size_t line = 0;
};

/// Throws ParseError on a malformed line or a repeated key.
std::vector<KeyValue> parse_key_values(std::istream& in);

/// Renders a value the way parse_key_values reads it back; doubles keep all
/// 17 significant digits.
std::string render_value(const nlohmann::json& value);

}  // namespace wjdot

#endif  // WJDOT_KVFILE_HPP_
