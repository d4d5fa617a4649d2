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

#include "wjdot/kvfile.hpp"

#include <set>
#include <sstream>

#include "wjdot/error.hpp"

namespace wjdot {
namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

bool valid_key(const std::string& key) {
  if (key.empty()) return false;
  for (char c : key) {
    const bool ok = (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') ||
                    (c >= '0' && c <= '9') || c == '_' || c == '.' || c == '-';
    if (!ok) return false;
  }
  return true;
}

}  // namespace

std::vector<KeyValue> parse_key_values(std::istream& in) {
  std::vector<KeyValue> out;
  std::set<std::string> seen;
  std::string raw;
  std::size_t line = 0;
  while (std::getline(in, raw)) {
    ++line;
    const std::string text = trim(raw);
    if (text.empty() || text[0] == '#') continue;
    const auto eq = text.find('=');
    if (eq == std::string::npos) throw ParseError("expected `key = value`", line);
    KeyValue kv;
    kv.key = trim(text.substr(0, eq));
    kv.line = line;
    if (!valid_key(kv.key)) throw ParseError("bad key `" + kv.key + "`", line);
    if (!seen.insert(kv.key).second)
      throw ParseError("duplicate key: " + kv.key, line);
    try {
      kv.value = nlohmann::json::parse(trim(text.substr(eq + 1)));
    } catch (const nlohmann::json::parse_error& e) {
      throw ParseError("bad value for " + kv.key + ": " + e.what(), line);
    }
    out.push_back(std::move(kv));
  }
  return out;
}

std::string render_value(const nlohmann::json& value) { return value.dump(); }

}  // namespace wjdot
