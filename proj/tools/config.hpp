// Copyright 2026 The MEMSL Imaging Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

// Flat key = value configuration with dotted section keys.
//
//   # comment
//   imaging.f_m = 0.01
//   source.protocol = memsl
//
// Values are kept as text; typed getters validate on access and throw ConfigError
// naming the offending key.

#ifndef MEMSL_TOOLS_CONFIG_HPP
#define MEMSL_TOOLS_CONFIG_HPP

#include <cstdint>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace memsl_cli {

class ConfigError : public std::runtime_error {
  public:
    using std::runtime_error::runtime_error;
};

struct KeySpec {
    const char *key;
    const char *default_value;  // nullptr: unset unless given
    const char *help;
};

// Every key the tool understands, in echo order.
const std::vector<KeySpec> &known_keys();

class Config {
  public:
    static Config defaults();

    void load_file(const std::string &path);
    void load_text(const std::string &text, const std::string &origin);
    void set(const std::string &key, const std::string &value);

    bool has(const std::string &key) const;
    std::string text(const std::string &key) const;
    double real(const std::string &key) const;
    double positive(const std::string &key) const;
    long long integer(const std::string &key) const;
    std::uint64_t unsigned_integer(const std::string &key) const;
    bool flag(const std::string &key) const;
    std::vector<double> real_list(const std::string &key) const;
    std::vector<std::string> text_list(const std::string &key) const;

    // Every set key except those listed, one `key = value` line each.
    std::string echo(const std::vector<std::string> &skip) const;

  private:
    std::map<std::string, std::string> values_;
};

}  // namespace memsl_cli

#endif
