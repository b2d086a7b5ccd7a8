// Copyright 2026 The evopop Authors.
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

#include "evopop/io.h"

#include <cerrno>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <functional>
#include <map>
#include <sstream>
#include <utility>

#include "evopop/errors.h"

namespace evopop {
namespace {

constexpr int kFlushEvery = 100;

// ---------------------------------------------------------------------------
// Config values.

struct ConfigValue {
  enum class Kind { kString, kNumber, kBool, kTable, kArray };
  Kind kind = Kind::kString;
  std::string text;  // string contents, or the raw numeric token
  bool boolean = false;
  std::vector<std::pair<std::string, double>> table;
  std::vector<std::string> array;  // raw numeric tokens
};

enum class FieldType { kString, kInt, kFloat, kBool, kMix, kIntList };

struct Field {
  FieldType type;
  std::function<void(RunConfig&, const ConfigValue&, const std::string&)> set;
};

std::string Trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r\n");
  if (first == std::string_view::npos) return "";
  const auto last = s.find_last_not_of(" \t\r\n");
  return std::string(s.substr(first, last - first + 1));
}

[[noreturn]] void Fail(const std::string& where, const std::string& key,
                       const std::string& what) {
  throw ConfigError(where + ": key '" + key + "': " + what);
}

std::string StripUnderscores(const std::string& token) {
  std::string out;
  for (char c : token) {
    if (c != '_') out.push_back(c);
  }
  return out;
}

bool ParseDouble(const std::string& token, double& out) {
  const std::string t = StripUnderscores(token);
  if (t.empty()) return false;
  char* end = nullptr;
  errno = 0;
  out = std::strtod(t.c_str(), &end);
  return errno == 0 && end == t.c_str() + t.size() && std::isfinite(out);
}

bool ParseInt(const std::string& token, std::int64_t& out) {
  const std::string t = StripUnderscores(token);
  if (t.empty()) return false;
  const char* begin = t.c_str();
  if (*begin == '+') ++begin;
  auto [ptr, ec] = std::from_chars(begin, t.c_str() + t.size(), out);
  return ec == std::errc() && ptr == t.c_str() + t.size();
}

bool ParseUint(const std::string& token, std::uint64_t& out) {
  const std::string t = StripUnderscores(token);
  if (t.empty()) return false;
  const char* begin = t.c_str();
  if (*begin == '+') ++begin;
  auto [ptr, ec] = std::from_chars(begin, t.c_str() + t.size(), out);
  return ec == std::errc() && ptr == t.c_str() + t.size();
}

const char* KindName(ConfigValue::Kind kind) {
  switch (kind) {
    case ConfigValue::Kind::kString: return "string";
    case ConfigValue::Kind::kNumber: return "number";
    case ConfigValue::Kind::kBool: return "boolean";
    case ConfigValue::Kind::kTable: return "inline table";
    case ConfigValue::Kind::kArray: return "array";
  }
  return "value";
}

void Expect(const ConfigValue& v, ConfigValue::Kind kind, const std::string& where,
            const std::string& key) {
  if (v.kind != kind) {
    Fail(where, key, std::string("expected ") + KindName(kind) + ", got " +
                         KindName(v.kind));
  }
}

std::string AsString(const ConfigValue& v, const std::string& where,
                     const std::string& key) {
  Expect(v, ConfigValue::Kind::kString, where, key);
  return v.text;
}

double AsFloat(const ConfigValue& v, const std::string& where, const std::string& key) {
  Expect(v, ConfigValue::Kind::kNumber, where, key);
  double out = 0.0;
  if (!ParseDouble(v.text, out)) Fail(where, key, "not a finite number: " + v.text);
  return out;
}

std::int64_t AsInt(const ConfigValue& v, const std::string& where, const std::string& key) {
  Expect(v, ConfigValue::Kind::kNumber, where, key);
  std::int64_t out = 0;
  if (!ParseInt(v.text, out)) Fail(where, key, "expected an integer, got " + v.text);
  return out;
}

int AsInt32(const ConfigValue& v, const std::string& where, const std::string& key) {
  const std::int64_t out = AsInt(v, where, key);
  if (out < INT32_MIN || out > INT32_MAX) Fail(where, key, "integer out of range");
  return static_cast<int>(out);
}

const std::map<std::string, Field>& Fields() {
  static const std::map<std::string, Field> fields = [] {
    std::map<std::string, Field> f;
    using K = ConfigValue::Kind;
    f["mode"] = {FieldType::kString, [](RunConfig& c, const ConfigValue& v, const std::string& w) {
                   try {
                     c.mode = ParseRunMode(AsString(v, w, "mode"));
                   } catch (const ParameterDomainError& e) {
                     Fail(w, "mode", e.what());
                   }
                 }};
    f["game"] = {FieldType::kString, [](RunConfig& c, const ConfigValue& v, const std::string& w) {
                   try {
                     c.game = ParseGameKind(AsString(v, w, "game"));
                   } catch (const ParameterDomainError& e) {
                     Fail(w, "game", e.what());
                   }
                 }};
    f["param"] = {FieldType::kFloat, [](RunConfig& c, const ConfigValue& v, const std::string& w) {
                    c.param = AsFloat(v, w, "param");
                  }};
    f["matrix_file"] = {FieldType::kString,
                        [](RunConfig& c, const ConfigValue& v, const std::string& w) {
                          c.matrix_file = AsString(v, w, "matrix_file");
                        }};
    f["rule"] = {FieldType::kString, [](RunConfig& c, const ConfigValue& v, const std::string& w) {
                   const std::string r = AsString(v, w, "rule");
                   if (r != "pg" && r != "lola") Fail(w, "rule", "expected pg or lola, got '" + r + "'");
                   c.rule = r;
                 }};
    f["rule_mix"] = {FieldType::kMix, [](RunConfig& c, const ConfigValue& v, const std::string& w) {
                       Expect(v, K::kTable, w, "rule_mix");
                       if (v.table.empty()) Fail(w, "rule_mix", "empty table");
                       RuleMix mix;
                       for (const auto& [name, frac] : v.table) {
                         if (name != "pg" && name != "lola") {
                           Fail(w, "rule_mix", "unknown rule '" + name + "'");
                         }
                         for (const auto& share : mix) {
                           if (share.rule.Label() == name) Fail(w, "rule_mix", "duplicate rule '" + name + "'");
                         }
                         RuleTag tag = name == "pg" ? RuleTag::Pg() : RuleTag::Lola(0.0);
                         mix.push_back({tag, frac});
                       }
                       c.rule_mix = std::move(mix);
                     }};
    f["n"] = {FieldType::kInt, [](RunConfig& c, const ConfigValue& v, const std::string& w) {
                c.n = AsInt32(v, w, "n");
              }};
    f["steps"] = {FieldType::kInt, [](RunConfig& c, const ConfigValue& v, const std::string& w) {
                    c.steps = AsInt(v, w, "steps");
                  }};
    f["lr"] = {FieldType::kFloat, [](RunConfig& c, const ConfigValue& v, const std::string& w) {
                 c.lr = AsFloat(v, w, "lr");
               }};
    f["lookahead_eta"] = {FieldType::kFloat,
                          [](RunConfig& c, const ConfigValue& v, const std::string& w) {
                            c.lookahead_eta = AsFloat(v, w, "lookahead_eta");
                          }};
    f["init_sigma"] = {FieldType::kFloat, [](RunConfig& c, const ConfigValue& v, const std::string& w) {
                         c.init_sigma = AsFloat(v, w, "init_sigma");
                       }};
    f["seed"] = {FieldType::kInt, [](RunConfig& c, const ConfigValue& v, const std::string& w) {
                   Expect(v, K::kNumber, w, "seed");
                   if (!ParseUint(v.text, c.seed)) {
                     Fail(w, "seed", "expected a non-negative 64-bit integer, got " + v.text);
                   }
                 }};
    f["record_every"] = {FieldType::kInt,
                         [](RunConfig& c, const ConfigValue& v, const std::string& w) {
                           c.record_every = AsInt(v, w, "record_every");
                         }};
    f["snapshot_agents"] = {FieldType::kInt,
                            [](RunConfig& c, const ConfigValue& v, const std::string& w) {
                              c.snapshot_agents = AsInt32(v, w, "snapshot_agents");
                            }};
    f["out"] = {FieldType::kString, [](RunConfig& c, const ConfigValue& v, const std::string& w) {
                  c.out = AsString(v, w, "out");
                }};
    f["param_range"] = {FieldType::kString,
                        [](RunConfig& c, const ConfigValue& v, const std::string& w) {
                          c.param_range = AsString(v, w, "param_range");
                          try {
                            ParseParamRange(c.param_range);
                          } catch (const ConfigError& e) {
                            Fail(w, "param_range", e.what());
                          }
                        }};
    f["sizes"] = {FieldType::kIntList, [](RunConfig& c, const ConfigValue& v, const std::string& w) {
                    Expect(v, K::kArray, w, "sizes");
                    if (v.array.empty()) Fail(w, "sizes", "empty list");
                    std::vector<int> sizes;
                    for (const auto& tok : v.array) {
                      std::int64_t s = 0;
                      if (!ParseInt(tok, s) || s < 2 || s > INT32_MAX) {
                        Fail(w, "sizes", "bad population size '" + tok + "'");
                      }
                      sizes.push_back(static_cast<int>(s));
                    }
                    c.sizes = std::move(sizes);
                  }};
    f["threads"] = {FieldType::kInt, [](RunConfig& c, const ConfigValue& v, const std::string& w) {
                      c.threads = AsInt32(v, w, "threads");
                    }};
    f["f32"] = {FieldType::kBool, [](RunConfig& c, const ConfigValue& v, const std::string& w) {
                  Expect(v, K::kBool, w, "f32");
                  c.f32 = v.boolean;
                }};
    f["selfplay_starts"] = {FieldType::kInt,
                            [](RunConfig& c, const ConfigValue& v, const std::string& w) {
                              c.selfplay_starts = AsInt32(v, w, "selfplay_starts");
                            }};
    f["bench_reps"] = {FieldType::kInt, [](RunConfig& c, const ConfigValue& v, const std::string& w) {
                         c.bench_reps = AsInt32(v, w, "bench_reps");
                       }};
    f["check_trials"] = {FieldType::kInt,
                         [](RunConfig& c, const ConfigValue& v, const std::string& w) {
                           c.check_trials = AsInt32(v, w, "check_trials");
                         }};
    return f;
  }();
  return fields;
}

// Parses the text after '=' of one config line.
class ValueParser {
 public:
  ValueParser(std::string_view text, std::string where, std::string key)
      : text_(text), where_(std::move(where)), key_(std::move(key)) {}

  ConfigValue Parse() {
    SkipSpace();
    ConfigValue v = ParseValue();
    SkipSpace();
    if (pos_ < text_.size() && text_[pos_] != '#') {
      Fail(where_, key_, "trailing characters after value");
    }
    return v;
  }

 private:
  void SkipSpace() {
    while (pos_ < text_.size() && (text_[pos_] == ' ' || text_[pos_] == '\t')) ++pos_;
  }

  ConfigValue ParseValue() {
    if (pos_ >= text_.size()) Fail(where_, key_, "missing value");
    const char c = text_[pos_];
    if (c == '"' || c == '\'') return ParseString(c);
    if (c == '{') return ParseTable();
    if (c == '[') return ParseArray();
    std::string token = Token();
    ConfigValue v;
    if (token == "true" || token == "false") {
      v.kind = ConfigValue::Kind::kBool;
      v.boolean = token == "true";
      return v;
    }
    double probe = 0.0;
    if (!ParseDouble(token, probe)) Fail(where_, key_, "cannot parse value '" + token + "'");
    v.kind = ConfigValue::Kind::kNumber;
    v.text = token;
    return v;
  }

  std::string Token() {
    const std::size_t start = pos_;
    while (pos_ < text_.size() && text_[pos_] != ',' && text_[pos_] != '}' &&
           text_[pos_] != ']' && text_[pos_] != '#' && text_[pos_] != ' ' &&
           text_[pos_] != '\t') {
      ++pos_;
    }
    return std::string(text_.substr(start, pos_ - start));
  }

  ConfigValue ParseString(char quote) {
    ++pos_;
    ConfigValue v;
    v.kind = ConfigValue::Kind::kString;
    while (pos_ < text_.size() && text_[pos_] != quote) {
      char c = text_[pos_++];
      if (quote == '"' && c == '\\') {
        if (pos_ >= text_.size()) break;
        const char e = text_[pos_++];
        switch (e) {
          case 'n': c = '\n'; break;
          case 't': c = '\t'; break;
          case '"': c = '"'; break;
          case '\\': c = '\\'; break;
          default: Fail(where_, key_, std::string("unsupported escape \\") + e);
        }
      }
      v.text.push_back(c);
    }
    if (pos_ >= text_.size()) Fail(where_, key_, "unterminated string");
    ++pos_;
    return v;
  }

  ConfigValue ParseTable() {
    ++pos_;
    ConfigValue v;
    v.kind = ConfigValue::Kind::kTable;
    SkipSpace();
    if (pos_ < text_.size() && text_[pos_] == '}') {
      ++pos_;
      return v;
    }
    while (true) {
      SkipSpace();
      const std::size_t eq = text_.find('=', pos_);
      if (eq == std::string_view::npos) Fail(where_, key_, "expected 'name = value' in table");
      std::string name = Trim(text_.substr(pos_, eq - pos_));
      if (name.size() >= 2 && (name.front() == '"' || name.front() == '\'')) {
        name = name.substr(1, name.size() - 2);
      }
      pos_ = eq + 1;
      SkipSpace();
      const std::string token = Token();
      double value = 0.0;
      if (!ParseDouble(token, value)) {
        Fail(where_, key_, "table entry '" + name + "' is not a number");
      }
      v.table.emplace_back(name, value);
      SkipSpace();
      if (pos_ >= text_.size()) Fail(where_, key_, "unterminated inline table");
      if (text_[pos_] == ',') {
        ++pos_;
        continue;
      }
      if (text_[pos_] == '}') {
        ++pos_;
        return v;
      }
      Fail(where_, key_, "expected ',' or '}' in inline table");
    }
  }

  ConfigValue ParseArray() {
    ++pos_;
    ConfigValue v;
    v.kind = ConfigValue::Kind::kArray;
    while (true) {
      SkipSpace();
      if (pos_ < text_.size() && text_[pos_] == ']') {
        ++pos_;
        return v;
      }
      const std::string token = Token();
      if (token.empty()) Fail(where_, key_, "malformed array");
      v.array.push_back(token);
      SkipSpace();
      if (pos_ < text_.size() && text_[pos_] == ',') {
        ++pos_;
        continue;
      }
      if (pos_ < text_.size() && text_[pos_] == ']') {
        ++pos_;
        return v;
      }
      Fail(where_, key_, "expected ',' or ']' in array");
    }
  }

  std::string_view text_;
  std::size_t pos_ = 0;
  std::string where_;
  std::string key_;
};

ConfigValue ValueFromFlag(FieldType type, const std::string& key,
                          const std::string& raw) {
  const std::string where = "--" + key;
  ConfigValue v;
  switch (type) {
    case FieldType::kString:
      v.kind = ConfigValue::Kind::kString;
      v.text = raw;
      return v;
    case FieldType::kInt:
    case FieldType::kFloat:
      v.kind = ConfigValue::Kind::kNumber;
      v.text = Trim(raw);
      return v;
    case FieldType::kBool: {
      const std::string t = Trim(raw);
      if (t != "true" && t != "false") Fail(where, key, "expected true or false");
      v.kind = ConfigValue::Kind::kBool;
      v.boolean = t == "true";
      return v;
    }
    case FieldType::kMix: {
      std::string t = Trim(raw);
      if (t.empty() || t.front() != '{') t = "{" + t + "}";
      return ValueParser(t, where, key).Parse();
    }
    case FieldType::kIntList: {
      std::string t = Trim(raw);
      if (t.empty() || t.front() != '[') t = "[" + t + "]";
      return ValueParser(t, where, key).Parse();
    }
  }
  return v;
}

std::string FormatDouble(double x) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.17g", x);
  return buf;
}

std::string Quote(const std::string& s) {
  std::string out = "\"";
  for (char c : s) {
    if (c == '"' || c == '\\') out.push_back('\\');
    if (c == '\n') {
      out += "\\n";
      continue;
    }
    out.push_back(c);
  }
  out.push_back('"');
  return out;
}

std::ofstream OpenForWrite(const std::string& path) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot open '" + path + "' for writing");
  return out;
}

void Finalize(std::ofstream& out, const std::string& path) {
  out.flush();
  if (!out) throw IoError("write failed for '" + path + "'");
}

std::vector<std::string> SplitCsv(const std::string& line) {
  std::vector<std::string> cells;
  std::stringstream ss(line);
  std::string cell;
  while (std::getline(ss, cell, ',')) cells.push_back(cell);
  if (!line.empty() && line.back() == ',') cells.emplace_back();
  return cells;
}

double CellToDouble(const std::string& cell, const std::string& path) {
  double v = 0.0;
  if (!ParseDouble(cell, v)) throw IoError(path + ": bad number '" + cell + "'");
  return v;
}

}  // namespace

RunMode ParseRunMode(std::string_view name) {
  if (name == "simulate") return RunMode::kSimulate;
  if (name == "selfplay") return RunMode::kSelfPlay;
  if (name == "sweep") return RunMode::kSweep;
  if (name == "bench") return RunMode::kBench;
  if (name == "check") return RunMode::kCheck;
  throw ParameterDomainError("unknown mode '" + std::string(name) + "'");
}

std::string_view RunModeName(RunMode mode) {
  switch (mode) {
    case RunMode::kSimulate: return "simulate";
    case RunMode::kSelfPlay: return "selfplay";
    case RunMode::kSweep: return "sweep";
    case RunMode::kBench: return "bench";
    case RunMode::kCheck: return "check";
  }
  return "unknown";
}

RuleMix RunConfig::EffectiveMix() const {
  RuleMix mix;
  if (rule_mix) {
    mix = *rule_mix;
  } else {
    mix.push_back({rule == "lola" ? RuleTag::Lola(0.0) : RuleTag::Pg(), 1.0});
  }
  for (auto& share : mix) {
    if (share.rule.is_lola()) share.rule = RuleTag::Lola(EffectiveEta());
  }
  return mix;
}

GameSpec RunConfig::BuildGameSpec() const {
  if (game == GameKind::kCustom) {
    if (matrix_file.empty()) {
      throw ConfigError("key 'matrix_file': required for game = \"custom\"");
    }
    return CustomGame(LoadMatrixCsv(matrix_file));
  }
  if (game == GameKind::kRps) return RockPaperScissors();
  if (!param) {
    throw ConfigError("key 'param': required for game = \"" +
                      std::string(GameKindName(game)) + "\"");
  }
  return BuildGameSpec(*param);
}

GameSpec RunConfig::BuildGameSpec(double param_override) const {
  try {
    switch (game) {
      case GameKind::kStagHunt:
        return StagHunt(param_override);
      case GameKind::kHawkDove:
        return HawkDove(param_override);
      case GameKind::kRps:
        return RockPaperScissors();
      case GameKind::kCustom:
        break;
    }
  } catch (const ParameterDomainError& e) {
    throw ConfigError(std::string("key 'param': ") + e.what());
  }
  throw ConfigError("key 'game': custom games have no scalar parameter to sweep");
}

void RunConfig::Validate() const {
  auto fail = [](const std::string& key, const std::string& what) {
    throw ConfigError("key '" + key + "': " + what);
  };
  if (n < 2 || n % 2 != 0) fail("n", "population size must be even and >= 2");
  if (steps < 0) fail("steps", "must be >= 0");
  if (!(lr > 0.0)) fail("lr", "must be > 0");
  if (lookahead_eta && !(*lookahead_eta >= 0.0)) fail("lookahead_eta", "must be >= 0");
  if (!(init_sigma >= 0.0)) fail("init_sigma", "must be >= 0");
  if (record_every < 1) fail("record_every", "must be >= 1");
  if (snapshot_agents < 0) fail("snapshot_agents", "must be >= 0");
  if (threads < 0) fail("threads", "must be >= 0");
  if (selfplay_starts < 1) fail("selfplay_starts", "must be >= 1");
  if (bench_reps < 1) fail("bench_reps", "must be >= 1");
  if (check_trials < 1) fail("check_trials", "must be >= 1");
  if (rule_mix) {
    double total = 0.0;
    for (const auto& share : *rule_mix) {
      if (!(share.fraction >= 0.0)) fail("rule_mix", "fractions must be >= 0");
      total += share.fraction;
    }
    if (std::abs(total - 1.0) > 1e-9) {
      fail("rule_mix", "fractions sum to " + FormatDouble(total) + ", expected 1");
    }
  }
  if (mode == RunMode::kSweep) {
    if (param_range.empty()) fail("param_range", "required for sweep");
    if (game == GameKind::kRps || game == GameKind::kCustom) {
      fail("game", "sweeps need stag_hunt or hawk_dove");
    }
    for (double p : ParseParamRange(param_range)) BuildGameSpec(p);
  } else if (mode != RunMode::kCheck) {
    if (game != GameKind::kCustom) {
      BuildGameSpec();
    } else if (matrix_file.empty()) {
      fail("matrix_file", "required for game = \"custom\"");
    }
  }
}

const std::vector<std::string>& ConfigKeys() {
  static const std::vector<std::string> keys = {
      "mode", "game", "param", "matrix_file", "rule", "rule_mix", "n", "steps",
      "lr", "lookahead_eta", "init_sigma", "seed", "record_every",
      "snapshot_agents", "out", "param_range", "sizes", "threads", "f32",
      "selfplay_starts", "bench_reps", "check_trials"};
  return keys;
}

RunConfig ParseConfig(std::string_view text, const std::string& origin) {
  RunConfig cfg;
  std::map<std::string, int> seen;
  std::istringstream in{std::string(text)};
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const std::string where = origin + ":" + std::to_string(line_no);
    const std::string trimmed = Trim(line);
    if (trimmed.empty() || trimmed[0] == '#') continue;
    if (trimmed[0] == '[') {
      throw ConfigError(where + ": tables are not supported; keys must be top-level");
    }
    const auto eq = trimmed.find('=');
    if (eq == std::string::npos) {
      throw ConfigError(where + ": expected 'key = value', got '" + trimmed + "'");
    }
    std::string key = Trim(std::string_view(trimmed).substr(0, eq));
    if (key.size() >= 2 && (key.front() == '"' || key.front() == '\'')) {
      key = key.substr(1, key.size() - 2);
    }
    const auto field = Fields().find(key);
    if (field == Fields().end()) Fail(where, key, "unknown key");
    if (auto it = seen.find(key); it != seen.end()) {
      Fail(where, key, "duplicate key (first set on line " + std::to_string(it->second) + ")");
    }
    seen[key] = line_no;
    const ConfigValue value =
        ValueParser(std::string_view(trimmed).substr(eq + 1), where, key).Parse();
    field->second.set(cfg, value, where);
  }
  return cfg;
}

RunConfig LoadConfig(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("cannot read config file '" + path + "'");
  std::stringstream buf;
  buf << in.rdbuf();
  return ParseConfig(buf.str(), path);
}

void ApplyConfigOverride(RunConfig& cfg, const std::string& key,
                         const std::string& value) {
  const auto field = Fields().find(key);
  if (field == Fields().end()) throw ConfigError("key '" + key + "': unknown key");
  field->second.set(cfg, ValueFromFlag(field->second.type, key, value), "--" + key);
}

std::string FormatResolvedConfig(const RunConfig& cfg) {
  std::ostringstream out;
  out << "mode = " << Quote(std::string(RunModeName(cfg.mode))) << "\n";
  out << "game = " << Quote(std::string(GameKindName(cfg.game))) << "\n";
  if (cfg.param) out << "param = " << FormatDouble(*cfg.param) << "\n";
  if (!cfg.matrix_file.empty()) out << "matrix_file = " << Quote(cfg.matrix_file) << "\n";
  out << "rule = " << Quote(cfg.rule) << "\n";
  if (cfg.rule_mix) {
    out << "rule_mix = {";
    for (std::size_t i = 0; i < cfg.rule_mix->size(); ++i) {
      const auto& share = (*cfg.rule_mix)[i];
      out << (i ? ", " : " ") << share.rule.Label() << " = " << FormatDouble(share.fraction);
    }
    out << " }\n";
  }
  out << "n = " << cfg.n << "\n";
  out << "steps = " << cfg.steps << "\n";
  out << "lr = " << FormatDouble(cfg.lr) << "\n";
  out << "lookahead_eta = " << FormatDouble(cfg.EffectiveEta()) << "\n";
  out << "init_sigma = " << FormatDouble(cfg.init_sigma) << "\n";
  out << "seed = " << cfg.seed << "\n";
  out << "record_every = " << cfg.record_every << "\n";
  out << "snapshot_agents = " << cfg.snapshot_agents << "\n";
  out << "out = " << Quote(cfg.out) << "\n";
  if (!cfg.param_range.empty()) out << "param_range = " << Quote(cfg.param_range) << "\n";
  out << "sizes = [";
  for (std::size_t i = 0; i < cfg.sizes.size(); ++i) out << (i ? ", " : "") << cfg.sizes[i];
  out << "]\n";
  out << "threads = " << cfg.threads << "\n";
  out << "f32 = " << (cfg.f32 ? "true" : "false") << "\n";
  out << "selfplay_starts = " << cfg.selfplay_starts << "\n";
  out << "bench_reps = " << cfg.bench_reps << "\n";
  out << "check_trials = " << cfg.check_trials << "\n";
  return out.str();
}

std::vector<double> ParseParamRange(const std::string& range) {
  std::vector<std::string> parts;
  std::stringstream ss(range);
  std::string part;
  while (std::getline(ss, part, ':')) parts.push_back(Trim(part));
  double start = 0.0, stop = 0.0, step = 0.0;
  if (parts.size() != 3 || !ParseDouble(parts[0], start) ||
      !ParseDouble(parts[1], stop) || !ParseDouble(parts[2], step)) {
    throw ConfigError("key 'param_range': expected 'start:stop:step', got '" + range + "'");
  }
  if (!(step > 0.0) || stop < start) {
    throw ConfigError("key 'param_range': need step > 0 and stop >= start");
  }
  const auto count = static_cast<std::int64_t>(std::floor((stop - start) / step + 1e-9)) + 1;
  std::vector<double> values;
  for (std::int64_t k = 0; k < count; ++k) {
    values.push_back(start + static_cast<double>(k) * step);
  }
  return values;
}

std::string FormatFixed(double value) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.6f", value);
  return buf;
}

std::string SummaryHeader(int n_actions, bool mixed) {
  std::string h = "step";
  for (int k = 0; k < n_actions; ++k) h += ",mean_p_" + std::to_string(k);
  for (int k = 0; k < n_actions; ++k) h += ",conc_" + std::to_string(k);
  h += ",mean_value";
  if (mixed) {
    for (int k = 0; k < n_actions; ++k) h += ",pg_p_" + std::to_string(k);
    for (int k = 0; k < n_actions; ++k) h += ",lola_p_" + std::to_string(k);
  }
  return h;
}

std::string SummaryLine(const SummaryRecord& rec, bool mixed) {
  std::string line = std::to_string(rec.step);
  for (double p : rec.mean_policy) line += "," + FormatFixed(p);
  for (double c : rec.vertex_fraction) line += "," + FormatFixed(c);
  line += "," + FormatFixed(rec.mean_value);
  if (mixed) {
    const auto n = rec.mean_policy.size();
    for (Eigen::Index k = 0; k < n; ++k) {
      line += "," + (rec.mean_policy_pg.size() == n ? FormatFixed(rec.mean_policy_pg[k]) : "");
    }
    for (Eigen::Index k = 0; k < n; ++k) {
      line += "," + (rec.mean_policy_lola.size() == n ? FormatFixed(rec.mean_policy_lola[k]) : "");
    }
  }
  return line;
}

std::string SnapshotHeader(int n_actions) {
  std::string h = "step,agent_id,rule";
  for (int k = 0; k < n_actions; ++k) h += ",p_" + std::to_string(k);
  return h;
}

std::string SnapshotLine(const SnapshotRow& row) {
  std::string line = std::to_string(row.step) + "," + std::to_string(row.agent_id) +
                     "," + row.rule.Label();
  for (double p : row.probs) line += "," + FormatFixed(p);
  return line;
}

void WriteSummary(const std::vector<SummaryRecord>& records, const std::string& path,
                  int n_actions, bool mixed) {
  std::ofstream out = OpenForWrite(path);
  out << SummaryHeader(n_actions, mixed) << '\n';
  for (const auto& rec : records) out << SummaryLine(rec, mixed) << '\n';
  Finalize(out, path);
}

void WriteSnapshots(const std::vector<SnapshotRow>& rows, const std::string& path,
                    int n_actions) {
  std::ofstream out = OpenForWrite(path);
  out << SnapshotHeader(n_actions) << '\n';
  for (const auto& row : rows) out << SnapshotLine(row) << '\n';
  Finalize(out, path);
}

std::vector<SummaryRecord> ReadSummary(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open '" + path + "'");
  std::string line;
  if (!std::getline(in, line)) throw IoError(path + ": missing header");
  const std::vector<std::string> header = SplitCsv(line);
  int n = 0;
  for (const auto& col : header) {
    if (col.rfind("mean_p_", 0) == 0) ++n;
  }
  const bool mixed = header.size() == static_cast<std::size_t>(2 + 4 * n);
  if (n < 2 || (header.size() != static_cast<std::size_t>(2 + 2 * n) && !mixed) ||
      header[0] != "step") {
    throw IoError(path + ": not a summary file (column names do not match)");
  }
  std::vector<SummaryRecord> records;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    const std::vector<std::string> cells = SplitCsv(line);
    if (cells.size() != header.size()) throw IoError(path + ": ragged row");
    SummaryRecord rec;
    rec.step = static_cast<std::int64_t>(CellToDouble(cells[0], path));
    rec.mean_policy.resize(n);
    rec.vertex_fraction.resize(n);
    for (int k = 0; k < n; ++k) {
      rec.mean_policy[k] = CellToDouble(cells[1 + k], path);
      rec.vertex_fraction[k] = CellToDouble(cells[1 + n + k], path);
    }
    rec.mean_value = CellToDouble(cells[1 + 2 * n], path);
    if (mixed && !cells[2 + 2 * n].empty()) {
      rec.mean_policy_pg.resize(n);
      rec.mean_policy_lola.resize(n);
      for (int k = 0; k < n; ++k) {
        rec.mean_policy_pg[k] = CellToDouble(cells[2 + 2 * n + k], path);
        rec.mean_policy_lola[k] = CellToDouble(cells[2 + 3 * n + k], path);
      }
    }
    records.push_back(std::move(rec));
  }
  return records;
}

std::vector<SnapshotRow> ReadSnapshots(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open '" + path + "'");
  std::string line;
  if (!std::getline(in, line)) throw IoError(path + ": missing header");
  const std::vector<std::string> header = SplitCsv(line);
  if (header.size() < 5 || header[0] != "step" || header[1] != "agent_id" ||
      header[2] != "rule") {
    throw IoError(path + ": not a snapshot file (column names do not match)");
  }
  const std::size_t n = header.size() - 3;
  std::vector<SnapshotRow> rows;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    const std::vector<std::string> cells = SplitCsv(line);
    if (cells.size() != header.size()) throw IoError(path + ": ragged row");
    SnapshotRow row;
    row.step = static_cast<std::int64_t>(CellToDouble(cells[0], path));
    row.agent_id = static_cast<int>(CellToDouble(cells[1], path));
    row.rule = RuleTag::Parse(cells[2], 0.0);
    for (std::size_t k = 0; k < n; ++k) row.probs.push_back(CellToDouble(cells[3 + k], path));
    rows.push_back(std::move(row));
  }
  return rows;
}

void WriteSelfPlay(const std::vector<SelfPlayTrajectory>& runs,
                   const std::string& path) {
  std::ofstream out = OpenForWrite(path);
  const Eigen::Index n =
      runs.empty() || runs[0].records.empty() ? 0 : runs[0].records[0].p1.size();
  out << "run,step";
  for (Eigen::Index k = 0; k < n; ++k) out << ",p1_" << k;
  for (Eigen::Index k = 0; k < n; ++k) out << ",p2_" << k;
  out << ",v1,v2\n";
  for (std::size_t r = 0; r < runs.size(); ++r) {
    for (const auto& rec : runs[r].records) {
      out << r << ',' << rec.step;
      for (double p : rec.p1) out << ',' << FormatFixed(p);
      for (double p : rec.p2) out << ',' << FormatFixed(p);
      out << ',' << FormatFixed(rec.v1) << ',' << FormatFixed(rec.v2) << '\n';
    }
  }
  Finalize(out, path);
}

void WriteSweep(const std::vector<SweepRow>& rows, const std::string& path) {
  std::ofstream out = OpenForWrite(path);
  const Eigen::Index n = rows.empty() ? 0 : rows[0].mean_policy.size();
  out << "param,rule";
  for (Eigen::Index k = 0; k < n; ++k) out << ",mean_p_" << k;
  out << ",mean_value\n";
  for (const auto& row : rows) {
    out << FormatFixed(row.param) << ',' << row.rule;
    for (double p : row.mean_policy) out << ',' << FormatFixed(p);
    out << ',' << FormatFixed(row.mean_value) << '\n';
  }
  Finalize(out, path);
}

void WriteBench(const std::vector<BenchRow>& rows, const std::string& path) {
  std::ofstream out = OpenForWrite(path);
  out << "n_agents,n_actions,rule,impl,median_seconds,threads,float_bits,reps\n";
  char buf[64];
  for (const auto& row : rows) {
    std::snprintf(buf, sizeof(buf), "%.9f", row.median_seconds);
    out << row.n_agents << ',' << row.n_actions << ',' << row.rule << ',' << row.impl
        << ',' << buf << ',' << row.threads << ',' << row.float_bits << ','
        << row.reps << '\n';
  }
  Finalize(out, path);
}

CsvRunSink::CsvRunSink(const std::string& dir, int n_actions, bool mixed,
                       bool snapshots)
    : mixed_(mixed),
      summary_path_((std::filesystem::path(dir) / "summary.csv").string()),
      snapshot_path_((std::filesystem::path(dir) / "snapshots.csv").string()) {
  EnsureDirectory(dir);
  summary_ = OpenForWrite(summary_path_);
  summary_ << SummaryHeader(n_actions, mixed) << '\n';
  if (snapshots) {
    snapshots_ = OpenForWrite(snapshot_path_);
    snapshots_ << SnapshotHeader(n_actions) << '\n';
  }
}

void CsvRunSink::Check(std::ofstream& out, const std::string& path) {
  if (!out) throw IoError("write failed for '" + path + "'");
}

void CsvRunSink::OnSummary(const SummaryRecord& record) {
  summary_ << SummaryLine(record, mixed_) << '\n';
  Check(summary_, summary_path_);
  if (++pending_ >= kFlushEvery) {
    summary_.flush();
    if (snapshots_.is_open()) snapshots_.flush();
    pending_ = 0;
  }
}

void CsvRunSink::OnSnapshot(std::span<const SnapshotRow> rows) {
  if (!snapshots_.is_open()) return;
  for (const auto& row : rows) snapshots_ << SnapshotLine(row) << '\n';
  Check(snapshots_, snapshot_path_);
}

void CsvRunSink::Finish() {
  Finalize(summary_, summary_path_);
  if (snapshots_.is_open()) Finalize(snapshots_, snapshot_path_);
}

void EnsureDirectory(const std::string& dir) {
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) throw IoError("cannot create directory '" + dir + "': " + ec.message());
}

void WriteTextFile(const std::string& path, const std::string& text) {
  std::ofstream out = OpenForWrite(path);
  out << text;
  Finalize(out, path);
}

}  // namespace evopop
