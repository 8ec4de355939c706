#pragma once

#include <cctype>
#include <charconv>
#include <cstdint>
#include <fstream>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include "htc/analytic.hpp"
#include "htc/distribution.hpp"
#include "htc/errors.hpp"
#include "htc/link.hpp"
#include "htc/simulator.hpp"

namespace htc::cfg {

// ---------------------------------------------------------------------------
// Generic config tree. The file format is a small key-value dialect:
//
//   # comment
//   [section]
//   key = 1.5
//   name = "quoted"        # or a bare word: name = two_bit
//   A = { family = "uniform", low = 0.0, high = 2.0 }
//   u_grid = [5, 10, 20]
//
// Inline tables and arrays must fit on one line. Later assignments to the
// same key win.
// ---------------------------------------------------------------------------

struct Value {
  enum class Kind { Number, String, Table, Array };
  Kind kind = Kind::Table;
  double num = 0;
  std::string raw;  // original token for numbers (exact integer reparse)
  std::string str;
  std::map<std::string, Value> table;
  std::vector<Value> list;
};

namespace detail {

inline bool ident_char(char c) {
  return std::isalnum(static_cast<unsigned char>(c)) || c == '_';
}

class ValueParser {
 public:
  ValueParser(std::string_view text, int line) : text_(text), line_(line) {}

  Value parse_all() {
    Value v = parse_value();
    skip_ws();
    if (pos_ != text_.size()) fail("trailing characters after value");
    return v;
  }

 private:
  [[noreturn]] void fail(const std::string& msg) const {
    throw config_error("config line " + std::to_string(line_) + ": " + msg);
  }

  void skip_ws() {
    while (pos_ < text_.size() && (text_[pos_] == ' ' || text_[pos_] == '\t')) ++pos_;
  }

  char peek() const { return pos_ < text_.size() ? text_[pos_] : '\0'; }

  Value parse_value() {
    skip_ws();
    if (pos_ >= text_.size()) fail("missing value");
    const char c = text_[pos_];
    if (c == '"') return parse_string();
    if (c == '{') return parse_table();
    if (c == '[') return parse_array();
    if (c == '-' || c == '+' || c == '.' || std::isdigit(static_cast<unsigned char>(c))) {
      return parse_number();
    }
    if (ident_char(c)) return parse_bareword();
    fail(std::string("unexpected character '") + c + "' in value");
  }

  Value parse_string() {
    ++pos_;  // opening quote
    Value v;
    v.kind = Value::Kind::String;
    while (pos_ < text_.size() && text_[pos_] != '"') v.str.push_back(text_[pos_++]);
    if (pos_ >= text_.size()) fail("unterminated string");
    ++pos_;
    return v;
  }

  Value parse_bareword() {
    Value v;
    v.kind = Value::Kind::String;
    while (pos_ < text_.size() && ident_char(text_[pos_])) v.str.push_back(text_[pos_++]);
    return v;
  }

  Value parse_number() {
    const std::size_t start = pos_;
    while (pos_ < text_.size() &&
           (ident_char(text_[pos_]) || text_[pos_] == '.' || text_[pos_] == '-' ||
            text_[pos_] == '+')) {
      ++pos_;
    }
    Value v;
    v.kind = Value::Kind::Number;
    v.raw = std::string(text_.substr(start, pos_ - start));
    const char* begin = v.raw.data();
    const char* end = begin + v.raw.size();
    auto [ptr, ec] = std::from_chars(begin, end, v.num);
    if (ec != std::errc{} || ptr != end) fail("malformed number '" + v.raw + "'");
    return v;
  }

  std::string parse_key() {
    skip_ws();
    std::string key;
    while (pos_ < text_.size() && ident_char(text_[pos_])) key.push_back(text_[pos_++]);
    if (key.empty()) fail("expected key");
    skip_ws();
    if (peek() != '=') fail("expected '=' after key '" + key + "'");
    ++pos_;
    return key;
  }

  Value parse_table() {
    ++pos_;  // '{'
    Value v;
    v.kind = Value::Kind::Table;
    skip_ws();
    if (peek() == '}') {
      ++pos_;
      return v;
    }
    for (;;) {
      std::string key = parse_key();
      v.table[key] = parse_value();
      skip_ws();
      if (peek() == ',') {
        ++pos_;
        continue;
      }
      if (peek() == '}') {
        ++pos_;
        return v;
      }
      fail("expected ',' or '}' in inline table");
    }
  }

  Value parse_array() {
    ++pos_;  // '['
    Value v;
    v.kind = Value::Kind::Array;
    skip_ws();
    if (peek() == ']') {
      ++pos_;
      return v;
    }
    for (;;) {
      v.list.push_back(parse_value());
      skip_ws();
      if (peek() == ',') {
        ++pos_;
        continue;
      }
      if (peek() == ']') {
        ++pos_;
        return v;
      }
      fail("expected ',' or ']' in array");
    }
  }

  std::string_view text_;
  std::size_t pos_ = 0;
  int line_;
};

inline std::string_view strip_comment(std::string_view line) {
  bool quoted = false;
  for (std::size_t i = 0; i < line.size(); ++i) {
    if (line[i] == '"') quoted = !quoted;
    if (line[i] == '#' && !quoted) return line.substr(0, i);
  }
  return line;
}

inline std::string_view trim(std::string_view s) {
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) {
    s.remove_prefix(1);
  }
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) {
    s.remove_suffix(1);
  }
  return s;
}

}  // namespace detail

/// Parse config text into a key-value tree rooted at a table.
inline Value parse_text(std::string_view text) {
  Value root;
  root.kind = Value::Kind::Table;
  Value* section = &root;
  int line_no = 0;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    const std::size_t nl = text.find('\n', pos);
    std::string_view line = text.substr(pos, nl == std::string_view::npos ? text.size() - pos : nl - pos);
    pos = nl == std::string_view::npos ? text.size() + 1 : nl + 1;
    ++line_no;
    line = detail::trim(detail::strip_comment(line));
    if (line.empty()) continue;
    if (line.front() == '[') {
      if (line.back() != ']') {
        throw config_error("config line " + std::to_string(line_no) +
                           ": unterminated section header");
      }
      const std::string name(detail::trim(line.substr(1, line.size() - 2)));
      if (name.empty()) {
        throw config_error("config line " + std::to_string(line_no) + ": empty section name");
      }
      Value& s = root.table[name];
      s.kind = Value::Kind::Table;
      section = &s;
      continue;
    }
    const std::size_t eq = line.find('=');
    if (eq == std::string_view::npos) {
      throw config_error("config line " + std::to_string(line_no) +
                         ": expected 'key = value' or '[section]'");
    }
    const std::string key(detail::trim(line.substr(0, eq)));
    if (key.empty()) {
      throw config_error("config line " + std::to_string(line_no) + ": empty key");
    }
    detail::ValueParser vp(detail::trim(line.substr(eq + 1)), line_no);
    (*section).table[key] = vp.parse_all();
  }
  return root;
}

inline Value parse_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw config_error("cannot read config file: " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_text(buf.str());
}

/// Apply one `--set section.key=value` override onto the parsed tree. The
/// value is parsed like a config scalar (number, quoted string or bare word).
inline void apply_override(Value& root, std::string_view assignment) {
  const std::size_t eq = assignment.find('=');
  if (eq == std::string_view::npos) {
    throw config_error("override must look like key=value: '" +
                       std::string(assignment) + "'");
  }
  const std::string_view path = detail::trim(assignment.substr(0, eq));
  const std::string_view raw = detail::trim(assignment.substr(eq + 1));
  if (path.empty()) throw config_error("override has an empty key");
  Value* node = &root;
  std::size_t start = 0;
  for (;;) {
    const std::size_t dot = path.find('.', start);
    const std::string seg(path.substr(start, dot == std::string_view::npos
                                                 ? path.size() - start
                                                 : dot - start));
    if (seg.empty()) throw config_error("override key has an empty segment");
    if (dot == std::string_view::npos) {
      detail::ValueParser vp(raw, 0);
      node->table[seg] = vp.parse_all();
      return;
    }
    Value& next = node->table[seg];
    if (next.kind != Value::Kind::Table) {
      next = Value{};
      next.kind = Value::Kind::Table;
    }
    node = &next;
    start = dot + 1;
  }
}

// ---------------------------------------------------------------------------
// Typed extraction
// ---------------------------------------------------------------------------

/// Everything a CLI run needs. Sections are optional at parse time; each
/// command checks for the pieces it requires.
struct RunConfig {
  std::optional<DistributionSpec> arrival;
  std::optional<DistributionSpec> packet;
  ProtocolConfig protocol;
  bool has_protocol = false;
  std::optional<LinkConfig> link;
  std::uint64_t cycles = 10'000;
  std::uint64_t seed = 0;
  ResidualMode residual_mode = ResidualMode::StationaryResidual;
  std::vector<double> sweep_grid;
};

namespace detail {

inline const Value* find(const Value& table, const std::string& key) {
  const auto it = table.table.find(key);
  return it == table.table.end() ? nullptr : &it->second;
}

inline double number_at(const Value& table, const std::string& key,
                        const std::string& where) {
  const Value* v = find(table, key);
  if (!v) throw config_error(where + ": missing key '" + key + "'");
  if (v->kind != Value::Kind::Number) {
    throw config_error(where + ": key '" + key + "' must be a number");
  }
  return v->num;
}

inline std::uint64_t uint_at(const Value& table, const std::string& key,
                             const std::string& where) {
  const Value* v = find(table, key);
  if (!v) throw config_error(where + ": missing key '" + key + "'");
  if (v->kind != Value::Kind::Number) {
    throw config_error(where + ": key '" + key + "' must be an integer");
  }
  std::uint64_t out = 0;
  const char* begin = v->raw.data();
  const char* end = begin + v->raw.size();
  auto [ptr, ec] = std::from_chars(begin, end, out);
  if (ec != std::errc{} || ptr != end) {
    throw config_error(where + ": key '" + key + "' must be a nonnegative integer, got '" +
                       v->raw + "'");
  }
  return out;
}

inline std::string string_at(const Value& table, const std::string& key,
                             const std::string& where) {
  const Value* v = find(table, key);
  if (!v) throw config_error(where + ": missing key '" + key + "'");
  if (v->kind != Value::Kind::String) {
    throw config_error(where + ": key '" + key + "' must be a string");
  }
  return v->str;
}

inline void check_keys(const Value& table, std::initializer_list<const char*> known,
                       const std::string& where) {
  for (const auto& [key, _] : table.table) {
    bool ok = false;
    for (const char* k : known) {
      if (key == k) {
        ok = true;
        break;
      }
    }
    if (!ok) throw config_error(where + ": unknown key '" + key + "'");
  }
}

inline DistributionSpec distribution_from(const Value& table, const std::string& where) {
  if (table.kind != Value::Kind::Table) {
    throw config_error(where + ": expected a table of distribution parameters");
  }
  // The full parameter vocabulary is accepted so that a family override via
  // --set does not trip over parameters left behind by the config file.
  check_keys(table, {"family", "value", "low", "high", "rate", "shape", "scale"}, where);
  const std::string family = string_at(table, "family", where);
  try {
    if (family == "deterministic") {
      return DistributionSpec::deterministic(number_at(table, "value", where));
    }
    if (family == "uniform") {
      return DistributionSpec::uniform(number_at(table, "low", where),
                                       number_at(table, "high", where));
    }
    if (family == "exponential") {
      return DistributionSpec::exponential(number_at(table, "rate", where));
    }
    if (family == "gamma") {
      return DistributionSpec::gamma(number_at(table, "shape", where),
                                     number_at(table, "scale", where));
    }
  } catch (const domain_error& e) {
    throw config_error(where + ": " + e.what());
  }
  throw config_error(where + ": unknown family '" + family +
                     "' (expected deterministic, uniform, exponential or gamma)");
}

inline EsiMode mode_from(const std::string& name) {
  if (name == "two_bit") return EsiMode::TwoBit;
  if (name == "one_bit") return EsiMode::OneBit;
  if (name == "zero_bit") return EsiMode::ZeroBit;
  if (name == "zero_bit_discharge") return EsiMode::ZeroBitDischarge;
  throw config_error("protocol: unknown mode '" + name +
                     "' (expected two_bit, one_bit, zero_bit or zero_bit_discharge)");
}

}  // namespace detail

/// Turn a parsed tree into a typed RunConfig, rejecting unknown keys.
inline RunConfig extract_run_config(const Value& root) {
  using detail::find;
  RunConfig rc;
  detail::check_keys(root, {"arrival", "packet", "A", "X", "protocol", "sim", "link", "sweep"},
                     "config");

  const Value* arrival = find(root, "arrival");
  if (const Value* a = find(root, "A")) {
    if (arrival) throw config_error("config: give either 'A' or [arrival], not both");
    arrival = a;
  }
  if (arrival) rc.arrival = detail::distribution_from(*arrival, "arrival");

  const Value* packet = find(root, "packet");
  if (const Value* x = find(root, "X")) {
    if (packet) throw config_error("config: give either 'X' or [packet], not both");
    packet = x;
  }
  if (packet) rc.packet = detail::distribution_from(*packet, "packet");

  if (const Value* p = find(root, "protocol")) {
    detail::check_keys(*p, {"mode", "u", "p", "theta1", "theta3", "T"}, "protocol");
    rc.has_protocol = true;
    rc.protocol.mode = detail::mode_from(detail::string_at(*p, "mode", "protocol"));
    if (find(*p, "u")) rc.protocol.threshold = detail::number_at(*p, "u", "protocol");
    if (find(*p, "p")) rc.protocol.power = detail::number_at(*p, "p", "protocol");
    if (find(*p, "theta1")) {
      rc.protocol.outage_target = detail::number_at(*p, "theta1", "protocol");
    }
    if (find(*p, "theta3")) {
      rc.protocol.discharge_target = detail::number_at(*p, "theta3", "protocol");
    }
    if (find(*p, "T")) rc.protocol.period = detail::number_at(*p, "T", "protocol");
  }

  if (const Value* s = find(root, "sim")) {
    detail::check_keys(*s, {"cycles", "seed", "residual"}, "sim");
    if (find(*s, "cycles")) rc.cycles = detail::uint_at(*s, "cycles", "sim");
    if (find(*s, "seed")) rc.seed = detail::uint_at(*s, "seed", "sim");
    if (find(*s, "residual")) {
      const std::string r = detail::string_at(*s, "residual", "sim");
      if (r == "stationary") {
        rc.residual_mode = ResidualMode::StationaryResidual;
      } else if (r == "fresh") {
        rc.residual_mode = ResidualMode::FreshStart;
      } else {
        throw config_error("sim: residual must be 'stationary' or 'fresh', got '" + r + "'");
      }
    }
  }

  if (const Value* l = find(root, "link")) {
    detail::check_keys(*l, {"zeta", "noise", "theta2", "fading", "symbol_duration"}, "link");
    const Value* fading = find(*l, "fading");
    if (!fading) throw config_error("link: missing key 'fading'");
    LinkConfig link{.zeta = detail::number_at(*l, "zeta", "link"),
                    .noise = detail::number_at(*l, "noise", "link"),
                    .fading = detail::distribution_from(*fading, "link.fading"),
                    .theta2 = detail::number_at(*l, "theta2", "link")};
    if (find(*l, "symbol_duration")) {
      link.symbol_duration = detail::number_at(*l, "symbol_duration", "link");
    }
    try {
      validate(link);
    } catch (const domain_error& e) {
      throw config_error(std::string("link: ") + e.what());
    }
    rc.link = link;
  }

  if (const Value* sw = find(root, "sweep")) {
    detail::check_keys(*sw, {"u_grid"}, "sweep");
    if (const Value* grid = find(*sw, "u_grid")) {
      if (grid->kind != Value::Kind::Array) {
        throw config_error("sweep: u_grid must be an array of numbers");
      }
      for (const Value& v : grid->list) {
        if (v.kind != Value::Kind::Number) {
          throw config_error("sweep: u_grid must contain only numbers");
        }
        rc.sweep_grid.push_back(v.num);
      }
    }
  }

  return rc;
}

inline RunConfig parse_run_config(std::string_view text) {
  return extract_run_config(parse_text(text));
}

}  // namespace htc::cfg
