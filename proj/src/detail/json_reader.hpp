#pragma once

// Strict JSON object reading with diagnostics collection. Internal to the library.

#include "csm/core_model.hpp"

#include <json.hpp>

#include <optional>
#include <set>
#include <string>
#include <vector>

namespace csm::detail {

using json = nlohmann::json;

class ObjectReader
{
public:
  ObjectReader(const json &node, std::string locator, std::vector<Diagnostic> &diags)
      : node_(node), loc_(std::move(locator)), diags_(diags)
  {
    if (!node_.is_object()) {
      fail(DiagnosticCategory::Schema, loc_, "expected an object");
      valid_ = false;
    }
  }

  bool valid() const noexcept { return valid_; }
  const std::string &locator() const noexcept { return loc_; }
  std::string field_locator(std::string_view key) const { return loc_.empty() ? std::string(key) : loc_ + "." + std::string(key); }

  const json *get(std::string_view key, bool required)
  {
    if (!valid_)
      return nullptr;
    seen_.insert(std::string(key));
    auto it = node_.find(std::string(key));
    if (it == node_.end() || (!required && it->is_null())) {
      if (required)
        fail(DiagnosticCategory::Schema, field_locator(key), "missing required field");
      return nullptr;
    }
    return &*it;
  }

  std::optional<std::string> string(std::string_view key, bool required = true)
  {
    const json *v = get(key, required);
    if (!v)
      return std::nullopt;
    if (!v->is_string()) {
      fail(DiagnosticCategory::Schema, field_locator(key), "expected a string");
      return std::nullopt;
    }
    return v->get<std::string>();
  }

  std::optional<long long> integer(std::string_view key, bool required = true)
  {
    const json *v = get(key, required);
    if (!v)
      return std::nullopt;
    if (!v->is_number_integer()) {
      fail(DiagnosticCategory::Schema, field_locator(key), "expected an integer");
      return std::nullopt;
    }
    return v->get<long long>();
  }

  std::optional<double> number(std::string_view key, bool required = true)
  {
    const json *v = get(key, required);
    if (!v)
      return std::nullopt;
    if (!v->is_number()) {
      fail(DiagnosticCategory::Schema, field_locator(key), "expected a number");
      return std::nullopt;
    }
    return v->get<double>();
  }

  std::optional<bool> boolean(std::string_view key, bool required = true)
  {
    const json *v = get(key, required);
    if (!v)
      return std::nullopt;
    if (!v->is_boolean()) {
      fail(DiagnosticCategory::Schema, field_locator(key), "expected a boolean");
      return std::nullopt;
    }
    return v->get<bool>();
  }

  const json *array(std::string_view key, bool required = true)
  {
    const json *v = get(key, required);
    if (v && !v->is_array()) {
      fail(DiagnosticCategory::Schema, field_locator(key), "expected an array");
      return nullptr;
    }
    return v;
  }

  std::optional<std::vector<std::string>> strings(std::string_view key, bool required = true)
  {
    const json *arr = array(key, required);
    if (!arr)
      return std::nullopt;
    std::vector<std::string> out;
    for (std::size_t i = 0; i < arr->size(); ++i) {
      const auto &item = (*arr)[i];
      if (!item.is_string()) {
        fail(DiagnosticCategory::Schema, field_locator(key) + "[" + std::to_string(i) + "]", "expected a string");
        return std::nullopt;
      }
      out.push_back(item.get<std::string>());
    }
    return out;
  }

  template <typename E> std::optional<E> enumeration(std::string_view key, bool required = true)
  {
    auto s = string(key, required);
    if (!s)
      return std::nullopt;
    auto e = enum_from_string<E>(*s);
    if (!e)
      fail(DiagnosticCategory::Schema, field_locator(key), "unknown value '" + *s + "'");
    return e;
  }

  /// Reports every key that was never requested.
  void finish()
  {
    if (!valid_)
      return;
    for (auto it = node_.begin(); it != node_.end(); ++it) {
      if (!seen_.count(it.key()))
        fail(DiagnosticCategory::Schema, field_locator(it.key()), "unknown field");
    }
  }

  void fail(DiagnosticCategory c, std::string loc, std::string msg)
  {
    diags_.push_back(Diagnostic{c, std::move(loc), std::move(msg)});
  }

private:
  const json &node_;
  std::string loc_;
  std::vector<Diagnostic> &diags_;
  std::set<std::string> seen_;
  bool valid_ = true;
};

inline std::string index_locator(const std::string &base, std::size_t i)
{
  return base + "[" + std::to_string(i) + "]";
}

/// Parses text or throws DocumentError with a single SyntaxError diagnostic.
inline json parse_json_text(std::string_view text)
{
  try {
    return json::parse(text.begin(), text.end());
  } catch (const json::parse_error &e) {
    throw DocumentError({Diagnostic{DiagnosticCategory::Syntax, "byte " + std::to_string(e.byte), e.what()}});
  }
}

/// Reads and checks the "schemaVersion" field.
inline void check_schema_version(ObjectReader &r)
{
  if (auto v = r.string("schemaVersion"); v && *v != "1")
    r.fail(DiagnosticCategory::Schema, r.field_locator("schemaVersion"), "unsupported schema version '" + *v + "'");
}

/// Canonical text form of every document: sorted keys, two-space indent, trailing newline.
inline std::string dump_canonical(const json &j) { return j.dump(2) + "\n"; }

} // namespace csm::detail
