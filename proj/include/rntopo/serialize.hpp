#pragma once

#include "rntopo/system.hpp"
#include "rntopo/tilde.hpp"

#include <json.hpp>

#include <stdexcept>
#include <string>

namespace rntopo {

using Json = nlohmann::ordered_json;

/// Malformed document; `path` is a JSON-pointer-like location ("/tasks/0/system/p").
struct SchemaError : std::invalid_argument {
  SchemaError(const std::string& path, const std::string& what)
      : std::invalid_argument(path + ": " + what), path(path) {}
  std::string path;
};

Json weight_to_json(const Weight& w);
Weight weight_from_json(const Json& j, const std::string& path);

/// {"type": "shift", "k": 2}, {"type": "least_deletion", "p": "2/3"},
/// {"type": "odometer", "p": "1/3"}, {"type": "free_boundary", "d": 2, "m": {"a": "1/4", ...}}.
/// A free_boundary descriptor without "m" means the uniform step law.
Json system_to_json(const GeneratorSystem& system);
GeneratorSystem system_from_json(const Json& j, const std::string& path);

/// {"prefix": "001", "period": "01"}; validated against the system's domain.
Json point_to_json(const SymbolicPoint& p);
SymbolicPoint point_from_json(const Json& j, const GeneratorSystem& system, const std::string& path);

/// Rejects members not in `allowed`.
void check_fields(const Json& object, std::initializer_list<const char*> allowed, const std::string& path);
const Json& require(const Json& object, const char* key, const std::string& path);
std::uint64_t uint_field(const Json& object, const char* key, const std::string& path);
std::string string_field(const Json& object, const char* key, const std::string& path);

}  // namespace rntopo
