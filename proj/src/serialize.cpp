#include "rntopo/serialize.hpp"

#include <algorithm>

namespace rntopo {

Json weight_to_json(const Weight& w) { return w.to_string(); }

Weight weight_from_json(const Json& j, const std::string& path) {
  if (!j.is_string()) throw SchemaError(path, "rational must be a \"num/den\" string");
  try {
    return Weight::parse(j.get<std::string>());
  } catch (const std::exception& e) {
    throw SchemaError(path, std::string("malformed rational: ") + e.what());
  }
}

void check_fields(const Json& object, std::initializer_list<const char*> allowed, const std::string& path) {
  if (!object.is_object()) throw SchemaError(path, "expected an object");
  for (const auto& [key, value] : object.items()) {
    const bool known = std::any_of(allowed.begin(), allowed.end(), [&](const char* a) { return key == a; });
    if (!known) throw SchemaError(path + "/" + key, "unknown field");
  }
}

const Json& require(const Json& object, const char* key, const std::string& path) {
  if (!object.contains(key)) throw SchemaError(path + "/" + key, "missing required field");
  return object.at(key);
}

std::uint64_t uint_field(const Json& object, const char* key, const std::string& path) {
  const Json& v = require(object, key, path);
  if (!v.is_number_unsigned() && !(v.is_number_integer() && v.get<long long>() >= 0))
    throw SchemaError(path + "/" + key, "expected a nonnegative integer");
  return v.get<std::uint64_t>();
}

std::string string_field(const Json& object, const char* key, const std::string& path) {
  const Json& v = require(object, key, path);
  if (!v.is_string()) throw SchemaError(path + "/" + key, "expected a string");
  return v.get<std::string>();
}

Json system_to_json(const GeneratorSystem& system) {
  Json j;
  j["type"] = system.type_name();
  std::visit(
      [&](const auto& params) {
        using T = std::decay_t<decltype(params)>;
        if constexpr (std::is_same_v<T, ShiftParams>) {
          j["k"] = params.k;
        } else if constexpr (std::is_same_v<T, FreeBoundaryParams>) {
          j["d"] = params.d;
          Json m = Json::object();
          const Alphabet a = Alphabet::free_group(params.d);
          for (std::size_t s = 0; s < params.m.size(); ++s)
            m[std::string(1, a.render(static_cast<Symbol>(s)))] = params.m[s].to_string();
          j["m"] = m;
        } else {
          j["p"] = params.p.to_string();
        }
      },
      system.params());
  return j;
}

GeneratorSystem system_from_json(const Json& j, const std::string& path) {
  if (!j.is_object()) throw SchemaError(path, "system descriptor must be an object");
  const std::string type = string_field(j, "type", path);
  try {
    if (type == "shift") {
      check_fields(j, {"type", "k"}, path);
      return GeneratorSystem::shift(static_cast<int>(uint_field(j, "k", path)));
    }
    if (type == "least_deletion" || type == "odometer") {
      check_fields(j, {"type", "p"}, path);
      const Weight p = weight_from_json(require(j, "p", path), path + "/p");
      try {
        return type == "odometer" ? GeneratorSystem::odometer(p) : GeneratorSystem::least_deletion(p);
      } catch (const std::invalid_argument& e) {
        throw SchemaError(path + "/p", e.what());
      }
    }
    if (type == "free_boundary") {
      check_fields(j, {"type", "d", "m"}, path);
      const int d = static_cast<int>(uint_field(j, "d", path));
      if (!j.contains("m")) return GeneratorSystem::free_boundary_uniform(d);
      const Json& m = j.at("m");
      if (!m.is_object()) throw SchemaError(path + "/m", "expected an object keyed by letter");
      const Alphabet a = Alphabet::free_group(d);
      for (const auto& [key, value] : m.items()) {
        if (key.size() != 1) throw SchemaError(path + "/m/" + key, "unknown letter");
        try {
          a.parse_symbol(key[0]);
        } catch (const std::invalid_argument&) {
          throw SchemaError(path + "/m/" + key, "unknown letter");
        }
      }
      std::vector<Weight> weights(static_cast<std::size_t>(a.size));
      for (int s = 0; s < a.size; ++s) {
        const std::string key(1, a.render(static_cast<Symbol>(s)));
        weights[static_cast<std::size_t>(s)] = weight_from_json(require(m, key.c_str(), path + "/m"), path + "/m/" + key);
      }
      return GeneratorSystem::free_boundary(d, std::move(weights));
    }
  } catch (const SchemaError&) {
    throw;
  } catch (const std::invalid_argument& e) {
    throw SchemaError(path, e.what());
  }
  throw SchemaError(path + "/type", "unknown system type '" + type + "'");
}

Json point_to_json(const SymbolicPoint& p) {
  return Json{{"prefix", p.alphabet().render(p.prefix())}, {"period", p.alphabet().render(p.period())}};
}

SymbolicPoint point_from_json(const Json& j, const GeneratorSystem& system, const std::string& path) {
  check_fields(j, {"prefix", "period"}, path);
  const std::string prefix = j.contains("prefix") ? string_field(j, "prefix", path) : std::string();
  const std::string period = string_field(j, "period", path);
  try {
    SymbolicPoint p = SymbolicPoint::parse(system.alphabet(), prefix, period);
    system.validate(p);
    return p;
  } catch (const std::invalid_argument& e) {
    throw SchemaError(path, e.what());
  }
}

}  // namespace rntopo
