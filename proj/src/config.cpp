#include "polyshoot/config.hpp"

#include <fstream>
#include <set>
#include <sstream>

#include <json.hpp>

#include "polyshoot/errors.hpp"

namespace polyshoot {

namespace {

using nlohmann::json;

void reject_unknown(const json& obj, const std::set<std::string>& allowed, const std::string& path) {
  for (const auto& [key, value] : obj.items()) {
    if (!allowed.count(key)) throw ConfigError(path + ": unknown key '" + key + "'");
  }
}

const json& require(const json& obj, const char* key, const std::string& path) {
  auto it = obj.find(key);
  if (it == obj.end()) throw ConfigError(path + ": missing key '" + key + "'");
  return *it;
}

double as_number(const json& v, const std::string& path) {
  if (!v.is_number()) throw ConfigError(path + ": expected a number");
  return v.get<double>();
}

int as_integer(const json& v, const std::string& path) {
  if (!v.is_number_integer()) throw ConfigError(path + ": expected an integer");
  return v.get<int>();
}

}  // namespace

SystemSpec parse_spec(const std::string& text) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::parse_error& e) {
    throw ConfigError(std::string("malformed config: ") + e.what());
  }
  if (!doc.is_object()) throw ConfigError("config: top level must be an object");
  reject_unknown(doc, {"n", "equations"}, "config");

  SystemSpec spec;
  spec.n = as_integer(require(doc, "n", "config"), "n");
  const json& eqs = require(doc, "equations", "config");
  if (!eqs.is_array()) throw ConfigError("equations: expected a list");

  for (std::size_t i = 0; i < eqs.size(); ++i) {
    const std::string path = "equations[" + std::to_string(i) + "]";
    const json& e = eqs[i];
    if (!e.is_object()) throw ConfigError(path + ": expected an object");
    reject_unknown(e, {"order", "monomials"}, path);

    EquationSpec eq;
    eq.order = as_integer(require(e, "order", path), path + ".order");
    const json& monos = require(e, "monomials", path);
    if (!monos.is_array()) throw ConfigError(path + ".monomials: expected a list");
    for (std::size_t j = 0; j < monos.size(); ++j) {
      const std::string mpath = path + ".monomials[" + std::to_string(j) + "]";
      const json& m = monos[j];
      if (!m.is_object()) throw ConfigError(mpath + ": expected an object");
      reject_unknown(m, {"coef", "sigma", "powers"}, mpath);
      Monomial mono;
      mono.coef = as_number(require(m, "coef", mpath), mpath + ".coef");
      mono.sigma = as_number(require(m, "sigma", mpath), mpath + ".sigma");
      const json& pw = require(m, "powers", mpath);
      if (!pw.is_array()) throw ConfigError(mpath + ".powers: expected a list");
      for (std::size_t q = 0; q < pw.size(); ++q) {
        mono.powers.push_back(as_number(pw[q], mpath + ".powers[" + std::to_string(q) + "]"));
      }
      eq.rhs.push_back(std::move(mono));
    }
    spec.equations.push_back(std::move(eq));
  }
  return spec;
}

SystemSpec load_spec(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file '" + path.string() + "'");
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_spec(buf.str());
}

std::string dump_spec(const SystemSpec& spec) {
  json doc;
  doc["n"] = spec.n;
  doc["equations"] = json::array();
  for (const auto& eq : spec.equations) {
    json e;
    e["order"] = eq.order;
    e["monomials"] = json::array();
    for (const auto& mono : eq.rhs) {
      e["monomials"].push_back({{"coef", mono.coef}, {"sigma", mono.sigma}, {"powers", mono.powers}});
    }
    doc["equations"].push_back(std::move(e));
  }
  return doc.dump(2);
}

}  // namespace polyshoot
