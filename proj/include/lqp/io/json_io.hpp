#pragma once

#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <string>

#include <json.hpp>

#include "lqp/forms/grid_form.hpp"

namespace lqp {

using Json = nlohmann::json;

namespace detail {

inline void write_json(std::ostringstream& os, const Json& j, int indent, int depth) {
  const std::string pad(static_cast<std::size_t>(indent * (depth + 1)), ' ');
  const std::string close_pad(static_cast<std::size_t>(indent * depth), ' ');
  const char* nl = indent > 0 ? "\n" : "";
  switch (j.type()) {
    case Json::value_t::object: {
      if (j.empty()) { os << "{}"; return; }
      os << '{' << nl;
      bool first = true;
      for (auto it = j.begin(); it != j.end(); ++it) {
        if (!first) os << ',' << nl;
        first = false;
        os << pad << Json(it.key()).dump() << (indent > 0 ? ": " : ":");
        write_json(os, it.value(), indent, depth + 1);
      }
      os << nl << close_pad << '}';
      return;
    }
    case Json::value_t::array: {
      if (j.empty()) { os << "[]"; return; }
      // numeric arrays stay on one line
      bool flat = true;
      for (const auto& v : j) flat = flat && v.is_primitive();
      os << '[' << (flat ? "" : nl);
      bool first = true;
      for (const auto& v : j) {
        if (!first) os << ',' << (flat ? (indent > 0 ? " " : "") : nl);
        first = false;
        if (!flat) os << pad;
        write_json(os, v, indent, depth + 1);
      }
      if (!flat) os << nl << close_pad;
      os << ']';
      return;
    }
    case Json::value_t::number_float: {
      const double v = j.get<double>();
      if (!std::isfinite(v)) { os << "null"; return; }
      char buf[40];
      std::snprintf(buf, sizeof buf, "%.17g", v);
      os << buf;
      return;
    }
    default:
      os << j.dump();
  }
}

}  // namespace detail

/// Deterministic JSON text: sorted keys, doubles with 17 significant digits,
/// non-finite doubles as null.
inline std::string dump_json(const Json& j, int indent = 2) {
  std::ostringstream os;
  detail::write_json(os, j, indent, 0);
  os << '\n';
  return os.str();
}

inline Json read_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open '" + path + "'");
  try {
    return Json::parse(in);
  } catch (const Json::parse_error& e) {
    throw Error("malformed JSON in '" + path + "': " + e.what());
  }
}

inline Json domain_to_json(const DomainSpec& d) {
  Json axes = Json::array();
  for (const auto& ax : d.grid().axes())
    axes.push_back({{"lo", ax.lo}, {"hi", ax.hi}, {"count", ax.count}, {"periodic", ax.periodic}});
  Json j{{"kind", to_string(d.kind())}, {"axes", axes}};
  if (d.has_warp()) j["warp"] = d.warp();
  return j;
}

inline DomainPtr domain_from_json(const Json& j) {
  const auto kind = domain_kind_from_string(j.at("kind").get<std::string>());
  std::vector<Axis> axes;
  for (const auto& a : j.at("axes"))
    axes.push_back({a.at("lo").get<double>(), a.at("hi").get<double>(), a.at("count").get<std::size_t>(),
                    a.value("periodic", false)});
  std::vector<double> warp;
  if (j.contains("warp")) warp = j.at("warp").get<std::vector<double>>();
  return std::make_shared<const DomainSpec>(kind, Grid(std::move(axes)), std::move(warp));
}

inline Json form_to_json(const GridForm& w) {
  Json comps = Json::array();
  for (std::size_t c = 0; c < w.component_count(); ++c)
    comps.push_back({{"index", axes_of(w.indices()[c])}, {"values", w.field(c)}});
  return {{"domain", domain_to_json(w.domain())}, {"degree", w.degree()}, {"components", comps}};
}

inline GridForm form_from_json(const Json& j) {
  GridForm w(domain_from_json(j.at("domain")), j.at("degree").get<int>());
  const auto& comps = j.at("components");
  if (comps.size() != w.component_count()) throw DomainError("component count does not match degree");
  for (const auto& c : comps) {
    const MultiIndex I = mask_of(c.at("index").get<std::vector<int>>());
    auto values = c.at("values").get<std::vector<double>>();
    if (values.size() != w.size()) throw DomainError("coefficient array does not match grid size");
    w[I] = std::move(values);
  }
  return w;
}

inline std::string serialize_form(const GridForm& w) { return dump_json(form_to_json(w), 0); }

inline GridForm deserialize_form(const std::string& text) {
  try {
    return form_from_json(Json::parse(text));
  } catch (const Json::exception& e) {
    throw DomainError(std::string("malformed form JSON: ") + e.what());
  }
}

}  // namespace lqp
