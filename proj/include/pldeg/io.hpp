#pragma once

// File formats. Every document is JSON written with sorted keys, two-space
// indentation and 17 significant digits, so equal data gives equal bytes.
//
//   mesh:        {"dim": d, "vertices": [[x, y(, z)], ...], "simplices": [[i0, ..., id], ...]}
//   deformation: {"dim": d, "mesh_ref": "path" | <mesh>, "images": [[...], ...]}
//   model:       {"family": "W1"|"W2"|"W3", "p", "r", "s", "c", "q",
//                 "g": [gx, gy(, gz)] | [[...] per vertex], "box": [[...] polytope vertices]}

#include "pldeg/elasticity.hpp"
#include "pldeg/fixtures.hpp"

#include <openssl/evp.h>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>

namespace pldeg {

namespace detail {

inline void write_number(std::string& out, double x) {
  if (std::isnan(x)) {
    out += "\"nan\"";
  } else if (std::isinf(x)) {
    out += x > 0 ? "\"inf\"" : "\"-inf\"";
  } else {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", x);
    out += buf;
  }
}

inline void write_json(std::string& out, const Json& j, int indent) {
  const std::string pad(2 * (indent + 1), ' '), close(2 * indent, ' ');
  switch (j.type()) {
    case Json::value_t::object: {
      if (j.empty()) {
        out += "{}";
        return;
      }
      out += "{\n";
      bool first = true;
      for (auto it = j.begin(); it != j.end(); ++it) {  // std::map order: sorted keys
        if (!first) out += ",\n";
        first = false;
        out += pad + Json(it.key()).dump() + ": ";
        write_json(out, it.value(), indent + 1);
      }
      out += "\n" + close + "}";
      return;
    }
    case Json::value_t::array: {
      if (j.empty()) {
        out += "[]";
        return;
      }
      // Short arrays of scalars stay on one line.
      bool flat = j.size() <= 4;
      for (const auto& e : j) flat = flat && e.is_primitive();
      if (flat) {
        out += "[";
        for (std::size_t i = 0; i < j.size(); ++i) {
          if (i) out += ", ";
          write_json(out, j[i], indent + 1);
        }
        out += "]";
        return;
      }
      out += "[\n";
      for (std::size_t i = 0; i < j.size(); ++i) {
        if (i) out += ",\n";
        out += pad;
        write_json(out, j[i], indent + 1);
      }
      out += "\n" + close + "]";
      return;
    }
    case Json::value_t::number_float:
      write_number(out, j.get<double>());
      return;
    default:
      out += j.dump();
  }
}

}  // namespace detail

inline std::string stable_dump(const Json& j) {
  std::string out;
  detail::write_json(out, j, 0);
  out += "\n";
  return out;
}

inline Json parse_json(const std::string& text, const std::string& what = "document") {
  try {
    return Json::parse(text);
  } catch (const Json::exception& e) {
    throw Error(ErrorCode::InvalidInput, what + ": " + e.what());
  }
}

inline std::string read_text_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::InvalidInput, "cannot read " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

inline void write_text_file(const std::filesystem::path& path, const std::string& text) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorCode::InvalidInput, "cannot write " + path.string());
  out << text;
}

inline Json read_json_file(const std::filesystem::path& path) { return parse_json(read_text_file(path), path.string()); }

inline void write_json_file(const std::filesystem::path& path, const Json& j) { write_text_file(path, stable_dump(j)); }

inline std::string sha256_hex(const std::string& bytes) {
  unsigned char md[EVP_MAX_MD_SIZE];
  unsigned int len = 0;
  EVP_Digest(bytes.data(), bytes.size(), md, &len, EVP_sha256(), nullptr);
  static const char* hex = "0123456789abcdef";
  std::string out;
  for (unsigned i = 0; i < len; ++i) {
    out += hex[md[i] >> 4];
    out += hex[md[i] & 15];
  }
  return out;
}

// ---------------------------------------------------------------------------
// Points.

template <int D>
Json point_json(const Point<D>& p) {
  Json a = Json::array();
  for (int i = 0; i < D; ++i) a.push_back(p(i));
  return a;
}

template <int D>
Point<D> point_from_json(const Json& j, const std::string& what) {
  if (!j.is_array() || j.size() != D) throw Error(ErrorCode::InvalidInput, what + ": expected a " + std::to_string(D) + "-vector");
  Point<D> p;
  for (int i = 0; i < D; ++i) {
    if (!j[i].is_number()) throw Error(ErrorCode::InvalidInput, what + ": non-numeric coordinate");
    p(i) = j[i].get<double>();
  }
  return p;
}

template <int D>
std::vector<Point<D>> points_from_json(const Json& j, const std::string& what) {
  if (!j.is_array()) throw Error(ErrorCode::InvalidInput, what + ": expected an array");
  std::vector<Point<D>> out;
  for (const auto& e : j) out.push_back(point_from_json<D>(e, what));
  return out;
}

/// Parses "x,y[,z]".
template <int D>
Point<D> parse_point(const std::string& text) {
  std::vector<double> v;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    try {
      std::size_t used = 0;
      v.push_back(std::stod(item, &used));
      if (used != item.size()) throw std::invalid_argument(item);
    } catch (const std::exception&) {
      throw Error(ErrorCode::InvalidInput, "bad coordinate '" + item + "'");
    }
  }
  if (v.size() != D) throw Error(ErrorCode::InvalidInput, "query needs " + std::to_string(D) + " coordinates");
  Point<D> p;
  for (int i = 0; i < D; ++i) p(i) = v[i];
  return p;
}

// ---------------------------------------------------------------------------
// Meshes and deformations.

inline int document_dim(const Json& j) {
  if (!j.is_object() || !j.contains("dim") || !j["dim"].is_number_integer())
    throw Error(ErrorCode::InvalidInput, "document lacks an integer 'dim'");
  const int d = j["dim"].get<int>();
  if (d != 2 && d != 3) throw Error(ErrorCode::InvalidInput, "dim must be 2 or 3");
  return d;
}

template <int D>
Json mesh_json(const SimplicialMesh<D>& mesh) {
  Json j;
  j["dim"] = D;
  Json v = Json::array();
  for (const auto& p : mesh.vertices()) v.push_back(point_json<D>(p));
  j["vertices"] = v;
  Json s = Json::array();
  for (const auto& t : mesh.simplices()) {
    Json a = Json::array();
    for (int i : t) a.push_back(i);
    s.push_back(a);
  }
  j["simplices"] = s;
  return j;
}

template <int D>
SimplicialMesh<D> mesh_from_json(const Json& j) {
  if (document_dim(j) != D) throw Error(ErrorCode::InvalidInput, "mesh dimension mismatch");
  if (!j.contains("vertices") || !j.contains("simplices"))
    throw Error(ErrorCode::InvalidInput, "mesh needs 'vertices' and 'simplices'");
  auto vertices = points_from_json<D>(j["vertices"], "mesh vertices");
  const auto& js = j["simplices"];
  if (!js.is_array()) throw Error(ErrorCode::InvalidInput, "mesh simplices must be an array");
  std::vector<SimplexIndices<D>> simplices;
  for (const auto& e : js) {
    if (!e.is_array() || e.size() != D + 1) throw Error(ErrorCode::InvalidInput, "simplex needs d + 1 indices");
    SimplexIndices<D> s;
    for (int i = 0; i <= D; ++i) {
      if (!e[i].is_number_integer()) throw Error(ErrorCode::InvalidInput, "simplex index must be an integer");
      const long long k = e[i].get<long long>();
      if (k < 0 || k >= static_cast<long long>(vertices.size()))
        throw Error(ErrorCode::InvalidInput, "simplex index out of range");
      s[i] = static_cast<int>(k);
    }
    simplices.push_back(s);
  }
  return build_mesh<D>(std::move(vertices), std::move(simplices));
}

template <int D>
Json deformation_json(const PLMap<D>& map, const std::optional<std::string>& mesh_path = std::nullopt) {
  Json j;
  j["dim"] = D;
  j["mesh_ref"] = mesh_path ? Json(*mesh_path) : mesh_json(map.mesh());
  Json y = Json::array();
  for (const auto& p : map.images()) y.push_back(point_json<D>(p));
  j["images"] = y;
  return j;
}

/// Deformation on `mesh`; a `mesh_ref` in the document is ignored when the
/// mesh is given separately.
template <int D>
PLMap<D> deformation_from_json(const Json& j, std::shared_ptr<const SimplicialMesh<D>> mesh) {
  if (document_dim(j) != D) throw Error(ErrorCode::InvalidInput, "deformation dimension mismatch");
  if (!j.contains("images")) throw Error(ErrorCode::InvalidInput, "deformation needs 'images'");
  auto images = points_from_json<D>(j["images"], "deformation images");
  if (images.size() != mesh->vertex_count())
    throw Error(ErrorCode::InvalidInput, "deformation has " + std::to_string(images.size()) + " images for " +
                                             std::to_string(mesh->vertex_count()) + " vertices");
  return PLMap<D>(std::move(mesh), std::move(images));
}

/// Mesh named by the deformation's mesh_ref (inline, or a path relative to
/// the deformation file).
template <int D>
std::shared_ptr<const SimplicialMesh<D>> referenced_mesh(const Json& deformation, const std::filesystem::path& base) {
  if (!deformation.contains("mesh_ref")) throw Error(ErrorCode::InvalidInput, "deformation has no mesh_ref");
  const auto& ref = deformation["mesh_ref"];
  if (ref.is_string()) {
    std::filesystem::path p = ref.get<std::string>();
    if (p.is_relative()) p = base / p;
    return share(mesh_from_json<D>(read_json_file(p)));
  }
  return share(mesh_from_json<D>(ref));
}

// ---------------------------------------------------------------------------
// Energy models.

inline EnergyFamily family_from_string(const std::string& s) {
  if (s == "W1") return EnergyFamily::W1;
  if (s == "W2") return EnergyFamily::W2;
  if (s == "W3") return EnergyFamily::W3;
  throw Error(ErrorCode::InvalidInput, "unknown energy family '" + s + "'");
}

template <int D>
Json model_json(const EnergyModel<D>& m) {
  Json j;
  j["family"] = std::string(to_string(m.family));
  j["p"] = m.p;
  j["r"] = m.r;
  j["s"] = m.s;
  j["c"] = m.c;
  j["q"] = m.q;
  Json g = Json::array();
  for (const auto& f : m.force) g.push_back(point_json<D>(f));
  j["g"] = g;
  Json box = Json::array();
  for (const auto& v : m.box.vertices()) box.push_back(point_json<D>(v));
  j["box"] = box;
  return j;
}

template <int D>
EnergyModel<D> model_from_json(const Json& j, std::size_t vertex_count) {
  if (!j.is_object()) throw Error(ErrorCode::InvalidInput, "model must be an object");
  EnergyModel<D> m;
  m.family = family_from_string(j.value("family", std::string("W1")));
  auto num = [&](const char* key, double fallback) {
    if (!j.contains(key)) return fallback;
    if (!j[key].is_number()) throw Error(ErrorCode::InvalidInput, std::string("model '") + key + "' must be a number");
    return j[key].get<double>();
  };
  m.p = num("p", D);
  m.r = num("r", 1.0);
  m.s = num("s", 1.0);
  m.c = num("c", 1.0);
  m.q = num("q", 2.0);
  if (j.contains("g")) {
    const auto& g = j["g"];
    if (g.is_array() && g.size() == D && g[0].is_number()) {
      m.force = uniform_force<D>(vertex_count, point_from_json<D>(g, "model g"));
    } else if (g.is_array() && !g.empty()) {
      m.force = points_from_json<D>(g, "model g");
      if (m.force.size() != vertex_count) throw Error(ErrorCode::InvalidInput, "model g needs one vector per vertex");
    }
  }
  if (!j.contains("box")) throw Error(ErrorCode::InvalidInput, "model needs a 'box' vertex list");
  m.box = ConvexPolytope<D>::from_vertices(points_from_json<D>(j["box"], "model box"));
  m.validate();
  return m;
}

// ---------------------------------------------------------------------------
// Reports.

template <int D>
Json degree_report_json(const DegreeReport<D>& r, int resolution) {
  Json j;
  j["resolution"] = resolution;
  j["sigma"] = {{"kind", std::string(to_string(r.sigma.kind))}, {"value", r.sigma.value}};
  Json regions = Json::array();
  for (const auto& reg : r.regions) {
    Json e;
    e["label"] = reg.label;
    e["bounded"] = reg.bounded;
    e["measure"] = reg.measure;
    e["degree"] = reg.degree;
    Json reps = Json::array();
    for (const auto& p : reg.representatives) reps.push_back(point_json<D>(p));
    e["representatives"] = reps;
    regions.push_back(e);
  }
  j["regions"] = regions;
  return j;
}

/// Plain table "label degree measure x y [z]" with one row per representative.
template <int D>
std::string degree_table(const DegreeReport<D>& r) {
  std::string out = D == 2 ? "label\tdegree\tmeasure\tx\ty\n" : "label\tdegree\tmeasure\tx\ty\tz\n";
  char buf[64];
  for (const auto& reg : r.regions)
    for (const auto& p : reg.representatives) {
      out += std::to_string(reg.label) + "\t" + std::to_string(reg.degree) + "\t";
      std::snprintf(buf, sizeof buf, "%.17g", reg.measure);
      out += buf;
      for (int i = 0; i < D; ++i) {
        std::snprintf(buf, sizeof buf, "\t%.17g", p(i));
        out += buf;
      }
      out += "\n";
    }
  return out;
}

template <int D>
Json record_json(const MinimizationRecord<D>& rec, const EnergyModel<D>& model) {
  Json j;
  j["constraint"] = std::string(to_string(rec.constraint));
  j["energies"] = rec.energies;
  j["merits"] = rec.merits;
  j["iterations"] = rec.iterations;
  j["rejected_by_constraint"] = rec.rejected_by_constraint;
  j["stop_reason"] = rec.stop_reason;
  j["final_gradient_norm"] = rec.final_gradient_norm;
  j["constraint_log"] = rec.constraint_log;
  j["model"] = model_json(model);
  if (rec.final_map) j["final"] = deformation_json(*rec.final_map);
  return j;
}

inline Json expectation_json(const Expectation& e) {
  return Json{{"kind", e.kind},
              {"query", point_json<2>(e.query)},
              {"expected", e.expected},
              {"basis", std::string(to_string(e.basis))},
              {"note", e.note}};
}

}  // namespace pldeg
