#include "pldeg/pldeg.hpp"

#include <CLI11.hpp>

#include <iostream>

using namespace pldeg;
namespace fs = std::filesystem;

namespace {

constexpr const char* kVersion = "pldeg 0.1.0";

// Inputs and outputs recorded in the run manifest.
struct Run {
  std::string command;
  std::uint64_t seed = 0;
  Json parameters = Json::object();
  Json inputs = Json::object();
  Json outputs = Json::object();
  std::optional<fs::path> manifest_path;

  std::string read(const fs::path& p) {
    const auto text = read_text_file(p);
    inputs[p.string()] = sha256_hex(text);
    return text;
  }
  Json read_json(const fs::path& p) { return parse_json(read(p), p.string()); }
  void write(const fs::path& p, const std::string& text) {
    write_text_file(p, text);
    outputs[p.string()] = sha256_hex(text);
  }
  void write_json(const fs::path& p, const Json& j) { write(p, stable_dump(j)); }

  void finish() const {
    if (!manifest_path) return;
    Json m;
    m["command"] = command;
    m["seed"] = seed;
    m["parameters"] = parameters;
    m["inputs"] = inputs;
    m["outputs"] = outputs;
    m["versions"] = kVersion;
    write_text_file(*manifest_path, stable_dump(m));
  }
};

fs::path default_manifest(const fs::path& out) {
  fs::path m = out;
  if (fs::is_directory(out)) return out / "manifest.json";
  m += ".manifest.json";
  return m;
}

// Mesh and deformation loading with runtime dimension.
struct Inputs {
  std::string mesh_path, map_path;
};

int input_dim(Run& run, const Inputs& in) {
  if (!in.mesh_path.empty()) return document_dim(run.read_json(in.mesh_path));
  if (!in.map_path.empty()) return document_dim(run.read_json(in.map_path));
  throw Error(ErrorCode::InvalidInput, "--mesh or --map is required");
}

template <int D>
PLMap<D> load_map(Run& run, const Inputs& in) {
  std::shared_ptr<const SimplicialMesh<D>> mesh;
  if (!in.mesh_path.empty()) mesh = share(mesh_from_json<D>(run.read_json(in.mesh_path)));
  if (in.map_path.empty()) {
    if (!mesh) throw Error(ErrorCode::InvalidInput, "--mesh or --map is required");
    return identity_map(mesh);
  }
  const Json y = run.read_json(in.map_path);
  if (!mesh && y.contains("mesh_ref") && y["mesh_ref"].is_string()) {
    fs::path p = y["mesh_ref"].get<std::string>();
    if (p.is_relative()) p = fs::path(in.map_path).parent_path() / p;
    mesh = share(mesh_from_json<D>(run.read_json(p)));
  }
  if (!mesh) mesh = referenced_mesh<D>(y, fs::path(in.map_path).parent_path());
  return deformation_from_json<D>(y, mesh);
}

void emit(Run& run, const std::string& out, const Json& j) {
  if (out.empty()) {
    std::cout << stable_dump(j);
  } else {
    run.write_json(out, j);
  }
}

// ---------------------------------------------------------------------------

struct DegreeArgs {
  Inputs in;
  std::string query;
  int submesh = 0;
  std::string out;
};

template <int D>
int cmd_degree(Run& run, const DegreeArgs& a) {
  const auto map = load_map<D>(run, a.in);
  const Point<D> z = parse_point<D>(a.query);
  Submesh<D> sub = whole(map.mesh());
  if (a.submesh > 0) {
    const auto cov = inner_covering(map.mesh(), a.submesh);
    sub = cov.levels.back().submesh;
  }
  detail::require_off_image_boundary(map, sub, z);
  Json j;
  j["query"] = point_json<D>(z);
  j["submesh_level"] = a.submesh;
  j["boundary_distance"] = image_boundary_distance(map, sub, z);
  j["degree_boundary"] = degree_boundary(map, sub, z);
  const Point<D> regular = nearby_regular_value(map, sub, z);
  j["regular_value"] = point_json<D>(regular);
  j["degree_regular_sum"] = degree_regular_sum(map, sub, regular);
  MollifierSpec<D> h{z, 0.5 * image_boundary_distance(map, sub, z)};
  j["degree_integral"] = degree_integral(map, sub, h);
  emit(run, a.out, j);
  return 0;
}

struct FieldArgs {
  Inputs in;
  int resolution = 0;
  std::string out, table;
};

template <int D>
int cmd_degree_field(Run& run, const FieldArgs& a) {
  const auto map = load_map<D>(run, a.in);
  const int res = a.resolution > 0 ? a.resolution : default_grid_resolution<D>();
  const auto report = degree_field(map, whole(map.mesh()), res);
  emit(run, a.out, degree_report_json(report, res));
  if (!a.table.empty()) run.write(a.table, degree_table(report));
  return 0;
}

struct TopologyArgs {
  Inputs in;
  int covering = 3;
  int resolution = 0;
  std::string out;
};

template <int D>
int cmd_topology(Run& run, const TopologyArgs& a) {
  const auto map = load_map<D>(run, a.in);
  const int res = a.resolution > 0 ? a.resolution : default_grid_resolution<D>();
  const auto sub = whole(map.mesh());
  Json j;
  j["resolution"] = res;
  const auto im = topological_image(map, sub, res);
  j["topological_image"] = degree_report_json(im.field, res);
  j["topological_image_measure"] = im.measure();
  const auto cov = inner_covering(map.mesh(), a.covering, res);
  const auto loc = localized_image(map, cov, res);
  Json levels = Json::array();
  for (std::size_t l = 0; l < loc.levels.size(); ++l) {
    Json e;
    e["offset"] = cov.levels[l].offset;
    e["simplices"] = cov.levels[l].submesh.simplices.size();
    e["measure"] = loc.levels[l].measure();
    e["image"] = degree_report_json(loc.levels[l].field, res);
    levels.push_back(e);
  }
  j["localized_image"] = levels;
  const auto rd = reduced_domain(map, sub);
  j["reduced_domain"] = Json{{"excluded_vertices", rd.excluded_vertices()},
                             {"excluded_simplices", rd.excluded_simplices},
                             {"included_simplices", rd.included.simplices.size()},
                             {"slits", rd.slits.size()}};
  const auto strict = check_strictly_orientation_preserving(map, run.seed);
  Json s{{"verdict", std::string(to_string(strict.verdict))},
         {"reason", strict.reason},
         {"sampled_sets", strict.sampled_sets}};
  if (strict.center_vertex >= 0) {
    s["center_vertex"] = strict.center_vertex;
    s["radius"] = strict.radius;
  }
  if (strict.witness_value) s["witness_value"] = point_json<D>(*strict.witness_value);
  j["strictness"] = s;
  emit(run, a.out, j);
  return 0;
}

struct CheckArgs {
  Inputs in;
  std::vector<std::string> conditions{"cnc", "deg1", "deg1loc", "inv", "aib"};
  std::size_t samples = 1000000;
  int inv_centers = 10;
  int covering = 3;
  int resolution = 0;
  bool strict = false;
  std::string out;
};

template <int D>
int cmd_check(Run& run, const CheckArgs& a) {
  const auto map = load_map<D>(run, a.in);
  const int res = a.resolution > 0 ? a.resolution : default_grid_resolution<D>();
  const SampleOptions samples{a.samples, run.seed};
  Json verdicts = Json::object();
  bool failed = false;
  for (const auto& c : a.conditions) {
    ConditionVerdict v;
    if (c == "cnc") {
      v = check_CNC(map, samples);
    } else if (c == "deg1") {
      v = check_DEG1(map, res);
    } else if (c == "deg1loc") {
      v = check_DEG1_loc(map, inner_covering(map.mesh(), a.covering, res), res);
    } else if (c == "inv") {
      v = check_INV(map, InvOptions{a.inv_centers, 5, run.seed, 0});
    } else if (c == "aib") {
      v = check_AIB(map).verdict;
    } else if (c == "ai") {
      v = check_AI(map);
    } else if (c == "injective") {
      v = check_injective_ae(map, samples);
    } else {
      throw Error(ErrorCode::InvalidInput, "unknown condition '" + c + "'");
    }
    failed = failed || v.fails();
    verdicts[c] = v.to_json();
  }
  Json j;
  j["verdicts"] = verdicts;
  j["sampling"] = Json{{"seed", run.seed},
                       {"samples", a.samples},
                       {"inv_centers", a.inv_centers},
                       {"inv_radii", 5},
                       {"covering_levels", a.covering},
                       {"resolution", res}};
  emit(run, a.out, j);
  return a.strict && failed ? 1 : 0;
}

struct FixtureArgs {
  std::string name;
  int n = 64;
  int param = 0;
  std::string out;
};

int cmd_fixtures(Run& run, const FixtureArgs& a) {
  const auto f = make_fixture(a.name, a.n, a.param);
  const fs::path dir = a.out;
  fs::create_directories(dir);
  run.write_json(dir / "mesh.json", mesh_json(*f.mesh));
  run.write_json(dir / "deformation.json", deformation_json(f.map, std::string("mesh.json")));
  Json e;
  e["name"] = f.name;
  e["resolution"] = f.resolution;
  Json list = Json::array();
  for (const auto& x : f.expectations) list.push_back(expectation_json(x));
  e["expectations"] = list;
  run.write_json(dir / "expectations.json", e);
  return 0;
}

struct MinimizeArgs {
  Inputs in;
  std::string model;
  std::string constraint = "deg1loc";
  int budget = 2000;
  std::string out;
  bool certify = true;
};

template <int D>
int cmd_minimize(Run& run, const MinimizeArgs& a) {
  const auto initial = load_map<D>(run, a.in);
  const auto model = model_from_json<D>(run.read_json(a.model), initial.mesh().vertex_count());
  ConstraintKind kind;
  if (a.constraint == "deg1loc") {
    kind = ConstraintKind::Deg1Loc;
  } else if (a.constraint == "cncpenalty") {
    kind = ConstraintKind::CNCPenalty;
  } else {
    throw Error(ErrorCode::InvalidInput, "unknown constraint '" + a.constraint + "'");
  }
  MinimizeOptions opt;
  opt.budget = a.budget;
  const auto rec = minimize(model, initial, kind, opt);
  Json j = record_json(rec, model);
  if (a.certify) j["certificate"] = certify_minimizer(model, rec, SampleOptions{200000, run.seed}).to_json();
  emit(run, a.out, j);
  return 0;
}

struct SelftestArgs {
  std::string manifest;
  std::string out;
  int resolution = 0;
};

int cmd_selftest(Run& run, const SelftestArgs& a) {
  SelftestOptions opt;
  if (!a.manifest.empty()) {
    const Json m = run.read_json(a.manifest);
    // A previous run manifest or a bare options document.
    opt = SelftestOptions::from_json(m.contains("parameters") ? m["parameters"]["options"] : m);
  } else {
    opt.seed = run.seed;
    if (a.resolution > 0) opt.resolution = a.resolution;
  }
  run.seed = opt.seed;
  run.parameters["options"] = opt.to_json();
  const Json report = run_selftest(opt);
  emit(run, a.out, report);
  const auto& t = report["summary"]["total"];
  std::cerr << "selftest: " << t["passed"].get<int>() << " passed, " << t["failed"].get<int>() << " failed\n";
  return selftest_passed(report) ? 0 : 1;
}

template <class F>
int dispatch(Run& run, const Inputs& in, F&& f) {
  return input_dim(run, in) == 2 ? f(std::integral_constant<int, 2>{}) : f(std::integral_constant<int, 3>{});
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Brouwer degree and global invertibility of piecewise-linear maps"};
  app.set_version_flag("--version", kVersion);
  app.require_subcommand(1);
  Run run;
  std::uint64_t seed = 1;
  std::string manifest;

  auto common = [&](CLI::App* sub) {
    sub->add_option("--seed", seed, "random seed");
    sub->add_option("--manifest-out", manifest, "manifest path (default: <out>.manifest.json)");
  };
  auto mesh_map = [&](CLI::App* sub, Inputs& in) {
    sub->add_option("--mesh", in.mesh_path, "mesh file");
    sub->add_option("--map", in.map_path, "deformation file");
  };

  DegreeArgs degree;
  auto* c_degree = app.add_subcommand("degree", "degree of the map at one value");
  mesh_map(c_degree, degree.in);
  c_degree->add_option("--query", degree.query, "value zx,zy[,zz]")->required();
  c_degree->add_option("--submesh", degree.submesh, "inner covering level (0 = whole mesh)");
  c_degree->add_option("--out", degree.out, "report file (default stdout)");
  common(c_degree);

  FieldArgs field;
  auto* c_field = app.add_subcommand("degree-field", "degree on every region of the image complement");
  mesh_map(c_field, field.in);
  c_field->add_option("--resolution", field.resolution, "background grid cells per axis");
  c_field->add_option("--out", field.out, "report file");
  c_field->add_option("--table", field.table, "tab-separated region table");
  common(c_field);

  TopologyArgs topo;
  auto* c_topo = app.add_subcommand("topology", "topological images, reduced domain and strictness");
  mesh_map(c_topo, topo.in);
  c_topo->add_option("--covering", topo.covering, "inner covering levels");
  c_topo->add_option("--resolution", topo.resolution, "background grid cells per axis");
  c_topo->add_option("--out", topo.out, "report file");
  common(c_topo);

  CheckArgs check;
  std::string conditions;
  auto* c_check = app.add_subcommand("check", "invertibility conditions");
  mesh_map(c_check, check.in);
  c_check->add_option("--conditions", conditions, "comma list of cnc,deg1,deg1loc,inv,aib,ai,injective");
  c_check->add_option("--samples", check.samples, "Monte-Carlo samples");
  c_check->add_option("--inv-centers", check.inv_centers, "INV ball centers");
  c_check->add_option("--covering", check.covering, "inner covering levels for deg1loc");
  c_check->add_option("--resolution", check.resolution, "background grid cells per axis");
  c_check->add_flag("--strict", check.strict, "exit 1 when a condition fails");
  c_check->add_option("--out", check.out, "verdict file");
  common(c_check);

  FixtureArgs fix;
  auto* c_fix = app.add_subcommand("fixtures", "write a named fixture");
  c_fix->add_option("--name", fix.name, "fixture name")->required();
  c_fix->add_option("--n", fix.n, "resolution");
  c_fix->add_option("--param", fix.param, "fixture parameter");
  c_fix->add_option("--out", fix.out, "output directory")->required();
  common(c_fix);

  MinimizeArgs mini;
  auto* c_min = app.add_subcommand("minimize", "projected descent of a polyconvex energy");
  mesh_map(c_min, mini.in);
  c_min->add_option("--model", mini.model, "energy model file")->required();
  c_min->add_option("--constraint", mini.constraint, "deg1loc or cncpenalty");
  c_min->add_option("--budget", mini.budget, "iteration budget");
  c_min->add_option("--out", mini.out, "record file");
  common(c_min);

  SelftestArgs self;
  auto* c_self = app.add_subcommand("selftest", "fixture and invariant suite");
  c_self->add_option("--manifest", self.manifest, "manifest or options file to replay");
  c_self->add_option("--resolution", self.resolution, "fixture resolution");
  c_self->add_option("--out", self.out, "report file");
  common(c_self);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  auto* sub = app.get_subcommands().front();
  run.command = sub->get_name();
  run.seed = seed;
  for (const auto* opt : sub->get_options()) {
    if (opt->get_name() == "--help" || opt->count() == 0) continue;
    const auto values = opt->results();
    run.parameters[opt->get_name()] = values.size() == 1 ? Json(values[0]) : Json(values);
  }

  try {
    int status = 0;
    std::string out;
    if (sub == c_degree) {
      out = degree.out;
      status = dispatch(run, degree.in, [&](auto d) { return cmd_degree<decltype(d)::value>(run, degree); });
    } else if (sub == c_field) {
      out = field.out;
      status = dispatch(run, field.in, [&](auto d) { return cmd_degree_field<decltype(d)::value>(run, field); });
    } else if (sub == c_topo) {
      out = topo.out;
      status = dispatch(run, topo.in, [&](auto d) { return cmd_topology<decltype(d)::value>(run, topo); });
    } else if (sub == c_check) {
      out = check.out;
      if (!conditions.empty()) {
        check.conditions.clear();
        std::stringstream ss(conditions);
        std::string item;
        while (std::getline(ss, item, ','))
          if (!item.empty()) check.conditions.push_back(item);
      }
      status = dispatch(run, check.in, [&](auto d) { return cmd_check<decltype(d)::value>(run, check); });
    } else if (sub == c_fix) {
      out = fix.out;
      status = cmd_fixtures(run, fix);
    } else if (sub == c_min) {
      out = mini.out;
      status = dispatch(run, mini.in, [&](auto d) { return cmd_minimize<decltype(d)::value>(run, mini); });
    } else {
      out = self.out;
      status = cmd_selftest(run, self);
    }
    if (!manifest.empty()) {
      run.manifest_path = manifest;
    } else if (!out.empty()) {
      run.manifest_path = default_manifest(out);
    }
    run.finish();
    return status;
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
}
