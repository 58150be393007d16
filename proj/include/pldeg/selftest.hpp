#pragma once

// Fixture and invariant suite behind `pldeg selftest`. The report holds no
// timings or paths, so equal manifests give byte-identical reports.

#include "pldeg/io.hpp"
#include "pldeg/random_maps.hpp"

namespace pldeg {

struct SelftestOptions {
  std::uint64_t seed = 1;
  int resolution = 64;          // fixture resolution n
  int random_maps_2d = 20;
  int random_maps_3d = 4;
  int values_per_map = 5;
  int ledger_resolution = 32;

  static SelftestOptions from_json(const Json& j) {
    SelftestOptions o;
    o.seed = j.value("seed", o.seed);
    o.resolution = j.value("resolution", o.resolution);
    o.random_maps_2d = j.value("random_maps_2d", o.random_maps_2d);
    o.random_maps_3d = j.value("random_maps_3d", o.random_maps_3d);
    o.values_per_map = j.value("values_per_map", o.values_per_map);
    o.ledger_resolution = j.value("ledger_resolution", o.ledger_resolution);
    if (o.resolution < 32 || o.ledger_resolution < 32)
      throw Error(ErrorCode::InvalidInput, "selftest resolutions must be >= 32");
    return o;
  }
  Json to_json() const {
    return Json{{"seed", seed},
                {"resolution", resolution},
                {"random_maps_2d", random_maps_2d},
                {"random_maps_3d", random_maps_3d},
                {"values_per_map", values_per_map},
                {"ledger_resolution", ledger_resolution}};
  }
};

struct SelftestTally {
  int passed = 0;
  int failed = 0;
  void add(bool ok) { ok ? ++passed : ++failed; }
  Json to_json() const { return Json{{"passed", passed}, {"failed", failed}}; }
};

namespace detail {

inline Json selftest_fixtures(const SelftestOptions& opt, SelftestTally& tally, SelftestTally& published) {
  Json out = Json::array();
  for (const auto& name : fixture_names()) {
    const auto f = make_fixture(name, opt.resolution);
    const auto sub = whole(*f.mesh);
    for (const auto& e : f.expectations) {
      Json row{{"fixture", name}, {"expectation", expectation_json(e)}};
      bool ok = true;
      try {
        const Point<2> z = nearby_regular_value(f.map, sub, e.query);
        if (e.kind == "degree") {
          const int b = degree_boundary(f.map, e.query);
          const int r = degree_regular_sum(f.map, sub, z);
          MollifierSpec<2> h{e.query, 0.5 * image_boundary_distance(f.map, sub, e.query)};
          const double integral = degree_integral(f.map, sub, h);
          row["boundary"] = b;
          row["regular_sum"] = r;
          row["integral"] = integral;
          ok = b == e.expected && r == e.expected && std::abs(integral - e.expected) < 1e-2;
        } else {
          const int count = static_cast<int>(enumerate_preimages(f.map, sub, z, 0.0).size());
          row["preimages"] = count;
          ok = count == e.expected;
        }
      } catch (const Error& err) {
        row["error"] = err.what();
        ok = false;
      }
      row["pass"] = ok;
      tally.add(ok);
      if (e.basis == Basis::Published) published.add(ok);
      out.push_back(row);
    }
  }
  return out;
}

template <int D>
void selftest_oracle(std::shared_ptr<const SimplicialMesh<D>> mesh, Rng& rng, int values, SelftestTally& tally,
                     int& skipped) {
  const auto map = random_orientation_preserving<D>(mesh, rng);
  const auto sub = whole(*mesh);
  for (int k = 0; k < values; ++k) {
    const Point<D> z = random_value(map, rng);
    try {
      tally.add(degree_boundary(map, z) == degree_regular_sum(map, sub, z));
    } catch (const Error&) {
      ++skipped;  // value on or near the image boundary
    }
  }
}

}  // namespace detail

inline Json run_selftest(const SelftestOptions& opt) {
  Json report;
  report["options"] = opt.to_json();

  SelftestTally fixtures, published;
  report["fixtures"] = detail::selftest_fixtures(opt, fixtures, published);

  SelftestTally oracle;
  int skipped = 0;
  Rng rng(opt.seed);
  for (int i = 0; i < opt.random_maps_2d; ++i)
    detail::selftest_oracle<2>(share(random_rectangle_mesh(rng, 8, 200)), rng, opt.values_per_map, oracle, skipped);
  for (int i = 0; i < opt.random_maps_3d; ++i) {
    const int n = 1 + static_cast<int>(rng.index(3));
    detail::selftest_oracle<3>(share(box_mesh(n, n, 1 + static_cast<int>(rng.index(2)))), rng, opt.values_per_map,
                               oracle, skipped);
  }
  report["degree_oracle"] = oracle.to_json();
  report["degree_oracle"]["skipped_values"] = skipped;

  std::vector<LedgerFixture<2>> corpus;
  for (const auto& name : fixture_names()) corpus.push_back({name, make_fixture(name, opt.ledger_resolution).map});
  LedgerOptions lopt;
  lopt.samples.seed = opt.seed;
  lopt.inv.seed = opt.seed;
  const auto ledger = cross_equivalences(corpus, lopt);
  SelftestTally rows;
  for (const auto& r : ledger.rows)
    if (r.status != LedgerStatus::NotApplicable) rows.add(r.status != LedgerStatus::Contradiction);
  report["ledger"] = ledger.to_json();
  report["ledger_rows"] = rows.to_json();

  SelftestTally total;
  total.passed = fixtures.passed + oracle.passed + rows.passed;
  total.failed = fixtures.failed + oracle.failed + rows.failed;
  report["summary"] = Json{{"fixtures", fixtures.to_json()},
                           {"published_expectations", published.to_json()},
                           {"degree_oracle", oracle.to_json()},
                           {"ledger_rows", rows.to_json()},
                           {"total", total.to_json()}};
  return report;
}

inline bool selftest_passed(const Json& report) { return report["summary"]["total"]["failed"].get<int>() == 0; }

}  // namespace pldeg
