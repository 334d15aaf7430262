#include <algorithm>
#include <chrono>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

#include "CLI11.hpp"
#include "json.hpp"
#include "r4/arrangement.hpp"
#include "r4/ccd.hpp"
#include "r4/complexity.hpp"
#include "r4/engine.hpp"
#include "r4/scene.hpp"

using namespace r4;
using nlohmann::json;

namespace {

constexpr int kExitUsage = 2;
constexpr int kExitSchema = 3;
constexpr int kExitMismatch = 4;

struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

void emit(const std::string& text, const std::string& out) {
  if (out.empty()) {
    std::cout << text;
    return;
  }
  const std::string tmp = out + ".tmp";
  {
    std::ofstream f(tmp, std::ios::binary);
    if (!f) throw std::runtime_error("cannot write " + out);
    f << text;
  }
  std::filesystem::rename(tmp, out);
}

std::string fmt(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.6g", v);
  return buf;
}

ExactScalar parse_sigma(const std::string& text) {
  ExactScalar s;
  try {
    s = ExactScalar::parse_decimal(text);
  } catch (const ParseError&) {
    throw UsageError("bad sigma '" + text + "'");
  }
  if (s < ExactScalar(1) || s > ExactScalar(6)) throw UsageError("sigma must lie in [1, 6]");
  return s;
}

/// "a,b,c" or "lo:hi:step", all exact.
std::vector<ExactScalar> parse_grid(const std::string& text) {
  std::vector<ExactScalar> out;
  try {
    if (text.find(':') != std::string::npos) {
      std::vector<std::string> parts;
      std::stringstream ss(text);
      for (std::string p; std::getline(ss, p, ':');) parts.push_back(p);
      if (parts.size() != 3) throw UsageError("grid must be lo:hi:step");
      const ExactScalar lo = ExactScalar::parse_decimal(parts[0]);
      const ExactScalar hi = ExactScalar::parse_decimal(parts[1]);
      const ExactScalar step = ExactScalar::parse_decimal(parts[2]);
      if (step.sign() != Sign::Pos) throw UsageError("grid step must be positive");
      for (ExactScalar v = lo; v <= hi; v += step) out.push_back(v);
    } else {
      std::stringstream ss(text);
      for (std::string p; std::getline(ss, p, ',');) out.push_back(ExactScalar::parse_decimal(p));
    }
  } catch (const ParseError& e) {
    throw UsageError(e.what());
  }
  if (out.empty()) throw UsageError("empty grid");
  return out;
}

json point_json(const Point4& p) {
  json a = json::array();
  for (std::size_t i = 0; i < 4; ++i) a.push_back(p[i].str());
  return a;
}

json report_json(const IntersectionReport& r) {
  json j;
  j["detected"] = r.detected;
  j["count"] = r.count;
  json pairs = json::array();
  for (const auto& p : r.pairs) pairs.push_back({{"a", p.a}, {"b", p.b}, {"witness", point_json(p.witness)}});
  j["pairs"] = pairs;
  return j;
}

json stats_json(const StructureRun& r) {
  return {{"s", r.budget.s.get_str()},
          {"leafCutoff", r.budget.leafCutoff},
          {"buildNodes", r.buildNodes},
          {"nodesVisited", r.stats.nodesVisited},
          {"canonicalSetsTouched", r.stats.canonicalSetsTouched},
          {"leafItemsScanned", r.stats.leafItemsScanned},
          {"exactPredicateCalls", r.stats.exactPredicateCalls}};
}

QueryMode mode_of(const std::string& m) {
  try {
    return parse_mode(m);
  } catch (const std::exception& e) {
    throw UsageError(e.what());
  }
}

struct QueryArgs {
  std::string scene, queries, setup = "seg-tetra", mode = "report", sigma = "2", engine = "both", format = "json",
              out;
  std::uint64_t seed = 0;
};

int run_query(const QueryArgs& a, Setup setup) {
  const ExactScalar sigma = parse_sigma(a.sigma);
  const QueryMode mode = mode_of(a.mode);
  if (a.engine != "oracle" && a.engine != "structure" && a.engine != "both") throw UsageError("bad engine");
  const Scene stored = read_scene(a.scene);
  std::optional<Scene> q;
  if (!a.queries.empty()) q = read_scene(a.queries);
  const SetupInput in = setup_input(setup, stored, q ? &*q : nullptr);

  std::optional<IntersectionReport> oracle;
  std::optional<StructureRun> structure;
  if (a.engine != "structure") oracle = run_oracle(in, mode);
  if (a.engine != "oracle") structure = run_structure(in, mode, sigma, a.seed);
  const bool mismatch = oracle && structure && !(*oracle == structure->report);

  std::string text;
  if (a.format == "csv") {
    std::ostringstream os;
    os << "engine,setup,mode,n,m,sigma,s,leafCutoff,detected,count,buildNodes,canonicalSetsTouched,"
          "leafItemsScanned,exactPredicateCalls,mismatch\n";
    auto row = [&](const char* engine, const IntersectionReport& r, const StructureRun* st) {
      os << engine << ',' << to_string(setup) << ',' << to_string(mode) << ',' << in.stored_count() << ','
         << in.query_count() << ',' << sigma.str() << ',';
      if (st) {
        os << st->budget.s.get_str() << ',' << st->budget.leafCutoff << ',';
      } else {
        os << ",,";
      }
      os << (r.detected ? "true" : "false") << ',' << r.count << ',';
      if (st) {
        os << st->buildNodes << ',' << st->stats.canonicalSetsTouched << ',' << st->stats.leafItemsScanned << ','
           << st->stats.exactPredicateCalls;
      } else {
        os << ",,,";
      }
      os << ',' << (mismatch ? "true" : "false") << '\n';
    };
    if (oracle) row("oracle", *oracle, nullptr);
    if (structure) row("structure", structure->report, &*structure);
    text = os.str();
  } else if (a.format == "json") {
    json j;
    j["setup"] = to_string(setup);
    j["mode"] = to_string(mode);
    j["sigma"] = sigma.str();
    j["n"] = in.stored_count();
    j["m"] = in.query_count();
    if (oracle) j["oracle"] = report_json(*oracle);
    if (structure) {
      j["structure"] = report_json(structure->report);
      j["stats"] = stats_json(*structure);
    }
    j["mismatch"] = mismatch;
    text = j.dump(1) + "\n";
  } else {
    throw UsageError("format must be json or csv");
  }
  emit(text, a.out);
  return mismatch ? kExitMismatch : 0;
}

MovingTetrahedron unit_mover(long x, long vx) {
  MovingTetrahedron mt;
  mt.vertices = {Vec3{x, 0, 0}, Vec3{x + 1, 0, 0}, Vec3{x, 1, 0}, Vec3{x, 0, 1}};
  mt.velocity = {vx, 0, 0};
  return mt;
}

Scene ccd_fixture(const std::string& name) {
  if (name == "identical") return make_scene(std::vector<MovingTetrahedron>{unit_mover(0, 0), unit_mover(0, 0)});
  if (name == "apart") return make_scene(std::vector<MovingTetrahedron>{unit_mover(0, 0), unit_mover(10, 0)});
  if (name == "flythrough") return make_scene(std::vector<MovingTetrahedron>{unit_mover(0, 0), unit_mover(5, -10)});
  throw UsageError("fixture must be identical, apart or flythrough");
}

// Bench: leaf scans per sigma, oracle cross-check, derived columns.
struct BenchArgs {
  std::string scene, queries, setup = "seg-tetra", grid = "1,1.5,2,3,6", out, mode = "report";
  std::size_t n = 0, m = 0;
  int range = 1000;
  int repetitions = 1;
  std::uint64_t seed = 1;
};

int run_bench(const BenchArgs& a) {
  Setup setup;
  try {
    setup = parse_setup(a.setup);
  } catch (const std::exception& e) {
    throw UsageError(e.what());
  }
  const QueryMode mode = mode_of(a.mode);
  auto grid = parse_grid(a.grid);
  for (const auto& s : grid) {
    if (s < ExactScalar(1) || s > ExactScalar(6)) throw UsageError("sigma must lie in [1, 6]");
  }
  if (a.repetitions < 1) throw UsageError("repetitions must be positive");
  SetupInput in;
  if (!a.scene.empty()) {
    const Scene stored = read_scene(a.scene);
    std::optional<Scene> q;
    if (!a.queries.empty()) q = read_scene(a.queries);
    in = setup_input(setup, stored, q ? &*q : nullptr);
  } else {
    if (a.n == 0) throw UsageError("bench needs --scene or --n");
    in = generate_setup(setup, a.n, a.m == 0 ? a.n : a.m, a.range, a.seed);
  }
  const IntersectionReport ref = run_oracle(in, mode);

  struct Row {
    ExactScalar sigma;
    StructureRun run;
    double millis;
    bool mismatch;
  };
  std::vector<std::vector<Row>> rows(a.repetitions);
  for (int rep = 0; rep < a.repetitions; ++rep) {
    for (const auto& sigma : grid) {
      const auto t0 = std::chrono::steady_clock::now();
      StructureRun r = run_structure(in, mode, sigma, a.seed);
      const double ms = std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0).count();
      const bool mismatch = !(r.report == ref);
      rows[rep].push_back({sigma, std::move(r), ms, mismatch});
    }
  }
  // Median leaf scans per grid point, checked in ascending sigma order.
  std::vector<std::size_t> order(grid.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
  std::sort(order.begin(), order.end(), [&](std::size_t x, std::size_t y) { return grid[x] < grid[y]; });
  auto median = [&](std::size_t g) {
    std::vector<std::uint64_t> v;
    for (const auto& r : rows) v.push_back(r[g].run.stats.leafItemsScanned);
    std::sort(v.begin(), v.end());
    return v[v.size() / 2];
  };
  bool nonIncreasing = true;
  for (std::size_t k = 1; k < order.size(); ++k) nonIncreasing = nonIncreasing && median(order[k]) <= median(order[k - 1]);

  std::ostringstream os;
  os << "setup,n,m,sigma,s,buildNodes,canonicalSetsTouched,leafItemsScanned,exactPredicateCalls,wallMillis,seed,"
        "leafCutoff,mismatch,leafScanNonIncreasing\n";
  bool anyMismatch = false;
  for (const auto& rep : rows) {
    for (const auto& r : rep) {
      anyMismatch = anyMismatch || r.mismatch;
      char ms[32];
      std::snprintf(ms, sizeof ms, "%.3f", r.millis);
      os << to_string(setup) << ',' << in.stored_count() << ',' << in.query_count() << ',' << r.sigma.str() << ','
         << r.run.budget.s.get_str() << ',' << r.run.buildNodes << ',' << r.run.stats.canonicalSetsTouched << ','
         << r.run.stats.leafItemsScanned << ',' << r.run.stats.exactPredicateCalls << ',' << ms << ',' << a.seed
         << ',' << r.run.budget.leafCutoff << ',' << (r.mismatch ? "true" : "false") << ','
         << (nonIncreasing ? "true" : "false") << '\n';
    }
  }
  emit(os.str(), a.out);
  return anyMismatch ? kExitMismatch : 0;
}

int run_predict(const std::string& sigmas, const std::string& mus, const std::string& out) {
  std::ostringstream os;
  if (!mus.empty()) {
    os << "mu,first,second,exponent,firstDominates\n";
    for (const auto& mu : parse_grid(mus)) {
      if (mu.sign() == Sign::Neg) throw UsageError("mu must be non-negative");
      const BatchedExponent b = batched_cost_exponent(mu);
      os << fmt(mu.to_double()) << ',' << fmt(b.first.to_double()) << ',' << fmt(b.second.to_double()) << ','
         << fmt(b.exponent.to_double()) << ',' << (b.firstDominates ? "true" : "false") << '\n';
    }
  } else {
    os << "sigma,exponent,premature,leafSizeExponent\n";
    for (const auto& s : parse_grid(sigmas)) {
      if (s < ExactScalar(1) || s > ExactScalar(6)) throw UsageError("sigma must lie in [1, 6]");
      const ExactScalar q = q_tradeoff_exponent(s);
      const PrematureFit p = unfold_premature(s.to_double());
      const ExactScalar leaf = ExactScalar(6, 5) - s / ExactScalar(5);
      os << fmt(s.to_double()) << ',' << fmt(q.to_double()) << ',' << fmt(p.exponent) << ',' << fmt(leaf.to_double())
         << '\n';
    }
  }
  emit(os.str(), out);
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Exact intersection queries among simplices in R^4"};
  app.require_subcommand(1);
  std::function<int()> action;

  // gen
  auto* gen = app.add_subcommand("gen", "Generate a random scene");
  std::string genKind = "TETRAHEDRA", genOut, genFixture;
  std::size_t genN = 10;
  int genRange = 1000;
  std::uint64_t genSeed = 1;
  gen->add_option("--kind", genKind, "SEGMENTS | TRIANGLES | TETRAHEDRA | MOVING_TETRAHEDRA | FLATS_AND_LINES");
  gen->add_option("--n", genN, "Object count");
  gen->add_option("--range", genRange, "Coordinates in [-range, range]");
  gen->add_option("--seed", genSeed);
  gen->add_option("--fixture", genFixture, "CCD fixture: identical | apart | flythrough");
  gen->add_option("--out", genOut);
  gen->callback([&] {
    action = [&] {
      if (!genFixture.empty()) {
        emit(scene_to_json(ccd_fixture(genFixture)), genOut);
        return 0;
      }
      if (genN == 0) throw UsageError("n must be at least 1");
      if (genRange < 1) throw UsageError("range must be at least 1");
      SceneKind kind;
      try {
        kind = parse_scene_kind(genKind);
      } catch (const std::exception& e) {
        throw UsageError(e.what());
      }
      emit(scene_to_json(generate_scene(kind, genN, genRange, genSeed)), genOut);
      return 0;
    };
  });

  // query / flats
  QueryArgs qa, fa;
  auto add_query_flags = [](CLI::App* c, QueryArgs& a) {
    c->add_option("--scene", a.scene, "Stored objects")->required();
    c->add_option("--mode", a.mode, "detect | count | report");
    c->add_option("--sigma", a.sigma, "Storage exponent in [1, 6], s = n^sigma");
    c->add_option("--engine", a.engine, "oracle | structure | both");
    c->add_option("--format", a.format, "json | csv");
    c->add_option("--seed", a.seed);
    c->add_option("--out", a.out);
  };
  auto* query = app.add_subcommand("query", "Answer queries against a scene");
  add_query_flags(query, qa);
  query->add_option("--queries", qa.queries, "Query objects");
  query->add_option("--setup", qa.setup, "seg-tetra | tri-tri | tetra-seg | line-flat");
  query->callback([&] {
    action = [&] {
      Setup s;
      try {
        s = parse_setup(qa.setup);
      } catch (const std::exception& e) {
        throw UsageError(e.what());
      }
      return run_query(qa, s);
    };
  });
  auto* flats = app.add_subcommand("flats", "Lines against 2-flats from one FLATS_AND_LINES scene");
  add_query_flags(flats, fa);
  flats->callback([&] { action = [&] { return run_query(fa, Setup::Line2Flat); }; });

  // ccd
  auto* ccd = app.add_subcommand("ccd", "Collision detection among moving tetrahedra");
  std::string ccdScene, ccdMode = "report", ccdEngine = "structure", ccdOut;
  std::size_t ccdThreshold = 32;
  ccd->add_option("--scene", ccdScene)->required();
  ccd->add_option("--mode", ccdMode);
  ccd->add_option("--engine", ccdEngine, "oracle | structure | both");
  ccd->add_option("--threshold", ccdThreshold, "Subproblem size handled pairwise");
  ccd->add_option("--out", ccdOut);
  ccd->callback([&] {
    action = [&] {
      const QueryMode mode = mode_of(ccdMode);
      if (ccdEngine != "oracle" && ccdEngine != "structure" && ccdEngine != "both") throw UsageError("bad engine");
      const auto scene = read_scene(ccdScene).moving();
      std::optional<IntersectionReport> ref, got;
      if (ccdEngine != "structure") ref = ccd_oracle(scene, mode);
      if (ccdEngine != "oracle") {
        CcdOptions opt;
        opt.oracleThreshold = std::max<std::size_t>(ccdThreshold, 1);
        got = detect_collisions(scene, mode, opt);
      }
      const bool mismatch = ref && got && !(*ref == *got);
      const IntersectionReport& r = got ? *got : *ref;
      json j;
      j["mode"] = to_string(mode);
      j["detected"] = r.detected;
      j["count"] = r.count;
      json pairs = json::array();
      for (const auto& p : r.pairs) {
        const ExactScalar t = p.witness.w();
        const bool ok = tetrahedra3_intersect(scene[p.a].at(t), scene[p.b].at(t));
        pairs.push_back({{"a", p.a}, {"b", p.b}, {"time", t.str()}, {"witness", point_json(p.witness)}, {"verified", ok}});
      }
      j["pairs"] = pairs;
      j["mismatch"] = mismatch;
      emit(j.dump(1) + "\n", ccdOut);
      return mismatch ? kExitMismatch : 0;
    };
  });

  // arrange
  auto* arrange = app.add_subcommand("arrange", "Arrangement entity counts of tetrahedra");
  std::string arrScene, arrOut, arrWitness;
  bool arrCheck = false;
  arrange->add_option("--scene", arrScene)->required();
  arrange->add_option("--out", arrOut);
  arrange->add_option("--witness", arrWitness, "Write pair witnesses and vertices here");
  arrange->add_flag("--check", arrCheck, "Compare with the exhaustive enumeration");
  arrange->callback([&] {
    action = [&] {
      const auto tets = read_scene(arrScene).tetrahedra();
      const ArrangementResult res = build_arrangement(tets);
      const KCounts& k = res.counts;
      bool mismatch = false;
      if (arrCheck) mismatch = !(arrangement_k_counts(tets) == k);
      json j;
      j["k2"] = k.k2;
      j["k3"] = k.k3;
      j["k4"] = k.k4;
      json by;
      for (int i = 0; i < 4; ++i) by[to_string(static_cast<VertexKind>(i))] = k.byKind[i];
      j["byKind"] = by;
      j["k4_ge_k3"] = k.k4 >= k.k3;
      j["k3_ge_k2"] = k.k3 >= k.k2;
      if (arrCheck) j["mismatch"] = mismatch;
      emit(j.dump(1) + "\n", arrOut);
      if (!arrWitness.empty()) {
        json w;
        json pairs = json::array();
        for (const auto& p : res.witnesses) {
          pairs.push_back({{"i", p.i}, {"j", p.j}, {"kind", to_string(p.kind)}, {"point", point_json(p.vertex)}});
        }
        json verts = json::array();
        for (const auto& v : k.vertices) {
          verts.push_back({{"kind", to_string(v.kind)}, {"tetra", v.tetra}, {"feature", v.feature}, {"point", point_json(v.point)}});
        }
        json triples = json::array();
        for (const auto& t : k.triples) triples.push_back(t);
        w["pairs"] = pairs;
        w["triples"] = triples;
        w["vertices"] = verts;
        emit(w.dump(1) + "\n", arrWitness);
      }
      return mismatch ? kExitMismatch : 0;
    };
  });

  // bench
  BenchArgs ba;
  auto* bench = app.add_subcommand("bench", "Structure statistics across a sigma grid");
  bench->add_option("--scene", ba.scene, "Stored objects (or generate with --n)");
  bench->add_option("--queries", ba.queries);
  bench->add_option("--setup", ba.setup);
  bench->add_option("--sigma-grid", ba.grid, "a,b,c or lo:hi:step");
  bench->add_option("--repetitions", ba.repetitions);
  bench->add_option("--mode", ba.mode);
  bench->add_option("--n", ba.n, "Generated stored objects");
  bench->add_option("--m", ba.m, "Generated queries (default n)");
  bench->add_option("--range", ba.range);
  bench->add_option("--seed", ba.seed);
  bench->add_option("--out", ba.out);
  bench->callback([&] { action = [&] { return run_bench(ba); }; });

  // predict
  auto* predict = app.add_subcommand("predict", "Analytic exponents for a sigma or mu grid");
  std::string pSigmas = "1:6:0.1", pMus, pOut;
  predict->add_option("--sigma-grid", pSigmas);
  predict->add_option("--mu-grid", pMus);
  predict->add_option("--out", pOut);
  predict->callback([&] { action = [&] { return run_predict(pSigmas, pMus, pOut); }; });

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitUsage;
  }
  try {
    return action();
  } catch (const UsageError& e) {
    std::cerr << "usage error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const SchemaError& e) {
    std::cerr << "schema error: " << e.what() << "\n";
    return kExitSchema;
  } catch (const ParseError& e) {
    std::cerr << "schema error: " << e.what() << "\n";
    return kExitSchema;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
}
