// Command-line front end: classify, metric, geodesic, check, congruence and
// construct {step5 | deform | lemma41 | cardioid}.
//
// Exit codes: 0 success/pass, 1 invalid input, 2 check failed,
// 3 clip-sensitive or unsupported configuration.

#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "rigidity/rigidity.hpp"

namespace fs = std::filesystem;
using namespace rigidity;
using io::json;

namespace {

enum Exit { Ok = 0, InvalidInputExit = 1, CheckFailed = 2, Unsupported = 3 };

// ---------------------------------------------------------------------------
// Logging (RIGIDITY_LOG = error | info | debug).

enum class Level { Error = 0, Info = 1, Debug = 2 };

Level log_level() {
  static const Level level = [] {
    const char* v = std::getenv("RIGIDITY_LOG");
    if (!v) return Level::Error;
    const std::string s(v);
    if (s == "debug") return Level::Debug;
    if (s == "info") return Level::Info;
    return Level::Error;
  }();
  return level;
}

template <class... Args>
void log(Level level, const char* fmt, Args... args) {
  if (level > log_level()) return;
  static const char* names[] = {"error", "info", "debug"};
  std::fprintf(stderr, "[%s] ", names[static_cast<int>(level)]);
  if constexpr (sizeof...(Args) == 0)
    std::fputs(fmt, stderr);
  else
    std::fprintf(stderr, fmt, args...);
  std::fputc('\n', stderr);
}

int exit_code(ErrorKind k) {
  switch (k) {
    case ErrorKind::ClipSensitive:
    case ErrorKind::EpsilonTooLargeForClip:
    case ErrorKind::ClipTooSmall:
    case ErrorKind::NotSimplyBounded:
      return Unsupported;
    case ErrorKind::RankDeficient:
    case ErrorKind::ConvexityLost:
    case ErrorKind::NoConvergence:
    case ErrorKind::DeformationDegenerate:
    case ErrorKind::SearchFailed:
      return CheckFailed;
    default:
      return InvalidInputExit;
  }
}

// ---------------------------------------------------------------------------
// Files.

json read_json(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorKind::InvalidInput, "cannot open " + path);
  try {
    return json::parse(in);
  } catch (const json::parse_error& e) {
    throw Error(ErrorKind::InvalidInput, path + ": " + e.what());
  }
}

Domain load_domain(const std::string& path, const Tolerances& tol) {
  Domain d = io::domain_from_json(read_json(path));
  const auto report = validate(d, tol);
  if (!report.valid()) {
    for (const auto& issue : report.issues)
      log(Level::Error, "%s: component %zu piece %zu: %s: %s", path.c_str(), issue.component, issue.piece, to_string(issue.kind),
          issue.message.c_str());
    throw Error(ErrorKind::InvalidInput, path + " is not a valid domain");
  }
  log(Level::Debug, "%s: %zu component(s), %zu corner(s)", path.c_str(), d.components.size(), report.corners.size());
  return d;
}

void write_text(const fs::path& path, const std::string& text) {
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorKind::InvalidInput, "cannot write " + path.string());
  out << text;
  log(Level::Info, "wrote %s", path.string().c_str());
}

std::string dump(const json& j) { return j.dump(2) + "\n"; }

/// Prints to stdout or writes to path when given.
void emit(const std::string& text, const std::string& path) {
  if (path.empty())
    std::cout << text;
  else
    write_text(path, text);
}

/// Sampling offset derived from the seed; seed 0 means offset 0.
double seed_offset(const Domain& d, unsigned long long seed) {
  if (seed == 0) return 0.0;
  std::mt19937_64 rng(seed);
  return std::uniform_real_distribution<double>(0.0, component_length(d.components[0]))(rng);
}

void write_preview(const fs::path& path, const std::vector<std::pair<const Domain*, std::string>>& domains) {
  SvgCanvas svg;
  for (const auto& [d, color] : domains) svg.add_domain(*d, color);
  std::ostringstream os;
  svg.write(os);
  write_text(path, os.str());
}

void write_pair(const fs::path& dir, const CounterexamplePair& pair) {
  write_text(dir / "U.json", dump(io::to_json(pair.u)));
  write_text(dir / "V.json", dump(io::to_json(pair.v)));
  write_text(dir / "corr.json", dump(io::to_json(pair.f)));
  write_preview(dir / "preview.svg", {{&pair.u, "#1f77b4"}, {&pair.v, "#d62728"}});
}

// ---------------------------------------------------------------------------
// Shared options.

struct Common {
  double tol_flat = default_tolerances.flat_rel;
  double tol_iso = default_tolerances.iso_rel;
  unsigned long long seed = 0;
  std::string out;
  std::string svg;

  Tolerances tolerances() const {
    Tolerances t;
    t.flat_rel = tol_flat;
    t.iso_rel = tol_iso;
    return t;
  }
};

void add_tolerances(CLI::App* app, Common& c) {
  app->add_option("--tol-flat", c.tol_flat, "flattening tolerance, relative to the domain diameter")->check(CLI::PositiveNumber);
  app->add_option("--tol-iso", c.tol_iso, "local isometry floor, relative to the domain diameter")->check(CLI::PositiveNumber);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Boundary rigidity toolkit for planar domains"};
  app.require_subcommand(1);
  Common common;
  int status = Ok;

  // classify -----------------------------------------------------------------
  auto* classify = app.add_subcommand("classify", "convexity, strict convexity and maximal boundary segments");
  std::string classify_in;
  classify->add_option("domain", classify_in, "domain JSON")->required();
  add_tolerances(classify, common);
  classify->callback([&] {
    const Tolerances tol = common.tolerances();
    const Domain d = load_domain(classify_in, tol);
    const auto conv = convexity(d, tol);
    const auto segs = maximal_segments(d, tol.collinear);
    json j;
    j["convex"] = conv.convex;
    j["strictly_convex"] = conv.strictly_convex;
    j["clip_dependent"] = conv.clip_dependent;
    j["n_segments"] = segs.size();
    j["segments"] = io::to_json(segs);
    std::cout << dump(j);
  });

  // metric -------------------------------------------------------------------
  auto* metric = app.add_subcommand("metric", "pairwise relative boundary metric as CSV");
  std::string metric_in;
  std::size_t metric_n = 16;
  metric->add_option("domain", metric_in, "domain JSON")->required();
  metric->add_option("-n,--samples", metric_n, "number of equally spaced boundary points")->check(CLI::Range(2, 100000));
  metric->add_option("--seed", common.seed, "seed for the sampling offset (0: start at s = 0)");
  metric->add_option("--out", common.out, "CSV path (default: stdout)");
  add_tolerances(metric, common);
  metric->callback([&] {
    const Tolerances tol = common.tolerances();
    const Domain d = load_domain(metric_in, tol);
    const auto m = metric_matrix(d, metric_n, seed_offset(d, common.seed), tol);
    std::ostringstream os;
    write_csv(os, m);
    emit(os.str(), common.out);
  });

  // geodesic -----------------------------------------------------------------
  auto* geo = app.add_subcommand("geodesic", "shortest path in the closure between two boundary points");
  std::string geo_in;
  double geo_from = 0.0, geo_to = 0.0;
  std::size_t geo_from_c = 0, geo_to_c = 0;
  geo->add_option("domain", geo_in, "domain JSON")->required();
  geo->add_option("--from", geo_from, "arc-length parameter of the first point")->required();
  geo->add_option("--to", geo_to, "arc-length parameter of the second point")->required();
  geo->add_option("--from-component", geo_from_c, "component of the first point");
  geo->add_option("--to-component", geo_to_c, "component of the second point");
  geo->add_option("--svg", common.svg, "SVG with boundary, path and endpoints");
  geo->add_option("--out", common.out, "JSON path (default: stdout)");
  add_tolerances(geo, common);
  geo->callback([&] {
    const Tolerances tol = common.tolerances();
    const Domain d = load_domain(geo_in, tol);
    for (auto [c, s] : {std::pair{geo_from_c, geo_from}, std::pair{geo_to_c, geo_to}}) {
      if (c >= d.components.size()) throw Error(ErrorKind::OutOfRange, "component index out of range");
      if (s < 0.0 || s >= component_length(d.components[c])) throw Error(ErrorKind::OutOfRange, "arc-length parameter out of range");
    }
    const BoundaryPoint a{geo_from_c, geo_from}, b{geo_to_c, geo_to};
    const GeodesicPath g = boundary_geodesic(d, a, b, tol);
    if (!common.svg.empty()) {
      SvgCanvas svg;
      svg.add_domain(d, "#1f77b4");
      svg.add_polyline(g.waypoints, "#d62728", 1.5);
      svg.add_point(point_at(d, a), "#2ca02c");
      svg.add_point(point_at(d, b), "#2ca02c");
      std::ostringstream os;
      svg.write(os);
      write_text(common.svg, os.str());
    }
    emit(dump(io::to_json(g)), common.out);
    if (g.clip_sensitive) status = Unsupported;
  });

  // check --------------------------------------------------------------------
  auto* check = app.add_subcommand("check", "local isometry of a boundary correspondence on an epsilon ladder");
  std::string check_u, check_v, check_f;
  std::vector<double> ladder;
  std::size_t check_n = 256;
  check->add_option("U", check_u, "domain JSON of U")->required();
  check->add_option("V", check_v, "domain JSON of V")->required();
  check->add_option("corr", check_f, "correspondence JSON")->required();
  check->add_option("--eps-ladder", ladder, "comma-separated epsilons (default L/64,L/32,L/16,L/8)")->delimiter(',');
  check->add_option("-n,--samples", check_n, "samples per component (>= 64)");
  check->add_option("--out", common.out, "JSON path (default: stdout)");
  add_tolerances(check, common);
  check->callback([&] {
    const Tolerances tol = common.tolerances();
    const Domain u = load_domain(check_u, tol), v = load_domain(check_v, tol);
    const BoundaryCorrespondence f = io::correspondence_from_json(read_json(check_f));
    for (double e : ladder)
      if (!(e > 0)) throw Error(ErrorKind::InvalidInput, "epsilons must be positive");
    if (!check_intrinsic_isometry(u, v, f, tol)) {
      json j{{"verdict", "Fail"}, {"reason", "boundary lengths or component types differ"}};
      emit(dump(j), common.out);
      status = CheckFailed;
      return;
    }
    const auto report = check_local_isometry_ladder(u, v, f, check_n, ladder, tol);
    for (const auto& r : report.rungs)
      log(Level::Info, "eps %.6g: %zu pairs, max deviation %.3e (tau_iso %.3e) %s", r.epsilon, r.n_pairs, r.max_deviation, r.tau_iso,
          r.pass ? "pass" : "FAIL");
    emit(dump(io::to_json(report)), common.out);
    if (!report.pass) status = CheckFailed;
  });

  // congruence ---------------------------------------------------------------
  auto* congr = app.add_subcommand("congruence", "search for a rigid motion taking U onto V");
  std::string congr_u, congr_v;
  std::size_t congr_m = 512;
  congr->add_option("U", congr_u, "domain JSON of U")->required();
  congr->add_option("V", congr_v, "domain JSON of V")->required();
  congr->add_option("-n,--samples", congr_m, "alignment samples per domain")->check(CLI::Range(3, 100000));
  congr->add_option("--out", common.out, "JSON path (default: stdout)");
  add_tolerances(congr, common);
  congr->callback([&] {
    const Tolerances tol = common.tolerances();
    const Domain u = load_domain(congr_u, tol), v = load_domain(congr_v, tol);
    emit(dump(io::to_json(find_congruence(u, v, congr_m, tol))), common.out);
  });

  // construct ----------------------------------------------------------------
  auto* construct = app.add_subcommand("construct", "build counterexample pairs, the graph continuation or the cardioid profile");
  construct->require_subcommand(1);
  std::string out_dir = ".";

  auto* step5 = construct->add_subcommand("step5", "flat-top convex domain and its bent copy");
  double step5_l = 1.0;
  step5->add_option("--l", step5_l, "half-length of the replaced segment")->check(CLI::PositiveNumber);
  step5->add_option("--out", out_dir, "output directory");
  step5->callback([&] {
    const auto pair = step5_pair(step5_l, std::nullopt, common.tolerances());
    write_pair(out_dir, pair);
  });

  auto* deform = construct->add_subcommand("deform", "same-length convex arc replacement near a supporting segment");
  std::string deform_in;
  std::optional<double> amplitude;
  deform->add_option("--domain", deform_in, "domain JSON (default: the smoothed L)");
  deform->add_option("--amplitude", amplitude, "initial bump size (default 0.02 * diameter)")->check(CLI::NonNegativeNumber);
  deform->add_option("--out", out_dir, "output directory");
  deform->callback([&] {
    const Tolerances tol = common.tolerances();
    const Domain u = deform_in.empty() ? corpus::smoothed_l() : load_domain(deform_in, tol);
    const auto pair = nonconvex_deformation(u, amplitude.value_or(0.02 * domain_diameter(u)), tol);
    log(Level::Info, "replaced s in [%.6f, %.6f], amplitude %.3e", pair.s_start, pair.s_end, pair.amplitude);
    write_pair(out_dir, pair);
  });

  auto* l41 = construct->add_subcommand("lemma41", "continuation away from k = (1,1,1,1)");
  Lemma41Options l41_opt;
  std::string l41_problem;
  l41->add_option("--delta", l41_opt.delta, "predictor step along the kernel")->check(CLI::NonNegativeNumber);
  l41->add_option("--eps", l41_opt.eps_target, "bound on |f2 - f1|_sup")->check(CLI::PositiveNumber);
  l41->add_option("--problem", l41_problem, "problem JSON (default: random profile from --seed)");
  l41->add_option("--seed", common.seed, "seed of the random profile");
  l41->add_option("--out", out_dir, "output directory");
  l41->callback([&] {
    std::mt19937_64 rng(common.seed);
    const Lemma41Problem p = l41_problem.empty() ? random_lemma41_problem(rng) : io::problem_from_json(read_json(l41_problem));
    const auto sol = lemma41_solve(p, l41_opt);
    const auto map = lemma41_map(p.f1, sol.f2(), sol.phi);
    log(Level::Info, "delta %.3g, residual %.3e, max segment deviation %.3e", sol.delta, sol.residual_norm, map.max_deviation);
    write_text(fs::path(out_dir) / "solution.json", dump(io::to_json(sol, map)));
    SvgCanvas svg;
    std::vector<Vec2> g1, g2;
    const GraphCurve f2 = sol.f2();
    for (std::size_t i = 0; i < sol.phi.x.size(); ++i) {
      const double x = sol.phi.x[i];
      g1.push_back({x, p.f1.value(x)});
      g2.push_back({x, f2.value(x)});
    }
    svg.add_polyline(g1, "#1f77b4");
    svg.add_polyline(g2, "#d62728");
    std::ostringstream os;
    svg.write(os);
    write_text(fs::path(out_dir) / "preview.svg", os.str());
  });

  auto* card = construct->add_subcommand("cardioid", "modified cardioid profile and its surface of revolution");
  std::size_t card_segments = 128;
  card->add_option("--segments", card_segments, "angular segments of the revolution mesh")->check(CLI::Range(3, 100000));
  card->add_option("--out", out_dir, "output directory");
  card->callback([&] {
    // Scale reference: diameter of the closed profile at a coarse tolerance.
    const double diam = domain_diameter(cardioid_profile(1e-3).domain);
    const auto prof = cardioid_profile(common.tol_flat * diam);
    json j = io::to_json(prof.domain);
    j["junction"] = io::detail::point(prof.junction);
    j["slope_cardioid"] = prof.slope_cardioid;
    j["slope_circle"] = prof.slope_circle;
    j["samples"] = prof.samples;
    write_text(fs::path(out_dir) / "profile.json", dump(j));
    std::ostringstream os;
    revolve_export(os, prof.profile, card_segments);
    write_text(fs::path(out_dir) / "surface.stl", os.str());
  });

  for (auto* sub : {step5, deform, l41, card}) add_tolerances(sub, common);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? Ok : InvalidInputExit;
  } catch (const Error& e) {
    log(Level::Error, "%s", e.what());
    return exit_code(e.kind());
  } catch (const std::exception& e) {
    log(Level::Error, "%s", e.what());
    return InvalidInputExit;
  }
  return status;
}
