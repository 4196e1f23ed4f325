#pragma once

// Command-line front end.  run() is the whole program; main() only forwards
// the standard streams so tests can drive it in-process.
//
// exit codes: 0 all checks passed, 1 a check failed, 2 bad configuration,
// 3 singular metric, 4 unsupported capability

#include <CLI11.hpp>
#include <fstream>
#include <iostream>

#include "hermlab/catalogue.hpp"
#include "hermlab/metric_file.hpp"
#include "hermlab/report.hpp"
#include "hermlab/spectral.hpp"
#include "hermlab/verify.hpp"

namespace hermlab::cli {

inline constexpr int kSchemaVersion = 1;

struct RunConfig {
  std::string command;
  std::string suite;  // identities, bounds, all (check only)
  std::string geometry;
  std::string metric_file;
  std::string points = "origin";
  int grid = 200;  // identity sample count
  int subdivisions = 5;
  std::uint64_t seed = 1;
  std::optional<double> tol;
  std::string out;
  std::string format = "json";
  std::string mesh_csv;
};

inline Value config_value(const RunConfig& c) {
  return Object{{"command", c.command},
                {"suite", c.suite.empty() ? Value() : Value(c.suite)},
                {"geometry", c.geometry.empty() ? Value() : Value(c.geometry)},
                {"metric_file", c.metric_file.empty() ? Value() : Value(c.metric_file)},
                {"points", c.points},
                {"grid", c.grid},
                {"subdivisions", c.subdivisions},
                {"seed", (long long)c.seed},
                {"tol", c.tol ? Value(*c.tol) : Value()},
                {"format", c.format}};
}

inline VerifyConfig verify_config(const RunConfig& c) {
  VerifyConfig v;
  v.samples = c.grid;
  v.seed = c.seed;
  v.subdivisions = c.subdivisions;
  v.tol = c.tol;
  return v;
}

// Loads the geometry; file metrics are classified as balanced when their
// residual is within the finite-difference tolerance.
inline GeometryCatalogueEntry load_geometry(const RunConfig& c) {
  if (!c.geometry.empty() && !c.metric_file.empty()) throw ConfigError("give either --geometry or --metric-file");
  if (!c.geometry.empty()) return geometry_by_name(c.geometry);
  if (c.metric_file.empty()) throw ConfigError("--geometry or --metric-file is required");
  GeometryCatalogueEntry e = file_geometry(c.metric_file);
  auto pts = sample_points(e, 20, c.seed);
  e.is_balanced_expected = balanced_residual(e.metric, pts).value <= identity_tolerance(e, verify_config(c));
  return e;
}

// origin | <count> | x1,y1,...;x1,y1,...
inline std::vector<ChartPoint> parse_points(const std::string& s, const GeometryCatalogueEntry& e, std::uint64_t seed) {
  int n = e.metric.n;
  if (s == "origin") {
    ChartPoint p = ChartPoint::origin(n);
    if (!e.metric.domain.contains(p) && !e.metric.domain.periodic)
      throw ConfigError("the origin is outside the chart domain");
    return {p};
  }
  if (!s.empty() && s.find_first_not_of("0123456789") == std::string::npos) {
    int k = std::stoi(s);
    if (k < 1 || k > 10000) throw ConfigError("--points count must be 1..10000");
    return sample_points(e, k, seed);
  }
  std::vector<ChartPoint> out;
  std::stringstream ss(s);
  std::string tok;
  while (std::getline(ss, tok, ';')) {
    auto v = hermlab::detail::parse_numbers(tok, ',', "point");
    if (int(v.size()) != 2 * n) throw ConfigError("each point needs " + std::to_string(2 * n) + " real coordinates");
    ChartPoint p = ChartPoint::from_real(v);
    if (!e.metric.domain.contains(p) && !e.metric.domain.periodic) throw ConfigError("point outside the chart domain");
    out.push_back(p);
  }
  if (out.empty()) throw ConfigError("no points given");
  return out;
}

namespace detail {

inline Value tensor3(const ComplexTensor& t, int n, bool imag) {
  Array ks;
  for (int k = 0; k < n; ++k) {
    Array rows;
    for (int i = 0; i < n; ++i) {
      Array r;
      for (int j = 0; j < n; ++j) r.push_back(imag ? t(k, i, j).imag() : t(k, i, j).real());
      rows.push_back(r);
    }
    ks.push_back(rows);
  }
  return ks;
}

inline Value point_curvature(const MetricField& m, const ChartPoint& p) {
  LocalMetric g = local_metric(m, p, 2);
  CurvatureBundle b = curvature_bundle(g);
  ConnectionCoefficients ch = chern_connection(g), sb = sb_connection(g);
  int n = m.n;
  Object o{{"point", point_value(p)},
           {"h", real_matrix(b.h)},
           {"h_im", imag_matrix(b.h)},
           {"chern_gamma", tensor3(ch.gamma_hol, n, false)},
           {"chern_gamma_im", tensor3(ch.gamma_hol, n, true)},
           {"sb_gamma_mixed", tensor3(sb.gamma_mixed, n, false)},
           {"sb_gamma_mixed_im", tensor3(sb.gamma_mixed, n, true)},
           {"theta_ric1", real_matrix(b.theta_ric1)},
           {"theta_ric1_im", imag_matrix(b.theta_ric1)}};
  for (int k = 0; k < 4; ++k) {
    std::string key = "ric_sb" + std::to_string(k + 1);
    o.emplace_back(key, real_matrix(b.ric_sb[k]));
    o.emplace_back(key + "_im", imag_matrix(b.ric_sb[k]));
  }
  o.emplace_back("t_circ_tbar", real_matrix(b.t_circ_tbar));
  o.emplace_back("dbar_star_omega", complex_vector(dbar_star_omega(g)));
  return o;
}

inline Value curvature_block(const GeometryCatalogueEntry& e, const std::vector<ChartPoint>& pts, const VerifyConfig& v) {
  std::vector<Value> per(pts.size());
  parallel_for(pts.size(), [&](size_t k) { per[k] = point_curvature(e.metric, pts[k]); });
  CurvatureConstants k = curvature_constants(e, v);
  Object ex{{"min_hol_ricci", k.min_ric},
            {"min_hol_ricci_sampled", k.min_ric_sampled},
            {"min_hsc", k.min_hsc},
            {"min_hsc_along_gradient", e.eigenfunction ? Value(k.min_hsc_gradient) : Value()},
            {"sample_count", k.samples}};
  return Object{{"points", Array(per.begin(), per.end())}, {"extrema", ex}};
}

inline Value spectrum_value(const SpectralResult& s) {
  return Object{{"lambda1", s.lambda1},
                {"diameter", s.diameter},
                {"method", s.method},
                {"residual", s.residual},
                {"resolution", s.resolution},
                {"iterations", s.iterations}};
}

inline Value optional_spectrum(const GeometryCatalogueEntry& e, int subdivisions) {
  try {
    return spectrum_value(spectrum_for(e, subdivisions));
  } catch (const UnsupportedError&) {
    return Value();
  }
}

inline Value geometry_block(const GeometryCatalogueEntry& e, const VerifyConfig& v) {
  auto pts = sample_points(e, 20, v.seed + 29);
  BalancedResidual b = balanced_residual(e.metric, pts);
  double tol = identity_tolerance(e, v);
  Object o{{"name", e.name},
           {"n", e.metric.n},
           {"family", e.family},
           {"balanced_residual", b.value},
           {"dbar_star_omega", b.dbar_star_omega},
           {"d_omega_power", b.d_omega_power}};
  if (b.value > tol) o.emplace_back("warning", "metric is not balanced; balanced-only identities are not applicable");
  return o;
}

}  // namespace detail

// Rows for plotting: coordinates, |du|^2, Q, p, Bochner residual.
inline void write_plot_csv(std::ostream& os, const GeometryCatalogueEntry& e, const VerifyConfig& v) {
  if (!e.eigenfunction || !e.eigenvalue) throw UnsupportedError("no eigenfunction registered for " + e.name);
  int n = e.metric.n;
  double lam = *e.eigenvalue;
  auto pts = sample_points(e, v.samples, v.seed);
  SamplePool pool = make_pool(e.metric, *e.eigenfunction, pts);
  ThetaNormalization tn = theta_normalization(e.eigen_min);
  for (int i = 1; i <= n; ++i) os << "x" << i << ",y" << i << ",";
  os << "grad_u_sq,q,p,bochner_residual\n";
  for (auto& x : pool.pts) {
    for (double c : x.p.real_coords()) os << format_number(c) << ",";
    double Q = x.grad.grad2 + lam / (4 * n) * x.uval * x.uval;
    ThetaPoint t = theta_residual(x, lam, tn);
    os << format_number(x.grad.grad2) << "," << format_number(Q) << "," << (t.valid ? format_number(t.p) : "")
       << "," << format_number(bochner_residual(x, lam).res) << "\n";
  }
}

inline void summary_lines(std::ostream& err, const std::vector<CheckReport>& v) {
  for (auto& r : v) {
    const char* tag = r.status == "not-applicable" ? "N/A " : (r.passed ? "PASS" : "FAIL");
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.3e", r.value);
    err << tag << " " << r.name << " [" << r.geometry << "] value=" << buf << " status=" << r.status << "\n";
  }
}

inline int execute(const RunConfig& c, std::ostream& out, std::ostream& err) {
  if (c.command == "list-geometries") {
    if (c.format == "json") {
      Array a;
      for (auto& s : catalogue_names()) a.push_back(s);
      write_json(out, Object{{"schema_version", kSchemaVersion}, {"geometries", a}});
    } else {
      for (auto& s : catalogue_names()) out << s << "\n";
    }
    return 0;
  }
  if (c.grid < 1 || c.grid > 10000) throw ConfigError("--grid must be 1..10000");
  if (c.tol && !(*c.tol > 0)) throw ConfigError("--tol must be positive");
  GeometryCatalogueEntry e = load_geometry(c);
  VerifyConfig v = verify_config(c);

  std::ofstream file;
  std::ostream* os = &out;
  if (!c.out.empty()) {
    file.open(c.out);
    if (!file) throw ConfigError("cannot write '" + c.out + "'");
    os = &file;
  }

  if (c.command == "spectrum") {
    if (c.format == "csv") {
      auto s = sphere_fs_spectrum_full(e, c.subdivisions);
      write_mesh_csv(*os, s.mesh, s.eig.vec);
      return 0;
    }
    SpectralResult s = spectrum_for(e, c.subdivisions);
    Value sv = detail::spectrum_value(s);
    if (!c.mesh_csv.empty()) {
      auto full = sphere_fs_spectrum_full(e, c.subdivisions);
      std::ofstream m(c.mesh_csv);
      if (!m) throw ConfigError("cannot write '" + c.mesh_csv + "'");
      write_mesh_csv(m, full.mesh, full.eig.vec);
    }
    Value doc = Object{{"schema_version", kSchemaVersion},
                       {"config", config_value(c)},
                       {"geometry", detail::geometry_block(e, v)},
                       {"curvature", Value()},
                       {"spectrum", sv},
                       {"checks", Array{}}};
    if (c.format == "text")
      write_text(*os, doc);
    else
      write_json(*os, doc);
    return 0;
  }

  if (c.format == "csv") {
    write_plot_csv(*os, e, v);
    if (c.command == "report") return 0;
  }

  std::vector<CheckReport> checks;
  if (c.command == "check") {
    if (c.suite == "identities" || c.suite == "all") {
      auto a = identity_suite(e, v);
      checks.insert(checks.end(), a.begin(), a.end());
    }
    if (c.suite == "bounds" || c.suite == "all") {
      auto a = bounds_suite(e, v);
      checks.insert(checks.end(), a.begin(), a.end());
    }
    summary_lines(err, checks);
  }
  int code = all_passed(checks) ? 0 : 1;
  if (c.format == "csv") return code;

  std::vector<ChartPoint> pts;
  if (c.command == "report" || c.points != "origin") pts = parse_points(c.points, e, c.seed);
  Array cv;
  for (auto& r : checks) cv.push_back(check_value(r));
  Value doc = Object{{"schema_version", kSchemaVersion},
                     {"config", config_value(c)},
                     {"geometry", detail::geometry_block(e, v)},
                     {"curvature", detail::curvature_block(e, pts, v)},
                     {"spectrum", detail::optional_spectrum(e, c.subdivisions)},
                     {"checks", cv}};
  if (c.format == "text")
    write_text(*os, doc);
  else
    write_json(*os, doc);
  return code;
}

inline int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"hermlab: first-eigenvalue estimates on balanced Hermitian manifolds"};
  app.require_subcommand(1);
  RunConfig c;
  std::string tol_text;

  auto common = [&](CLI::App* s, bool points) {
    s->add_option("--geometry", c.geometry, "catalogue name, e.g. fubini-study:1, flat-torus:2, iwasawa");
    s->add_option("--metric-file", c.metric_file, "grid-sampled metric (herm-metric v1)");
    if (points) s->add_option("--points", c.points, "origin | <count> | x1,y1,...;x1,y1,...");
    s->add_option("--grid", c.grid, "sample points for pointwise identities");
    s->add_option("--subdivisions", c.subdivisions, "icosphere level for the fubini-study:1 mesh");
    s->add_option("--seed", c.seed, "sampling seed");
    s->add_option("--tol", tol_text, "override identity tolerances");
    s->add_option("--out", c.out, "output file (default stdout)");
    s->add_option("--format", c.format, "json | text | csv")->check(CLI::IsMember({"json", "text", "csv"}));
  };
  auto* report = app.add_subcommand("report", "curvature, balanced residuals and spectrum");
  common(report, true);
  auto* check = app.add_subcommand("check", "run a verification suite");
  check->add_option("suite", c.suite, "identities | bounds | all")
      ->required()
      ->check(CLI::IsMember({"identities", "bounds", "all"}));
  common(check, true);
  auto* spectrum = app.add_subcommand("spectrum", "first eigenvalue and diameter");
  common(spectrum, false);
  spectrum->add_option("--mesh-csv", c.mesh_csv, "write the icosphere mesh and eigenvector");
  auto* list = app.add_subcommand("list-geometries", "catalogue names");
  list->add_option("--format", c.format, "json | text")->check(CLI::IsMember({"json", "text", "csv"}));

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e, out, err);
    return code == 0 ? 0 : 2;
  }
  for (auto* s : {report, check, spectrum, list})
    if (s->parsed()) c.command = s->get_name();
  try {
    if (!tol_text.empty()) {
      auto v = hermlab::detail::parse_numbers(tol_text, ',', "--tol");
      if (v.size() != 1) throw ConfigError("--tol takes one number");
      c.tol = v[0];
    }
    return execute(c, out, err);
  } catch (const SingularMetricError& e) {
    err << "error: " << e.what() << "\n";
    return 3;
  } catch (const UnsupportedError& e) {
    err << "error: " << e.what() << "\n";
    return 4;
  } catch (const Error& e) {
    err << "error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return 2;
  }
}

}  // namespace hermlab::cli
