// Acceptance run: one PASS/FAIL line per criterion, exit status 1 if any fails.

#include <chrono>
#include <cstdio>
#include <sstream>

#include "hermlab/cli.hpp"

using namespace hermlab;

namespace {

int failures = 0;

void line(int id, const char* what, bool ok, const std::string& info) {
  std::printf("%s  %2d  %-28s %s\n", ok ? "PASS" : "FAIL", id, what, info.c_str());
  if (!ok) ++failures;
}

std::string fmt(const char* f, double a, double b = 0, double c = 0) {
  char buf[256];
  std::snprintf(buf, sizeof buf, f, a, b, c);
  return buf;
}

const CheckReport* find(const std::vector<CheckReport>& v, const std::string& name) {
  for (auto& r : v)
    if (r.name == name) return &r;
  return nullptr;
}

double detail_or(const CheckReport* r, const char* k, double fallback = kNaN) {
  if (!r) return fallback;
  return r->get(k).value_or(fallback);
}

bool ok_status(const CheckReport* r) { return r && r->passed; }

template <class F>
void guarded(int id, const char* what, F&& body) {
  try {
    body();
  } catch (const std::exception& e) {
    line(id, what, false, std::string("threw: ") + e.what());
  }
}

}  // namespace

int main() {
  VerifyConfig cfg;
  auto fs1 = fubini_study(1);

  // 1. mesh eigenvalue on CP^1
  guarded(1, "fs_cp1_mesh_eigenvalue", [&] {
    auto t0 = std::chrono::steady_clock::now();
    double l5 = sphere_fs_spectrum(fs1, 5).lambda1;
    double dt = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    double l6 = sphere_fs_spectrum(fs1, 6).lambda1;
    bool ok = l5 >= 3.92 && l5 <= 4.08 && std::abs(l6 - 4) < std::abs(l5 - 4) && dt < 60;
    line(1, "fs_cp1_mesh_eigenvalue", ok,
         fmt("lambda(5)=%.9f lambda(6)=%.9f t5=%.2fs", l5, l6, dt));
  });

  // 2. equality case of the Lichnerowicz estimate
  guarded(2, "lichnerowicz_equality", [&] {
    auto b = check_bounds(fs1, cfg);
    const CheckReport* r = find(b, "lichnerowicz_bound");
    CurvatureConstants k = curvature_constants(fs1, cfg);
    double lam = sphere_fs_spectrum(fs1, cfg.subdivisions).lambda1;
    double margin = lam - 2 * fs1.metric.n * k.min_ric;
    double dsk = diameter(fs1) * std::sqrt(k.min_ric) - M_PI;
    bool ok = ok_status(r) && std::abs(margin) <= 1e-6 && std::abs(k.min_ric - 2) <= 1e-8 && std::abs(dsk) <= 1e-12;
    line(2, "lichnerowicz_equality", ok, fmt("margin=%.3e K=%.15f D*sqrt(K)-pi=%.3e", margin, k.min_ric, dsk));
  });

  // 3. golden curvature values
  guarded(3, "curvature_golden_values", [&] {
    double theta = 0, hsc = 0;
    std::mt19937_64 rng(7);
    for (auto& p : sample_points(fs1, 40, 3)) {
      LocalMetric g = local_metric(fs1.metric, p, 2, DerivRoute::analytic);
      CurvatureBundle b = curvature_bundle(g);
      theta = std::max(theta, max_abs(MatC(b.theta_ric1 - 2.0 * b.h)));
      for (int d = 0; d < 4; ++d) hsc = std::max(hsc, std::abs(hsc_sb(b, detail::random_direction(1, rng)) - 2));
    }
    double flat = 0;
    for (int n = 1; n <= 3; ++n) {
      auto t = flat_torus(n);
      for (auto& p : sample_points(t, 20, 5)) {
        LocalMetric g = local_metric(t.metric, p, 2);
        CurvatureBundle b = curvature_bundle(g);
        flat = std::max({flat, max_abs(b.theta), max_abs(b.r_sb), max_abs(b.theta_ric1), max_abs(b.t_circ_tbar),
                         max_abs(chern_connection(g).gamma_hol)});
        for (auto& r : b.ric_sb) flat = std::max(flat, max_abs(r));
      }
    }
    bool ok = theta <= 1e-8 && hsc <= 1e-8 && flat <= 1e-10;
    line(3, "curvature_golden_values", ok, fmt("|theta1-2h|=%.2e |hsc-2|=%.2e flat=%.2e", theta, hsc, flat));
  });

  // 4. two routes to the SB curvature on the Iwasawa manifold
  guarded(4, "sb_route_equivalence", [&] {
    auto iw = iwasawa();
    double route = 0, ric = 0;
    for (auto& p : sample_points(iw, 50, 11)) {
      CurvatureBundle b = curvature_bundle(iw.metric, p);
      route = std::max(route, max_abs(b.r_sb - b.r_sb_relation));
      MatC L = b.lambda_ddbar_omega;
      ric = std::max({ric, max_abs(MatC(b.ric_sb[1] - (b.theta_ric1 + L - b.t_circ_tbar))),
                      max_abs(MatC(b.ric_sb[2] - (b.theta_ric1 - L))), max_abs(MatC(b.ric_sb[3] - (b.theta_ric1 - L)))});
    }
    line(4, "sb_route_equivalence", route <= 1e-6 && ric <= 1e-6,
         fmt("route=%.2e ricci_relations=%.2e points=50", route, ric));
  });

  // 5. identity residuals, analytic and under refinement
  guarded(5, "identity_residual_suite", [&] {
    const char* pointwise[] = {"laplacian_trace_identity", "hessian_trace_identity", "bochner_identity",
                               "li_yau_log_identity", "li_yau_gradient_identity",
                               "holomorphic_ricci_torsion_identity"};
    double worst = 0;
    std::string bad;
    for (auto name : {"fubini-study:1", "flat-torus:1", "flat-torus:2"}) {
      auto e = geometry_by_name(name);
      auto v = identity_suite(e, cfg);
      auto judge = [&](const char* check, const char* coarse, const char* fine) {
        const CheckReport* r = find(v, check);
        double c = detail_or(r, coarse), f = detail_or(r, fine);
        bool ok = r && r->value <= 1e-6 && detail::converging(c, f);
        if (r) worst = std::max(worst, r->value);
        if (!ok) bad += std::string(" ") + name + "/" + check;
      };
      for (auto c : pointwise) judge(c, "fd_residual_coarse", "fd_residual_fine");
      judge("integral_identity", "residual_coarse", "residual_fine");
    }
    line(5, "identity_residual_suite", bad.empty(), fmt("worst=%.2e", worst) + (bad.empty() ? "" : " failing:" + bad));
  });

  // 6. Q constancy and gradient rigidity on CP^1
  guarded(6, "q_and_rigidity", [&] {
    auto v = identity_suite(fs1, cfg);
    const CheckReport* q = find(v, "q_constancy");
    const CheckReport* g = find(v, "gradient_rigidity");
    double spread = detail_or(q, "q_max") - detail_or(q, "q_min");
    bool ok = ok_status(q) && ok_status(g) && spread <= 1e-8 && std::abs(detail_or(q, "q_min") - 1) <= 1e-8 &&
              g->value <= 1e-8;
    line(6, "q_and_rigidity", ok, fmt("Q in [%.15f, %.15f] rigidity=%.2e", detail_or(q, "q_min"), detail_or(q, "q_max"),
                                      g ? g->value : kNaN));
  });

  // 7. Zhong-Yang machinery
  guarded(7, "zhong_yang_machinery", [&] {
    double p0 = std::abs(zhongyang_psi(0)), p1 = std::abs(zhongyang_psi(M_PI / 2) - 1);
    double s0 = std::abs(zhongyang_series(0, 8) - M_PI);
    auto fv = identity_suite(fs1, cfg);
    auto fsm = find(fv, "zhong_yang_gradient_margin");
    auto tv = identity_suite(flat_torus(1), cfg);
    auto tm = find(tv, "zhong_yang_gradient_margin");
    bool ok = p0 <= 1e-12 && p1 <= 1e-12 && s0 <= 1e-14 && fsm && fsm->value >= 0 && tm && tm->value >= -1e-10 &&
              std::abs(detail_or(fsm, "max_p") - 1) <= 1e-8 && std::abs(detail_or(tm, "max_p") - 0.5) <= 1e-8;
    line(7, "zhong_yang_machinery", ok,
         fmt("series(0)-pi=%.1e fs_margin=%.6f torus_margin=%.2e", s0, fsm ? fsm->value : kNaN, tm ? tm->value : kNaN));
  });

  // 8. bound panel
  guarded(8, "bound_panel", [&] {
    auto t1 = check_bounds(flat_torus(1), cfg);
    const CheckReport* zy = find(t1, "zhong_yang_bound");
    auto f1 = check_bounds(fs1, cfg);
    const CheckReport* hm = find(f1, "hsc_bound");
    const CheckReport* he = find(f1, "hsc_bound_exact_lambda");
    double worst_cf = 0;
    for (int n = 3; n <= 6; ++n)
      for (double D : {0.5, 1.0, 3.0}) {
        double want = 2 / ((3.0 * n - 2) * std::exp(2.0) * D * D);
        worst_cf = std::max(worst_cf, std::abs(liyau_bound(n, 0, D).bound - want) / want);
      }
    // every catalogue geometry: margins nonnegative where the hypotheses hold
    std::string neg;
    for (auto name : {"fubini-study:1", "fubini-study:2", "fubini-study:3", "flat-torus:1", "flat-torus:2",
                      "flat-torus:3", "iwasawa"})
      for (auto& r : check_bounds(geometry_by_name(name), cfg))
        if (!r.passed && r.status != "not-applicable") neg += " " + r.geometry + "/" + r.name;
    bool ok = zy && std::abs(zy->value - 0.5) <= 1e-10 && hm && std::abs(hm->value - 2) <= 0.04 && he &&
              std::abs(he->value - 2) <= 1e-6 && worst_cf <= 1e-14 && neg.empty();
    line(8, "bound_panel",
         ok, fmt("torus_zy=%.12f fs_hsc(mesh)=%.6f fs_hsc(exact)=%.9f", zy ? zy->value : kNaN,
                 hm ? hm->value : kNaN, he ? he->value : kNaN) +
                 fmt(" closed_form_rel=%.1e", worst_cf) + (neg.empty() ? "" : " negative:" + neg));
  });

  // 9. balanced detection
  guarded(9, "balanced_detection", [&] {
    double worst = 0;
    for (auto name : {"fubini-study:1", "fubini-study:2", "flat-torus:1", "flat-torus:3", "iwasawa"}) {
      auto e = geometry_by_name(name);
      worst = std::max(worst, balanced_residual(e.metric, sample_points(e, 20, 9)).value);
    }
    auto nb = nonbalanced_example();
    double ctrl = balanced_residual(nb.metric, sample_points(nb, 20, 9)).value;
    line(9, "balanced_detection", worst <= 1e-5 && ctrl >= 0.1,
         fmt("balanced_max=%.2e nonbalanced=%.4f", worst, ctrl));
  });

  // 10. byte-identical JSON from repeated runs
  guarded(10, "deterministic_output", [&] {
    bool ok = true;
    for (const char* g : {"fubini-study:1", "iwasawa"}) {
      std::string first;
      for (int rep = 0; rep < 2; ++rep) {
        const char* argv[] = {"hermlab", "check", "all", "--geometry", g, "--seed", "3"};
        std::ostringstream out, err;
        int rc = cli::run(7, argv, out, err);
        if (rc != 0) ok = false;
        if (rep == 0)
          first = out.str();
        else if (out.str() != first || first.empty())
          ok = false;
      }
    }
    line(10, "deterministic_output", ok, "check all x2 on fubini-study:1 and iwasawa");
  });

  std::printf("%s: %d of 10 criteria failed\n", failures ? "FAIL" : "PASS", failures);
  return failures ? 1 : 0;
}
