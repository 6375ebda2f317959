#include "support.hpp"

#include <chrono>
#include <cstdio>
#include <memory>
#include <sstream>
#include <sys/wait.h>

using namespace bap;
using namespace bap::testing;

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) { return std::chrono::duration<double>(Clock::now() - t0).count(); }

struct Line {
  int id;
  bool pass;
  std::string detail;
};

std::string fmt(const char* f, double a) {
  char buf[64];
  std::snprintf(buf, sizeof buf, f, a);
  return buf;
}

double max_abs_diff(const Vector& v, std::initializer_list<double> expected) {
  return (v - make_vector(expected)).cwiseAbs().maxCoeff();
}

Line criterion1() {
  const auto spec = corpus_spec("01_box_ellipse_euclidean.json");
  const auto t0 = Clock::now();
  const SolveStage st = run_solve(spec);
  const auto cert = certify_uniqueness(spec.a_parts, spec.b_parts, spec.norm);
  const double secs = seconds_since(t0);
  double err = 0.0;
  bool ok = st.multistart && st.multistart->runs.size() == 8;
  if (ok) {
    for (const auto& r : st.multistart->runs) {
      ok = ok && r.converged;
      err = std::max({err, max_abs_diff(r.a, {0, 0}), max_abs_diff(r.b, {0, 1}), std::abs(r.distance - 1.0)});
    }
  }
  ok = ok && err <= 1e-6 && cert.verdict == UniquenessVerdict::AtMostOne && cert.fired_rule == "Thm4.5(ii)" &&
       secs < 1.0;
  return {1, ok,
          "8 alternating runs, max coordinate error " + fmt("%.2e", err) + " (tol 1e-6), rule " + cert.fired_rule +
              ", " + fmt("%.2f", secs) + " s (limit 1 s)"};
}

Line criterion2() {
  const auto spec = corpus_spec("02_box_ellipse_linf.json");
  const auto t0 = Clock::now();
  auto [x0, y0] = seeded_start(spec.solver.params.seed, 0, 2, spec.solver.params.start_radius);
  const auto r = general_norm_descent(spec.set_a(), spec.set_b(), spec.norm, x0, y0, spec.solver.params);
  const auto o = grid_min_distance(spec.set_a(), spec.set_b(), spec.norm, spec.oracle->bbox, 0.01);
  const auto cert = certify_uniqueness(spec.a_parts, spec.b_parts, spec.norm);
  const double secs = seconds_since(t0);
  const bool span = o.tie_a_lo.size() == 2 && o.tie_a_lo[0] <= -0.98 && o.tie_a_hi[0] >= 0.98;
  const bool ok = std::abs(r.distance - 1.0) <= 1e-4 && span && o.segment_fit.has_value() &&
                  cert.verdict == UniquenessVerdict::Unknown && secs < 10.0;
  std::string detail = "descent distance " + fmt("%.6f", r.distance) + " (tol 1e-4), oracle a-span x1 in [";
  detail += o.tie_a_lo.size() ? fmt("%.2f", o.tie_a_lo[0]) + ", " + fmt("%.2f", o.tie_a_hi[0]) : std::string("-, -");
  detail += "], segment_fit " + std::string(o.segment_fit ? "yes" : "no") + ", uniqueness " + to_string(cert.verdict) +
            ", " + fmt("%.2f", secs) + " s (limit 10 s)";
  return {2, ok, detail};
}

Line criterion3() {
  const auto spec = corpus_spec("03_segments_linf.json");
  const SolveStage st = run_solve(spec);
  const double res = spec.oracle->resolution;
  const auto o = grid_min_distance(spec.set_a(), spec.set_b(), spec.norm, spec.oracle->bbox, res);
  bool all_optimal = !o.pairs_truncated && o.optimal_pairs.size() == o.points_a * o.points_b;
  for (const auto& [a, b] : o.optimal_pairs) all_optimal = all_optimal && norm_eval(spec.norm, a - b) <= o.dist_estimate + 2 * res;
  const auto& sa = spec.set_a().as<SegmentSet>()->seg;
  const auto& sb = spec.set_b().as<SegmentSet>()->seg;
  const bool parallel = are_parallel_segments(sa, sb);
  const bool ok = std::abs(st.primary.distance - 1.5) <= 1e-4 && all_optimal && !parallel;
  return {3, ok,
          "distance " + fmt("%.6f", st.primary.distance) + " (tol 1e-4), " + std::to_string(o.optimal_pairs.size()) +
              " grid pairs all optimal: " + (all_optimal ? "yes" : "no") + ", parallel " + (parallel ? "true" : "false")};
}

Line criterion4() {
  const auto spec = corpus_spec("04_ellipse_cylinder.json");
  const auto m = multistart_bap(spec.set_a(), spec.set_b(), spec.norm, 8, spec.solver.params);
  bool distinct = true;
  for (std::size_t i = 0; i < m.representatives.size(); ++i)
    for (std::size_t j = i + 1; j < m.representatives.size(); ++j) {
      const auto& p = m.runs[static_cast<std::size_t>(m.representatives[i].second)];
      const auto& q = m.runs[static_cast<std::size_t>(m.representatives[j].second)];
      distinct = distinct && (p.a - q.a).norm() > 10 * spec.solver.params.tol;
    }
  const auto o = grid_min_distance(spec.set_a(), spec.set_b(), spec.norm, spec.oracle->bbox, spec.oracle->resolution);
  const double gap = std::abs(m.best_distance - o.dist_estimate);
  const bool ok = m.cluster_count >= 2 && distinct && m.difference_spread <= 1e-5 && gap <= 0.05;
  return {4, ok,
          std::to_string(m.cluster_count) + " clusters, distinct a-points " + (distinct ? "yes" : "no") +
              ", difference spread " + fmt("%.2e", m.difference_spread) + " (tol 1e-5), |solver - oracle| " +
              fmt("%.4f", gap) + " (tol 0.05)"};
}

Line criterion5() {
  bool ok = true;
  std::ostringstream detail;
  for (const char* file :
       {"05_triangle_box.json", "06_pentagon_drop.json", "07_two_cylinders.json", "08_lens_intersections.json"}) {
    const auto spec = corpus_spec(file);
    const auto cert = certify_uniqueness(spec.a_parts, spec.b_parts, spec.norm);
    const SolveStage st = run_solve(spec);
    const int clusters = st.multistart ? st.multistart->cluster_count : 1;
    const std::string rule = cert.corollary.empty() ? cert.fired_rule : cert.corollary + "/" + cert.fired_rule;
    const bool row = cert.verdict == UniquenessVerdict::AtMostOne &&
                     detail::rule_allowed(cert, spec.expect.value("uniqueness_rules", json::array())) && clusters == 1;
    ok = ok && row;
    detail << file << ": " << to_string(cert.verdict) << " " << rule << ", " << clusters << " cluster"
           << (clusters == 1 ? "" : "s") << "; ";
  }
  std::string d = detail.str();
  d.resize(d.size() - 2);
  return {5, ok, d};
}

Line criterion6() {
  const auto spec = corpus_spec("09_exp_no_bap.json");
  const auto t0 = Clock::now();
  const SolveStage st = run_solve(spec);
  SolverParams long_run = spec.solver.params;
  long_run.blowup_radius = 1e300;
  long_run.max_iter = 100000;
  long_run.record_trace = false;
  const auto full = alternating_projections(spec.set_a(), spec.set_b(), *spec.solver.start, long_run);
  ExistenceOptions opt;
  opt.probe = st.primary;
  const auto ex = certify_existence(spec.set_a(), spec.set_b(), spec.norm, 2, opt);
  const double secs = seconds_since(t0);
  const bool ok = st.primary.diverging && full.distance > 2.0 && full.distance < 2.05 &&
                  ex.verdict == ExistenceVerdict::SuspectedNotAttained && secs < 30.0;
  return {6, ok,
          "diverging " + std::string(st.primary.diverging ? "true" : "false") + ", distance after " +
              std::to_string(full.iterations) + " iterations " + fmt("%.6f", full.distance) + " (range (2, 2.05)), existence " +
              to_string(ex.verdict) + ", " + fmt("%.2f", secs) + " s (limit 30 s)"};
}

Line criterion7() {
  const auto t0 = Clock::now();
  const PropertyStats st = run_property_suite();
  const double secs = seconds_since(t0);
  const bool ok = st.boundary_identity_checked > 0 && st.boundary_identity_failed == 0 &&
                  st.boundary_points_checked > 0 && st.boundary_points_failed == 0 && st.segment_pairs_checked > 0 &&
                  st.segment_pairs_failed == 0 && secs < 300.0;
  std::ostringstream d;
  d << "boundary identity " << st.boundary_identity_checked - st.boundary_identity_failed << "/"
    << st.boundary_identity_checked << ", boundary points " << st.boundary_points_checked - st.boundary_points_failed
    << "/" << st.boundary_points_checked << ", segment pairs " << st.segment_pairs_checked - st.segment_pairs_failed
    << "/" << st.segment_pairs_checked << ", " << fmt("%.1f", secs) << " s (limit 300 s)";
  return {7, ok, d.str()};
}

Line criterion8() {
  double idem = 0, var = 0, nonexp = 0;
  int failures = 0;
  std::string worst;
  for (const auto& [kind, name] : all_variants()) {
    const ProjectionStats st = run_projection_suite(kind, 1000, 42);
    const bool row = st.idempotence <= 1e-9 && st.variational <= 1e-9 && st.nonexpansive <= 1e-9 && st.not_converged == 0;
    if (!row) {
      ++failures;
      worst += std::string(" ") + name;
    }
    idem = std::max(idem, st.idempotence);
    var = std::max(var, st.variational);
    nonexp = std::max(nonexp, st.nonexpansive);
  }
  const double dyk = dykstra_box_disagreement(1000, 7);
  const bool ok = failures == 0 && dyk <= 1e-8;
  std::string d = std::to_string(all_variants().size()) + " variants x 1000 instances, max idempotence " +
                  fmt("%.1e", idem) + ", variational " + fmt("%.1e", var) + ", nonexpansive " + fmt("%.1e", nonexp) +
                  " (tol 1e-9), Dykstra vs box " + fmt("%.1e", dyk) + " (tol 1e-8)";
  if (failures) d += ", failing:" + worst;
  return {8, ok, d};
}

Line criterion9() {
  const std::string cmd = std::string("'") + BAP_CLI_PATH + "' reproduce-paper 2>/dev/null";
  std::unique_ptr<FILE, int (*)(FILE*)> pipe(popen(cmd.c_str(), "r"), pclose);
  if (!pipe) return {9, false, "could not start the CLI"};
  std::string out;
  char buf[4096];
  std::size_t n;
  while ((n = std::fread(buf, 1, sizeof buf, pipe.get())) > 0) out.append(buf, n);
  const int status = pclose(pipe.release());
  const int code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  int passed = 0;
  try {
    const json report = json::parse(out);
    for (int k = 1; k <= 6; ++k)
      for (const auto& row : report["corpus"]["criteria"])
        if (row["criterion"] == k && row["pass"].get<bool>()) ++passed;
  } catch (const std::exception&) {
    return {9, false, "exit " + std::to_string(code) + ", unparsable report"};
  }
  return {9, code == 0 && passed == 6, "exit " + std::to_string(code) + ", " + std::to_string(passed) + "/6 criterion rows pass"};
}

}  // namespace

int main() {
  std::vector<Line (*)()> checks = {criterion1, criterion2, criterion3, criterion4, criterion5,
                                    criterion6, criterion7, criterion8, criterion9};
  bool all = true;
  for (std::size_t i = 0; i < checks.size(); ++i) {
    Line l;
    try {
      l = checks[i]();
    } catch (const std::exception& e) {
      l = {static_cast<int>(i) + 1, false, std::string("exception: ") + e.what()};
    }
    std::printf("criterion %d: %s: %s\n", l.id, l.pass ? "PASS" : "FAIL", l.detail.c_str());
    std::fflush(stdout);
    all = all && l.pass;
  }
  return all ? 0 : 1;
}
