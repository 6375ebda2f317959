#ifndef BAP_REPORT_HPP
#define BAP_REPORT_HPP

#include "bap/certificates.hpp"
#include "bap/oracle.hpp"
#include "bap/problem.hpp"

#include <cmath>
#include <map>
#include <numbers>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

namespace bap {

enum class Command { Solve, Certify, Oracle, ReproducePaper };

inline std::optional<Command> parse_command(const std::string& s) {
  if (s == "solve") return Command::Solve;
  if (s == "certify") return Command::Certify;
  if (s == "oracle") return Command::Oracle;
  if (s == "reproduce-paper") return Command::ReproducePaper;
  return std::nullopt;
}

enum ExitCode : int { kExitOk = 0, kExitUsage = 1, kExitNotConverged = 2, kExitCorpusMismatch = 3 };

struct RunFlags {
  std::optional<std::uint64_t> seed;
  std::optional<int> starts;
  std::optional<double> resolution;
};

struct RunOutcome {
  json report;
  int exit_code = kExitOk;
  std::string plotdata;  // CSV, empty when not requested or not 2-D
};

inline void apply_flags(ProblemSpec& spec, const RunFlags& flags) {
  if (flags.seed) spec.solver.params.seed = *flags.seed;
  if (flags.starts) {
    if (*flags.starts < 2) throw SchemaError(std::vector<SchemaIssue>{{"--starts", "expected an integer >= 2"}});
    spec.solver.starts = *flags.starts;
  }
  if (flags.resolution) {
    if (!(*flags.resolution > 0.0)) throw SchemaError(std::vector<SchemaIssue>{{"--resolution", "must be positive"}});
    if (spec.oracle) spec.oracle->resolution = *flags.resolution;
  }
}

// ---------------------------------------------------------------------------
// Stages.

struct SolveStage {
  BapResult primary;
  std::optional<MultistartResult> multistart;
};

inline SolveStage run_solve(const ProblemSpec& spec) {
  const SetExpr A = spec.set_a();
  const SetExpr B = spec.set_b();
  SolverParams params = spec.solver.params;
  params.record_trace = false;
  SolveStage st;
  if (spec.solver.start) {
    const Vector y0 = spec.solver.start_b.value_or(*spec.solver.start);
    st.primary = solve_bap(A, B, spec.norm, *spec.solver.start, y0, params);
    return st;
  }
  st.multistart = multistart_bap(A, B, spec.norm, spec.solver.starts, params);
  const auto& runs = st.multistart->runs;
  std::size_t best = 0;
  bool found = false;
  for (std::size_t i = 0; i < runs.size(); ++i) {
    if (runs[i].diverging) continue;
    if (!found || runs[i].distance < runs[best].distance) best = i;
    found = true;
  }
  st.primary = runs[best];
  return st;
}

struct CertifyStage {
  UniquenessCertificate uniqueness;
  UniquenessCertificate with_witnesses;
  ExistenceCertificate existence;
};

inline CertifyStage run_certify(const ProblemSpec& spec, const SolveStage& solved) {
  CertifyStage st;
  UniquenessOptions uo;
  uo.tol = spec.solver.params.tol;
  st.uniqueness = certify_uniqueness(spec.a_parts, spec.b_parts, spec.norm, uo);
  if (solved.multistart) uo.witnesses = solved.multistart->runs;
  else uo.witnesses = {solved.primary};
  st.with_witnesses = certify_uniqueness(spec.a_parts, spec.b_parts, spec.norm, uo);
  ExistenceOptions eo;
  eo.probe_params = spec.solver.params;
  eo.probe_params.record_trace = false;
  eo.probe = solved.primary;
  st.existence = certify_existence(spec.set_a(), spec.set_b(), spec.norm, spec.dimension, eo);
  return st;
}

struct OracleStage {
  OracleReport grid;
  std::optional<BoundaryIdentityReport> boundary;
};

inline OracleStage run_oracle(const ProblemSpec& spec) {
  if (!spec.oracle) throw SchemaError(std::vector<SchemaIssue>{{"oracle", "the oracle command needs an oracle section"}});
  OracleStage st;
  const SetExpr A = spec.set_a();
  const SetExpr B = spec.set_b();
  st.grid = grid_min_distance(A, B, spec.norm, spec.oracle->bbox, spec.oracle->resolution);
  if (spec.dimension == 2) {
    st.boundary = verify_boundary_identity(A, B, spec.norm, spec.oracle->bbox, spec.oracle->resolution);
  }
  return st;
}

// ---------------------------------------------------------------------------
// Serialization.

inline json result_json(const BapResult& r) {
  json o;
  o["method"] = r.method;
  o["distance"] = r.distance;
  o["pair"] = {{"a", detail::vec_json(r.a)}, {"b", detail::vec_json(r.b)}};
  o["converged"] = r.converged;
  o["diverging"] = r.diverging;
  o["iterations"] = r.iterations;
  o["residual"] = r.residual;
  return o;
}

inline json solve_json(const SolveStage& st) {
  json o = result_json(st.primary);
  if (st.primary.diverging) o["note"] = "suspected unattained infimum";
  else if (!st.primary.converged) o["note"] = "solver did not converge";
  if (st.multistart) {
    const auto& ms = *st.multistart;
    json clusters = json::array();
    for (const auto& [c, run] : ms.representatives) {
      const BapResult& r = ms.runs[static_cast<std::size_t>(run)];
      int members = 0;
      for (int k : ms.cluster_of) members += k == c ? 1 : 0;
      clusters.push_back({{"a", detail::vec_json(r.a)}, {"b", detail::vec_json(r.b)}, {"distance", r.distance}, {"runs", members}});
    }
    int diverged = 0;
    for (const auto& r : ms.runs) diverged += r.diverging ? 1 : 0;
    o["multistart"] = {{"starts", ms.runs.size()},
                       {"cluster_count", ms.cluster_count},
                       {"diverged_runs", diverged},
                       {"best_distance", ms.best_distance},
                       {"differences_agree", ms.differences_agree},
                       {"difference_spread", ms.difference_spread},
                       {"clusters", clusters}};
  } else {
    o["multistart"] = nullptr;
  }
  return o;
}

inline json uniqueness_json(const CertifyStage& st) {
  auto one = [](const UniquenessCertificate& c) {
    json o = {{"verdict", to_string(c.verdict)}, {"fired_rule", c.fired_rule}, {"trace", c.trace}};
    o["corollary"] = c.corollary.empty() ? json(nullptr) : json(c.corollary);
    if (c.witness) {
      o["witness"] = {result_json(c.witness->first), result_json(c.witness->second)};
    }
    return o;
  };
  json o = one(st.uniqueness);
  o["with_witnesses"] = one(st.with_witnesses);
  return o;
}

inline json existence_json(const ExistenceCertificate& c) {
  json o = {{"verdict", to_string(c.verdict)}, {"fired_rule", c.fired_rule}, {"trace", c.trace}};
  o["shared_ray"] = c.shared_ray ? detail::vec_json(*c.shared_ray) : json(nullptr);
  json cat = json::array();
  for (const auto& e : c.catalog) {
    cat.push_back({{"id", e.id},
                   {"statement", e.statement},
                   {"machine_checkable", e.machine_checkable},
                   {"holds", e.holds ? json(*e.holds) : json(nullptr)}});
  }
  o["catalog"] = cat;
  return o;
}

inline json oracle_json(const OracleStage& st) {
  const OracleReport& r = st.grid;
  json o;
  o["dist_estimate"] = r.dist_estimate;
  o["resolution"] = r.resolution;
  o["points_a"] = r.points_a;
  o["points_b"] = r.points_b;
  o["pair_count"] = r.optimal_pairs.size();
  o["pairs_truncated"] = r.pairs_truncated;
  o["all_pairs_optimal"] = !r.pairs_truncated && r.optimal_pairs.size() == r.points_a * r.points_b;
  o["cluster_count"] = r.cluster_count;
  o["max_cluster_diameter"] = r.max_cluster_diameter;
  o["tie_count"] = r.tie_count;
  o["tie_diameter"] = r.tie_diameter;
  if (r.tie_count > 0) o["tie_a_range"] = {{"lo", detail::vec_json(r.tie_a_lo)}, {"hi", detail::vec_json(r.tie_a_hi)}};
  else o["tie_a_range"] = nullptr;
  if (r.segment_fit) {
    const auto& [sa, sb] = *r.segment_fit;
    o["segment_fit"] = {{"a0", detail::vec_json(sa.a0)}, {"a1", detail::vec_json(sa.a1)},
                        {"b0", detail::vec_json(sb.a0)}, {"b1", detail::vec_json(sb.a1)}};
  } else {
    o["segment_fit"] = nullptr;
  }
  o["clipped"] = r.clipped;
  if (st.boundary) {
    o["boundary_identity"] = {{"holds", st.boundary->holds ? json(*st.boundary->holds) : json(nullptr)},
                              {"full_distance", st.boundary->full_distance},
                              {"boundary_distance", st.boundary->boundary_distance},
                              {"note", st.boundary->note}};
  } else {
    o["boundary_identity"] = nullptr;
  }
  return o;
}

// ---------------------------------------------------------------------------
// Plot data: boundary samples of both sets and the BAP endpoints, 2-D only.
// Columns: kind (0 boundary of A, 1 boundary of B, 2 BAP point in A, 3 BAP point in B), x, y.

inline std::vector<Vector> boundary_samples(const SetExpr& s, const Vector& center, double radius, int count) {
  std::vector<Vector> projected;
  for (int k = 0; k < count; ++k) {
    const double t = 2.0 * std::numbers::pi * static_cast<double>(k) / static_cast<double>(count);
    Vector x = center;
    x[0] += radius * std::cos(t);
    x[1] += radius * std::sin(t);
    const ProjectionResult pr = euclid_project(s, x);
    if (pr.distance <= 1e-9) continue;
    if (!projected.empty() && (projected.back() - pr.point).norm() <= 1e-12) continue;
    projected.push_back(pr.point);
  }
  if (projected.empty()) return projected;
  Vector inner = Vector::Zero(center.size());
  for (const auto& p : projected) inner += p;
  inner /= static_cast<double>(projected.size());
  if (!strictly_inside(s, inner)) return projected;

  // Rays from an interior point, cut at the boundary by bisection.
  std::vector<Vector> out;
  for (int k = 0; k < count; ++k) {
    const double t = 2.0 * std::numbers::pi * static_cast<double>(k) / static_cast<double>(count);
    Vector dir = Vector::Zero(center.size());
    dir[0] = std::cos(t);
    dir[1] = std::sin(t);
    if (contains(s, inner + radius * dir, 0.0)) continue;
    double lo = 0.0, hi = radius;
    for (int it = 0; it < 200 && hi - lo > 1e-13 * radius; ++it) {
      const double mid = 0.5 * (lo + hi);
      (contains(s, inner + mid * dir, 0.0) ? lo : hi) = mid;
    }
    out.push_back(inner + lo * dir);
  }
  return out;
}

inline std::string plotdata_csv(const ProblemSpec& spec, const SolveStage& solved, int samples = 256) {
  if (spec.dimension != 2) return {};
  Vector center;
  double radius;
  if (spec.oracle) {
    center = 0.5 * (spec.oracle->bbox.lo + spec.oracle->bbox.hi);
    radius = 2.0 * (spec.oracle->bbox.hi - spec.oracle->bbox.lo).norm() + 1.0;
  } else {
    center = 0.5 * (solved.primary.a + solved.primary.b);
    radius = 4.0 * (solved.primary.a - solved.primary.b).norm() + 10.0;
  }
  std::ostringstream os;
  os.precision(17);
  os << "kind,x,y\n";
  auto emit = [&](int kind, const Vector& p) { os << kind << ',' << p[0] << ',' << p[1] << '\n'; };
  for (const auto& p : boundary_samples(spec.set_a(), center, radius, samples)) emit(0, p);
  for (const auto& p : boundary_samples(spec.set_b(), center, radius, samples)) emit(1, p);
  std::vector<const BapResult*> pairs;
  if (solved.multistart) {
    for (const auto& [c, run] : solved.multistart->representatives) pairs.push_back(&solved.multistart->runs[static_cast<std::size_t>(run)]);
  } else {
    pairs.push_back(&solved.primary);
  }
  for (const BapResult* r : pairs) {
    if (!r->a.allFinite() || !r->b.allFinite()) continue;
    emit(2, r->a);
    emit(3, r->b);
  }
  return os.str();
}

// ---------------------------------------------------------------------------
// Pipelines.

inline json empty_report() {
  return {{"spec_echo", nullptr}, {"solve", nullptr}, {"uniqueness", nullptr},
          {"existence", nullptr}, {"oracle", nullptr},  {"corpus", nullptr}};
}

struct PipelineResult {
  json report;
  SolveStage solved;
  std::optional<CertifyStage> certified;
  std::optional<OracleStage> oracle;
};

inline PipelineResult run_pipeline(Command cmd, const ProblemSpec& spec) {
  PipelineResult pr;
  pr.report = empty_report();
  pr.report["spec_echo"] = problem_to_json(spec);
  pr.solved = run_solve(spec);
  pr.report["solve"] = solve_json(pr.solved);
  if (cmd == Command::Certify || cmd == Command::Oracle) {
    pr.certified = run_certify(spec, pr.solved);
    pr.report["uniqueness"] = uniqueness_json(*pr.certified);
    pr.report["existence"] = existence_json(pr.certified->existence);
  }
  if (cmd == Command::Oracle) {
    pr.oracle = run_oracle(spec);
    pr.report["oracle"] = oracle_json(*pr.oracle);
  }
  return pr;
}

// ---------------------------------------------------------------------------
// Corpus checks against the ground truth stored under "expect".

struct CheckRow {
  std::string check;
  bool pass = false;
  json observed;
  json expected;
};

namespace detail {

inline bool rule_allowed(const UniquenessCertificate& c, const json& rules) {
  for (const auto& r : rules) {
    if (!r.is_string()) continue;
    if (r == c.fired_rule || (!c.corollary.empty() && r == c.corollary)) return true;
  }
  return false;
}

inline double max_coord_error(const Vector& v, const json& expected) {
  double e = 0.0;
  for (std::size_t i = 0; i < expected.size(); ++i) e = std::max(e, std::abs(v[static_cast<Eigen::Index>(i)] - expected[i].get<double>()));
  return e;
}

}  // namespace detail

inline std::vector<CheckRow> evaluate_expectations(const ProblemSpec& spec, const PipelineResult& pr) {
  const json& ex = spec.expect;
  std::vector<CheckRow> rows;
  const BapResult& r = pr.solved.primary;
  auto add = [&](std::string name, bool pass, json observed, json expected) {
    rows.push_back({std::move(name), pass, std::move(observed), std::move(expected)});
  };
  if (!ex.is_object()) return rows;

  if (ex.contains("distance")) {
    const double d = ex["distance"].get<double>();
    const double tol = ex.value("distance_tol", 1e-6);
    add("distance", std::abs(r.distance - d) <= tol, r.distance, {{"value", d}, {"tol", tol}});
  }
  if (ex.contains("distance_range")) {
    const double lo = ex["distance_range"][0].get<double>();
    const double hi = ex["distance_range"][1].get<double>();
    add("distance_range", r.distance > lo && r.distance < hi, r.distance, ex["distance_range"]);
  }
  const double coord_tol = ex.value("coord_tol", 1e-6);
  for (const char* side : {"a", "b"}) {
    if (!ex.contains(side)) continue;
    std::vector<const BapResult*> runs{&r};
    if (ex.value("all_runs", false) && pr.solved.multistart) {
      runs.clear();
      for (const auto& q : pr.solved.multistart->runs) runs.push_back(&q);
    }
    double worst = 0.0;
    for (const BapResult* q : runs) worst = std::max(worst, detail::max_coord_error(side[0] == 'a' ? q->a : q->b, ex[side]));
    add(std::string("point_") + side, worst <= coord_tol, worst, {{"value", ex[side]}, {"tol", coord_tol}});
  }
  if (ex.contains("converged")) add("converged", r.converged == ex["converged"].get<bool>(), r.converged, ex["converged"]);
  if (ex.contains("diverging")) add("diverging", r.diverging == ex["diverging"].get<bool>(), r.diverging, ex["diverging"]);
  if (pr.solved.multistart) {
    const auto& ms = *pr.solved.multistart;
    if (ex.contains("min_clusters")) add("min_clusters", ms.cluster_count >= ex["min_clusters"].get<int>(), ms.cluster_count, ex["min_clusters"]);
    if (ex.contains("max_clusters")) add("max_clusters", ms.cluster_count <= ex["max_clusters"].get<int>(), ms.cluster_count, ex["max_clusters"]);
    if (ex.contains("difference_spread_max")) {
      const double m = ex["difference_spread_max"].get<double>();
      add("difference_spread", ms.difference_spread <= m, ms.difference_spread, m);
    }
    if (ex.value("distinct_a_points", false)) {
      double closest = std::numeric_limits<double>::infinity();
      for (std::size_t i = 0; i < ms.representatives.size(); ++i)
        for (std::size_t j = i + 1; j < ms.representatives.size(); ++j)
          closest = std::min(closest, (ms.runs[static_cast<std::size_t>(ms.representatives[i].second)].a -
                                       ms.runs[static_cast<std::size_t>(ms.representatives[j].second)].a)
                                          .norm());
      const bool ok = ms.representatives.size() >= 2 && closest > 10.0 * spec.solver.params.tol;
      add("distinct_a_points", ok, std::isfinite(closest) ? json(closest) : json(nullptr), true);
    }
  } else {
    for (const char* k : {"min_clusters", "max_clusters", "difference_spread_max"})
      if (ex.contains(k)) add(k, false, nullptr, ex[k]);
  }
  if (pr.certified) {
    const auto& c = *pr.certified;
    if (ex.contains("uniqueness")) {
      add("uniqueness", ex["uniqueness"] == to_string(c.uniqueness.verdict), to_string(c.uniqueness.verdict), ex["uniqueness"]);
    }
    if (ex.contains("uniqueness_rules")) {
      add("uniqueness_rule", detail::rule_allowed(c.uniqueness, ex["uniqueness_rules"]),
          {{"fired_rule", c.uniqueness.fired_rule}, {"corollary", c.uniqueness.corollary}}, ex["uniqueness_rules"]);
    }
    if (ex.contains("uniqueness_with_witnesses")) {
      add("uniqueness_with_witnesses", ex["uniqueness_with_witnesses"] == to_string(c.with_witnesses.verdict),
          to_string(c.with_witnesses.verdict), ex["uniqueness_with_witnesses"]);
    }
    if (ex.contains("existence")) {
      add("existence", ex["existence"] == to_string(c.existence.verdict), to_string(c.existence.verdict), ex["existence"]);
    }
    if (ex.contains("existence_rules")) {
      bool ok = false;
      for (const auto& rule : ex["existence_rules"]) ok = ok || rule == c.existence.fired_rule;
      add("existence_rule", ok, c.existence.fired_rule, ex["existence_rules"]);
    }
  }
  if (ex.contains("parallel_segments")) {
    const auto* sa = spec.set_a().as<SegmentSet>();
    const auto* sb = spec.set_b().as<SegmentSet>();
    if (sa && sb) {
      const bool par = are_parallel_segments(sa->seg, sb->seg);
      add("parallel_segments", par == ex["parallel_segments"].get<bool>(), par, ex["parallel_segments"]);
    } else {
      add("parallel_segments", false, nullptr, ex["parallel_segments"]);
    }
  }
  if (pr.oracle) {
    const auto& g = pr.oracle->grid;
    if (ex.contains("oracle_distance_tol")) {
      const double tol = ex["oracle_distance_tol"].get<double>();
      add("oracle_distance", std::abs(g.dist_estimate - r.distance) <= tol, g.dist_estimate, {{"solver", r.distance}, {"tol", tol}});
    }
    if (ex.contains("oracle_a_span")) {
      const json& span = ex["oracle_a_span"];
      bool ok = g.tie_count > 0;
      for (std::size_t i = 0; ok && i < span[0].size(); ++i) {
        const auto k = static_cast<Eigen::Index>(i);
        ok = g.tie_a_lo[k] <= span[0][i].get<double>() && g.tie_a_hi[k] >= span[1][i].get<double>();
      }
      json observed = g.tie_count > 0 ? json{detail::vec_json(g.tie_a_lo), detail::vec_json(g.tie_a_hi)} : json(nullptr);
      add("oracle_a_span", ok, observed, span);
    }
    if (ex.contains("oracle_segment_fit")) {
      add("oracle_segment_fit", g.segment_fit.has_value() == ex["oracle_segment_fit"].get<bool>(), g.segment_fit.has_value(),
          ex["oracle_segment_fit"]);
    }
    if (ex.contains("oracle_all_pairs_optimal")) {
      const bool all = !g.pairs_truncated && g.optimal_pairs.size() == g.points_a * g.points_b;
      add("oracle_all_pairs_optimal", all == ex["oracle_all_pairs_optimal"].get<bool>(), all, ex["oracle_all_pairs_optimal"]);
    }
    if (ex.contains("boundary_identity") && pr.oracle->boundary) {
      const auto& h = pr.oracle->boundary->holds;
      add("boundary_identity", h.has_value() && *h == ex["boundary_identity"].get<bool>(), h ? json(*h) : json(nullptr),
          ex["boundary_identity"]);
    }
  }
  return rows;
}

inline json check_rows_json(const std::vector<CheckRow>& rows) {
  json a = json::array();
  for (const auto& c : rows) a.push_back({{"check", c.check}, {"pass", c.pass}, {"observed", c.observed}, {"expected", c.expected}});
  return a;
}

struct CorpusEntry {
  std::string file;
  std::string text;
};

struct CorpusOutcome {
  json table;
  bool all_pass = true;
  std::vector<std::pair<int, bool>> criteria;  // criterion number, pass
};

inline CorpusOutcome run_corpus(const std::vector<CorpusEntry>& corpus, const RunFlags& flags = {}) {
  CorpusOutcome out;
  json instances = json::array();
  std::map<int, bool> crit;
  for (const auto& entry : corpus) {
    json row = {{"file", entry.file}};
    bool pass = true;
    int criterion = 0;
    try {
      ProblemSpec spec = parse_problem(entry.text);
      apply_flags(spec, flags);
      row["name"] = spec.name;
      criterion = spec.expect.value("criterion", 0);
      const Command cmd = spec.oracle ? Command::Oracle : Command::Certify;
      const PipelineResult pr = run_pipeline(cmd, spec);
      const auto checks = evaluate_expectations(spec, pr);
      for (const auto& c : checks) pass = pass && c.pass;
      row["distance"] = pr.solved.primary.distance;
      row["checks"] = check_rows_json(checks);
    } catch (const std::exception& e) {
      pass = false;
      row["error"] = e.what();
    }
    row["criterion"] = criterion == 0 ? json(nullptr) : json(criterion);
    row["pass"] = pass;
    instances.push_back(row);
    out.all_pass = out.all_pass && pass;
    if (criterion > 0) {
      auto it = crit.find(criterion);
      crit[criterion] = (it == crit.end() ? true : it->second) && pass;
    }
  }
  json criteria = json::array();
  for (const auto& [c, ok] : crit) {
    criteria.push_back({{"criterion", c}, {"pass", ok}});
    out.criteria.emplace_back(c, ok);
  }
  out.table = {{"instances", instances}, {"criteria", criteria}, {"all_pass", out.all_pass}};
  return out;
}

/// One-line-per-row text rendering of the corpus table.
inline std::string corpus_table_text(const json& table) {
  std::ostringstream os;
  for (const auto& row : table["instances"]) {
    os << (row["pass"].get<bool>() ? "PASS " : "FAIL ") << row["file"].get<std::string>();
    if (!row["criterion"].is_null()) os << " (criterion " << row["criterion"].get<int>() << ")";
    os << '\n';
    if (row.contains("error")) os << "     error: " << row["error"].get<std::string>() << '\n';
    if (row.contains("checks")) {
      for (const auto& c : row["checks"]) {
        if (!c["pass"].get<bool>()) os << "     failed " << c["check"].get<std::string>() << ": observed " << c["observed"].dump() << ", expected " << c["expected"].dump() << '\n';
      }
    }
  }
  for (const auto& c : table["criteria"]) {
    os << (c["pass"].get<bool>() ? "PASS" : "FAIL") << " criterion " << c["criterion"].get<int>() << '\n';
  }
  return os.str();
}

inline RunOutcome run(Command cmd, const std::optional<ProblemSpec>& spec_in, const RunFlags& flags,
                      const std::vector<CorpusEntry>& corpus = {}) {
  RunOutcome out;
  if (cmd == Command::ReproducePaper) {
    out.report = empty_report();
    const CorpusOutcome co = run_corpus(corpus, flags);
    out.report["corpus"] = co.table;
    out.exit_code = co.all_pass ? kExitOk : kExitCorpusMismatch;
    return out;
  }
  if (!spec_in) throw SchemaError(std::vector<SchemaIssue>{{"--spec", "this command needs a problem spec"}});
  ProblemSpec spec = *spec_in;
  apply_flags(spec, flags);
  const PipelineResult pr = run_pipeline(cmd, spec);
  out.report = pr.report;
  const BapResult& r = pr.solved.primary;
  out.exit_code = (r.diverging || !r.converged) ? kExitNotConverged : kExitOk;
  if (std::find(spec.outputs.begin(), spec.outputs.end(), "plotdata") != spec.outputs.end()) {
    out.plotdata = plotdata_csv(spec, pr.solved);
  }
  return out;
}

}  // namespace bap

#endif  // BAP_REPORT_HPP
