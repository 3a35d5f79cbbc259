// umla: command-line front end. JSON in, JSON out.
// Exit codes: 0 ok, 1 mathematical precondition failure (JSON {code, witness}
// on stdout), 2 usage error (message on stderr).

#include <CLI11.hpp>
#include <fstream>
#include <iostream>
#include <sstream>

#include "umla/acceptance.hpp"
#include "umla/json_io.hpp"

using namespace umla;
using io::FormatError;
using io::json;

namespace {

struct Globals {
  std::string field;
  std::vector<std::string> in;
  std::string dist, out, lambda = "full";
  long budget = 6;
  int jobs = 1;
  uint64_t seed = 1;
} G;

/// Inputs of the running command; copied into error witnesses.
json ctx = json::object();

json read_json(const std::string& path) {
  std::ifstream f(path);
  if (!f) throw FormatError("cannot open " + path);
  try {
    return json::parse(f);
  } catch (const json::parse_error& e) {
    throw FormatError(path + ": " + e.what());
  }
}

std::string read_text(const std::string& path) {
  std::ifstream f(path);
  if (!f) throw FormatError("cannot open " + path);
  std::stringstream s;
  s << f.rdbuf();
  return s.str();
}

void emit_text(const std::string& s) {
  if (G.out.empty()) {
    std::cout << s;
    return;
  }
  std::ofstream f(G.out);
  if (!f) throw FormatError("cannot write " + G.out);
  f << s;
}

void emit(const json& j) { emit_text(j.dump(2) + "\n"); }

/// --field wins; otherwise the "field" key of the first document.
AnyField resolve_field(const json* doc = nullptr) {
  if (!G.field.empty()) {
    try {
      return parse_field(G.field);
    } catch (const std::invalid_argument& e) {
      throw FormatError(e.what());
    }
  }
  if (doc && doc->is_object() && doc->contains("field")) return io::field_from_json((*doc)["field"]);
  throw FormatError("no field given: pass --field Qp:<p> or Fpt:<p>");
}

template <class Fn>
void with_field(const AnyField& K, Fn&& fn) {
  std::visit([&](const auto& k) { fn(k); }, K);
}

const std::string& one_input(const char* what) {
  if (G.in.size() != 1) throw FormatError(std::string(what) + " needs exactly one --in file");
  return G.in[0];
}

const std::string& dist_path() {
  if (G.dist.empty()) throw FormatError("--dist is required");
  return G.dist;
}

std::vector<long> parse_range(const std::string& s) {
  std::vector<long> out;
  try {
    auto dots = s.find("..");
    if (dots != std::string::npos) {
      long a = std::stol(s.substr(0, dots)), b = std::stol(s.substr(dots + 2));
      if (b < a) throw FormatError("empty range " + s);
      for (long v = a; v <= b; ++v) out.push_back(v);
      return out;
    }
    std::string cur;
    for (char c : s + ",") {
      if (c == ',') {
        out.push_back(std::stol(cur));
        cur.clear();
      } else {
        cur += c;
      }
    }
  } catch (const FormatError&) {
    throw;
  } catch (const std::exception&) {
    throw FormatError("bad range '" + s + "' (use a..b or a,b,c)");
  }
  return out;
}

// Schwartz-Bruhat commands ---------------------------------------------------

void cmd_fourier() {
  json doc = read_json(one_input("fourier"));
  ctx["in"] = G.in;
  with_field(resolve_field(&doc), [&](const auto& K) { emit(io::sb_json(fourier_sb(io::sb_from(K, doc)))); });
}

void cmd_convolve() {
  if (G.in.size() != 2) throw FormatError("convolve needs two --in files");
  json a = read_json(G.in[0]), b = read_json(G.in[1]);
  ctx["in"] = G.in;
  with_field(resolve_field(&a), [&](const auto& K) { emit(io::sb_json(convolve_sb(io::sb_from(K, a), io::sb_from(K, b)))); });
}

void cmd_integrate() {
  json doc = read_json(one_input("integrate"));
  ctx["in"] = G.in;
  with_field(resolve_field(&doc), [&](const auto& K) {
    Cyclo v = io::sb_from(K, doc).integrate();
    emit({{"field", io::field_json(K)}, {"integral", io::cyclo_json(v)}, {"text", v.str()}});
  });
}

// Distribution commands -----------------------------------------------------

void cmd_dist_eval() {
  json d = read_json(dist_path()), t = read_json(one_input("dist eval"));
  ctx["dist"] = G.dist;
  ctx["in"] = G.in;
  with_field(resolve_field(&d), [&](const auto& K) {
    Cyclo v = evaluate(io::dist_from(K, d), io::sb_from(K, t));
    emit({{"value", io::cyclo_json(v)}, {"text", v.str()}});
  });
}

void cmd_dist_fourier() {
  json d = read_json(dist_path());
  ctx["dist"] = G.dist;
  with_field(resolve_field(&d), [&](const auto& K) { emit(io::dist_json(fourier_dist(io::dist_from(K, d)))); });
}

void cmd_dist_bfun(const std::string& x, long r) {
  json d = read_json(dist_path());
  ctx["dist"] = G.dist;
  ctx["x"] = x;
  ctx["r"] = r;
  with_field(resolve_field(&d), [&](const auto& K) {
    auto u = io::dist_from(K, d);
    auto pt = io::vec_from_text(K, x);
    if (pt.size() != u.n) throw FormatError("point has the wrong dimension");
    Cyclo v = b_function(u, pt, r);
    emit({{"x", io::vec_json(K, pt)}, {"r", r}, {"value", io::cyclo_json(v)}, {"text", v.str()}});
  });
}

void cmd_dist_additivity(long trials) {
  json d = read_json(dist_path());
  ctx["dist"] = G.dist;
  ctx["seed"] = G.seed;
  with_field(resolve_field(&d), [&](const auto& K) {
    using F = std::decay_t<decltype(K)>;
    auto u = io::dist_from(K, d);
    std::mt19937_64 g(G.seed);
    std::uniform_int_distribution<long> rad(-2, 3);
    long fails = 0;
    json witness;
    for (long t = 0; t < trials; ++t) {
      Vec<F> c(u.n);
      for (auto& x : c) x = K.random(g, -2, 2);
      auto B = Polyball<F>::equal(K, c, rad(g));
      if (!additivity_check(u, B)) {
        if (!fails) witness = io::ball_json(K, B);
        ++fails;
      }
    }
    json j{{"trials", trials}, {"failures", fails}, {"pass", fails == 0}};
    if (fails) j["witness"] = witness;
    emit(j);
  });
}

// Wave fronts ---------------------------------------------------------------

void cmd_wf_exact() {
  json d = read_json(dist_path());
  ctx["dist"] = G.dist;
  with_field(resolve_field(&d), [&](const auto& K) {
    auto L = io::lambda_from_text(K, G.lambda);
    json j = io::cone_json(wavefront_exact(io::dist_from(K, d)));
    j["lambda"] = io::lambda_json(L);
    emit(j);
  });
}

void cmd_wf_test(const std::string& x, const std::string& xi) {
  json d = read_json(dist_path());
  ctx["dist"] = G.dist;
  ctx["x"] = x;
  ctx["xi"] = xi;
  ctx["lambda"] = G.lambda;
  ctx["budget"] = G.budget;
  with_field(resolve_field(&d), [&](const auto& K) {
    auto u = io::dist_from(K, d);
    auto L = io::lambda_from_text(K, G.lambda);
    auto x0 = io::vec_from_text(K, x), xi0 = io::vec_from_text(K, xi);
    if (x0.size() != u.n || xi0.size() != u.n) throw FormatError("point and covector need dimension " + std::to_string(u.n));
    json j = io::verdict_json(K, is_smooth_at(u, x0, xi0, L, G.budget));
    j["lambda"] = io::lambda_json(L);
    emit(j);
  });
}

/// "x1,..:t1,..;x1,..:t1,.."
template <class F>
std::vector<PrescribePoint<F>> parse_points(const F& K, const std::string& s) {
  std::vector<PrescribePoint<F>> out;
  std::string cur;
  for (char c : s + ";") {
    if (c != ';') {
      cur += c;
      continue;
    }
    if (cur.empty()) continue;
    auto colon = cur.find(':');
    if (colon == std::string::npos) throw FormatError("points are written x:theta, got '" + cur + "'");
    out.push_back({io::vec_from_text(K, cur.substr(0, colon)), io::vec_from_text(K, cur.substr(colon + 1))});
    cur.clear();
  }
  return out;
}

void cmd_wf_prescribe(const std::string& points, long m, const std::vector<std::string>& probes) {
  ctx["points"] = points;
  ctx["m"] = m;
  ctx["lambda"] = G.lambda;
  with_field(resolve_field(), [&](const auto& K) {
    auto L = io::lambda_from_text(K, G.lambda);
    auto pts = parse_points(K, points);
    size_t d = pts.empty() ? 1 : pts[0].x.size();
    auto u = prescribe_wavefront(K, L, d, pts, m);
    json ids = json::array();
    for (auto& c : identity_checks(u))
      ids.push_back({{"k", c.k}, {"value", io::cyclo_json(c.value)}, {"stated", io::cyclo_json(c.stated)}, {"derived", io::cyclo_json(c.derived)},
                     {"stated_holds", c.value == c.stated}, {"derived_holds", c.value == c.derived}});
    json pr = json::array();
    for (auto& s : probes) {
      auto P = parse_points(K, s);
      for (auto& q : P) {
        auto pc = probe_check(u, L, q.x, q.theta);
        pr.push_back({{"x", io::vec_json(K, pc.x)}, {"xi", io::vec_json(K, pc.xi)}, {"gamma", pc.gamma}, {"resolved", pc.resolved},
                      {"checked", pc.checked}, {"violations", pc.violations}});
      }
    }
    emit({{"lambda", io::lambda_json(L)}, {"lambda_element", io::elem_json(K, u.lambda)}, {"e", u.e}, {"m", m},
          {"truncated", io::dist_json(u.truncated(m))}, {"identities", ids}, {"probes", pr}});
  });
}

// Maps ----------------------------------------------------------------------

template <bool Push>
void cmd_map(const std::string& map_path) {
  json d = read_json(dist_path()), mj = read_json(map_path);
  ctx["dist"] = G.dist;
  ctx["map"] = mj;
  with_field(resolve_field(&d), [&](const auto& K) {
    auto u = io::dist_from(K, d);
    auto f = io::map_from(K, mj);
    if ((Push ? f.n : f.m) != u.n) throw FormatError("map and distribution dimensions do not match");
    emit(io::dist_json(Push ? pushforward(u, f) : pullback(u, f)));
  });
}

// Stationary phase ----------------------------------------------------------

void cmd_phase_bound() {
  json doc = read_json(one_input("phase-bound"));
  ctx["in"] = G.in;
  ctx["seed"] = G.seed;
  with_field(resolve_field(&doc), [&](const auto& K) {
    std::vector<std::string> vars = io::need(doc, "vars").get<std::vector<std::string>>();
    auto P = parse_poly(K, io::need(doc, "phase").get<std::string>(), vars);
    json pj = io::need(doc, "phi");
    if (!pj.contains("field")) pj["field"] = io::field_json(K);
    auto phi = io::sb_from(K, pj);
    auto V = io::ball_from(K, io::need(doc, "V"));
    mpq_class delta = io::rational_from(io::need(doc, "delta"));
    long window = doc.contains("window") ? io::as_long(doc["window"]) : 2;
    auto L = io::lambda_from_text(K, G.lambda);
    std::mt19937_64 g(G.seed);
    auto B = stationary_phase_bound(P, phi, V, delta, L, g, window);
    json rho = json::object();
    for (auto& [s, r] : B.rho) rho[std::to_string(s)] = io::ord_json(r);
    json checks = json::array();
    for (auto& c : B.checks)
      checks.push_back({{"ord_lambda", c.ord_lambda}, {"lambda", io::elem_json(K, c.lambda)}, {"eta", io::vec_json(K, c.eta)},
                        {"value", io::cyclo_json(c.value)}});
    emit({{"r", B.r}, {"T", B.T}, {"G", B.G}, {"G_certified", io::ord_json(B.G_certified)}, {"L", B.L}, {"rho", rho},
          {"checks", checks}, {"violations", B.violations}, {"confirmed", B.confirmed}});
  });
}

// Sequences -----------------------------------------------------------------

void cmd_seq_check() {
  json doc = read_json(one_input("seq check"));
  ctx["in"] = G.in;
  with_field(resolve_field(&doc), [&](const auto& K) {
    using F = std::decay_t<decltype(K)>;
    size_t n = static_cast<size_t>(io::as_long(io::need(doc, "n")));
    auto with_field_key = [&](json j) {
      if (j.is_object() && !j.contains("field")) j["field"] = io::field_json(K);
      if (j.is_object() && !j.contains("n")) j["n"] = n;
      return j;
    };
    std::vector<Dist<F>> seq;
    for (auto& u : io::need(doc, "seq")) seq.push_back(io::dist_from(K, with_field_key(u)));
    Dist<F> limit = doc.contains("limit") ? io::dist_from(K, with_field_key(doc["limit"])) : Dist<F>(K, n);
    LambdaCone<F> cone = doc.contains("cone") ? io::cone_from(K, with_field_key(doc["cone"])) : LambdaCone<F>(K, n);
    std::vector<SB<F>> tests;
    for (auto& t : io::need(doc, "tests")) tests.push_back(io::sb_from(K, with_field_key(t)));
    std::vector<SGammaProbe<F>> probes;
    if (doc.contains("probes"))
      for (auto& p : doc["probes"]) probes.push_back({io::sb_from(K, with_field_key(io::need(p, "chi"))), io::vec_from(K, io::need(p, "eta"), n)});
    double tol = doc.contains("tol") ? io::rational_from(doc["tol"]).get_d() : 1.0 / 16;
    auto L = io::lambda_from_text(K, G.lambda);
    auto rep = sgamma_convergence_check(seq, limit, cone, L, tests, probes, tol);
    json th = json::array();
    for (auto& row : rep.thresholds) {
      json r = json::array();
      for (long v : row) r.push_back(io::ord_json(v));
      th.push_back(r);
    }
    emit({{"s_prime", rep.s_prime}, {"condition2", rep.condition2}, {"gaps", rep.gaps}, {"thresholds", th}, {"detail", rep.detail}});
  });
}

// cexp ----------------------------------------------------------------------

json sorts_json(const cexp::Checked& C) {
  json s = json::object();
  for (auto& [v, so] : C.free) s[v] = cexp::sort_name(so);
  return s;
}

void cmd_cexp_eval(const std::string& expr, const std::string& ast, const std::vector<std::string>& env) {
  if (expr.empty() == ast.empty()) throw FormatError("give either an expression or --ast");
  cexp::Checked C = ast.empty() ? cexp::compile(expr) : cexp::typecheck(io::ast_from(read_json(ast)));
  std::string text = cexp::print(C.root);
  ctx["expr"] = text;
  ctx["env"] = env;
  with_field(resolve_field(), [&](const auto& K) {
    auto E = cexp::parse_env(K, C, env);
    for (auto& [v, so] : C.free)
      if (!E.vf.count(v) && !E.z.count(v) && !E.rf.count(v)) throw FormatError("unbound variable '" + v + "' (use --env " + v + "=...)");
    Cyclo v = cexp::eval(C, K, E);
    emit({{"field", io::field_json(K)}, {"expr", text}, {"sorts", sorts_json(C)}, {"value", io::cyclo_json(v)}, {"text", v.str()}});
  });
}

void cmd_cexp_parse(const std::string& expr) {
  auto C = cexp::compile(expr);
  emit({{"expr", cexp::print(C.root)}, {"ast", io::ast_json(C.root)}, {"sorts", sorts_json(C)}});
}

void cmd_cexp_dis(const std::string& fields, const std::string& family, long trials, const std::string& y) {
  auto fam = cexp::parse_family_file(read_text(family));
  std::vector<std::string> names;
  std::string cur;
  for (char c : fields + ",") {
    if (c == ',') {
      if (!cur.empty()) names.push_back(cur);
      cur.clear();
    } else {
      cur += c;
    }
  }
  if (names.empty()) throw FormatError("--fields is empty");
  json rows = json::array();
  bool all = true;
  std::mt19937_64 g(G.seed);
  for (auto& nm : names) {
    std::optional<AnyField> F;
    try {
      F = parse_field(nm);
    } catch (const std::invalid_argument& e) {
      throw FormatError(e.what());
    }
    with_field(*F, [&](const auto& K) {
      using FT = std::decay_t<decltype(K)>;
      Vec<FT> yv = y.empty() ? Vec<FT>{} : io::vec_from_text(K, y);
      if (yv.size() != fam.y.size()) throw FormatError("family has " + std::to_string(fam.y.size()) + " parameters; pass them with --y");
      auto row = cexp::dis_sample(fam, K, yv, trials, g);
      all = all && row.pass;
      json r{{"field", row.field}, {"y", row.y}, {"trials", row.trials}, {"additivity_failures", row.additivity_failures},
             {"welldef_failures", row.welldef_failures}, {"eval_errors", row.eval_errors}, {"pass", row.pass}};
      if (!row.witness.empty()) r["witness"] = row.witness;
      rows.push_back(r);
    });
  }
  emit({{"family", cexp::print(fam.E.root)}, {"point", fam.x}, {"radius", fam.r}, {"params", fam.y}, {"rows", rows}, {"pass", all}});
}

// Fibers --------------------------------------------------------------------

void cmd_fiber_integrate(const std::string& f, const std::string& y) {
  ctx["f"] = f;
  ctx["y"] = y;
  ctx["in"] = G.in;
  json doc;
  if (!G.in.empty()) doc = read_json(one_input("fiber integrate"));
  with_field(resolve_field(G.in.empty() ? nullptr : &doc), [&](const auto& K) {
    using F = std::decay_t<decltype(K)>;
    FiberProblem<F> P(K, ZPoly::parse(f));
    SB<F> phi = G.in.empty() ? indicator(K, Polyball<F>::equal(K, Vec<F>{K.zero()}, 0)) : io::sb_from(K, doc);
    if (phi.n != 1) throw FormatError("fiber integration needs a one-variable test function");
    auto yy = io::vec_from_text(K, y);
    if (yy.size() != 1) throw FormatError("--y is a single field element");
    auto fv = fiber_integrate(P, phi, yy[0]);
    json pts = json::array();
    for (auto& c : fv.points) pts.push_back({{"center", io::elem_json(K, c.center)}, {"level", c.level}, {"fprime_ord", c.fprime_ord}});
    emit({{"field", io::field_json(K)}, {"f", ZPoly::parse(f).str("x")}, {"y", io::elem_json(K, yy[0])}, {"value", io::cyclo_json(fv.value)},
          {"text", fv.value.str()}, {"points", pts}, {"stable", io::ord_json(fv.stable)}});
  });
}

void cmd_fiber_roots(const std::string& gsrc, long k) {
  ctx["g"] = gsrc;
  ctx["k"] = k;
  with_field(resolve_field(), [&](const auto& K) {
    auto g = ZPoly::parse(gsrc);
    auto roots = padic_roots(K, g, k);
    json r = json::array();
    for (auto& x : roots) r.push_back(io::elem_json(K, x));
    emit({{"field", io::field_json(K)}, {"g", g.str("x")}, {"k", k}, {"roots", r}});
  });
}

void cmd_fiber_levels(const std::string& f, const std::string& eps, const std::string& ms, long cap, long max_res) {
  ctx["f"] = f;
  with_field(resolve_field(), [&](const auto& K) {
    using F = std::decay_t<decltype(K)>;
    FiberProblem<F> P(K, ZPoly::parse(f));
    emit(io::level_report_json(level_measure(P, parse_range(eps), parse_range(ms), cap, max_res, G.jobs)));
  });
}

// selftest ------------------------------------------------------------------

int cmd_selftest(int only) {
  std::ostringstream out;
  int passed = 0, total = 0;
  for (int i = 1; i <= 11; ++i) {
    if (only && i != only) continue;
    ++total;
    passed += acceptance::report(i, out, G.jobs);
  }
  out << passed << "/" << total << " criteria pass\n";
  emit_text(out.str());
  return passed == total ? 0 : 1;
}

int fail_math(const std::string& code, const std::string& msg) {
  json w = ctx;
  w["message"] = msg;
  std::cout << json{{"code", code}, {"witness", w}}.dump(2) << "\n";
  return 1;
}

int fail_usage(const std::string& msg) {
  std::cerr << "umla: error: " << msg << "\n";
  return 2;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Exact harmonic and microlocal analysis over Q_p and F_p((t))"};
  app.fallthrough();
  app.require_subcommand(1);
  app.add_option("--field", G.field, "field descriptor Qp:<p> or Fpt:<p>");
  app.add_option("--in", G.in, "input JSON file (repeatable)")->allow_extra_args(false);
  app.add_option("--dist", G.dist, "distribution JSON file");
  app.add_option("--out", G.out, "write the result here instead of stdout");
  app.add_option("--lambda", G.lambda, "Lambda subgroup: full | d,m[,ord:unit...]");
  app.add_option("--budget", G.budget, "search budget for smoothness tests")->check(CLI::NonNegativeNumber);
  app.add_option("--jobs", G.jobs, "worker threads")->check(CLI::PositiveNumber);
  app.add_option("--seed", G.seed, "random seed");

  std::function<int()> run;
  auto set = [&](CLI::App* s, std::function<void()> f) {
    s->callback([&run, f] { run = [f] { f(); return 0; }; });
  };

  set(app.add_subcommand("fourier", "Fourier transform of an SB function"), cmd_fourier);
  set(app.add_subcommand("convolve", "convolution of two SB functions"), cmd_convolve);
  set(app.add_subcommand("integrate", "Haar integral of an SB function"), cmd_integrate);

  auto* dist = app.add_subcommand("dist", "distribution commands");
  dist->require_subcommand(1);
  set(dist->add_subcommand("eval", "pair --dist with the SB function --in"), cmd_dist_eval);
  set(dist->add_subcommand("fourier", "Fourier transform of --dist"), cmd_dist_fourier);
  std::string bx;
  long br = 0;
  auto* bfun = dist->add_subcommand("bfun", "B-function value on one ball");
  bfun->add_option("--x", bx, "ball center, comma separated")->required();
  bfun->add_option("--r", br, "ball radius")->required();
  set(bfun, [&] { cmd_dist_bfun(bx, br); });
  long add_trials = 100;
  auto* add = dist->add_subcommand("check-additivity", "sample additivity over random balls");
  add->add_option("--trials", add_trials)->check(CLI::PositiveNumber);
  set(add, [&] { cmd_dist_additivity(add_trials); });

  auto* wf = app.add_subcommand("wf", "wave-front commands");
  wf->require_subcommand(1);
  set(wf->add_subcommand("exact", "exact Lambda-wave-front cone of --dist"), cmd_wf_exact);
  std::string wx, wxi;
  auto* wtest = wf->add_subcommand("test", "smoothness verdict at (x, xi)");
  wtest->add_option("--x", wx, "base point")->required();
  wtest->add_option("--xi", wxi, "covector")->required();
  set(wtest, [&] { cmd_wf_test(wx, wxi); });
  std::string ppts;
  long pm = 3;
  std::vector<std::string> pprobes;
  auto* presc = wf->add_subcommand("prescribe", "distribution with prescribed wave front");
  presc->add_option("--points", ppts, "x:theta;x:theta...")->required();
  presc->add_option("--m", pm, "truncation")->check(CLI::NonNegativeNumber);
  presc->add_option("--probe", pprobes, "off-cone probe x:xi (repeatable)")->allow_extra_args(false);
  set(presc, [&] { cmd_wf_prescribe(ppts, pm, pprobes); });

  std::string map_path;
  auto* pull = app.add_subcommand("pullback", "pull-back of --dist along --map");
  pull->add_option("--map", map_path, "affine map JSON {A, b}")->required();
  set(pull, [&] { cmd_map<false>(map_path); });
  auto* push = app.add_subcommand("pushforward", "push-forward of --dist along --map");
  push->add_option("--map", map_path, "affine map JSON {A, b}")->required();
  set(push, [&] { cmd_map<true>(map_path); });

  set(app.add_subcommand("phase-bound", "certified stationary-phase vanishing bound"), cmd_phase_bound);

  auto* seq = app.add_subcommand("seq", "sequence commands");
  seq->require_subcommand(1);
  set(seq->add_subcommand("check", "S'_Gamma convergence check"), cmd_seq_check);

  auto* cx = app.add_subcommand("cexp", "exponential-class expressions");
  cx->require_subcommand(1);
  std::string cexpr, cast;
  std::vector<std::string> cenv;
  auto* ceval = cx->add_subcommand("eval", "evaluate an expression");
  ceval->add_option("expr", cexpr, "expression text");
  ceval->add_option("--ast", cast, "JSON AST file instead of text");
  ceval->add_option("--env", cenv, "binding name=value (repeatable)")->allow_extra_args(false);
  set(ceval, [&] { cmd_cexp_eval(cexpr, cast, cenv); });
  std::string pexpr;
  auto* cparse = cx->add_subcommand("parse", "print the JSON AST and inferred sorts");
  cparse->add_option("expr", pexpr)->required();
  set(cparse, [&] { cmd_cexp_parse(pexpr); });
  std::string dfields = "Qp:2,Qp:3,Qp:5", dfam, dy;
  long dtrials = 100;
  auto* cdis = cx->add_subcommand("dis", "sample whether a family defines distributions");
  cdis->add_option("--fields", dfields, "comma separated field descriptors");
  cdis->add_option("--family", dfam, "family file")->required();
  cdis->add_option("--trials", dtrials)->check(CLI::PositiveNumber);
  cdis->add_option("--y", dy, "parameter values, comma separated");
  set(cdis, [&] { cmd_cexp_dis(dfields, dfam, dtrials, dy); });

  auto* fib = app.add_subcommand("fiber", "fiber integration for one-variable polynomials");
  fib->require_subcommand(1);
  std::string ff = "x^2", fy, fg, feps = "0..4", fms = "0..3";
  long fk = 2, fcap = 2, fmax = 14;
  auto* fint = fib->add_subcommand("integrate", "f_!(phi)(y); phi from --in, default 1_O");
  fint->add_option("--f", ff, "polynomial in x with integer coefficients");
  fint->add_option("--y", fy, "target value")->required();
  set(fint, [&] { cmd_fiber_integrate(ff, fy); });
  auto* froots = fib->add_subcommand("roots", "zeros in O of g, modulo p^k");
  froots->add_option("--g", fg, "polynomial in x")->required();
  froots->add_option("--k", fk, "precision")->check(CLI::PositiveNumber);
  set(froots, [&] { cmd_fiber_roots(fg, fk); });
  auto* flev = fib->add_subcommand("levels", "constancy levels near the discriminant");
  flev->add_option("--f", ff, "polynomial in x");
  flev->add_option("--eps", feps, "distance levels, a..b or list");
  flev->add_option("--m", fms, "probe levels, a..b or list");
  flev->add_option("--cap", fcap, "largest fitted coefficient")->check(CLI::NonNegativeNumber);
  flev->add_option("--max-resolution", fmax, "finest scanned level")->check(CLI::PositiveNumber);
  set(flev, [&] { cmd_fiber_levels(ff, feps, fms, fcap, fmax); });

  int only = 0;
  auto* self = app.add_subcommand("selftest", "run the acceptance suite");
  self->add_option("--criterion", only, "run a single criterion")->check(CLI::Range(1, 11));
  self->callback([&] { run = [&] { return cmd_selftest(only); }; });

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }
  if (!run) return fail_usage("no command");
  try {
    return run();
  } catch (const cexp::CexpError& e) {
    if (e.kind == "EvalError") return fail_math(e.kind, e.what());
    std::string where = !e.path.empty() ? " (node " + e.path + ")" : "";
    return fail_usage(e.kind + ": " + e.what() + where);
  } catch (const MathError& e) {
    return fail_math(e.code, e.what());
  } catch (const FormatError& e) {
    return fail_usage(e.what());
  } catch (const json::exception& e) {
    return fail_usage(std::string("bad JSON input: ") + e.what());
  } catch (const std::invalid_argument& e) {
    return fail_usage(e.what());
  } catch (const std::domain_error& e) {
    return fail_math("DomainError", e.what());
  } catch (const std::exception& e) {
    return fail_math("Failure", e.what());
  }
}
