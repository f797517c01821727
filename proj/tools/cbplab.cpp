#include <unistd.h>

#include <CLI11.hpp>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <json.hpp>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "cbp/bodies.hpp"
#include "cbp/busemann_petty.hpp"
#include "cbp/embedding.hpp"
#include "cbp/fourier.hpp"
#include "cbp/frames.hpp"
#include "cbp/quadrature.hpp"
#include "cbp/sections.hpp"
#include "cbp/spec_parse.hpp"

namespace fs = std::filesystem;
using json = nlohmann::json;
using namespace cbp;

namespace {

constexpr const char* kVersion = "cbplab-1";

enum Exit { kOk = 0, kError = 1, kInconclusive = 2 };

struct Globals {
  std::optional<std::uint64_t> seed;
  std::optional<long> nodes;
  int workers = 1;
  double tol = 1e-6;
  bool no_cache = false;
  std::string cache_dir;
  std::string out;
  std::string csv;
};

std::string fnv1a(const std::string& s) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : s) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

void write_atomic(const fs::path& path, const std::string& text) {
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  const fs::path tmp = path.string() + ".tmp." + std::to_string(::getpid());
  {
    std::ofstream os(tmp, std::ios::binary | std::ios::trunc);
    if (!os) throw Error("cannot write " + tmp.string());
    os << text;
    if (!os.flush()) throw Error("cannot write " + tmp.string());
  }
  fs::rename(tmp, path);
}

std::string read_file(const fs::path& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw Error("cannot read " + path.string());
  std::ostringstream ss;
  ss << is.rdbuf();
  return ss.str();
}

// ---------------------------------------------------------------------------
// Cache

fs::path cache_root(const Globals& g) {
  if (!g.cache_dir.empty()) return g.cache_dir;
  if (const char* env = std::getenv("CBPLAB_CACHE_DIR"); env && *env) return env;
  return ".cbplab-cache";
}

std::optional<json> cache_get(const Globals& g, const std::string& hash, const std::string& canonical) {
  if (g.no_cache) return std::nullopt;
  const fs::path path = cache_root(g) / (hash + ".json");
  if (!fs::exists(path)) return std::nullopt;
  try {
    const json entry = json::parse(read_file(path));
    const json& record = entry.at("record");
    if (entry.at("canonical").get<std::string>() != canonical ||
        entry.at("checksum").get<std::string>() != fnv1a(record.dump()))
      throw Error("checksum mismatch");
    return record;
  } catch (const std::exception& e) {
    std::cerr << "warning: ignoring corrupted cache entry " << path.string() << " (" << e.what() << ")\n";
    return std::nullopt;
  }
}

void cache_put(const Globals& g, const std::string& hash, const std::string& canonical, const json& record) {
  if (g.no_cache) return;
  const json entry = {{"canonical", canonical}, {"checksum", fnv1a(record.dump())}, {"record", record}};
  try {
    write_atomic(cache_root(g) / (hash + ".json"), entry.dump());
  } catch (const std::exception& e) {
    std::cerr << "warning: cache write failed: " << e.what() << "\n";
  }
}

// ---------------------------------------------------------------------------
// Serialization helpers

json to_json(const Estimate& e) {
  return {{"value", e.value}, {"stderr", e.std_err}, {"bias", e.bias}, {"nodes", e.nodes}, {"method", e.method}};
}

json to_json(const Polynomial& p) {
  json terms = json::array();
  for (const auto& [e, c] : p.terms()) {
    std::vector<int> ex(e.begin(), e.end());
    terms.push_back({ex, c});
  }
  return {{"dim", p.dim()}, {"terms", terms}};
}

Polynomial polynomial_from_json(const json& j) {
  Polynomial p(j.at("dim").get<int>());
  for (const auto& t : j.at("terms")) {
    const auto ex = t.at(0).get<std::vector<int>>();
    p.add_term(Polynomial::Exponent(ex.begin(), ex.end()), t.at(1).get<double>());
  }
  return p;
}

json sample_json(const std::string& body, const FtSample& s) {
  return {{"body", body},           {"xi", s.xi},           {"p", s.p},
          {"value", s.value()},     {"stderr", s.est.std_err}, {"bias", s.est.bias},
          {"nodes", s.est.nodes},   {"method", s.method()}, {"flagged", s.flagged}};
}

json scan_json(const EmbeddingVerdict& v) {
  json values = json::array();
  for (const auto& gv : v.values)
    values.push_back({{"xi", gv.xi},
                      {"value", gv.sample.value()},
                      {"stderr", gv.sample.est.std_err},
                      {"bias", gv.sample.est.bias},
                      {"method", gv.sample.method()},
                      {"noisy", gv.noisy}});
  return {{"body", v.body},
          {"p", v.p},
          {"grid", v.grid},
          {"conclusion", to_string(v.conclusion)},
          {"min_value", v.min_value},
          {"min_stderr", v.min_stderr},
          {"argmin", v.argmin},
          {"confirmation",
           {{"primary", sample_json(v.body, v.agreement.primary)},
            {"confirm", sample_json(v.body, v.agreement.confirm)},
            {"gap_sigmas", v.agreement.gap_sigmas},
            {"agree", v.agreement.agree}}},
          {"diagnostics", v.diagnostics},
          {"values", values}};
}

json bp_json(const BpReport& r) {
  json gaps = json::array();
  for (const auto& s : r.gaps)
    gaps.push_back({{"xi", s.xi}, {"a_k", s.a_k}, {"a_l", s.a_l}, {"gap", s.gap.value}, {"gap_err", s.gap.total_error()}});
  return {{"k", r.k_spec},
          {"l", r.l_spec},
          {"grid", r.grid},
          {"verdict", to_string(r.verdict)},
          {"tie", r.tie},
          {"flags", r.flags},
          {"max_gap", r.max_gap},
          {"max_gap_err", r.max_gap_err},
          {"max_gap_xi", r.max_gap_xi},
          {"vol_k", to_json(r.vol_k)},
          {"vol_l", to_json(r.vol_l)},
          {"vol_diff", to_json(r.vol_diff)},
          {"gaps", gaps}};
}

std::string csv_number(double v) { return format_number(v); }

std::string csv_xi(const Vec& xi) {
  std::string s;
  for (std::size_t i = 0; i < xi.size(); ++i) s += (i ? ";" : "") + csv_number(xi[i]);
  return s;
}

// ---------------------------------------------------------------------------
// Closed forms for baselines

double classical_constant(int d, double p) {
  return std::pow(2.0, d - p) * std::pow(kPi, 0.5 * d) * std::tgamma(0.5 * (d - p)) / std::tgamma(0.5 * p);
}

double clq_volume(int n, double q) {
  return std::pow(kPi, n) * std::pow(std::tgamma(1.0 + 2.0 / q), n) / std::tgamma(1.0 + 2.0 * n / q);
}

json baseline(const std::string& name, double expected, const Estimate& e, double tol) {
  const double allowed = tol * std::abs(expected) + 3.0 * e.total_error();
  return {{"name", name},           {"expected", expected},         {"value", e.value},
          {"error", e.total_error()}, {"allowed", allowed},          {"pass", std::abs(e.value - expected) <= allowed}};
}

/// Kind and parameters of a plain ball or complex l_q body spec.
struct Family {
  enum { other, ball, clq } kind = other;
  int dim = 0;
  double q = 0.0;
};

Family family_of(const std::string& spec) {
  const SpecNode node = parse_spec(spec);
  Family f;
  if (node.kind == "ball") {
    f.kind = Family::ball;
    f.dim = node.integer("dim");
  } else if (node.kind == "clq") {
    f.kind = Family::clq;
    f.dim = 2 * node.integer("n");
    f.q = node.number("q");
  }
  return f;
}

// ---------------------------------------------------------------------------
// Config plumbing

SphereRule rule_with_overrides(const std::string& spec, const Globals& g) {
  SphereRule r = SphereRule::parse(spec);
  if (r.kind() == RuleKind::product_gauss) {
    if (g.nodes) throw SpecError("--nodes applies to mc/qmc rules, got '" + spec + "'");
    return r;
  }
  if (g.nodes)
    r = r.kind() == RuleKind::monte_carlo ? SphereRule::monte_carlo(*g.nodes, r.seed())
                                          : SphereRule::quasi_monte_carlo(*g.nodes, r.seed());
  if (g.seed) r = r.with_seed(*g.seed);
  return r;
}

Vec parse_vector(const std::string& text) {
  Vec v;
  std::stringstream ss(text);
  std::string tok;
  while (std::getline(ss, tok, ',')) {
    try {
      v.push_back(parse_number(tok));
    } catch (const std::exception&) {
      throw SpecError("bad vector component '" + tok + "' in '" + text + "'");
    }
  }
  if (v.empty()) throw SpecError("empty vector '" + text + "'");
  return v;
}

/// Directions from --xi or --grid.
std::vector<Vec> directions(const std::string& xi, const std::string& grid, int dim, std::string* grid_spec) {
  if (!xi.empty() && !grid.empty()) throw SpecError("use either --xi or --grid");
  if (!xi.empty()) {
    Vec v = parse_vector(xi);
    if (static_cast<int>(v.size()) != dim)
      throw SpecError("--xi has " + std::to_string(v.size()) + " components, body dimension is " + std::to_string(dim));
    return {normalized(v)};
  }
  const DirectionGrid g = parse_grid(grid.empty() ? "grid:dim=" + std::to_string(dim) + ",res=8,reduce=orbit" : grid);
  if (g.dim != dim) throw SpecError("grid dimension " + std::to_string(g.dim) + " differs from body dimension");
  *grid_spec = g.spec();
  return g.points;
}

struct Outcome {
  json record;  // results, baselines_checked, status
  std::string csv;
};

using Compute = std::function<Outcome()>;

int run(const std::string& command, json inputs, const Globals& g, const Compute& compute,
        const std::function<void(const json&)>& after = nullptr) {
  inputs["command"] = command;
  inputs["version"] = kVersion;
  const std::string canonical = inputs.dump();
  const std::string hash = fnv1a(canonical);

  json record;
  bool cached = false;
  if (auto hit = cache_get(g, hash, canonical)) {
    record = std::move(*hit);
    cached = true;
  } else {
    Outcome o = compute();
    o.record["csv"] = o.csv;
    record = std::move(o.record);
    cache_put(g, hash, canonical, record);
  }

  json report = {{"config_hash", hash},
                 {"inputs", inputs},
                 {"cached", cached},
                 {"status", record.at("status")},
                 {"results", record.at("results")},
                 {"baselines_checked", record.value("baselines_checked", json::array())}};
  if (record.contains("pair")) report["pair"] = record.at("pair");
  const std::string text = report.dump(2) + "\n";
  if (g.out.empty())
    std::cout << text;
  else
    write_atomic(g.out, text);
  if (!g.csv.empty()) write_atomic(g.csv, record.value("csv", std::string()));
  if (after) after(report);

  bool baselines_ok = true;
  for (const auto& b : report["baselines_checked"]) baselines_ok = baselines_ok && b.at("pass").get<bool>();
  const std::string status = report["status"];
  if (status == "error" || !baselines_ok) return kError;
  return status == "inconclusive" ? kInconclusive : kOk;
}

// ---------------------------------------------------------------------------
// Commands

int cmd_volume(const std::string& body_spec, const std::string& rule_spec, const Globals& g) {
  const BodyPtr body = parse_body(body_spec);
  const SphereRule rule = rule_with_overrides(rule_spec, g);
  json inputs = {{"body", body->spec()}, {"rule", rule.spec()}, {"tol", g.tol}};
  return run("volume", inputs, g, [&] {
    const Estimate v = volume(*body, rule);
    json res = to_json(v);
    res["body"] = body->spec();
    res["seed"] = rule.seed();
    json baselines = json::array();
    const Family f = family_of(body_spec);
    if (f.kind == Family::ball) baselines.push_back(baseline("ball_volume", ball_volume(f.dim), v, g.tol));
    if (f.kind == Family::clq) baselines.push_back(baseline("clq_volume_dirichlet", clq_volume(f.dim / 2, f.q), v, g.tol));
    return Outcome{{{"status", "ok"}, {"results", json::array({res})}, {"baselines_checked", baselines}},
                   "body,value,stderr,nodes\n" + body->spec() + "," + csv_number(v.value) + "," +
                       csv_number(v.std_err) + "," + std::to_string(v.nodes) + "\n"};
  });
}

int cmd_section(const std::string& body_spec, const std::string& xi, const std::string& grid, int m,
                const std::string& rule_spec, const Globals& g) {
  const BodyPtr body = parse_body(body_spec);
  const SphereRule rule = rule_with_overrides(rule_spec, g);
  if (m < 0 || m > 2) throw SpecError("--m must be 0, 1 or 2");
  std::string grid_spec;
  const auto dirs = directions(xi, grid, body->dim(), &grid_spec);
  json inputs = {{"body", body->spec()}, {"m", m}, {"rule", rule.spec()}, {"tol", g.tol}};
  if (grid_spec.empty())
    inputs["xi"] = dirs[0];
  else
    inputs["grid"] = grid_spec;
  return run("section", inputs, g, [&] {
    json results = json::array();
    json baselines = json::array();
    std::string csv = "xi,m,value,stderr,bias,nodes\n";
    const Family f = family_of(body_spec);
    const int d = body->dim();
    for (const Vec& dir : dirs) {
      const ComplexFrame frame = make_frame(dir);
      const Estimate e = m == 0 ? section_volume(*body, frame, rule) : laplacian_at_zero(*body, frame, m, rule);
      json r = to_json(e);
      r["body"] = body->spec();
      r["xi"] = dir;
      r["m"] = m;
      r["seed"] = rule.seed();
      results.push_back(r);
      csv += csv_xi(dir) + "," + std::to_string(m) + "," + csv_number(e.value) + "," + csv_number(e.std_err) + "," +
             csv_number(e.bias) + "," + std::to_string(e.nodes) + "\n";
      if (f.kind == Family::ball) {
        // A(u) = kappa_{d-2} (1 - |u|^2)^{(d-2)/2}
        const double k = ball_volume(d - 2);
        const double expected = m == 0 ? k : m == 1 ? -2.0 * (d - 2) * k : 8.0 * (d - 2) * (d - 4) * k;
        baselines.push_back(baseline("ball_section_m" + std::to_string(m), expected, e, std::max(g.tol, m ? 0.02 : 0.0)));
      }
    }
    return Outcome{{{"status", "ok"}, {"results", results}, {"baselines_checked", baselines}}, csv};
  });
}

int cmd_ft(const std::string& body_spec, const std::string& xi, const std::string& grid, double p,
           const std::string& route, const std::string& rule_spec, const Globals& g) {
  const BodyPtr body = parse_body(body_spec);
  const SphereRule rule = rule_with_overrides(rule_spec, g);
  if (route != "auto" && route != "derivative" && route != "fractional" && route != "pairing")
    throw SpecError("unknown route '" + route + "'");
  std::string grid_spec;
  const auto dirs = directions(xi, grid, body->dim(), &grid_spec);
  json inputs = {{"body", body->spec()}, {"p", p}, {"route", route}, {"rule", rule.spec()}, {"tol", g.tol}};
  if (grid_spec.empty())
    inputs["xi"] = dirs[0];
  else
    inputs["grid"] = grid_spec;
  return run("ft", inputs, g, [&] {
    const int n = body->dim() / 2;
    json results = json::array();
    json baselines = json::array();
    std::string csv = "xi,p,value,stderr,bias,method,flagged\n";
    bool flagged = false;
    const Family f = family_of(body_spec);
    for (const Vec& dir : dirs) {
      FtSample s;
      if (route == "auto") {
        s = ft_primary(*body, dir, p, rule);
      } else if (route == "derivative") {
        int m = 0;
        if (!derivative_reachable(n, p, &m)) throw UnsupportedRouteError("p is not of the form 2n - 2m - 2");
        s = ft_derivative_route(*body, dir, m, rule);
      } else if (route == "fractional") {
        s = ft_fractional_route(*body, dir, 2.0 * n - 2.0 - p, rule);
      } else {
        s = pairing_oracle(*body, dir, p, rule);
      }
      flagged = flagged || s.flagged;
      results.push_back(sample_json(body->spec(), s));
      csv += csv_xi(dir) + "," + csv_number(p) + "," + csv_number(s.value()) + "," + csv_number(s.est.std_err) + "," +
             csv_number(s.est.bias) + "," + s.method() + "," + (s.flagged ? "1" : "0") + "\n";
      if (f.kind == Family::ball)
        baselines.push_back(baseline("ball_classical_transform", classical_constant(body->dim(), p), s.est,
                                     std::max(g.tol, route == "pairing" ? 0.02 : 0.0)));
    }
    return Outcome{{{"status", flagged ? "inconclusive" : "ok"}, {"results", results}, {"baselines_checked", baselines}},
                   csv};
  });
}

int cmd_scan(const std::string& body_spec, const std::vector<double>& ps, const std::string& grid_text,
             const std::string& rule_spec, const std::string& confirm_spec, const Globals& g) {
  const BodyPtr body = parse_body(body_spec);
  if (ps.empty()) throw SpecError("scan needs at least one --p");
  const DirectionGrid grid = parse_grid(grid_text.empty() ? "grid:dim=" + std::to_string(body->dim()) +
                                                                ",res=16,reduce=orbit"
                                                          : grid_text);
  ScanRules rules;
  if (!rule_spec.empty()) rules.primary = rule_with_overrides(rule_spec, g);
  if (!confirm_spec.empty()) rules.confirm = rule_with_overrides(confirm_spec, g);
  if (rule_spec.empty() && (g.nodes || g.seed)) rules.primary = rule_with_overrides(rules.primary.spec(), g);
  if (confirm_spec.empty() && (g.nodes || g.seed)) rules.confirm = rule_with_overrides(rules.confirm.spec(), g);
  require_compatible(*body, grid);
  json inputs = {{"body", body->spec()},          {"p", ps},
                 {"grid", grid.spec()},           {"rule", rules.primary.spec()},
                 {"confirm_rule", rules.confirm.spec()}, {"max_refine", rules.max_refine},
                 {"pairing_sigma", rules.pairing.sigma}};
  return run("scan", inputs, g, [&] {
    const auto verdicts = embedding_interval(*body, ps, grid, rules);
    json results = json::array();
    std::string csv = "p,xi,value,stderr,bias,method,noisy\n";
    bool inconclusive = false;
    for (double p : ps) {
      const EmbeddingVerdict& v = verdicts.at(p);
      inconclusive = inconclusive || v.conclusion == Conclusion::inconclusive;
      results.push_back(scan_json(v));
      for (const auto& gv : v.values)
        csv += csv_number(p) + "," + csv_xi(gv.xi) + "," + csv_number(gv.sample.value()) + "," +
               csv_number(gv.sample.est.std_err) + "," + csv_number(gv.sample.est.bias) + "," + gv.sample.method() +
               "," + (gv.noisy ? "1" : "0") + "\n";
    }
    return Outcome{{{"status", inconclusive ? "inconclusive" : "ok"}, {"results", results}}, csv};
  });
}

std::string bp_csv(const BpReport& r) {
  std::string csv = "xi,a_k,a_l,gap,gap_err\n";
  for (const auto& s : r.gaps)
    csv += csv_xi(s.xi) + "," + csv_number(s.a_k) + "," + csv_number(s.a_l) + "," + csv_number(s.gap.value) + "," +
           csv_number(s.gap.total_error()) + "\n";
  return csv;
}

json pair_json(const Construction& c) {
  return {{"l", c.L->spec()},
          {"k", c.K->spec()},
          {"n", c.options.n},
          {"exponent", c.K->exponent()},
          {"eps", c.eps},
          {"g", to_json(c.g)},
          {"f", to_json(c.f)},
          {"atoms", c.atoms},
          {"coefficients", c.coefficients},
          {"floor", c.floor},
          {"min_eigenvalue", c.min_eigenvalue},
          {"predicted_pairing", c.predicted_pairing},
          {"eps_trace", c.eps_trace},
          {"verify_grid", c.verify_grid.spec()},
          {"verify_sections_rule", c.options.verify.sections.spec()},
          {"verify_volume_rule", c.options.verify.volume.spec()}};
}

int cmd_bp_construct(int n, double q, double width, int max_degree, const Globals& g) {
  ConstructOptions opt;
  opt.n = n;
  opt.q_body = q;
  opt.width = width;
  opt.max_degree = max_degree;
  if (g.seed) opt.grid_seed = *g.seed;
  json inputs = {{"n", n},
                 {"q", q},
                 {"width", width},
                 {"max_degree", max_degree},
                 {"grid_resolution", opt.grid_resolution},
                 {"verify_resolution", opt.verify_resolution},
                 {"grid_seed", opt.grid_seed},
                 {"scan_rule", opt.scan.primary.spec()},
                 {"confirm_rule", opt.scan.confirm.spec()},
                 {"sections_rule", opt.verify.sections.spec()},
                 {"volume_rule", opt.verify.volume.spec()},
                 {"multiplier_rule", opt.multiplier_rule.spec()},
                 {"simplex_level", opt.simplex_level},
                 {"floor_fraction", opt.floor_fraction},
                 {"convexity_samples", opt.convexity_samples},
                 {"convexity_seed", opt.convexity_seed},
                 {"max_halvings", opt.max_halvings}};
  return run("bp-construct", inputs, g, [&] {
    try {
      const Construction c = bp_construct(opt);
      json res = bp_json(c.report);
      res["eps"] = c.eps;
      res["scan"] = scan_json(c.scan);
      res["scan"].erase("values");
      const bool ok = c.report.verdict == BpVerdict::violation;
      return Outcome{{{"status", ok ? "ok" : "inconclusive"}, {"results", json::array({res})}, {"pair", pair_json(c)}},
                     bp_csv(c.report)};
    } catch (const ConstructionError& e) {
      json res = {{"verdict", "construction_impossible"}, {"reason", e.what()}};
      return Outcome{{{"status", "inconclusive"}, {"results", json::array({res})}}, ""};
    }
  });
}

int cmd_bp_verify(const std::string& k_spec, const std::string& l_spec, const std::string& grid_text,
                  const std::string& pair_path, const std::string& sections_spec, const std::string& volume_spec,
                  double refine, const Globals& g) {
  BodyPtr K, L;
  DirectionGrid grid;
  BpRules rules;
  json inputs;
  json pair;
  if (!pair_path.empty()) {
    if (!k_spec.empty() || !l_spec.empty()) throw SpecError("use either --pair or --k/--l");
    const json doc = json::parse(read_file(pair_path));
    if (!doc.contains("pair")) throw SpecError("'" + pair_path + "' holds no constructed pair");
    pair = doc.at("pair");
    L = parse_body(pair.at("l").get<std::string>());
    K = make_perturbed(L, polynomial_from_json(pair.at("g")), pair.at("eps").get<double>(), pair.at("n").get<int>());
    grid = parse_grid(grid_text.empty() ? pair.at("verify_grid").get<std::string>() : grid_text);
    rules.sections = SphereRule::parse(pair.at("verify_sections_rule").get<std::string>());
    rules.volume = SphereRule::parse(pair.at("verify_volume_rule").get<std::string>());
    inputs["parent_config_hash"] = doc.at("config_hash");
    inputs["pair_checksum"] = fnv1a(pair.dump());
  } else {
    if (k_spec.empty() || l_spec.empty()) throw SpecError("bp-verify needs --pair or both --k and --l");
    K = parse_body(k_spec);
    L = parse_body(l_spec);
    grid = parse_grid(grid_text.empty() ? "grid:dim=" + std::to_string(K->dim()) + ",res=8,reduce=torus" : grid_text);
  }
  if (!sections_spec.empty()) rules.sections = rule_with_overrides(sections_spec, g);
  if (!volume_spec.empty()) rules.volume = rule_with_overrides(volume_spec, g);
  if (volume_spec.empty() && (g.nodes || g.seed)) rules.volume = rule_with_overrides(rules.volume.spec(), g);
  if (refine != 1.0) rules = rules.with_more_nodes(K->dim(), refine);
  inputs["k"] = K->spec();
  inputs["l"] = L->spec();
  inputs["grid"] = grid.spec();
  inputs["sections_rule"] = rules.sections.spec();
  inputs["volume_rule"] = rules.volume.spec();
  return run("bp-verify", inputs, g, [&] {
    const BpReport r = bp_verify(*K, *L, grid, rules);
    json res = bp_json(r);
    if (!pair.empty()) res["parent_config_hash"] = inputs["parent_config_hash"];
    return Outcome{{{"status", r.tie ? "inconclusive" : "ok"}, {"results", json::array({res})}}, bp_csv(r)};
  });
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Sections, transforms and volume comparison for complex star bodies"};
  app.require_subcommand(1);
  app.fallthrough();
  Globals g;
  std::uint64_t seed = 0;
  long nodes = 0;
  app.add_option("--seed", seed, "seed override for random rules");
  app.add_option("--nodes", nodes, "node count override for random rules");
  app.add_option("--workers", g.workers, "worker threads (results do not depend on it)")->check(CLI::PositiveNumber);
  app.add_option("--tol", g.tol, "relative tolerance for closed-form baselines");
  app.add_flag("--no-cache", g.no_cache, "recompute and do not touch the cache");
  app.add_option("--cache-dir", g.cache_dir, "cache root (default $CBPLAB_CACHE_DIR or .cbplab-cache)");
  app.add_option("--out", g.out, "report path (stdout when absent)");
  app.add_option("--csv", g.csv, "per-direction CSV table");

  std::string body, rule, xi, grid, route = "auto", confirm, k, l, pair, sections_rule, volume_rule;
  int m = 0, n = 4, max_degree = 4;
  double p = 2.0, q = 4.0, width = 0.05, refine = 1.0;
  std::vector<double> ps;

  auto* vol = app.add_subcommand("volume", "volume of a body");
  vol->add_option("--body", body, "body spec")->required();
  vol->add_option("--rule", rule, "sphere rule")->default_val("qmc:n=2^16,seed=1");

  auto* sec = app.add_subcommand("section", "central section volume or Delta^m A(0)");
  sec->add_option("--body", body, "body spec")->required();
  sec->add_option("--xi", xi, "direction, comma separated");
  sec->add_option("--grid", grid, "direction grid spec");
  sec->add_option("--m", m, "0: section volume, 1 or 2: Laplacian power at 0")->default_val(0);
  sec->add_option("--rule", rule, "sphere rule")->default_val("qmc:n=2^14,seed=1");

  auto* ft = app.add_subcommand("ft", "Fourier transform of ||x||^{-p} on the sphere");
  ft->add_option("--body", body, "body spec")->required();
  ft->add_option("--p", p, "exponent")->required();
  ft->add_option("--xi", xi, "direction, comma separated");
  ft->add_option("--grid", grid, "direction grid spec");
  ft->add_option("--route", route, "auto|derivative|fractional|pairing")->default_val("auto");
  ft->add_option("--rule", rule, "sphere rule")->default_val("qmc:n=2^12,seed=1");

  auto* sc = app.add_subcommand("scan", "sign scan of the transform over a grid");
  sc->add_option("--body", body, "body spec")->required();
  sc->add_option("--p", ps, "exponent(s)")->required();
  sc->add_option("--grid", grid, "direction grid spec");
  sc->add_option("--rule", rule, "primary route rule");
  sc->add_option("--confirm-rule", confirm, "pairing oracle rule at the argmin");

  auto* bv = app.add_subcommand("bp-verify", "compare central sections and volumes of K and L");
  bv->add_option("--k", k, "body K");
  bv->add_option("--l", l, "body L");
  bv->add_option("--pair", pair, "pair file written by bp-construct");
  bv->add_option("--grid", grid, "direction grid spec");
  bv->add_option("--rule", sections_rule, "section rule");
  bv->add_option("--volume-rule", volume_rule, "volume rule");
  bv->add_option("--refine", refine, "node multiplier for both rules")->default_val(1.0);

  auto* bc = app.add_subcommand("bp-construct", "construct a pair with smaller sections and larger volume");
  bc->add_option("--n", n, "complex dimension")->default_val(4);
  bc->add_option("--q", q, "l_q exponent of the base body")->default_val(4.0);
  bc->add_option("--width", width, "mollifier width")->default_val(0.05);
  bc->add_option("--max-degree", max_degree, "degree of the squared harmonic combination")->default_val(4);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kError;
  }
  if (app.count("--seed")) g.seed = seed;
  if (app.count("--nodes")) g.nodes = nodes;
  set_worker_count(g.workers);

  try {
    if (*vol) return cmd_volume(body, rule, g);
    if (*sec) return cmd_section(body, xi, grid, m, rule, g);
    if (*ft) return cmd_ft(body, xi, grid, p, route, rule, g);
    if (*sc) return cmd_scan(body, ps, grid, rule, confirm, g);
    if (*bv) return cmd_bp_verify(k, l, grid, pair, sections_rule, volume_rule, refine, g);
    if (*bc) return cmd_bp_construct(n, q, width, max_degree, g);
  } catch (const SpecError& e) {
    std::cerr << "usage error: " << e.what() << "\n";
    return kError;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kError;
  }
  return kError;
}
