#include "capdrum/json_io.hpp"

#include <cmath>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "capdrum/errors.hpp"

namespace capdrum {
namespace {

using nlohmann::json;

json num(double v) {
  if (std::isfinite(v)) return v;
  if (std::isnan(v)) return "nan";
  return v > 0 ? "inf" : "-inf";
}

json vec_json(const Vec& v) {
  json a = json::array();
  for (int i = 0; i < v.dim; ++i) a.push_back(v.x[i]);
  return a;
}

json ball_json(const Ball& b) {
  return {{"center", vec_json(b.center)}, {"radius", b.radius}};
}

[[noreturn]] void fail(const std::string& path, const std::string& what) {
  throw SpecParseError(path + ": " + what);
}

Vec parse_vec(const json& j, const std::string& path) {
  if (!j.is_array()) fail(path, "expected an array of coordinates");
  if (j.empty() || j.size() > 4)
    fail(path, "expected 1 to 4 coordinates, got " + std::to_string(j.size()));
  Vec v = Vec::zeros(int(j.size()));
  for (size_t i = 0; i < j.size(); ++i) {
    if (!j[i].is_number())
      fail(path + "[" + std::to_string(i) + "]", "expected a number");
    v.x[i] = j[i].get<double>();
  }
  return v;
}

double parse_number(const json& j, const std::string& path) {
  if (!j.is_number()) fail(path, "expected a number");
  return j.get<double>();
}

const json& require(const json& j, const char* key, const std::string& path) {
  auto it = j.find(key);
  if (it == j.end()) fail(path, std::string("missing field \"") + key + "\"");
  return *it;
}

void allow_only(const json& j, std::initializer_list<const char*> keys,
                const std::string& path) {
  for (auto it = j.begin(); it != j.end(); ++it) {
    bool known = false;
    for (const char* k : keys)
      if (it.key() == k) known = true;
    if (!known) fail(path + "." + it.key(), "unknown field");
  }
}

DomainSpec parse_node(const json& j, const std::string& path) {
  if (!j.is_object()) fail(path, "expected a domain object");
  const json& opj = require(j, "op", path);
  if (!opj.is_string()) fail(path + ".op", "expected a string");
  const std::string op = opj.get<std::string>();

  auto children = [&](size_t lo, size_t hi) {
    const json& a = require(j, "args", path);
    if (!a.is_array()) fail(path + ".args", "expected an array");
    if (a.size() < lo || a.size() > hi)
      fail(path + ".args", "op \"" + op + "\" takes " +
                               (lo == hi ? std::to_string(lo)
                                         : "at least " + std::to_string(lo)) +
                               " argument(s), got " + std::to_string(a.size()));
    std::vector<DomainSpec> out;
    for (size_t i = 0; i < a.size(); ++i)
      out.push_back(parse_node(a[i], path + ".args[" + std::to_string(i) + "]"));
    return out;
  };
  constexpr size_t kMany = size_t(-1);

  if (op == "ball") {
    allow_only(j, {"op", "center", "radius"}, path);
    Vec c = parse_vec(require(j, "center", path), path + ".center");
    double r = parse_number(require(j, "radius", path), path + ".radius");
    if (!(r > 0) || !std::isfinite(r))
      fail(path + ".radius", "ball radius must be a positive number");
    return DomainSpec::ball_at(c, r);
  }
  if (op == "box") {
    allow_only(j, {"op", "min", "max"}, path);
    Vec lo = parse_vec(require(j, "min", path), path + ".min");
    Vec hi = parse_vec(require(j, "max", path), path + ".max");
    if (lo.dim != hi.dim)
      fail(path + ".max", "box corners must have the same dimension");
    for (int i = 0; i < lo.dim; ++i)
      if (!(lo.x[i] < hi.x[i]))
        fail(path + ".min", "box corners must satisfy min < max on axis " +
                                std::to_string(i));
    return DomainSpec::box_at(lo, hi);
  }
  if (op == "half_space") {
    allow_only(j, {"op", "normal", "offset"}, path);
    Vec n = parse_vec(require(j, "normal", path), path + ".normal");
    if (norm(n) == 0) fail(path + ".normal", "half-space normal is zero");
    double off = parse_number(require(j, "offset", path), path + ".offset");
    return DomainSpec::half_space_at(n, off);
  }
  if (op == "full_space" || op == "empty") {
    allow_only(j, {"op", "center"}, path);
    // dimension rides along as a zero center; optional when a sibling fixes it
    int dim = 0;
    if (auto it = j.find("center"); it != j.end())
      dim = parse_vec(*it, path + ".center").dim;
    DomainSpec s = op == "empty" ? DomainSpec::none(dim > 0 ? dim : 3)
                                 : DomainSpec::full(dim > 0 ? dim : 3);
    if (dim == 0) s.center.dim = 0;
    return s;
  }
  if (op == "union" || op == "intersection") {
    allow_only(j, {"op", "args"}, path);
    auto parts = children(1, kMany);
    return op == "union" ? DomainSpec::unite(std::move(parts))
                         : DomainSpec::intersect(std::move(parts));
  }
  if (op == "complement") {
    allow_only(j, {"op", "args"}, path);
    auto parts = children(1, 1);
    return DomainSpec::complement_of(std::move(parts[0]));
  }
  if (op == "translate") {
    allow_only(j, {"op", "args", "shift"}, path);
    Vec by = parse_vec(require(j, "shift", path), path + ".shift");
    auto parts = children(1, 1);
    return DomainSpec::translated(std::move(parts[0]), by);
  }
  if (op == "scale") {
    allow_only(j, {"op", "args", "factor"}, path);
    double f = parse_number(require(j, "factor", path), path + ".factor");
    if (!(f > 0) || !std::isfinite(f))
      fail(path + ".factor", "scale factor must be a positive number");
    auto parts = children(1, 1);
    return DomainSpec::scaled(std::move(parts[0]), f);
  }
  if (op == "periodic_array") {
    allow_only(j, {"op", "args", "lattice", "counts"}, path);
    const json& lat = require(j, "lattice", path);
    if (!lat.is_array() || lat.empty())
      fail(path + ".lattice", "expected a nonempty array of vectors");
    std::vector<Vec> vecs;
    for (size_t i = 0; i < lat.size(); ++i)
      vecs.push_back(
          parse_vec(lat[i], path + ".lattice[" + std::to_string(i) + "]"));
    const json& cnt = require(j, "counts", path);
    if (!cnt.is_array() || cnt.size() != lat.size())
      fail(path + ".counts", "expected one count per lattice vector");
    std::vector<int> counts;
    for (size_t i = 0; i < cnt.size(); ++i) {
      const std::string p = path + ".counts[" + std::to_string(i) + "]";
      if (!cnt[i].is_number_integer()) fail(p, "expected an integer");
      auto k = cnt[i].get<std::int64_t>();
      if (k < 1 || k > 1000000) fail(p, "count must be in [1, 1000000]");
      counts.push_back(int(k));
    }
    auto parts = children(1, 1);
    return DomainSpec::periodic(std::move(parts[0]), std::move(vecs),
                                std::move(counts));
  }
  fail(path + ".op", "unknown op \"" + op + "\"");
}

const char* op_token(DomainSpec::Op op) {
  switch (op) {
    case DomainSpec::Op::ball: return "ball";
    case DomainSpec::Op::box: return "box";
    case DomainSpec::Op::half_space: return "half_space";
    case DomainSpec::Op::full_space: return "full_space";
    case DomainSpec::Op::empty: return "empty";
    case DomainSpec::Op::set_union: return "union";
    case DomainSpec::Op::intersection: return "intersection";
    case DomainSpec::Op::complement: return "complement";
    case DomainSpec::Op::translate: return "translate";
    case DomainSpec::Op::scale: return "scale";
    case DomainSpec::Op::periodic_array: return "periodic_array";
  }
  return "empty";
}

}  // namespace

json to_json(const DomainSpec& s) {
  json j{{"op", op_token(s.op)}};
  switch (s.op) {
    case DomainSpec::Op::ball:
      j["center"] = vec_json(s.center);
      j["radius"] = s.radius;
      break;
    case DomainSpec::Op::box:
      j["min"] = vec_json(s.box_min);
      j["max"] = vec_json(s.box_max);
      break;
    case DomainSpec::Op::half_space:
      j["normal"] = vec_json(s.normal);
      j["offset"] = s.offset;
      break;
    case DomainSpec::Op::full_space:
    case DomainSpec::Op::empty:
      if (s.center.dim > 0) j["center"] = vec_json(s.center);
      break;
    case DomainSpec::Op::translate:
      j["shift"] = vec_json(s.shift);
      break;
    case DomainSpec::Op::scale:
      j["factor"] = s.factor;
      break;
    case DomainSpec::Op::periodic_array: {
      json lat = json::array();
      for (const Vec& v : s.lattice) lat.push_back(vec_json(v));
      j["lattice"] = lat;
      j["counts"] = s.counts;
      break;
    }
    default:
      break;
  }
  if (!s.args.empty()) {
    json a = json::array();
    for (const DomainSpec& c : s.args) a.push_back(to_json(c));
    j["args"] = a;
  }
  return j;
}

DomainSpec domain_from_json(const json& j) { return parse_node(j, "$"); }

DomainSpec parse_domain_text(const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::parse_error& e) {
    throw SpecParseError(std::string("$: not valid JSON (") + e.what() + ")");
  }
  return domain_from_json(j);
}

DomainSpec load_domain_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw SpecParseError("cannot read domain file: " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_domain_text(buf.str());
}

json to_json(const ExplicitConstants& c) {
  return {{"n", c.n},
          {"gamma", c.gamma},
          {"omega_n", c.omega_n},
          {"cap_unit_ball", c.cap_unit_ball},
          {"C_lemma", c.C_lemma},
          {"N_cov", c.N_cov},
          {"kappa", c.kappa},
          {"c_lower", c.c_lower},
          {"C_upper", c.C_upper},
          {"A_iso", c.A_iso}};
}

json to_json(const CapacityEstimate& e) {
  const char* method = e.method == CapacityMethod::grid  ? "grid"
                       : e.method == CapacityMethod::wos ? "wos"
                                                         : "analytic";
  return {{"value", e.value},
          {"method", method},
          {"resolution", e.resolution},
          {"error_indicator", e.error_indicator},
          {"single_cell_warning", e.single_cell_warning}};
}

json to_json(const EigenResult& e) {
  json j{{"lambda", e.lambda},
         {"h", e.h},
         {"iterations", e.iterations},
         {"residual", e.residual}};
  j["extrapolated"] = e.extrapolated ? json(*e.extrapolated) : json(nullptr);
  return j;
}

json to_json(const TestFunctionReport& r) {
  return {{"ball", ball_json(r.ball)},
          {"kappa", r.kappa},
          {"rayleigh", r.rayleigh},
          {"cutoff_bound", r.cutoff_bound},
          {"potential_sup_check", r.potential_sup_check},
          {"negligible_input", r.negligible_input}};
}

json to_json(const NegligibilityVerdict& v) {
  return {{"ball", ball_json(v.ball)},
          {"cap_diff", to_json(v.cap_diff)},
          {"cap_ball", v.cap_ball},
          {"ratio", v.ratio},
          {"negligible", v.negligible},
          {"borderline", v.borderline},
          {"gamma", v.gamma}};
}

json to_json(const RadiusResult& r) {
  const char* status = r.status == RadiusStatus::finite     ? "finite"
                       : r.status == RadiusStatus::infinite ? "infinite"
                                                            : "zero";
  const char* kind = r.kind == RadiusKind::capacitary ? "capacitary"
                     : r.kind == RadiusKind::measure  ? "measure"
                                                      : "essential";
  json j{{"radius", num(r.radius)},
         {"status", status},
         {"kind", kind},
         {"center_spacing", r.center_spacing},
         {"radius_step", r.radius_step},
         {"radius_grid", r.radius_grid},
         {"truncation_warning", r.truncation_warning}};
  j["witness"] = r.witness ? ball_json(*r.witness) : json(nullptr);
  j["witness_verdict"] =
      r.witness_verdict ? to_json(*r.witness_verdict) : json(nullptr);
  json seq = json::array();
  for (const auto& p : r.essential_sequence)
    seq.push_back(json::array({p[0], num(p[1])}));
  j["essential_sequence"] = seq;
  return j;
}

json to_json(const BoundsReport& r) {
  const char* verdict = r.verdict == Verdict::sandwich_holds   ? "sandwich-holds"
                        : r.verdict == Verdict::violated_lower ? "violated-lower"
                        : r.verdict == Verdict::violated_upper ? "violated-upper"
                                                               : "oracle-missing";
  json j{{"gamma", r.gamma},
         {"n", r.n},
         {"radius", to_json(r.radius)},
         {"constants", to_json(r.constants)},
         {"lower", num(r.lower)},
         {"verdict", verdict},
         {"eps_radius", r.eps_radius},
         {"eps_cap", r.eps_cap},
         {"eps_eig", r.eps_eig},
         {"eps_total", r.eps_total},
         {"discrete_spectrum", r.discrete_spectrum}};
  j["upper"] = r.upper ? num(*r.upper) : json(nullptr);
  j["oracle_lambda"] = r.oracle_lambda ? to_json(*r.oracle_lambda) : json(nullptr);
  j["construction_upper"] =
      r.construction_upper ? num(*r.construction_upper) : json(nullptr);
  j["alpha"] = r.alpha ? json(*r.alpha) : json(nullptr);
  return j;
}

std::string dump_json(const json& j) { return j.dump(2) + "\n"; }

}  // namespace capdrum
