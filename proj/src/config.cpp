#include "alloy/config.hpp"

#include "alloy/random.hpp"

#include <json.hpp>

#include <fstream>
#include <sstream>

namespace alloy {

using nlohmann::json;

namespace {

[[noreturn]] void fail(const std::string& field, const std::string& what) {
  throw ConfigError("config field '" + field + "': " + what);
}

std::string join(const std::string& parent, const std::string& key) {
  return parent.empty() ? key : parent + "." + key;
}

const json& require(const json& obj, const std::string& parent, const std::string& key) {
  if (!obj.is_object()) fail(parent, "expected an object");
  const auto it = obj.find(key);
  if (it == obj.end()) fail(join(parent, key), "required field is missing");
  return *it;
}

double number(const json& v, const std::string& field) {
  if (!v.is_number()) fail(field, "expected a number");
  return v.get<double>();
}

long integer(const json& v, const std::string& field) {
  if (!v.is_number_integer()) fail(field, "expected an integer");
  return v.get<long>();
}

std::size_t count(const json& v, const std::string& field) {
  const long n = integer(v, field);
  if (n < 0) fail(field, "expected a non-negative integer");
  return static_cast<std::size_t>(n);
}

std::vector<double> numbers(const json& v, const std::string& field) {
  if (!v.is_array() || v.empty()) fail(field, "expected a non-empty array of numbers");
  std::vector<double> out;
  for (std::size_t i = 0; i < v.size(); ++i) out.push_back(number(v[i], field + "[" + std::to_string(i) + "]"));
  return out;
}

Interval interval(const json& v, const std::string& field) {
  const auto xs = numbers(v, field);
  if (xs.size() != 2 || !(xs[0] < xs[1])) fail(field, "expected [lower, upper] with lower < upper");
  return {xs[0], xs[1]};
}

Site site(const json& v, int d, const std::string& field) {
  if (!v.is_array() || static_cast<int>(v.size()) != d) fail(field, "expected an array of " + std::to_string(d) + " integers");
  Site s(d);
  for (int i = 0; i < d; ++i) s(i) = static_cast<int>(integer(v[i], field));
  return s;
}

double optional_number(const json& obj, const std::string& parent, const std::string& key, double fallback) {
  const auto it = obj.find(key);
  return it == obj.end() ? fallback : number(*it, join(parent, key));
}

SingleSitePotential potential(const json& v, int d) {
  const std::string field = "potential";
  if (!v.is_object()) fail(field, "expected an object");
  if (v.contains("preset")) {
    const auto& p = v["preset"];
    if (p != "delta") fail("potential.preset", "unknown preset (known: delta)");
    return SingleSitePotential::delta(d);
  }
  const auto& terms = require(v, field, "terms");
  if (!terms.is_array() || terms.empty()) fail("potential.terms", "expected a non-empty array");
  std::vector<PotentialTerm> out;
  for (std::size_t i = 0; i < terms.size(); ++i) {
    const std::string f = "potential.terms[" + std::to_string(i) + "]";
    out.push_back({site(require(terms[i], f, "offset"), d, f + ".offset"), number(require(terms[i], f, "value"), f + ".value")});
  }
  try {
    return SingleSitePotential(std::move(out));
  } catch (const std::invalid_argument& e) {
    fail(field, e.what());
  }
}

DisorderDensity density(const json& v) {
  const std::string field = "density";
  if (!v.is_object()) fail(field, "expected an object");
  try {
    if (v.contains("preset")) {
      const auto& p = v["preset"];
      if (p == "bump") {
        const auto s = v.contains("support") ? interval(v["support"], "density.support") : Interval{0.0, 1.0};
        return DisorderDensity::bump(s.lower, s.upper);
      }
      if (p == "raised_cosine")
        return DisorderDensity::raised_cosine(number(require(v, field, "center"), "density.center"),
                                              number(require(v, field, "half_width"), "density.half_width"));
      fail("density.preset", "unknown preset (known: bump, raised_cosine)");
    }
    const auto& pieces = require(v, field, "pieces");
    if (!pieces.is_array() || pieces.empty()) fail("density.pieces", "expected a non-empty array");
    std::vector<double> knots;
    std::vector<Polynomial<double>> polys;
    for (std::size_t i = 0; i < pieces.size(); ++i) {
      const std::string f = "density.pieces[" + std::to_string(i) + "]";
      const auto I = interval(require(pieces[i], f, "interval"), f + ".interval");
      if (!knots.empty() && knots.back() != I.lower) fail(f + ".interval", "pieces must be contiguous");
      if (knots.empty()) knots.push_back(I.lower);
      knots.push_back(I.upper);
      const auto c = numbers(require(pieces[i], f, "coefficients"), f + ".coefficients");
      polys.emplace_back(Eigen::Map<const Eigen::VectorXd>(c.data(), static_cast<Eigen::Index>(c.size())));
    }
    return DisorderDensity::piecewise(PiecewisePolynomial<double>(knots, polys), v.value("name", "piecewise"));
  } catch (const std::invalid_argument& e) {
    fail(field, e.what());
  }
}

SweepSection sweep(const json& v, const std::string& field) {
  return {number(require(v, field, "center"), field + ".center"), numbers(require(v, field, "widths"), field + ".widths")};
}

IdsSection ids_section(const json& v, const std::string& field) {
  IdsSection s;
  s.L_ids = static_cast<int>(integer(require(v, field, "L_ids"), field + ".L_ids"));
  s.realizations = count(require(v, field, "realizations"), field + ".realizations");
  s.step = optional_number(v, field, "step", 1e-3);
  if (s.L_ids < 1) fail(field + ".L_ids", "must be >= 1");
  if (!(s.step > 0)) fail(field + ".step", "must be positive");
  if (v.contains("pos")) {
    const auto& p = v["pos"];
    const std::string f = field + ".pos";
    PosSection pos;
    pos.kappa = optional_number(p, f, "kappa", 0.0);
    pos.a = optional_number(p, f, "a", -1.0);
    pos.b = optional_number(p, f, "b", 1.0);
    pos.epsilons = numbers(require(p, f, "epsilons"), f + ".epsilons");
    s.pos = pos;
  }
  return s;
}

}  // namespace

std::string fnv1a_hex(std::string_view bytes) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  std::ostringstream out;
  out << std::hex;
  out.width(16);
  out.fill('0');
  out << h;
  return out.str();
}

std::string config_digest(std::string_view text) { return parse_config(text).digest; }

std::uint64_t ids_seed(std::uint64_t seed) { return splitmix64(seed ^ 0x49445321ULL); }

LabConfig parse_config(std::string_view text, std::string_view source) {
  json root;
  try {
    root = json::parse(text.begin(), text.end());
  } catch (const json::parse_error& e) {
    throw ConfigError(std::string(source) + ": " + e.what());
  }
  if (!root.is_object()) throw ConfigError(std::string(source) + ": top level must be an object");

  LabConfig c;
  c.canonical = root.dump();
  c.digest = fnv1a_hex(c.canonical);

  auto& m = c.model;
  m.d = static_cast<int>(integer(require(root, "", "d"), "d"));
  if (m.d < 1 || m.d > 4) fail("d", "must be between 1 and 4");
  m.L = static_cast<int>(integer(require(root, "", "L"), "L"));
  if (m.L < 0) fail("L", "must be >= 0");
  m.lambda = number(require(root, "", "lambda"), "lambda");
  if (!(m.lambda >= 0)) fail("lambda", "must be >= 0");
  m.u = root.contains("potential") ? potential(root["potential"], m.d) : SingleSitePotential::delta(m.d);
  m.density = root.contains("density") ? density(root["density"]) : DisorderDensity::bump(0.0, 1.0);
  if (root.contains("laplacian")) {
    const auto& l = root["laplacian"];
    if (l == "adjacency") m.laplacian = Laplacian::adjacency;
    else if (l == "shifted") m.laplacian = Laplacian::shifted;
    else fail("laplacian", "expected \"adjacency\" or \"shifted\"");
  }
  if (root.contains("sites")) {
    const auto& s = root["sites"];
    m.x = site(require(s, "sites", "x"), m.d, "sites.x");
    m.y = site(require(s, "sites", "y"), m.d, "sites.y");
  } else if (m.L >= 1) {
    m.x = origin(m.d);
    m.y = unit_vector(m.d, 0);
  }
  const Box box = m.box();
  if (m.x.size() != 0 && (!box.contains(m.x) || !box.contains(m.y))) fail("sites", "x and y must lie in Lambda_L");
  if (m.x.size() != 0 && m.x == m.y) fail("sites", "x and y must differ");
  m.digest = c.digest;

  if (root.contains("seed")) {
    const long s = integer(root["seed"], "seed");
    if (s < 0) fail("seed", "must be non-negative");
    c.seed = static_cast<std::uint64_t>(s);
  }
  if (root.contains("samples")) c.samples = count(root["samples"], "samples");

  if (root.contains("minami")) {
    const auto& v = root["minami"];
    MinamiSection s{numbers(require(v, "minami", "energies"), "minami.energies"),
                    number(require(v, "minami", "eta"), "minami.eta")};
    if (!(s.eta > 0)) fail("minami.eta", "must be positive");
    c.minami = s;
  }
  if (root.contains("wegner")) c.wegner = sweep(root["wegner"], "wegner");
  if (root.contains("two_ev")) c.two_ev = sweep(root["two_ev"], "two_ev");
  if (root.contains("fvc")) {
    const auto& v = root["fvc"];
    FvcSection s;
    s.energy = number(require(v, "fvc", "energy"), "fvc.energy");
    s.theta = number(require(v, "fvc", "theta"), "fvc.theta");
    const auto& radii = require(v, "fvc", "radii");
    if (!radii.is_array() || radii.empty()) fail("fvc.radii", "expected a non-empty array of integers");
    for (const auto& r : radii) s.radii.push_back(static_cast<int>(integer(r, "fvc.radii")));
    c.fvc = s;
  }
  if (root.contains("fmb")) {
    const auto& v = root["fmb"];
    c.fmb = FmbSection{number(require(v, "fmb", "energy"), "fmb.energy"),
                       number(require(v, "fmb", "epsilon"), "fmb.epsilon"), optional_number(v, "fmb", "s", 0.5)};
  }
  if (root.contains("ids")) c.ids = ids_section(root["ids"], "ids");
  if (root.contains("spacing")) {
    const auto& v = root["spacing"];
    SpacingSection s;
    if (v.contains("mode")) {
      if (!v["mode"].is_string()) fail("spacing.mode", "expected a string");
      s.mode = v["mode"].get<std::string>();
      if (s.mode != "pipeline" && s.mode != "poisson" && s.mode != "picket_fence")
        fail("spacing.mode", "expected pipeline, poisson or picket_fence");
    }
    if (s.mode == "pipeline") s.ids = ids_section(require(v, "spacing", "ids"), "spacing.ids");
    if (v.contains("window")) s.window = interval(v["window"], "spacing.window");
    c.spacing = s;
  }
  return c;
}

LabConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("cannot open config file " + path.string());
  std::ostringstream text;
  text << in.rdbuf();
  return parse_config(text.str(), path.string());
}

}  // namespace alloy
