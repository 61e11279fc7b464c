#include "alloy/cli.hpp"
#include "alloy/config.hpp"

#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

using namespace alloy;
namespace fs = std::filesystem;

namespace {

const char* kDelta = R"({
  "d": 1, "L": 3, "lambda": 2.0,
  "potential": {"preset": "delta"},
  "density": {"preset": "bump", "support": [0.0, 1.0]},
  "sites": {"x": [0], "y": [1]},
  "seed": 99,
  "minami": {"energies": [0.5, 1.0], "eta": 0.05},
  "wegner": {"center": 1.0, "widths": [0.05, 0.1, 0.2]}
})";

fs::path scratch(const std::string& name) {
  const fs::path dir = fs::temp_directory_path() / "alloy_lab_tests" / name;
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}

fs::path write(const fs::path& path, const std::string& text) {
  std::ofstream(path) << text;
  return path;
}

std::string slurp(const fs::path& path) {
  std::ifstream in(path);
  std::stringstream s;
  s << in.rdbuf();
  return s.str();
}

struct Run {
  int code;
  std::string out, err;
};

Run lab(std::vector<std::string> args) {
  args.insert(args.begin(), "alloy-lab");
  std::vector<const char*> argv;
  for (const auto& a : args) argv.push_back(a.c_str());
  std::ostringstream out, err;
  const int code = cli::run(static_cast<int>(argv.size()), argv.data(), out, err);
  return {code, out.str(), err.str()};
}

}  // namespace

TEST_CASE("FNV-1a test vectors") {
  CHECK(fnv1a_hex("") == "cbf29ce484222325");
  CHECK(fnv1a_hex("a") == "af63dc4c8601ec8c");
  CHECK(fnv1a_hex("foobar") == "85944171f73967e8");
}

TEST_CASE("digest ignores key order and whitespace") {
  const std::string a = R"({"d": 1, "L": 3, "lambda": 2.0})";
  const std::string b = "{\n  \"lambda\":2.0,\n\t\"L\":3,\"d\":1 }";
  CHECK(config_digest(a) == config_digest(b));
  CHECK(config_digest(a) != config_digest(R"({"d": 1, "L": 4, "lambda": 2.0})"));
  CHECK(parse_config(kDelta).digest.size() == 16);
}

TEST_CASE("config parsing") {
  const auto c = parse_config(kDelta);
  CHECK(c.model.d == 1);
  CHECK(c.model.L == 3);
  CHECK(c.model.lambda == 2.0);
  CHECK(c.seed.value() == 99);
  CHECK_FALSE(c.samples.has_value());
  CHECK(c.minami->energies.size() == 2);
  CHECK(c.wegner->widths.size() == 3);
  CHECK(c.model.density.norms().sup == doctest::Approx(1.875));

  const auto nn = parse_config(R"({"d": 1, "L": 2, "lambda": 1,
    "potential": {"terms": [{"offset": [0], "value": 1.0}, {"offset": [1], "value": 0.2}]},
    "density": {"preset": "raised_cosine", "center": 0.5, "half_width": 0.5}})");
  CHECK(nn.model.u.terms().size() == 2);
  CHECK(nn.model.density.norms().sup == doctest::Approx(2.0));
  CHECK(nn.model.x == origin(1));
  CHECK(nn.model.y == unit_vector(1, 0));
  CHECK(ids_seed(1) != 1);
}

TEST_CASE("config errors name the field or the line") {
  CHECK_THROWS_WITH_AS(parse_config(R"({"d": 1, "L": 3})"), doctest::Contains("lambda"), ConfigError);
  CHECK_THROWS_WITH_AS(parse_config(R"({"d": 9, "L": 3, "lambda": 1})"), doctest::Contains("'d'"), ConfigError);
  CHECK_THROWS_WITH_AS(parse_config("{\n\"d\": 1,\n\"L\": ,\n}"), doctest::Contains("line 3"), ConfigError);
  CHECK_THROWS_AS(parse_config(R"({"d": 1, "L": 3, "lambda": 1, "density": {"preset": "hat"}})"), ConfigError);
}

TEST_CASE("command line exit codes") {
  const fs::path dir = scratch("exit_codes");
  const auto delta = write(dir / "delta.json", kDelta);
  CHECK(lab({"check", "--config", delta.string()}).code == cli::kPass);

  const auto zero_mean = write(dir / "zero_mean.json", R"({"d": 1, "L": 3, "lambda": 2,
    "potential": {"terms": [{"offset": [0], "value": 1.0}, {"offset": [1], "value": -1.0}]}})");
  const auto zm = lab({"check", "--config", zero_mean.string()});
  CHECK(zm.code == cli::kVerdictFailed);
  CHECK(zm.out.find("mean value") != std::string::npos);

  const auto malformed = write(dir / "malformed.json", "{\n\"d\": 1,\n\"L\": ,\n}");
  const auto bad = lab({"check", "--config", malformed.string()});
  CHECK(bad.code == cli::kUsageError);
  CHECK(bad.err.find("line 3") != std::string::npos);

  CHECK(lab({"minami", "--config", (dir / "missing.json").string()}).code == cli::kUsageError);
  CHECK(lab({"nonsense"}).code == cli::kUsageError);

  const auto fence = write(dir / "fence.json", R"({"d": 1, "L": 3, "lambda": 2, "samples": 300,
    "spacing": {"mode": "picket_fence"}})");
  CHECK(lab({"spacing", "--config", fence.string()}).code == cli::kVerdictFailed);

  const auto huge = write(dir / "huge.json", R"({"d": 2, "L": 40, "lambda": 2, "samples": 10,
    "minami": {"energies": [1.0], "eta": 0.1}})");
  const auto h = lab({"minami", "--config", huge.string()});
  CHECK(h.code == cli::kRuntimeError);
  CHECK(h.err.find("4096") != std::string::npos);
}

TEST_CASE("records are reproducible and carry the digest") {
  const fs::path dir = scratch("records");
  const auto delta = write(dir / "delta.json", kDelta);
  const auto one = dir / "one", three = dir / "three";
  REQUIRE(lab({"minami", "--config", delta.string(), "--samples", "2000", "--workers", "1", "--out", one.string()})
              .code == cli::kPass);
  REQUIRE(lab({"minami", "--config", delta.string(), "--samples", "2000", "--workers", "3", "--out", three.string()})
              .code == cli::kPass);
  CHECK(slurp(one / "minami.jsonl") == slurp(three / "minami.jsonl"));
  CHECK(slurp(one / "minami.csv") == slurp(three / "minami.csv"));
  CHECK(fs::exists(one / "minami.manifest.json"));

  CHECK(lab({"verify-digest", "--config", delta.string(), "--results", (one / "minami.jsonl").string()}).code ==
        cli::kPass);
  const auto other = write(dir / "other.json", std::string(kDelta).replace(std::string(kDelta).find("99"), 2, "98"));
  CHECK(lab({"verify-digest", "--config", other.string(), "--results", (one / "minami.jsonl").string()}).code ==
        cli::kVerdictFailed);

  const auto seeded = dir / "seeded";
  REQUIRE(lab({"minami", "--config", delta.string(), "--samples", "2000", "--seed", "5", "--workers", "1", "--out",
               seeded.string()})
              .code == cli::kPass);
  CHECK(slurp(seeded / "minami.jsonl") != slurp(one / "minami.jsonl"));
}
