#include <doctest.h>

#include <json.hpp>

#include <fstream>
#include <sstream>

#include "cli.hpp"
#include "support.hpp"

using namespace depthprop;

namespace {

struct Result {
  int code;
  std::string out;
  std::string err;
};

Result run(std::vector<std::string> args) {
  args.insert(args.begin(), "depthprop");
  std::ostringstream out, err;
  const int code = cli::run(args, out, err);
  return {code, out.str(), err.str()};
}

std::string bytes_of(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

struct Fixture {
  testing::TempDir dir;
  std::string sparse, coarse, field, image;

  Fixture() {
    testing::Rng rng(40);
    const Shape s{24, 32};
    sparse = (dir / "sparse.png").string();
    coarse = (dir / "coarse.png").string();
    field = (dir / "field.aff").string();
    image = (dir / "image.png").string();
    io::write_depth_png(testing::random_depth(rng, s, 1.0f, 80.0f, 0.05), sparse);
    io::write_depth_png(testing::random_depth(rng, s, 1.0f, 80.0f), coarse);
    io::write_planes(io::to_container(testing::random_field(rng, s)), field);
    // A 16-bit gray depth PNG doubles as a grayscale guide image.
    io::write_depth_png(testing::random_depth(rng, s, 1.0f, 200.0f), image);
  }
};

}  // namespace

TEST_CASE("refine end to end with anchoring") {
  Fixture fx;
  const auto out = (fx.dir / "refined.png").string();
  const Result r = run({"refine", "--schedule", "c2", "--iterations", "12", "--affinity", fx.field,
                        "--coarse", fx.coarse, "--input", fx.sparse, "--anchor", "--output", out});
  REQUIRE_MESSAGE(r.code == 0, r.err);
  const DepthGrid refined = io::read_depth_png(out);
  const DepthGrid sparse = io::read_depth_png(fx.sparse);
  for (std::size_t i = 0; i < sparse.size(); ++i) {
    if (sparse.values()[i] > 0.0f) CHECK(refined.values()[i] == sparse.values()[i]);
  }

  const auto again = (fx.dir / "refined2.png").string();
  REQUIRE(run({"--threads", "1", "refine", "--schedule", "c2", "--affinity", fx.field, "--coarse",
               fx.coarse, "--input", fx.sparse, "--anchor", "--output", again})
              .code == 0);
  CHECK(bytes_of(out) == bytes_of(again));

  const auto naive = (fx.dir / "naive.png").string();
  REQUIRE(run({"refine", "--schedule", "c2", "--affinity", fx.field, "--coarse", fx.coarse,
               "--input", fx.sparse, "--anchor", "--impl", "naive", "--output", naive})
              .code == 0);
  CHECK(testing::max_relative_error(io::read_depth_png(naive), refined) <= 1.0 / 256.0);
}

TEST_CASE("refine without a coarse map fills from the sparse input") {
  Fixture fx;
  const auto out = (fx.dir / "refined.png").string();
  const Result r = run({"refine", "--schedule", "c4", "--affinity", fx.field, "--input", fx.sparse,
                        "--output", out});
  REQUIRE_MESSAGE(r.code == 0, r.err);
  CHECK(io::read_depth_png(out).valid_count() == 24 * 32);
}

TEST_CASE("refine usage errors exit 1 before touching files") {
  Fixture fx;
  const auto out = (fx.dir / "never.png").string();
  CHECK(run({"refine", "--schedule", "c9", "--affinity", fx.field, "--coarse", fx.coarse,
             "--output", out})
            .code == 1);
  CHECK(run({"refine", "--anchor", "--affinity", "missing.aff", "--coarse", fx.coarse, "--output",
             out})
            .code == 1);
  CHECK(run({"refine", "--affinity", fx.field, "--output", out}).code == 1);
  CHECK(run({"refine", "--schedule", "c4", "--iterations", "2", "--affinity", fx.field, "--coarse",
             fx.coarse, "--output", out})
            .code == 1);
  CHECK(run({"refine", "--coarse", fx.coarse, "--output", out}).code == 1);
  CHECK(run({"frobnicate"}).code == 1);
  CHECK(run({}).code == 1);
  CHECK(run({"refine", "--bogus"}).code == 1);
  CHECK_FALSE(std::filesystem::exists(out));
}

TEST_CASE("data errors exit 2") {
  Fixture fx;
  const auto out = (fx.dir / "o.png").string();
  const Result r = run({"refine", "--affinity", fx.coarse, "--coarse", fx.coarse, "--output", out});
  CHECK(r.code == 2);
  CHECK(r.err.find("magic") != std::string::npos);
  CHECK(run({"eval", "--pred", fx.field, "--gt", fx.coarse}).code == 2);
  CHECK(run({"eval", "--pred", fx.sparse, "--gt", fx.coarse}).code == 2);
}

TEST_CASE("eval self comparison reports zeros") {
  Fixture fx;
  const Result r = run({"eval", "--pred", fx.coarse, "--gt", fx.coarse});
  REQUIRE(r.code == 0);
  const std::string first = r.out.substr(0, r.out.find('\n'));
  CHECK(first ==
        "rmse_mm=0.000000 mae_mm=0.000000 irmse_per_km=0.000000 imae_per_km=0.000000 "
        "valid_count=768");
  CHECK(r.out.find("RMSE [mm]") != std::string::npos);
}

TEST_CASE("fuse subcommand") {
  Fixture fx;
  const Shape s{24, 32};
  const auto ccd = (fx.dir / "ccd.pln").string();
  const auto cdd = (fx.dir / "cdd.pln").string();
  io::write_planes(io::to_container(ScalarPlane(s, 0.0f)), ccd);
  io::write_planes(io::to_container(ScalarPlane(s, 0.0f)), cdd);
  const auto out = (fx.dir / "fused.png").string();
  const Result r = run({"fuse", "--cd", fx.coarse, "--dd", fx.coarse, "--conf-cd", ccd, "--conf-dd",
                        cdd, "--output", out});
  REQUIRE_MESSAGE(r.code == 0, r.err);
  CHECK(io::read_depth_png(out) == io::read_depth_png(fx.coarse));
  CHECK(run({"fuse", "--cd", fx.coarse, "--dd", fx.coarse, "--conf-cd", fx.field, "--conf-dd", cdd,
             "--output", out})
            .code == 2);
}

TEST_CASE("backproject subcommand") {
  Fixture fx;
  const auto out = (fx.dir / "pos.pln").string();
  Result r = run({"backproject", "--input", fx.coarse, "--fx", "100", "--fy", "100", "--u0", "16",
                  "--v0", "12", "--output", out});
  REQUIRE_MESSAGE(r.code == 0, r.err);
  const io::PlaneContainer c = io::read_planes(out);
  CHECK(c.planes.size() == 3);
  CHECK(c.planes[2] == io::read_depth_png(fx.coarse));

  {
    std::ofstream calib(fx.dir / "calib.txt");
    calib << "P2: 100 0 16 0 0 100 12 0 0 0 1 0\n";
  }
  r = run({"backproject", "--input", fx.coarse, "--calib", (fx.dir / "calib.txt").string(),
           "--pool", "2", "--output", out});
  REQUIRE_MESSAGE(r.code == 0, r.err);
  CHECK(io::read_planes(out).height == 12);

  CHECK(run({"backproject", "--input", fx.coarse, "--fx", "100", "--output", out}).code == 1);
  CHECK(run({"backproject", "--input", fx.coarse, "--fx", "1", "--fy", "1", "--u0", "1", "--v0",
             "1", "--calib", "c.txt", "--output", out})
            .code == 1);
  CHECK(run({"backproject", "--input", fx.coarse, "--pool", "5", "--fx", "1", "--fy", "1", "--u0",
             "1", "--v0", "1", "--output", out})
            .code == 2);
}

TEST_CASE("gen-affinity subcommand") {
  Fixture fx;
  const auto out = (fx.dir / "gen.aff").string();
  const Result r = run({"gen-affinity", "--image", fx.image, "--kernel", "3", "--sigma", "0.1",
                        "--output", out});
  REQUIRE_MESSAGE(r.code == 0, r.err);
  const AffinityField f = io::affinity_from_container(io::read_planes(out));
  CHECK(f.kernel_size() == 3);
  CHECK(is_normalized(f));
  CHECK(run({"gen-affinity", "--image", fx.image, "--kernel", "4", "--output", out}).code == 1);
}

TEST_CASE("bench subcommand writes a JSON report") {
  Fixture fx;
  const auto json_path = (fx.dir / "bench.json").string();
  const Result r = run({"bench", "--shape", "64x32", "--schedule", "c2", "--impl", "both", "--json",
                        json_path});
  REQUIRE_MESSAGE(r.code == 0, r.err);
  std::ifstream in(json_path);
  const auto report = nlohmann::json::parse(in);
  REQUIRE(report["results"].size() == 2);
  CHECK(report["results"][0]["label"] == "naive");
  CHECK(report["results"][1]["label"] == "accelerated");
  CHECK(report["results"][0]["grid_shape"] == nlohmann::json::array({32, 64}));
  CHECK(report["results"][0]["iterations"] == 12);
  CHECK(report["results"][0]["runs"] == 5);
  CHECK(report["speedup"].get<double>() > 0.0);
  CHECK(report["max_relative_difference"].get<double>() <= 1e-5);

  CHECK(run({"bench", "--shape", "4x4"}).code == 1);
  CHECK(run({"bench", "--shape", "big"}).code == 1);
  CHECK(run({"bench", "--runs", "3"}).code == 1);
}

TEST_CASE("help exits 0") {
  CHECK(run({"--help"}).code == 0);
  CHECK(run({"refine", "--help"}).code == 0);
}
