#include <doctest.h>

#include "reiflab/io.hpp"

#include <cstdlib>
#include <filesystem>
#include <string>

using namespace reiflab;

namespace {

Box box(double x0, double y0, double x1, double y1) { return {Vec2(x0, y0), Vec2(x1, y1)}; }

std::vector<std::uint8_t> bytes(const std::string& s) { return {s.begin(), s.end()}; }

std::size_t count(const std::string& text, const std::string& needle)
{
  std::size_t n = 0;
  for (auto p = text.find(needle); p != std::string::npos; p = text.find(needle, p + 1))
    ++n;
  return n;
}

Domain small_disk() { return rasterize(BallSpec{Vec2(0.1, 0), 1}, 0.1, box(-1.2, -1.2, 1.4, 1.2), "disk <small>"); }

} // namespace

TEST_CASE("base64 test vectors")
{
  const std::pair<const char*, const char*> vectors[] = {
      {"", ""},         {"f", "Zg=="},         {"fo", "Zm8="},         {"foo", "Zm9v"},
      {"foob", "Zm9vYg=="}, {"fooba", "Zm9vYmE="}, {"foobar", "Zm9vYmFy"},
  };
  for (const auto& [plain, coded] : vectors) {
    CHECK(base64_encode(bytes(plain)) == coded);
    CHECK(base64_decode(coded) == bytes(plain));
  }
  std::vector<std::uint8_t> all(256);
  for (int k = 0; k < 256; ++k)
    all[static_cast<std::size_t>(k)] = static_cast<std::uint8_t>(k);
  CHECK(base64_decode(base64_encode(all)) == all);
  CHECK_THROWS_WITH(base64_decode("Zm9"), "invalid base64 length");
  CHECK_THROWS_WITH(base64_decode("Zm9*"), "invalid base64 character");
}

TEST_CASE("domain JSON round trip is bit exact")
{
  for (const Domain& d : {small_disk(), rasterize(KochFlatSpec{10, 3, 1}, 0.013, box(-1.5, -1, 1.5, 1), "koch"),
                          complement(small_disk())}) {
    const Json j = to_json(d);
    CHECK(j.at("occupancy").at("width") == d.width());
    CHECK(j.at("boundary").size() == static_cast<std::size_t>(d.boundary().cols()));
    const Domain back = domain_from_json(Json::parse(j.dump()));
    CHECK(back == d);
    CHECK(back.label() == d.label());
    CHECK(back.boundary() == d.boundary());
    CHECK(to_json(back).dump() == j.dump());
  }
}

TEST_CASE("domain files")
{
  const auto dir = std::filesystem::temp_directory_path() / "reiflab_test_io";
  std::filesystem::create_directories(dir);
  const std::string path = (dir / "disk.json").string();
  save_domain(small_disk(), path);
  CHECK(load_domain(path) == small_disk());
  write_text(path, "{\"label\": 3}");
  CHECK_THROWS(load_domain(path));
  CHECK_THROWS_WITH(domain_from_json(Json::parse("{}")), doctest::Contains("malformed domain file"));
  CHECK_THROWS(load_domain((dir / "missing.json").string()));
  std::filesystem::remove_all(dir);
}

TEST_CASE("report JSON keys")
{
  const Domain d = rasterize(HalfspaceSpec{}, 0.01, box(-1, -1, 1, 1));
  const Certificate c = certify(d, 0.2, 0.2);
  const Json cj = to_json(c);
  for (const char* key : {"certified", "eps", "r0", "sup_epsilon", "margin", "reason"})
    CHECK(cj.contains(key));
  const Json dj = to_json(domain_distance(d, d, DistanceMode::Boundaries));
  CHECK(dj.at("mode") == "boundaries");
  CHECK(dj.at("value") == 0.0);
  const Polyline p({Vec2(0, 0.5), Vec2(0.1, 0.5)});
  const Json cr = to_json(verify_curve(d, p, p.front(), p.back(), kJonesDelta));
  for (const char* key : {"curve", "length_ratio", "worst_delta", "worst_z", "n_samples", "escaped", "pass"})
    CHECK(cr.contains(key));
  const Polyline back = polyline_from_json(to_json(p));
  CHECK(back.vertices() == p.vertices());
  const Json u = to_json(unit_ball_volume(3));
  CHECK(u.at("inequality") == true);
}

TEST_CASE("CSV tables")
{
  const Domain d = rasterize(HalfspaceSpec{}, 0.01, box(-1, -1, 1, 1));
  const FlatnessReport rep = flatness_profile(d, 0.2, 1);
  const std::string csv = to_csv(rep);
  CHECK(count(csv, "\n") == rep.entries.size() + 1);
  const Domain fine = rasterize(HalfspaceSpec{}, 0.005, box(-1, -1, 1, 1));
  const JonesConstant jc = empirical_jones_constant(fine, 0.1, 4, 1, 1.2);
  CHECK(count(to_csv(jc), "\n") == 5);
}

TEST_CASE("SVG rendering")
{
  const Domain d = small_disk();
  const Polyline curve({Vec2(-0.5, 0), Vec2(0, 0.3), Vec2(0.5, 0)});
  const Hyperplane plane(make_point<double>({1.1, 0}), make_point<double>({1, 0}));
  const std::string svg = render_svg(d, {curve, Polyline({Vec2(0, -0.5), Vec2(0, 0.5)}), plane});
  CHECK(svg == render_svg(d, {curve, Polyline({Vec2(0, -0.5), Vec2(0, 0.5)}), plane}));
  CHECK(count(svg, "class=\"curve\"") == 2);
  CHECK(count(svg, "class=\"plane\"") == 1);
  CHECK(svg.find("<title>disk &lt;small&gt;</title>") != std::string::npos);

  const std::string bare = render_svg(d);
  CHECK(count(bare, "class=\"curve\"") == 0);
  CHECK(count(bare, "class=\"domain\"") == 1);
  CHECK(count(bare, "class=\"boundary\"") == 1);

  const std::string golden = std::string(REIFLAB_TEST_DATA) + "/golden/disk_curve.svg";
  if (std::getenv("REIFLAB_UPDATE_GOLDEN"))
    write_text(golden, svg);
  CHECK(read_text(golden) == svg);
}
