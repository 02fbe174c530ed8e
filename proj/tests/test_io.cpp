#include <doctest.h>

#include <filesystem>
#include <sstream>

#include "nitiflex/error.hpp"
#include "nitiflex/io.hpp"

using namespace nitiflex;

TEST_CASE("csv parsing") {
  std::stringstream ss("# comment\na,b\n\n1,2\n3.5, -4e-3\n");
  const auto t = io::read_csv(ss);
  CHECK(t.header == std::vector<std::string>{"a", "b"});
  REQUIRE(t.rows.size() == 2);
  CHECK(t.rows[1][1] == doctest::Approx(-4e-3));
  CHECK(t.column("b") == 1);
  CHECK(!t.has_column("c"));
  CHECK_THROWS_AS(t.column("c"), Error);

  std::stringstream ragged("a,b\n1\n");
  CHECK_THROWS_AS(io::read_csv(ragged), Error);
  std::stringstream text("a\nx\n");
  CHECK_THROWS_AS(io::read_csv(text), Error);
}

TEST_CASE("key values") {
  const auto kv = io::parse_key_values("a = 1  # x\n\nb=two\n");
  CHECK(kv.at("a") == "1");
  CHECK(kv.at("b") == "two");
  CHECK_THROWS_AS(io::parse_key_values("a=1\na=2\n"), Error);
  CHECK_THROWS_AS(io::parse_key_values("novalue\n"), Error);
}

TEST_CASE("material round trip") {
  const BilinearMaterial m{61.5e9, 19.25e9, 0.0105, 0.06};
  const auto kv = io::parse_key_values(io::format_material(m, 1.5e6));
  const auto back = io::parse_material(kv, "mat");
  CHECK(back.E == m.E);
  CHECK(back.En == m.En);
  CHECK(back.eps_l == m.eps_l);
  CHECK(back.eps_max == m.eps_max);
}

TEST_CASE("hinge spec parsing") {
  const auto arc = io::parse_hinge_spec(
      "profile = arc\nlength_um = 400\nwidth_um = 2000\nt_min_um = 20\nradius_um = 1000\n"
      "sides = both\nE_gpa = 60\nEn_gpa = 20\neps_l = 0.01\n");
  CHECK(arc.profile.kind() == ThicknessProfile::Kind::Arc);
  CHECK(arc.profile.min_thickness() == doctest::Approx(20e-6));
  CHECK(arc.width == doctest::Approx(2e-3));
  CHECK(arc.material.E == doctest::Approx(60e9));
  CHECK(arc.sheet_t == doctest::Approx(100e-6));

  const auto sampled = io::parse_hinge_spec(
      "profile = sampled\nsamples_um = 0:60 200:20 400:60\nwidth_um = 1000\n"
      "E_gpa = 60\nEn_gpa = 20\neps_l = 0.01\n");
  CHECK(sampled.profile.length() == doctest::Approx(400e-6));
  CHECK(sampled.profile.thickness_at(100e-6) == doctest::Approx(40e-6));

  CHECK_THROWS_AS(io::parse_hinge_spec("profile = hexagon\n"), Error);
  CHECK_THROWS_AS(io::parse_hinge_spec("profile = rectangular\nlength_um = 100\n"), Error);

  const auto dir = std::filesystem::temp_directory_path() / "nitiflex_test_io";
  std::filesystem::create_directories(dir);
  io::write_file_atomic(dir / "m.mat", io::format_material({50e9, 10e9, 0.012, 0.06}));
  io::write_file_atomic(dir / "h.spec",
                        "profile = rectangular\nlength_um = 500\nwidth_um = 2000\nt_um = 25\n"
                        "material_file = m.mat\n");
  const auto h = io::read_hinge_spec(dir / "h.spec");
  CHECK(h.material.E == doctest::Approx(50e9));
  CHECK(h.profile.rect_thickness() == doctest::Approx(25e-6));
}

TEST_CASE("etch and torque CSV") {
  std::stringstream e("rep_rate_khz,passes,depth_um\n200,1,1.0\n200,2,2.0\n");
  const auto s = io::read_etch_csv(e);
  REQUIRE(s.size() == 2);
  CHECK(s[1].passes == 2);
  std::stringstream frac("rep_rate_khz,passes,depth_um\n200,1.5,1.0\n");
  CHECK_THROWS_AS(io::read_etch_csv(frac), Error);

  TorqueCurve c;
  c.samples = {{0.0, 0, 0.0, 0.0, 0.0, false}, {0.5, 10, 1.25e-5, 3e-6, 0.07, true}};
  std::stringstream out;
  io::write_torque_curve_csv(out, c);
  const auto back = io::read_torque_curve_csv(out);
  REQUIRE(back.samples.size() == 2);
  CHECK(back.samples[1].torque == c.samples[1].torque);
  CHECK(back.samples[1].over_limit);
}

TEST_CASE("missing file is an Io error") {
  try {
    io::read_text_file("/nonexistent/nitiflex/file");
    FAIL("expected Io");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::Io);
  }
}
