#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <filesystem>

#include "hcoseg/color.hpp"
#include "hcoseg/image.hpp"
#include "hcoseg/image_io.hpp"
#include "test_support.hpp"

using namespace hcoseg;

TEST_CASE("rgb_to_lab reference points") {
  Lab white = rgb_to_lab(255, 255, 255);
  CHECK(white.l == doctest::Approx(100.0).epsilon(0.0001));
  CHECK(std::abs(white.a) < 0.01);
  CHECK(std::abs(white.b) < 0.01);

  Lab black = rgb_to_lab(0, 0, 0);
  CHECK(black.l == doctest::Approx(0.0).epsilon(1e-12));
  CHECK(black.a == doctest::Approx(0.0).epsilon(1e-12));
  CHECK(black.b == doctest::Approx(0.0).epsilon(1e-12));

  // Frozen from an independent sRGB -> XYZ -> Lab evaluation (D65).
  Lab red = rgb_to_lab(255, 0, 0);
  CHECK(std::abs(red.l - 53.240794) < 0.05);
  CHECK(std::abs(red.a - 80.092460) < 0.05);
  CHECK(std::abs(red.b - 67.203197) < 0.05);
}

TEST_CASE("rgb_to_hsv reference points") {
  Hsv red = rgb_to_hsv(255, 0, 0);
  CHECK(red.h == doctest::Approx(0.0));
  CHECK(red.s == doctest::Approx(1.0));
  CHECK(red.v == doctest::Approx(1.0));

  Hsv gray = rgb_to_hsv(128, 128, 128);
  CHECK(gray.h == doctest::Approx(0.0));
  CHECK(gray.s == doctest::Approx(0.0));
  CHECK(gray.v == doctest::Approx(128.0 / 255.0));

  Hsv cyan = rgb_to_hsv(0, 255, 255);
  CHECK(cyan.h == doctest::Approx(180.0));
  CHECK(cyan.s == doctest::Approx(1.0));
  CHECK(cyan.v == doctest::Approx(1.0));
}

TEST_CASE("color conversions stay finite and in range on random samples") {
  fixture::Lcg rng(7);
  for (int i = 0; i < 100000; ++i) {
    std::uint8_t r = static_cast<std::uint8_t>(rng.next_int(0, 255));
    std::uint8_t g = static_cast<std::uint8_t>(rng.next_int(0, 255));
    std::uint8_t b = static_cast<std::uint8_t>(rng.next_int(0, 255));
    Lab lab = rgb_to_lab(r, g, b);
    REQUIRE(std::isfinite(lab.l));
    REQUIRE(std::isfinite(lab.a));
    REQUIRE(std::isfinite(lab.b));
    REQUIRE(lab.l >= 0.0);
    REQUIRE(lab.l <= 100.001);
    Hsv hsv = rgb_to_hsv(r, g, b);
    REQUIRE(std::isfinite(hsv.h));
    REQUIRE(hsv.h >= 0.0);
    REQUIRE(hsv.h < 360.0);
    REQUIRE(hsv.s >= 0.0);
    REQUIRE(hsv.s <= 1.0);
    REQUIRE(hsv.v >= 0.0);
    REQUIRE(hsv.v <= 1.0);
  }
}

TEST_CASE("resize_bilinear on constants and known ramps") {
  ProbabilityMap constant(5, 4, 0.7);
  ProbabilityMap grown = resize_bilinear(constant, 9, 13);
  for (double v : grown.values) CHECK(v == doctest::Approx(0.7).epsilon(1e-12));

  ProbabilityMap one(1, 1);
  one.values[0] = 0.3;
  ProbabilityMap spread = resize_bilinear(one, 6, 3);
  for (double v : spread.values) CHECK(v == 0.3);

  // Frozen by hand-evaluating the half-pixel convention.
  ProbabilityMap ramp(2, 1);
  ramp.values = {0.0, 1.0};
  ProbabilityMap wide = resize_bilinear(ramp, 4, 1);
  REQUIRE(wide.values.size() == 4);
  CHECK(wide.values[0] == doctest::Approx(0.0));
  CHECK(wide.values[1] == doctest::Approx(0.25));
  CHECK(wide.values[2] == doctest::Approx(0.75));
  CHECK(wide.values[3] == doctest::Approx(1.0));
  for (std::size_t i = 1; i < wide.values.size(); ++i)
    CHECK(wide.values[i] >= wide.values[i - 1]);
}

TEST_CASE("resize_bilinear keeps global bounds") {
  fixture::Lcg rng(11);
  for (int round = 0; round < 20; ++round) {
    int w = rng.next_int(1, 40), h = rng.next_int(1, 40);
    ProbabilityMap map = fixture::random_map(w, h, rng);
    double lo = *std::min_element(map.values.begin(), map.values.end());
    double hi = *std::max_element(map.values.begin(), map.values.end());
    ProbabilityMap out =
        resize_bilinear(map, rng.next_int(1, 50), rng.next_int(1, 50));
    for (double v : out.values) {
      REQUIRE(v >= lo - 1e-12);
      REQUIRE(v <= hi + 1e-12);
    }
  }
}

TEST_CASE("PFM write/read is the identity at 32-bit precision") {
  fixture::TempDir tmp("pfm");
  fixture::Lcg rng(3);

  ProbabilityMap zeros(7, 5);
  write_map_pfm(zeros, tmp.sub("zeros.pfm"));
  ProbabilityMap zeros_back = read_map_pfm(tmp.sub("zeros.pfm"));
  CHECK(zeros_back.values == zeros.values);

  ProbabilityMap precise(3, 2);
  for (double& v : precise.values) v = 0.123456789;
  write_map_pfm(precise, tmp.sub("precise.pfm"));
  ProbabilityMap precise_back = read_map_pfm(tmp.sub("precise.pfm"));
  for (double v : precise_back.values)
    CHECK(v == static_cast<double>(static_cast<float>(0.123456789)));

  for (int round = 0; round < 10; ++round) {
    ProbabilityMap map =
        fixture::random_map(rng.next_int(1, 30), rng.next_int(1, 30), rng);
    write_map_pfm(map, tmp.sub("roundtrip.pfm"));
    ProbabilityMap back = read_map_pfm(tmp.sub("roundtrip.pfm"));
    REQUIRE(back.width == map.width);
    REQUIRE(back.height == map.height);
    REQUIRE(back.values == map.values);  // fixture values are float-exact
  }
}

TEST_CASE("PFM read rejects bad headers and out-of-range values") {
  fixture::TempDir tmp("pfm_bad");

  {
    std::ofstream out(tmp.sub("bad_magic.pfm"), std::ios::binary);
    out << "PF\n2 2\n-1.0\n";  // color magic, not grayscale
  }
  CHECK_THROWS_WITH_AS(read_map_pfm(tmp.sub("bad_magic.pfm")),
                       doctest::Contains("malformed"), Error);
  try {
    read_map_pfm(tmp.sub("bad_magic.pfm"));
  } catch (const Error& e) {
    CHECK(e.code() == Errc::format);
  }

  {
    std::ofstream out(tmp.sub("oob.pfm"), std::ios::binary);
    out << "Pf\n1 1\n-1.0\n";
    float big = 1.5f;
    out.write(reinterpret_cast<const char*>(&big), 4);
  }
  try {
    read_map_pfm(tmp.sub("oob.pfm"));
    FAIL("expected range error");
  } catch (const Error& e) {
    CHECK(e.code() == Errc::range);
  }

  {
    std::ofstream out(tmp.sub("short.pfm"), std::ios::binary);
    out << "Pf\n4 4\n-1.0\n";
    float v = 0.5f;
    out.write(reinterpret_cast<const char*>(&v), 4);
  }
  try {
    read_map_pfm(tmp.sub("short.pfm"));
    FAIL("expected format error");
  } catch (const Error& e) {
    CHECK(e.code() == Errc::format);
  }

  CHECK_THROWS_AS(read_map_pfm(tmp.sub("missing.pfm")), Error);
}

TEST_CASE("PNG frame and mask round trips") {
  fixture::TempDir tmp("png");
  fixture::Lcg rng(5);

  Frame frame(13, 9, 4);
  for (auto& b : frame.pixels)
    b = static_cast<std::uint8_t>(rng.next_int(0, 255));
  write_frame_png(frame, tmp.sub("frame.png"));
  Frame back = read_frame_png(tmp.sub("frame.png"), 4);
  CHECK(back.width == frame.width);
  CHECK(back.height == frame.height);
  CHECK(back.index == 4);
  CHECK(back.pixels == frame.pixels);

  BinaryMask mask(8, 6);
  mask.set(3, 2, true);
  write_mask_png(mask, tmp.sub("mask.png"));
  BinaryMask mask_back = read_mask_png(tmp.sub("mask.png"));
  CHECK(mask_back.bits == mask.bits);
}

TEST_CASE("writers leave no partial file behind on failure") {
  fixture::TempDir tmp("atomic");
  std::string target = tmp.sub("no_such_dir/out.pfm");
  CHECK_THROWS_AS(write_map_pfm(ProbabilityMap(2, 2), target), Error);
  CHECK_FALSE(std::filesystem::exists(target));
  CHECK_FALSE(std::filesystem::exists(target + ".tmp"));
}
