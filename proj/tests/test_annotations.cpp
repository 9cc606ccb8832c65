#include <doctest.h>

#include <random>

#include "msaprobe/annotations.h"
#include "msaprobe/errors.h"
#include "oracles.h"

using namespace msaprobe;

TEST_CASE("class ids and names form a fixed bijection") {
  for (int id = 0; id < kNumClasses; ++id) {
    const FunctionClass c = class_from_id(id);
    CHECK(class_id(c) == id);
    CHECK(class_from_name(class_name(c)) == c);
  }
  CHECK(class_name(FunctionClass::kIntro) == "intro");
  CHECK(class_name(FunctionClass::kSilence) == "silence");
  CHECK_FALSE(class_from_name("prechorus").has_value());
  CHECK_THROWS_AS(class_from_id(7), ValidationError);
}

TEST_CASE("parse a minimal annotation") {
  const auto ann = parse_annotation("0 intro\n12.5 verse\n200.0 end");
  REQUIRE(ann.segments.size() == 2);
  CHECK(ann.segments[0] == Segment{0.0, FunctionClass::kIntro});
  CHECK(ann.segments[1] == Segment{12.5, FunctionClass::kVerse});
  CHECK(ann.duration_s == 200.0);
}

TEST_CASE("raw labels are normalized before lookup") {
  const auto ann = parse_annotation("0 verse_2\n30.0 end");
  REQUIRE(ann.segments.size() == 1);
  CHECK(ann.segments[0].function == FunctionClass::kVerse);
  CHECK(ann.duration_s == 30.0);
}

TEST_CASE("parse errors") {
  SUBCASE("duplicate start time") { CHECK_THROWS_AS(parse_annotation("0 chorus\n0 verse\n10 end"), ValidationError); }
  SUBCASE("decreasing start time") { CHECK_THROWS_AS(parse_annotation("0 a\n5 b\n3 c\n10 end"), ValidationError); }
  SUBCASE("missing end line") { CHECK_THROWS_AS(parse_annotation("0 intro\n10 verse\n"), ValidationError); }
  SUBCASE("first segment must start at zero") { CHECK_THROWS_AS(parse_annotation("1 intro\n10 end"), ValidationError); }
  SUBCASE("malformed line carries its line number") {
    try {
      parse_annotation("0 intro\n# comment\nabc verse\n20 end");
      FAIL("expected a parse error");
    } catch (const ParseError& e) {
      CHECK(e.line() == 3);
    }
  }
  SUBCASE("extra field") { CHECK_THROWS_AS(parse_annotation("0 intro x\n10 end"), ParseError); }
  SUBCASE("content after end") { CHECK_THROWS_AS(parse_annotation("0 intro\n10 end\n12 verse"), ValidationError); }
  SUBCASE("empty text") { CHECK_THROWS_AS(parse_annotation(""), ValidationError); }
}

TEST_CASE("comments, blank lines and CRLF are accepted") {
  const auto ann = parse_annotation("# header\r\n0\tintro\r\n\r\n  12.5   chorus  \r\n40 end\r\n");
  REQUIRE(ann.segments.size() == 2);
  CHECK(ann.segments[1].function == FunctionClass::kChorus);
  CHECK(ann.duration_s == 40.0);
}

TEST_CASE("default label table") {
  CHECK(map_label("chorus") == FunctionClass::kChorus);
  CHECK(map_label("solo") == FunctionClass::kInst);
  CHECK(map_label("quiet_backing") == FunctionClass::kInst);
  CHECK(map_label("Verse_2") == FunctionClass::kVerse);
  CHECK(map_label("prechorus") == FunctionClass::kVerse);
  CHECK(map_label("refrain") == FunctionClass::kChorus);
  CHECK(map_label("hook1") == FunctionClass::kChorus);
  CHECK(map_label("transition") == FunctionClass::kBridge);
  CHECK(map_label("break") == FunctionClass::kInst);
  CHECK(map_label("drop") == FunctionClass::kInst);
  CHECK(map_label("fadein") == FunctionClass::kIntro);
  CHECK(map_label("fadeout") == FunctionClass::kOutro);
  CHECK(map_label("outro") == FunctionClass::kOutro);
  CHECK(map_label("silence") == FunctionClass::kSilence);
  CHECK(map_label("quiet") == FunctionClass::kSilence);
  CHECK(normalize_label("Chorus_12") == "chorus");
}

TEST_CASE("label table loads from JSON") {
  const auto map = LabelMap::from_json(R"({"pre*": "chorus", "prelude": "intro", "__fallback__": "silence"})");
  CHECK(map.map("prechorus") == FunctionClass::kChorus);
  CHECK(map.map("prelude") == FunctionClass::kIntro);
  CHECK(map.map("whatever") == FunctionClass::kSilence);
  CHECK_THROWS_AS(LabelMap::from_json(R"({"a": "nonsense"})"), ValidationError);
  CHECK_THROWS_AS(LabelMap::from_json("[1,2]"), ValidationError);
}

TEST_CASE("rasterize examples") {
  SUBCASE("single segment") {
    const auto t = rasterize({{{0.0, FunctionClass::kIntro}}, 2.0});
    CHECK(t.function == std::vector<std::uint8_t>{0, 0, 0, 0});
    CHECK(t.boundary == std::vector<std::uint8_t>{1, 0, 0, 0});
  }
  SUBCASE("boundary on a frame edge") {
    const auto t = rasterize({{{0.0, FunctionClass::kIntro}, {1.0, FunctionClass::kVerse}}, 2.0});
    CHECK(t.function == std::vector<std::uint8_t>{0, 0, 1, 1});
    CHECK(t.boundary == std::vector<std::uint8_t>{1, 0, 1, 0});
  }
  SUBCASE("boundary rounds to the nearest frame") {
    const auto t = rasterize({{{0.0, FunctionClass::kIntro}, {0.9, FunctionClass::kVerse}}, 2.0});
    CHECK(t.boundary == std::vector<std::uint8_t>{1, 0, 1, 0});
  }
  SUBCASE("a start rounding past the last frame is clamped") {
    const auto t = rasterize({{{0.0, FunctionClass::kIntro}, {1.9, FunctionClass::kVerse}}, 2.0});
    CHECK(t.boundary == std::vector<std::uint8_t>{1, 0, 0, 1});
  }
  CHECK(label_frame_count(75.0) == 150);
  CHECK(label_frame_count(0.2) == 1);
}

TEST_CASE("boundaries_of keeps both endpoints") {
  CHECK(boundaries_of({{{0, FunctionClass::kIntro}, {12.5, FunctionClass::kVerse}}, 200}) ==
        std::vector<double>{0, 12.5, 200});
  CHECK(boundaries_of({{{0, FunctionClass::kIntro}}, 30}) == std::vector<double>{0, 30});
  CHECK(boundaries_of({{{0, FunctionClass::kIntro}, {5, FunctionClass::kVerse}, {9, FunctionClass::kIntro}}, 20}) ==
        std::vector<double>{0, 5, 9, 20});
}

TEST_CASE("random annotations: round trip and rasterization properties") {
  std::mt19937_64 rng(11);
  for (int trial = 0; trial < 200; ++trial) {
    const SegmentAnnotation ann = oracle::random_annotation(rng);
    CHECK(parse_annotation(serialize_annotation(ann)) == ann);

    const FrameTargets t = rasterize(ann);
    REQUIRE(t.frames() == static_cast<std::size_t>(std::ceil(ann.duration_s * 2.0)));
    std::size_t ones = 0;
    for (auto b : t.boundary) ones += b;
    CHECK(ones >= 1);
    CHECK(ones <= ann.segments.size());
    for (std::size_t k = 0; k < t.frames(); ++k) {
      CHECK(t.function[k] == oracle::label_at(ann, (static_cast<double>(k) + 0.5) / 2.0));
    }
    CHECK(rasterize(parse_annotation(serialize_annotation(ann))) == t);
  }
}
