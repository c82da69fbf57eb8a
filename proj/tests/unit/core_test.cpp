#include <doctest.h>

#include <algorithm>
#include <numeric>
#include <set>

#include "eftcot/core/json_io.hpp"
#include "eftcot/core/parallel.hpp"
#include "eftcot/core/rng.hpp"
#include "eftcot/core/stage_parser.hpp"
#include "eftcot/core/trace_validation.hpp"
#include "eftcot/core/unicode.hpp"
#include "support/fixtures.hpp"

using namespace eftcot;

TEST_SUITE("core") {

TEST_CASE("categories parse case-insensitively and reject unknown labels") {
    for (TopicCategory c : kAllCategories) CHECK(parse_category(to_string(c)) == c);
    CHECK(parse_category("romance") == TopicCategory::Romance);
    CHECK(parse_category("INTERPERSONAL") == TopicCategory::Interpersonal);
    CHECK_THROWS_AS(parse_category("Sports"), UnknownCategoryError);
    CHECK_THROWS_AS(parse_category(""), UnknownCategoryError);
}

TEST_CASE("stage names round-trip") {
    for (Stage s : kAllStages) {
        CHECK(parse_stage(to_string(s)) == s);
        CHECK(parse_stage(field_name(s)) == s);
    }
    CHECK_FALSE(parse_stage("A9").has_value());
    CHECK_FALSE(parse_stage("").has_value());
}

TEST_CASE("trace survives a JSON round trip") {
    const ReasoningTrace t = fixtures::confession_trace();
    const std::string line = dump_line(to_json(t));
    CHECK(line.find('\n') == std::string::npos);
    CHECK(trace_from_json(json::parse(line)) == t);

    const InstructionTriplet triplet = make_triplet("instr", t);
    CHECK(triplet.input == t.post.text);
    CHECK(triplet.output == t.a8->text);
    CHECK(triplet_from_json(json::parse(dump_line(to_json(triplet)))) == triplet);
}

TEST_CASE("make_triplet needs a final response") {
    ReasoningTrace t = fixtures::confession_trace();
    t.a8.reset();
    CHECK_THROWS(make_triplet("x", t));
}

TEST_CASE("malformed stored records raise FormatError naming the field") {
    CHECK_THROWS_AS(post_from_json(json::parse(R"({"id":"x","category":"Romance"})")), FormatError);
    try {
        post_from_json(json::parse(R"({"id":"x","text":3,"category":"Romance"})"));
        FAIL("expected FormatError");
    } catch (const FormatError& e) {
        CHECK(e.field() == "post.text");
    }
    CHECK_THROWS_AS(record_from_json(json::parse(R"({"instruction":"a","input":"b"})")), FormatError);
}

TEST_CASE("extract_first_object skips prose and braces inside strings") {
    CHECK(extract_first_object("Sure! {\"a\": \"}{\"} trailing") == std::string("{\"a\": \"}{\"}"));
    CHECK(extract_first_object("```json\n{\"x\": {\"y\": 1}}\n```") == std::string("{\"x\": {\"y\": 1}}"));
    CHECK(extract_first_object("{not json} then {\"ok\": true}") == std::string("{\"ok\": true}"));
    CHECK_FALSE(extract_first_object("no object here").has_value());
    CHECK_FALSE(extract_first_object("{\"open\": 1").has_value());
}

TEST_CASE("stage replies parse into typed outputs") {
    ParseContext ctx;
    ctx.post_text = fixtures::kConfessionText;
    const auto replies = fixtures::confession_replies();
    const ReasoningTrace expected = fixtures::confession_trace();
    for (Stage s : kAllStages) {
        const StageOutput out = parse_stage_output(s, "Here you go:\n" + replies[stage_index(s)] + "\nDone.", ctx);
        CHECK(stage_of(out) == s);
        CHECK(out == *expected.output(s));
    }
}

TEST_CASE("enum fields are read case-insensitively") {
    const auto out = parse_stage_output(
        Stage::A4, R"({"protective_function":"p","maladaptive_cost":"c","verdict":"adaptive"})");
    CHECK(std::get<AdaptiveAssessment>(out).verdict == Verdict::Adaptive);
}

TEST_CASE("schema problems raise SchemaError") {
    CHECK_THROWS_AS(parse_stage_output(Stage::A3, "no json at all"), SchemaError);
    CHECK_THROWS_AS(parse_stage_output(Stage::A3, R"({"story":"x"})"), SchemaError);
    CHECK_THROWS_AS(parse_stage_output(Stage::A4, R"({"protective_function":"p","maladaptive_cost":"c","verdict":"maybe"})"),
                    SchemaError);
    CHECK_THROWS_AS(parse_stage_output(Stage::A7, R"({"old_narrative":"a","new_narrative":"b","validation_quotes":"q"})"),
                    SchemaError);
    try {
        parse_stage_output(Stage::A1, R"({"items":[{"label":"x","level":"Primary"}]})");
        FAIL("expected SchemaError");
    } catch (const SchemaError& e) {
        CHECK(e.stage() == Stage::A1);
        CHECK(e.field() == "items.evidence");
    }
}

TEST_CASE("invariants are enforced at parse time") {
    ParseContext ctx;
    ctx.post_text = fixtures::kConfessionText;
    auto rule_of = [&](Stage s, const std::string& raw) -> std::string {
        try {
            parse_stage_output(s, raw, ctx);
        } catch (const InvariantError& e) {
            return e.rule();
        }
        return "";
    };
    CHECK(rule_of(Stage::A1, R"({"items":[{"label":"Shame","evidence":"never said this","level":"Primary"},
        {"label":"Anxiety","evidence":"awkward","level":"Secondary"}]})") == rule::kQuoteInPost);
    CHECK(rule_of(Stage::A1, R"({"items":[{"label":"Shame","evidence":"awkward","level":"Primary"}]})") ==
          rule::kEmotionLevels);
    CHECK(rule_of(Stage::A6, R"({"core_need":"safety","explicit_statement":"Forgive me."})") == rule::kNeedPrefix);
    CHECK(rule_of(Stage::A7, R"({"old_narrative":"Same story.","new_narrative":" same  STORY. ",
        "validation_quotes":["awkward"]})") == rule::kNarrativeChanged);
    CHECK(rule_of(Stage::A7, R"({"old_narrative":"a","new_narrative":"b","validation_quotes":[]})") ==
          rule::kValidationQuotes);
    CHECK(rule_of(Stage::A7, R"({"old_narrative":"a","new_narrative":"b","validation_quotes":["not there"]})") ==
          rule::kQuoteInPost);
    CHECK(rule_of(Stage::A3, R"({"narrative":"   "})") == rule::kNonEmpty);
}

TEST_CASE("need prefix is configurable") {
    ParseContext ctx;
    ctx.need_prefix = "What I need";
    CHECK_NOTHROW(parse_stage_output(Stage::A6, R"({"core_need":"x","explicit_statement":"What I need is rest."})", ctx));
    CHECK_THROWS_AS(parse_stage_output(Stage::A6, R"({"core_need":"x","explicit_statement":"I need rest."})", ctx),
                    InvariantError);
}

TEST_CASE("validate_trace accepts the confession trace and reports each defect") {
    const ReasoningTrace good = fixtures::confession_trace();
    CHECK(validate_trace(good).ok());

    ReasoningTrace missing = good;
    missing.a5.reset();
    auto r = validate_trace(missing);
    REQUIRE(r.violations.size() == 2);
    CHECK(r.violations[0] == Violation{Stage::A5, rule::kMissingStage, "stage output absent"});
    CHECK(r.violations[1].rule == rule::kStageMeta);

    ReasoningTrace no_meta = good;
    no_meta.stage_meta.erase(Stage::A2);
    r = validate_trace(no_meta);
    REQUIRE(r.violations.size() == 1);
    CHECK(r.violations[0].stage == Stage::A2);

    ReasoningTrace empty_post = good;
    empty_post.post.text = " ";
    r = validate_trace(empty_post);
    CHECK_FALSE(r.ok());
    CHECK(r.violations.front().rule == rule::kPostText);

    ReasoningTrace bad_quote = good;
    bad_quote.a7->validation_quotes = {"invented words"};
    r = validate_trace(bad_quote);
    REQUIRE(r.violations.size() == 1);
    CHECK(r.violations[0].stage == Stage::A7);
    CHECK(r.violations[0].rule == rule::kQuoteInPost);
}

TEST_CASE("quote matching ignores whitespace, width and case") {
    CHECK(text::contains_normalized("She BLAMED  directly", "blamed directly"));
    CHECK(text::contains_normalized("我真的很难过，", "很难过,"));
    CHECK(text::contains_normalized("ＡＢＣ test", "abc"));
    CHECK_FALSE(text::contains_normalized("abc", ""));
    CHECK_FALSE(text::contains_normalized("abc", "abd"));
}

TEST_CASE("utf-8 decoding round-trips and replaces malformed input") {
    const std::string s = "héllo 世界 🙂";
    CHECK(text::encode_utf8(text::decode_utf8(s)) == s);
    CHECK(text::decode_utf8("a\xff" "b") == std::u32string{U'a', 0xFFFD, U'b'});
    CHECK(text::trim("  x y \n") == "x y");
    CHECK(text::is_blank(" \t\n"));
}

TEST_CASE("seeded rng is reproducible and shuffles into a permutation") {
    SeededRng a(42), b(42);
    for (int i = 0; i < 100; ++i) CHECK(a.next() == b.next());
    SeededRng r(7);
    for (int i = 0; i < 1000; ++i) {
        CHECK(r.below(9) < 9);
        const double u = r.unit();
        CHECK(u >= 0.0);
        CHECK(u < 1.0);
    }
    std::vector<int> v(50);
    std::iota(v.begin(), v.end(), 0);
    auto w = v;
    SeededRng s(3);
    s.shuffle(std::span<int>(w));
    CHECK(w != v);
    std::sort(w.begin(), w.end());
    CHECK(w == v);
    CHECK(derive_seed(1, "x") == derive_seed(1, "x"));
    CHECK(derive_seed(1, "x") != derive_seed(1, "y"));
    CHECK(derive_seed(1, "x") != derive_seed(2, "x"));
}

TEST_CASE("shuffle draws every permutation of three items") {
    std::set<std::vector<int>> seen;
    for (std::uint64_t seed = 0; seed < 200; ++seed) {
        std::vector<int> v{0, 1, 2};
        SeededRng r(seed);
        r.shuffle(std::span<int>(v));
        seen.insert(v);
    }
    CHECK(seen.size() == 6);
}

TEST_CASE("parallel_for visits each index once and rethrows the first error") {
    std::vector<std::atomic<int>> hits(200);
    parallel_for(hits.size(), 4, [&](std::size_t i) { hits[i]++; });
    for (auto& h : hits) CHECK(h.load() == 1);
    CHECK_THROWS_AS(parallel_for(10, 3,
                                 [](std::size_t i) {
                                     if (i == 5) throw ConfigError("boom");
                                 }),
                    ConfigError);
}

}
