#include <gtest/gtest.h>

#include <random>

#include "cbsrv/cbsrv.hpp"
#include "support.hpp"

using namespace cbsrv;

TEST(ModelText, BundledFilesMatchBuiltins) {
  EXPECT_EQ(load_model(CBSRV_MODELS_DIR "/task.model"), builtin_task());
  EXPECT_EQ(load_model(CBSRV_MODELS_DIR "/rw.model"), builtin_readers_writers());
  EXPECT_EQ(parse_monitor(read_file(CBSRV_MODELS_DIR "/task_homogeneity.monitor")), builtin_task_monitor());
}

TEST(ModelText, RoundTripsEveryStage) {
  for (const CompositeSystem* s : {&cbsrv::testing::task(), &cbsrv::testing::task_partial(),
                                   &cbsrv::testing::task_monitored()}) {
    const std::string text = render_model(*s);
    EXPECT_EQ(parse_model(text), *s) << text;
    EXPECT_EQ(render_model(parse_model(text)), text);
  }
}

TEST(ModelJson, RoundTripsEveryStage) {
  for (const CompositeSystem* s : {&cbsrv::testing::task(), &cbsrv::testing::task_partial(),
                                   &cbsrv::testing::task_monitored()}) {
    const std::string json = render_model_json(*s);
    EXPECT_EQ(parse_model_json(json), *s);
    EXPECT_EQ(parse_model(json), *s) << "parse_model dispatches on '{'";
  }
}

TEST(ModelText, OptionalPartsAndComments) {
  const CompositeSystem s = parse_model(R"(
    // a comment
    component A {
      ports p;
      locations l;
      initial l;
      transition l -p-> l;
    }
    interaction go { ports: A.p; }
  )");
  ASSERT_EQ(s.components.size(), 1u);
  EXPECT_TRUE(s.components[0].transitions[0].step.empty());
  EXPECT_TRUE(structurally_equal(s.components[0].transitions[0].guard, ex::lit(true)));
}

TEST(ModelText, SyntaxErrorsCarryPositions) {
  try {
    parse_model("component A {\n  ports p\n}");
    FAIL() << "expected SyntaxError";
  } catch (const SyntaxError& e) {
    EXPECT_EQ(e.line(), 3);
    EXPECT_GT(e.column(), 0);
  }
  EXPECT_THROW(parse_model("interaction x { ports: A.p; }"), ValidationError);
  EXPECT_THROW(parse_model("{ not json"), SyntaxError);
}

TEST(ModelText, RgtBlockMustMatchDerivedTransitions) {
  std::string text = render_model(cbsrv::testing::task_monitored());
  const auto pos = text.find("/ new(ex12)");
  ASSERT_NE(pos, std::string::npos) << text;
  text.replace(pos, 11, "/ new(nt)");
  EXPECT_THROW(parse_model(text), SyntaxError);
}

TEST(ModelText, UnreadableFile) {
  try {
    load_model("/nonexistent/task.model");
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), Errc::invalid_argument);
  }
}

TEST(Property, RandomSystemsRoundTrip) {
  std::mt19937_64 rng(5);
  for (int i = 0; i < 200; ++i) {
    const CompositeSystem s = cbsrv::testing::random_system(rng);
    ASSERT_TRUE(validate(s).empty()) << render_model(s);
    const CompositeSystem p = to_partial(s);
    EXPECT_EQ(parse_model(render_model(s)), s);
    EXPECT_EQ(parse_model(render_model(p)), p);
    EXPECT_EQ(parse_model_json(render_model_json(p)), p);
    const CompositeSystem r = transform_system(p, std::nullopt);
    EXPECT_EQ(parse_model(render_model(r)), r);
  }
}
