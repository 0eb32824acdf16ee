#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>

#include "fixtures.hpp"
#include "ppgkit/diagnostics.hpp"

using namespace ppgkit;
using namespace ppgkit::testing;

namespace {

std::filesystem::path temp_file(const std::string& name) {
  return std::filesystem::temp_directory_path() / ("ppgkit_test_" + name);
}

ErrorCode load_error(const std::string& text) {
  const auto path = temp_file("bad.json");
  std::ofstream(path) << text;
  try {
    load_mdp(path);
  } catch (const Error& e) {
    return e.code();
  }
  ADD_FAILURE() << "load succeeded";
  return ErrorCode::BadSpec;
}

}  // namespace

TEST(Generate, BanditRewardsAndGap) {
  const TabularMdp mdp = generate(BanditSpec{0.9, 0.5});
  EXPECT_EQ(mdp.num_states(), 1);
  EXPECT_EQ(mdp.num_actions(), 2);
  EXPECT_DOUBLE_EQ(mdp.r(0, 0, 0), 0.75);
  EXPECT_DOUBLE_EQ(mdp.r(0, 1, 0), 0.25);
  EXPECT_NEAR(solve_optimal(mdp).delta, 0.5, 1e-12);
}

TEST(Generate, RandomIsDeterministic) {
  EXPECT_TRUE(generate(RandomSpec{123, 6, 4, 0.9, 0.2}) == generate(RandomSpec{123, 6, 4, 0.9, 0.2}));
  EXPECT_FALSE(generate(RandomSpec{123, 6, 4, 0.9, 0.2}) == generate(RandomSpec{124, 6, 4, 0.9, 0.2}));
}

TEST(Generate, DenseRowsArePositive) {
  const TabularMdp mdp = generate(RandomSpec{5, 7, 3, 0.9, 0.0});
  EXPECT_TRUE(validate_mdp(mdp).ok());
  for (double p : mdp.transition()) EXPECT_GT(p, 0.0);
}

TEST(Generate, SparsityControlsSupport) {
  const TabularMdp mdp = generate(RandomSpec{5, 10, 2, 0.9, 0.75});
  EXPECT_TRUE(validate_mdp(mdp).ok());
  for (int s = 0; s < 10; ++s) {
    for (int a = 0; a < 2; ++a) {
      int nonzero = 0;
      for (int n = 0; n < 10; ++n) nonzero += mdp.p(s, a, n) > 0.0;
      EXPECT_EQ(nonzero, 3);  // ceil(0.25 * 10)
    }
  }
}

TEST(Generate, ChainMovesRight) {
  const TabularMdp mdp = generate(ChainSpec{4, 0.9});
  EXPECT_EQ(mdp.p(0, 1, 1), 1.0);
  EXPECT_EQ(mdp.p(0, 0, 0), 1.0);
  EXPECT_EQ(mdp.r(2, 1, 3), 1.0);
  EXPECT_EQ(mdp.r(3, 1, 3), 1.0);
  const OptimalSolution opt = solve_optimal(mdp);
  for (int s = 0; s < 4; ++s) EXPECT_EQ(opt.optimal_sets[static_cast<std::size_t>(s)], ActionSet{1});
}

TEST(Generate, BadSpecs) {
  for (const GeneratorSpec& spec : std::vector<GeneratorSpec>{RandomSpec{1, 0, 2, 0.9, 0.0}, RandomSpec{1, 2, 2, 1.0, 0.0},
                                                               RandomSpec{1, 2, 2, 0.9, 1.0}, BanditSpec{0.9, 0.0},
                                                               BanditSpec{0.9, 1.5}, ChainSpec{0, 0.9}}) {
    try {
      generate(spec);
      ADD_FAILURE() << "expected BadSpec";
    } catch (const Error& e) {
      EXPECT_EQ(e.code(), ErrorCode::BadSpec);
    }
  }
}

TEST(CounterRng, StreamsAreIndependentAndReproducible) {
  CounterRng a(1, 0), b(1, 0), c(1, 1);
  for (int i = 0; i < 100; ++i) {
    const auto x = a.next_u64();
    EXPECT_EQ(x, b.next_u64());
    EXPECT_NE(x, c.next_u64());
  }
  CounterRng u(3, 4);
  for (int i = 0; i < 1000; ++i) {
    const double x = u.uniform();
    EXPECT_GE(x, 0.0);
    EXPECT_LT(x, 1.0);
    EXPECT_LT(u.below(7), 7u);
  }
}

TEST(Persistence, RoundTrip) {
  const TabularMdp mdp = generate(RandomSpec{77, 5, 3, 0.95, 0.4});
  const auto path = temp_file("roundtrip.json");
  save_mdp(mdp, path);
  EXPECT_TRUE(load_mdp(path) == mdp);
}

TEST(Persistence, SchemaFieldNames) {
  const std::string text = mdp_to_json(bandit());
  for (const char* key : {"\"num_states\"", "\"num_actions\"", "\"gamma\"", "\"mu\"", "\"P\"", "\"r\""}) {
    EXPECT_NE(text.find(key), std::string::npos) << key;
  }
  EXPECT_EQ(format_double(0.1), "0.10000000000000001");
}

TEST(Persistence, RowSumBelowOneFailsValidation) {
  EXPECT_EQ(load_error(R"({"num_states":1,"num_actions":1,"gamma":0.9,"mu":[1],"P":[[[0.9]]],"r":[[[0]]]})"),
            ErrorCode::ValidationFailed);
}

TEST(Persistence, MissingFieldNamesIt) {
  const auto path = temp_file("nogamma.json");
  std::ofstream(path) << R"({"num_states":1,"num_actions":1,"mu":[1],"P":[[[1]]],"r":[[[0]]]})";
  try {
    load_mdp(path);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::ParseError);
    EXPECT_NE(std::string(e.what()).find("gamma"), std::string::npos);
  }
}

TEST(Persistence, MalformedInputs) {
  EXPECT_EQ(load_error("{not json"), ErrorCode::ParseError);
  EXPECT_EQ(load_error(R"({"num_states":1,"num_actions":1,"gamma":0.9,"mu":[1],"P":[[[1, 0]]],"r":[[[0]]]})"),
            ErrorCode::ParseError);
  try {
    load_mdp(temp_file("does_not_exist.json"));
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::IoError);
  }
}
