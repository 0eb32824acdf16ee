#include <gtest/gtest.h>

#include <cstdlib>
#include <stdexcept>

#include "ppgkit/parallel.hpp"

using namespace ppgkit;

TEST(Parallel, ResultsFollowIndexOrder) {
  setenv("PPGKIT_THREADS", "4", 1);
  EXPECT_EQ(worker_count(), 4);
  const auto out = parallel_map<int>(1000, [](std::size_t i) { return static_cast<int>(i * i); });
  for (std::size_t i = 0; i < out.size(); ++i) EXPECT_EQ(out[i], static_cast<int>(i * i));
  unsetenv("PPGKIT_THREADS");
}

TEST(Parallel, EnvironmentFallback) {
  setenv("PPGKIT_THREADS", "zero", 1);
  EXPECT_GE(worker_count(), 1);
  unsetenv("PPGKIT_THREADS");
  EXPECT_GE(worker_count(), 1);
}

TEST(Parallel, FirstExceptionIsRethrown) {
  setenv("PPGKIT_THREADS", "3", 1);
  EXPECT_THROW(parallel_for(50,
                            [](std::size_t i) {
                              if (i == 17) throw std::runtime_error("boom");
                            }),
               std::runtime_error);
  unsetenv("PPGKIT_THREADS");
}
