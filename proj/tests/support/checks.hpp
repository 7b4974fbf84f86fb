#pragma once

#include <functional>

#include <gtest/gtest.h>

#include "superkrylov/error.hpp"

namespace superkrylov::testing {

inline void expect_error(ErrorCode code, const std::function<void()>& fn) {
  try {
    fn();
    ADD_FAILURE() << "expected " << to_string(code);
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), code) << e.what();
  }
}

}  // namespace superkrylov::testing
