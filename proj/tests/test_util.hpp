#pragma once

#include <gtest/gtest.h>

#include <string>
#include <vector>

#include "willmore/checks.hpp"

namespace willmore::test_support {

/// Adds one failure per failing check, naming it.
inline void expect_no_failures(const std::vector<checks::CheckResult>& results) {
  ASSERT_FALSE(results.empty());
  for (const auto& r : results)
    EXPECT_NE(r.status, checks::Status::Fail)
        << r.module << ": " << r.name << " measured " << r.measured << " threshold " << r.threshold << " " << r.detail;
}

inline const checks::CheckResult* find(const std::vector<checks::CheckResult>& rs, const std::string& name) {
  for (const auto& r : rs)
    if (r.name == name) return &r;
  return nullptr;
}

}  // namespace willmore::test_support
