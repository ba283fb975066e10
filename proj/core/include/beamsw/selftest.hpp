#pragma once

#include <string>
#include <vector>

namespace beamsw {

struct SelfTestCheck {
  std::string name;
  bool passed = false;
  std::string detail;
};

/// Fast invariant checks over every module (a few seconds at most).
std::vector<SelfTestCheck> run_selftest();

}  // namespace beamsw
