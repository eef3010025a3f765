// Full acceptance suite: one PASS/FAIL line per criterion, nonzero exit on any
// failure.
#include <algorithm>
#include <iostream>

#include "chaoslab/harness/run.hpp"
#include "chaoslab/parallel.hpp"

int main() {
  using namespace chaoslab::harness;
  const auto lines = verify(Suite::kFull, chaoslab::default_thread_count(), std::cout);
  const bool ok = std::all_of(lines.begin(), lines.end(), [](const VerifyLine& l) { return l.pass; });
  return ok ? 0 : 1;
}
