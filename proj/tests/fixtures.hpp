/**
 * @file fixtures.hpp
 * @brief Shared inline machine fixtures for the unit suites.
 */
#ifndef SELFSIM_TESTS_FIXTURES_HPP
#define SELFSIM_TESTS_FIXTURES_HPP

#include <string>

namespace fixtures {

// Binary adding machine: t adds one with carry.
inline const char* kOdometer = R"({
  "alphabet": ["0", "1"],
  "identity": "e",
  "states": [
    {"name": "e", "invertible": true,
     "transitions": {"0": ["0", "e"], "1": ["1", "e"]}},
    {"name": "t", "invertible": true,
     "transitions": {"0": ["1", "e"], "1": ["0", "t"]}}
  ],
  "generators": ["t"]
})";

// Three-peg tower machine: a, b, c are involutions, each fixing one letter.
inline const char* kHanoi = R"({
  "alphabet": ["0", "1", "2"],
  "identity": "e",
  "states": [
    {"name": "e", "invertible": true,
     "transitions": {"0": ["0", "e"], "1": ["1", "e"], "2": ["2", "e"]}},
    {"name": "a", "invertible": true,
     "transitions": {"0": ["1", "e"], "1": ["0", "e"], "2": ["2", "a"]}},
    {"name": "b", "invertible": true,
     "transitions": {"0": ["2", "e"], "2": ["0", "e"], "1": ["1", "b"]}},
    {"name": "c", "invertible": true,
     "transitions": {"1": ["2", "e"], "2": ["1", "e"], "0": ["0", "c"]}}
  ],
  "generators": ["a", "b", "c"]
})";

// Long-range machine: t adds one, u jumps by powers of two.
inline const char* kLongRange = R"({
  "alphabet": ["0", "1"],
  "identity": "e",
  "states": [
    {"name": "e", "invertible": true,
     "transitions": {"0": ["0", "e"], "1": ["1", "e"]}},
    {"name": "t", "invertible": true,
     "transitions": {"0": ["1", "e"], "1": ["0", "t"]}},
    {"name": "u", "invertible": true,
     "transitions": {"0": ["0", "u"], "1": ["1", "t"]}}
  ],
  "generators": ["t", "u"]
})";

// A deliberately partial machine for hole handling: p reads only letter 0.
inline const char* kPartial = R"({
  "alphabet": ["0", "1"],
  "identity": "e",
  "states": [
    {"name": "e", "invertible": true,
     "transitions": {"0": ["0", "e"], "1": ["1", "e"]}},
    {"name": "p", "invertible": true,
     "transitions": {"0": ["1", "p"]}}
  ],
  "generators": ["p"]
})";

}  // namespace fixtures

#endif  // SELFSIM_TESTS_FIXTURES_HPP
