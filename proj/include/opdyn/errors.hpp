#pragma once

#include <stdexcept>
#include <string>

namespace opdyn {

// A numerical kernel failed (e.g. an SVD that did not converge).
class NumericError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// A computation exceeded a configured resource limit.
class ResourceError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class TrainingDivergedError : public std::runtime_error {
 public:
  TrainingDivergedError(const std::string& what, long epoch)
      : std::runtime_error(what), epoch(epoch) {}
  long epoch;
};

class RolloutDivergedError : public std::runtime_error {
 public:
  RolloutDivergedError(const std::string& what, long step)
      : std::runtime_error(what), step(step) {}
  long step;
};

}  // namespace opdyn
