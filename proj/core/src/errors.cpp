#include "bearing/errors.hpp"

#include <sstream>

namespace bearing {

namespace {

std::string collocation_message(int i, int j, double distance) {
  std::ostringstream os;
  os << "nodes " << i << " and " << j << " are collocated (distance " << distance << ")";
  return os.str();
}

}  // namespace

CollocationError::CollocationError(int i, int j, double distance)
    : RuntimeEventError(collocation_message(i, j, distance)), i_(i), j_(j), distance_(distance) {}

SingularGainError::SingularGainError(int follower)
    : InfeasibleError("K_i is singular for follower " + std::to_string(follower)),
      follower_(follower) {}

}  // namespace bearing
