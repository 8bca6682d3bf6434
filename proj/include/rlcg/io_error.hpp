#pragma once

#include <stdexcept>

namespace rlcg {

// A file could not be opened, read or written.
class IoError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace rlcg
