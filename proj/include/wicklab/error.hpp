#ifndef WICKLAB_ERROR_HPP
#define WICKLAB_ERROR_HPP

#include <cstddef>
#include <stdexcept>
#include <string>

namespace wicklab {

/// Malformed expression text. `offset()` is the byte position of the problem.
class ParseError : public std::runtime_error {
 public:
  ParseError(std::size_t offset, const std::string& what)
      : std::runtime_error("at offset " + std::to_string(offset) + ": " + what),
        offset_(offset) {}

  std::size_t offset() const noexcept { return offset_; }

 private:
  std::size_t offset_;
};

/// A configured size cap (grid size, vertex count, diagram budget) was exceeded.
class CapacityError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A computation produced a non-finite value.
class NumericError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace wicklab

#endif  // WICKLAB_ERROR_HPP
