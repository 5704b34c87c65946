#ifndef LPMBRW_ERROR_HPP
#define LPMBRW_ERROR_HPP

#include <stdexcept>
#include <string>

namespace lpmbrw {

// Error classes. The numeric values double as CLI exit codes.
enum class ErrorKind : int {
  InvalidArgument = 1,
  Parse = 2,
  Model = 3,
  Budget = 4,
  Verification = 5,
  Io = 6,
};

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what)
      : std::runtime_error(what), kind_(kind) {}
  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

class BudgetExceeded : public Error {
 public:
  BudgetExceeded(unsigned generation, const std::string& what)
      : Error(ErrorKind::Budget, what), generation_(generation) {}
  unsigned generation() const noexcept { return generation_; }

 private:
  unsigned generation_;
};

inline void require(bool cond, const std::string& what) {
  if (!cond) throw Error(ErrorKind::InvalidArgument, what);
}

}  // namespace lpmbrw

#endif  // LPMBRW_ERROR_HPP
