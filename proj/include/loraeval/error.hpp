#ifndef LORAEVAL_ERROR_HPP
#define LORAEVAL_ERROR_HPP

#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace loraeval {

/// Malformed input: unreadable file, bad syntax, wrong field type.
class ParseError : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

/// A single violated model invariant. `index` is the offending ED/GW index,
/// or -1 when the issue is not tied to one element.
struct ValidationIssue {
  std::string message;
  long index = -1;
};

/// Thrown when a configuration parses but violates model invariants. Carries
/// every violation found, not just the first.
class ValidationError : public std::runtime_error {
public:
  explicit ValidationError(std::vector<ValidationIssue> issues)
      : std::runtime_error(join(issues)), issues_(std::move(issues)) {}

  const std::vector<ValidationIssue>& issues() const noexcept { return issues_; }

private:
  static std::string join(const std::vector<ValidationIssue>& issues) {
    std::string out;
    for (const auto& issue : issues) {
      if (!out.empty()) out += "; ";
      out += issue.message;
    }
    return out;
  }

  std::vector<ValidationIssue> issues_;
};

/// Missing key in one of the radio lookup tables.
class LookupError : public std::out_of_range {
public:
  using std::out_of_range::out_of_range;
};

}  // namespace loraeval

#endif
