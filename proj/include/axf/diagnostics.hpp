#pragma once

#include <cstddef>
#include <sstream>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace axf {

/// Location of a construct in a source text. Offsets are byte offsets into the
/// text; line and column are 1-based. A default span (line 0) means "unknown".
struct SourceSpan {
  std::string file;
  std::size_t start = 0;
  std::size_t end = 0;
  std::size_t line = 0;
  std::size_t column = 0;

  bool known() const { return line != 0; }
};

struct Diagnostic {
  std::string code;
  std::string message;
  SourceSpan span;
};

inline std::string format_diagnostic(const Diagnostic& d) {
  std::ostringstream out;
  if (d.span.known()) {
    out << (d.span.file.empty() ? "<input>" : d.span.file) << ':' << d.span.line << ':'
        << d.span.column << ": ";
  }
  out << "error[" << d.code << "]: " << d.message;
  return out.str();
}

/// Base error for everything the library reports. `code` is a short stable
/// identifier (e.g. "arity", "stratification") used by the CLI and tests.
class Error : public std::runtime_error {
 public:
  Error(std::string code, const std::string& message, SourceSpan span = {})
      : std::runtime_error(message), code_(std::move(code)), span_(std::move(span)) {}

  const std::string& code() const { return code_; }
  const SourceSpan& span() const { return span_; }

 private:
  std::string code_;
  SourceSpan span_;
};

/// An input that could not be accepted: carries every diagnostic found.
class InputError : public Error {
 public:
  explicit InputError(std::vector<Diagnostic> diagnostics)
      : Error(diagnostics.empty() ? "input" : diagnostics.front().code, summarize(diagnostics),
              diagnostics.empty() ? SourceSpan{} : diagnostics.front().span),
        diagnostics_(std::move(diagnostics)) {}

  const std::vector<Diagnostic>& diagnostics() const { return diagnostics_; }

 private:
  static std::string summarize(const std::vector<Diagnostic>& ds) {
    std::string s;
    for (const auto& d : ds) {
      if (!s.empty()) s += '\n';
      s += format_diagnostic(d);
    }
    return s;
  }

  std::vector<Diagnostic> diagnostics_;
};

/// A violated internal invariant (a bug, not bad input).
class InternalError : public Error {
 public:
  explicit InternalError(const std::string& message) : Error("internal", message) {}
};

}  // namespace axf
