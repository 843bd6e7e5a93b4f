#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace recon {

enum class Errc {
  load,             // scenario/episode document violates its schema
  integrity,        // dangling reference, duplicate symbol
  argument,         // bad argument to an operation
  not_in_database,  // class unknown to the object database
  syntax,           // domain text syntax error
  semantic,         // domain text references undeclared names
  unparseable,      // query/rebuttal text not understood
  clarification,    // rebuttal cannot be tied to the last explanation
  backend,          // chat backend failure
  extraction,       // no parsable Final answer
  oracle_unavailable,
  undefined_metric,
  phase,            // session phase violation
  not_found,
  out_of_bounds,
  classification,
};

std::string_view to_string(Errc code);

class Error : public std::runtime_error {
 public:
  Error(Errc code, const std::string& message)
      : std::runtime_error(message), code_(code) {}

  Errc code() const noexcept { return code_; }

 private:
  Errc code_;
};

class SyntaxError : public Error {
 public:
  SyntaxError(const std::string& message, int line, int column)
      : Error(Errc::syntax, message + " at " + std::to_string(line) + ":" +
                                std::to_string(column)),
        line_(line),
        column_(column) {}

  int line() const noexcept { return line_; }
  int column() const noexcept { return column_; }

 private:
  int line_;
  int column_;
};

enum class BackendErrc { timeout, transport, http_status, malformed_body, extraction, not_configured };

std::string_view to_string(BackendErrc category);

class BackendError : public Error {
 public:
  BackendError(BackendErrc category, const std::string& message)
      : Error(Errc::backend, std::string(to_string(category)) + ": " + message),
        category_(category) {}

  BackendErrc category() const noexcept { return category_; }

 private:
  BackendErrc category_;
};

}  // namespace recon
