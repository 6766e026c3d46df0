// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <stdexcept>
#include <string>

namespace qkd {

// Error categories double as process exit codes for the command line tool.
enum class ErrorCategory : int {
  Validation = 2,  // invalid parameters, tallies or file contents
  Io = 3,          // missing or unreadable/unwritable files
  Analysis = 4,    // infeasible or degenerate security analysis
};

class Error : public std::runtime_error {
 public:
  Error(ErrorCategory category, std::string message)
      : std::runtime_error(std::move(message)), category_(category) {}

  ErrorCategory category() const { return category_; }

 private:
  ErrorCategory category_;
};

class ValidationError : public Error {
 public:
  explicit ValidationError(std::string message)
      : Error(ErrorCategory::Validation, std::move(message)) {}
};

class IoError : public Error {
 public:
  explicit IoError(std::string message)
      : Error(ErrorCategory::Io, std::move(message)) {}
};

class AnalysisError : public Error {
 public:
  explicit AnalysisError(std::string message)
      : Error(ErrorCategory::Analysis, std::move(message)) {}
};

}  // namespace qkd
