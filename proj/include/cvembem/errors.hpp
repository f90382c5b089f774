// SPDX-License-Identifier: Apache-2.0

#ifndef CVEMBEM_ERRORS_HPP
#define CVEMBEM_ERRORS_HPP

#include <stdexcept>
#include <string>

namespace cvembem
{

// Argument outside the domain of a function (curve parameter, Bessel argument, ...).
class DomainError : public std::domain_error
{
public:
  using std::domain_error::domain_error;
};

// Invalid user input: configuration keys, generator parameters, refinement level.
class ConfigError : public std::invalid_argument
{
public:
  using std::invalid_argument::invalid_argument;
};

// Malformed mesh file. Carries the offending line number (1-based, 0 if unknown).
class ParseError : public std::runtime_error
{
public:
  ParseError(const std::string &msg, int line)
    : std::runtime_error("line " + std::to_string(line) + ": " + msg), line_(line)
  {
  }
  int Line() const { return line_; }

private:
  int line_;
};

// Degenerate element data or a Gamma loop that cannot be closed.
class AssemblyError : public std::runtime_error
{
public:
  using std::runtime_error::runtime_error;
};

// Singular or numerically unreliable linear system.
class SolverError : public std::runtime_error
{
public:
  SolverError(const std::string &msg, double pivot_rcond)
    : std::runtime_error(msg), rcond_(pivot_rcond)
  {
  }
  double PivotRcond() const { return rcond_; }

private:
  double rcond_;
};

}  // namespace cvembem

#endif  // CVEMBEM_ERRORS_HPP
