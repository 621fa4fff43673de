#pragma once

#include <stdexcept>
#include <string>
#include <vector>

namespace csm {

/// Base class of every error raised by the library.
class Error : public std::runtime_error
{
public:
  using std::runtime_error::runtime_error;
};

enum class DiagnosticCategory { Syntax, Schema, Reference, PhaseOrder, Invariant, UnknownActivity, NonMonotonicTime };

struct Diagnostic
{
  DiagnosticCategory category;
  std::string locator;  // path-like, e.g. "elements[3].diagram"
  std::string message;

  bool operator==(const Diagnostic &) const = default;
};

std::string to_string(DiagnosticCategory c);
std::string to_string(const Diagnostic &d);

/// A document failed to parse or validate. Carries every violation found.
class DocumentError : public Error
{
public:
  explicit DocumentError(std::vector<Diagnostic> diagnostics);

  const std::vector<Diagnostic> &diagnostics() const noexcept { return diagnostics_; }
  bool has(DiagnosticCategory c) const;

private:
  std::vector<Diagnostic> diagnostics_;
};

class UnmappedKindError : public Error
{
public:
  using Error::Error;
};

class UnknownRootError : public Error
{
public:
  using Error::Error;
};

class NotCompositeError : public Error
{
public:
  using Error::Error;
};

class InvalidRootError : public Error
{
public:
  using Error::Error;
};

class GradeMismatchError : public Error
{
public:
  using Error::Error;
};

/// Generated workflow arcs contain a cycle (only possible with hand-written BDRs).
class CycleError : public Error
{
public:
  using Error::Error;
};

class IllegalTransitionError : public Error
{
public:
  using Error::Error;
};

/// Violation of the check-out/check-in protocol.
class ProtocolError : public Error
{
public:
  enum class Code {
    WorkflowNotExecuting,
    TimeOrder,
    NoOpenCheckout,
    RepeatedCheckout,
    UnknownActivity,
    UndeclaredArtifact,
  };

  ProtocolError(Code code, std::string message, std::string locator = {});

  Code code() const noexcept { return code_; }
  const std::string &locator() const noexcept { return locator_; }

private:
  Code code_;
  std::string locator_;
};

std::string to_string(ProtocolError::Code c);

} // namespace csm
