#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace bigraph {

enum class ErrorKind {
    ArityMismatch,
    SortMismatch,
    WidthMismatch,
    AtomicViolation,
    UnknownName,
    EmptyClosure,
    IndexOutOfRange,
    NameClash,
    NotGround,
    PatternNotSolid,
    TargetNotGround,
    InnerInterfaceMismatch,
    OuterInterfaceMismatch,
    InvalidInstMap,
    LhsNotSolid,
    ConstraintViolated,
    SyntaxError,
    UnknownIdentifier,
    DuplicateDefinition,
    TypeError,
    InitNotGround,
    UnknownRuleInBlock,
    MixedLabelKinds,
    ActionPartitionError,
    DivergentInstantaneous,
    NonConfluence,
    PartialSystem,
    Unsupported,
    Io,
};

std::string_view to_string(ErrorKind kind);

// Every failure raised by the library carries a kind so callers (and tests)
// can branch on it without parsing messages.
class Error : public std::runtime_error {
public:
    Error(ErrorKind kind, const std::string& message)
        : std::runtime_error(message), kind_(kind) {}

    ErrorKind kind() const noexcept { return kind_; }

private:
    ErrorKind kind_;
};

[[noreturn]] inline void fail(ErrorKind kind, const std::string& message) {
    throw Error(kind, message);
}

} // namespace bigraph
