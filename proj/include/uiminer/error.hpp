#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace uiminer {

enum class ErrorKind {
    MalformedXml,
    MalformedBounds,
    EmptyHierarchy,
    DeviceUnavailable,
    DumpFailed,
    TargetNotFound,
    FixtureInvalid,
    ManifestUnavailable,
    InvalidAction,
    BackendTimeout,
    BackendRefused,
    NoApiKey,
    EmptyDeclared,
    EmptyBenchmark,
    ScorerUnavailable,
    NotFound,
    StorageFull,
    InsufficientCorpus,
    Io,
    InvalidArgument,
};

std::string_view to_string(ErrorKind kind);

// All operational failures in the toolkit surface as this exception; callers
// switch on kind() rather than on a class hierarchy.
class Error : public std::runtime_error {
public:
    Error(ErrorKind kind, const std::string& detail)
        : std::runtime_error(std::string(to_string(kind)) + ": " + detail), kind_(kind), detail_(detail) {}

    ErrorKind kind() const noexcept { return kind_; }
    const std::string& detail() const noexcept { return detail_; }

private:
    ErrorKind kind_;
    std::string detail_;
};

}  // namespace uiminer
