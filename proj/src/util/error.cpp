#include "uiminer/error.hpp"

namespace uiminer {

std::string_view to_string(ErrorKind kind) {
    switch (kind) {
        case ErrorKind::MalformedXml: return "MalformedXml";
        case ErrorKind::MalformedBounds: return "MalformedBounds";
        case ErrorKind::EmptyHierarchy: return "EmptyHierarchy";
        case ErrorKind::DeviceUnavailable: return "DeviceUnavailable";
        case ErrorKind::DumpFailed: return "DumpFailed";
        case ErrorKind::TargetNotFound: return "TargetNotFound";
        case ErrorKind::FixtureInvalid: return "FixtureInvalid";
        case ErrorKind::ManifestUnavailable: return "ManifestUnavailable";
        case ErrorKind::InvalidAction: return "InvalidAction";
        case ErrorKind::BackendTimeout: return "BackendTimeout";
        case ErrorKind::BackendRefused: return "BackendRefused";
        case ErrorKind::NoApiKey: return "NoApiKey";
        case ErrorKind::EmptyDeclared: return "EmptyDeclared";
        case ErrorKind::EmptyBenchmark: return "EmptyBenchmark";
        case ErrorKind::ScorerUnavailable: return "ScorerUnavailable";
        case ErrorKind::NotFound: return "NotFound";
        case ErrorKind::StorageFull: return "StorageFull";
        case ErrorKind::InsufficientCorpus: return "InsufficientCorpus";
        case ErrorKind::Io: return "Io";
        case ErrorKind::InvalidArgument: return "InvalidArgument";
    }
    return "Unknown";
}

}  // namespace uiminer
