#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>
#include <string_view>

namespace geoqa {

enum class ErrorCode {
    // geometry-core
    MalformedWkt,
    UnsupportedKind,
    MissingDistance,
    KeyParseError,
    // agent-runtime
    BackendUnavailable,
    TranscriptMiss,
    RateLimited,
    MissingSlot,
    NoJsonFound,
    JsonSyntax,
    UnknownSession,
    // knowledge-store
    NotFeatureCollection,
    EmptyText,
    EmptyIndex,
    UnknownTable,
    TableConflict,
    // planner
    UnroutableResponse,
    MalformedSpec,
    UnplannableSpec,
    NonWhitelistedCall,
    StepFailed,
    CallSyntax,
    UnknownVariable,
    // region-selector
    PlaceNotFound,
    GeocoderUnavailable,
    DegenerateBox,
    MalformedDirective,
    // entity-retriever
    MalformedDecision,
    RewriteFailed,
    EntityNotFound,
    // data-analyzer
    UnknownSpatialType,
    EmptyInput,
    // explainer
    IterationLimit,
    GraphQuerySyntax,
    UnsupportedFeature,
    UnknownEdgeType,
    EmptyValues,
    // eval-harness
    InsufficientData,
    // shared
    InvalidArgument,
    Io,
};

std::string_view to_string(ErrorCode code);

/// True for failures of an external agent/embedding backend rather than of
/// the request's domain logic. The HTTP layer maps these to 502.
bool is_backend_failure(ErrorCode code);

class Error : public std::runtime_error {
public:
    Error(ErrorCode code, const std::string& message);

    ErrorCode code() const noexcept { return code_; }

private:
    ErrorCode code_;
};

/// An error anchored at a character offset of some parsed input.
class PositionedError : public Error {
public:
    PositionedError(ErrorCode code, std::size_t position, const std::string& reason);

    std::size_t position() const noexcept { return position_; }
    const std::string& reason() const noexcept { return reason_; }

private:
    std::size_t position_;
    std::string reason_;
};

}  // namespace geoqa
