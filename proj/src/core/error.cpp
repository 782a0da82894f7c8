#include "geoqa/error.hpp"

namespace geoqa {

std::string_view to_string(ErrorCode code) {
    switch (code) {
        case ErrorCode::MalformedWkt: return "MalformedWkt";
        case ErrorCode::UnsupportedKind: return "UnsupportedKind";
        case ErrorCode::MissingDistance: return "MissingDistance";
        case ErrorCode::KeyParseError: return "KeyParseError";
        case ErrorCode::BackendUnavailable: return "BackendUnavailable";
        case ErrorCode::TranscriptMiss: return "TranscriptMiss";
        case ErrorCode::RateLimited: return "RateLimited";
        case ErrorCode::MissingSlot: return "MissingSlot";
        case ErrorCode::NoJsonFound: return "NoJsonFound";
        case ErrorCode::JsonSyntax: return "JsonSyntax";
        case ErrorCode::UnknownSession: return "UnknownSession";
        case ErrorCode::NotFeatureCollection: return "NotFeatureCollection";
        case ErrorCode::EmptyText: return "EmptyText";
        case ErrorCode::EmptyIndex: return "EmptyIndex";
        case ErrorCode::UnknownTable: return "UnknownTable";
        case ErrorCode::TableConflict: return "TableConflict";
        case ErrorCode::UnroutableResponse: return "UnroutableResponse";
        case ErrorCode::MalformedSpec: return "MalformedSpec";
        case ErrorCode::UnplannableSpec: return "UnplannableSpec";
        case ErrorCode::NonWhitelistedCall: return "NonWhitelistedCall";
        case ErrorCode::StepFailed: return "StepFailed";
        case ErrorCode::CallSyntax: return "CallSyntax";
        case ErrorCode::UnknownVariable: return "UnknownVariable";
        case ErrorCode::PlaceNotFound: return "PlaceNotFound";
        case ErrorCode::GeocoderUnavailable: return "GeocoderUnavailable";
        case ErrorCode::DegenerateBox: return "DegenerateBox";
        case ErrorCode::MalformedDirective: return "MalformedDirective";
        case ErrorCode::MalformedDecision: return "MalformedDecision";
        case ErrorCode::RewriteFailed: return "RewriteFailed";
        case ErrorCode::EntityNotFound: return "EntityNotFound";
        case ErrorCode::UnknownSpatialType: return "UnknownSpatialType";
        case ErrorCode::EmptyInput: return "EmptyInput";
        case ErrorCode::IterationLimit: return "IterationLimit";
        case ErrorCode::GraphQuerySyntax: return "GraphQuerySyntax";
        case ErrorCode::UnsupportedFeature: return "UnsupportedFeature";
        case ErrorCode::UnknownEdgeType: return "UnknownEdgeType";
        case ErrorCode::EmptyValues: return "EmptyValues";
        case ErrorCode::InsufficientData: return "InsufficientData";
        case ErrorCode::InvalidArgument: return "InvalidArgument";
        case ErrorCode::Io: return "Io";
    }
    return "Unknown";
}

bool is_backend_failure(ErrorCode code) {
    switch (code) {
        case ErrorCode::BackendUnavailable:
        case ErrorCode::TranscriptMiss:
        case ErrorCode::RateLimited:
        case ErrorCode::GeocoderUnavailable:
            return true;
        default:
            return false;
    }
}

Error::Error(ErrorCode code, const std::string& message)
    : std::runtime_error(std::string(to_string(code)) + ": " + message), code_(code) {}

PositionedError::PositionedError(ErrorCode code, std::size_t position, const std::string& reason)
    : Error(code, reason + " (at offset " + std::to_string(position) + ")"),
      position_(position),
      reason_(reason) {}

}  // namespace geoqa
