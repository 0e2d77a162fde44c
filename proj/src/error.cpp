#include "regio/error.hpp"

namespace regio {

std::string_view to_string(ErrorKind kind) noexcept
{
    switch (kind) {
    case ErrorKind::Domain: return "domain error";
    case ErrorKind::Ingestion: return "ingestion error";
    case ErrorKind::Validation: return "validation error";
    case ErrorKind::Downscaling: return "downscaling error";
    case ErrorKind::Normalization: return "normalization error";
    case ErrorKind::Geometry: return "geometry error";
    case ErrorKind::Preprocessing: return "preprocessing error";
    case ErrorKind::DegenerateData: return "degenerate data";
    case ErrorKind::IndexUndefined: return "index undefined";
    case ErrorKind::Voting: return "voting error";
    case ErrorKind::Seeding: return "seeding error";
    case ErrorKind::Report: return "report error";
    case ErrorKind::Export: return "export error";
    }
    return "error";
}

std::string_view to_string(Stage stage) noexcept
{
    switch (stage) {
    case Stage::Ingestion: return "ingestion";
    case Stage::Validation: return "validation";
    case Stage::Harmonization: return "harmonization";
    case Stage::Preprocessing: return "preprocessing";
    case Stage::Tendency: return "tendency";
    case Stage::Clustering: return "clustering";
    case Stage::Profile: return "profile";
    case Stage::Export: return "export";
    }
    return "unknown";
}

StageError::StageError(Stage stage, const std::string& message)
: std::runtime_error("[" + std::string(to_string(stage)) + "] " + message)
, _stage(stage)
{
}

}
