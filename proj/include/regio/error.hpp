#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace regio {

enum class ErrorKind {
    Domain,
    Ingestion,
    Validation,
    Downscaling,
    Normalization,
    Geometry,
    Preprocessing,
    DegenerateData,
    IndexUndefined,
    Voting,
    Seeding,
    Report,
    Export,
};

std::string_view to_string(ErrorKind kind) noexcept;

class Error : public std::runtime_error
{
public:
    Error(ErrorKind kind, const std::string& message)
    : std::runtime_error(message)
    , _kind(kind)
    {
    }

    ErrorKind kind() const noexcept
    {
        return _kind;
    }

private:
    ErrorKind _kind;
};

/// Pipeline stage an error surfaced in; the numeric value is the CLI exit status.
enum class Stage : int {
    Ingestion      = 2,
    Validation     = 3,
    Harmonization  = 4,
    Preprocessing  = 5,
    Tendency       = 6,
    Clustering     = 7,
    Profile        = 8,
    Export         = 9,
};

std::string_view to_string(Stage stage) noexcept;

class StageError : public std::runtime_error
{
public:
    StageError(Stage stage, const std::string& message);

    Stage stage() const noexcept
    {
        return _stage;
    }

    int exit_code() const noexcept
    {
        return static_cast<int>(_stage);
    }

private:
    Stage _stage;
};

}
