#pragma once
// Error taxonomy shared across the pipeline. Validation failures (bad input
// data, bad config) are distinguished from everything else so the CLI can
// map them to a dedicated exit code.

#include <stdexcept>
#include <string>

namespace symatlas {

struct ValidationError : std::runtime_error {
    explicit ValidationError(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace symatlas
