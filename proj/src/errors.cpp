#include "onr/errors.hpp"

namespace onr {

namespace {

std::string summarize(const std::vector<RowError>& rows) {
    std::string msg = std::to_string(rows.size()) + " malformed row(s)";
    for (const auto& r : rows) {
        msg += "\n  line " + std::to_string(r.line) + ": " + r.message;
    }
    return msg;
}

}  // namespace

ParseError::ParseError(std::vector<RowError> rows)
    : std::runtime_error(summarize(rows)), rows_(std::move(rows)) {}

}  // namespace onr
