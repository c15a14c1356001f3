#pragma once

#include <stdexcept>
#include <string>
#include <vector>

namespace onr {

// Domain violations (negative powers, invalid parameter sets, bad ranges)
// are reported as std::domain_error. The types below carry extra context.

class EmptyWindowError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class FitError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class InfeasibleDesignError : public std::runtime_error {
public:
    InfeasibleDesignError(const std::string& what, double total_kappa, double kappa_loss)
        : std::runtime_error(what), total_kappa(total_kappa), kappa_loss(kappa_loss) {}

    double total_kappa;
    double kappa_loss;
};

class DimensionCapError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

struct RowError {
    int line = 0;
    std::string message;
};

class ParseError : public std::runtime_error {
public:
    explicit ParseError(std::vector<RowError> rows);

    const std::vector<RowError>& rows() const { return rows_; }

private:
    std::vector<RowError> rows_;
};

}  // namespace onr
