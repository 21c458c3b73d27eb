#pragma once

#include <stdexcept>
#include <string>

namespace freebeam {

// Invalid physical input (nonpositive energy, R <= 0, ...).
struct domain_error : std::domain_error {
    explicit domain_error(const std::string& what) : std::domain_error(what) {}
};

// Violated structural precondition (non-uniform grid, truncation too small, ...).
struct contract_error : std::invalid_argument {
    explicit contract_error(const std::string& what) : std::invalid_argument(what) {}
};

} // namespace freebeam
