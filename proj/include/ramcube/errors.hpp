#ifndef RAMCUBE_ERRORS_HPP
#define RAMCUBE_ERRORS_HPP

#include <stdexcept>
#include <string>

namespace ramcube {

// Base of every library error; `kind` is a stable machine-readable tag.
class Error : public std::runtime_error {
public:
    Error(std::string kind, const std::string& msg)
        : std::runtime_error(msg), kind_(std::move(kind)) {}
    const std::string& kind() const { return kind_; }

private:
    std::string kind_;
};

#define RAMCUBE_ERROR(Name, tag)                                        \
    class Name : public Error {                                         \
    public:                                                             \
        explicit Name(const std::string& msg) : Error(tag, msg) {}      \
    }

RAMCUBE_ERROR(InvalidPlacement, "invalid_placement");
RAMCUBE_ERROR(MalformedCell, "malformed_cell");
RAMCUBE_ERROR(FrozenComplex, "frozen_complex");
RAMCUBE_ERROR(NotAVertex, "not_a_vertex");
RAMCUBE_ERROR(NotACycle, "not_a_cycle");
RAMCUBE_ERROR(InconsistentHeight, "inconsistent_height");
RAMCUBE_ERROR(InvalidVoltage, "invalid_voltage");
RAMCUBE_ERROR(NoSolution, "no_solution");
RAMCUBE_ERROR(DevelopmentError, "development_inconsistency");
RAMCUBE_ERROR(RadiusTooLarge, "radius_too_large");
RAMCUBE_ERROR(InvalidDiagram, "invalid_diagram");
RAMCUBE_ERROR(BudgetExceeded, "budget_exceeded");
RAMCUBE_ERROR(BoundExceeded, "bound_exceeded");
RAMCUBE_ERROR(FormatError, "format_error");

#undef RAMCUBE_ERROR

}  // namespace ramcube

#endif
