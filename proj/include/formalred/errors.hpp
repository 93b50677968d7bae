#ifndef FORMALRED_ERRORS_HPP
#define FORMALRED_ERRORS_HPP

#include <stdexcept>
#include <string>

namespace formalred {

// A mathematical hypothesis of an operation does not hold for the given
// input (shared eigenvalues, omega-spectrum overlap, wrong leading form,
// insufficient known order). The CLI maps these to exit code 2.
class precondition_error : public std::runtime_error {
public:
    explicit precondition_error(const std::string& what) : std::runtime_error(what) {}
};

// A certificate that is guaranteed by a theorem failed to verify; indicates
// an implementation bug or a silently violated precondition.
class consistency_error : public std::logic_error {
public:
    explicit consistency_error(const std::string& what) : std::logic_error(what) {}
};

} // namespace formalred

#endif // FORMALRED_ERRORS_HPP
