#ifndef ELLBILL_ERRORS_HPP
#define ELLBILL_ERRORS_HPP

#include <stdexcept>
#include <string>

namespace ellbill {

/// An argument lies outside the mathematical domain of an operation.
class DomainError : public std::domain_error {
public:
    using std::domain_error::domain_error;
};

/// An iterative method failed to converge or produced an unusable value.
class NumericalError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Two routes that must agree (closed form vs quadrature, identity checks) did not.
class ConsistencyError : public std::logic_error {
public:
    using std::logic_error::logic_error;
};

} // namespace ellbill

#endif
