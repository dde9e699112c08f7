#ifndef CAUCHYPROP_ERRORS_HPP
#define CAUCHYPROP_ERRORS_HPP

#include <stdexcept>
#include <string>

namespace cauchyprop {

// Shapes of operator and state do not agree.
class DimensionError : public std::invalid_argument {
public:
    explicit DimensionError(const std::string& what) : std::invalid_argument(what) {}
};

// NaN or Inf found in an input or produced during evaluation.
class NonFiniteError : public std::domain_error {
public:
    explicit NonFiniteError(const std::string& what) : std::domain_error(what) {}
};

// Direct series summation refused: |dt| * norm^(1/N) exceeds the safety radius.
class RadiusExceeded : public std::out_of_range {
public:
    RadiusExceeded(const std::string& what, double radius, double limit)
        : std::out_of_range(what), radius_(radius), limit_(limit) {}

    double radius() const noexcept { return radius_; }
    double limit() const noexcept { return limit_; }

private:
    double radius_;
    double limit_;
};

} // namespace cauchyprop

#endif
