#ifndef ELLBILL_AVERAGE_RESULT_HPP
#define ELLBILL_AVERAGE_RESULT_HPP

#include <string_view>

namespace ellbill {

enum class Method { quadrature, closed_form, time_average };

inline std::string_view to_string(Method m)
{
    switch (m) {
    case Method::quadrature: return "quadrature";
    case Method::closed_form: return "closed_form";
    case Method::time_average: return "time_average";
    }
    return "unknown";
}

/// One estimate of an average, tagged with how it was obtained.
struct AverageResult {
    double value = 0.0;
    Method method = Method::quadrature;
    /// Absolute error estimate (>= 0). Quadrature: last doubling defect.
    /// Time average: |mean over n - mean over n/2|. Closed form: 0.
    double err_estimate = 0.0;
    double lambda = 0.0;
    /// Set when a closed form was requested but could not be used and the
    /// value was obtained by quadrature instead.
    bool closed_form_unavailable = false;
};

} // namespace ellbill

#endif
