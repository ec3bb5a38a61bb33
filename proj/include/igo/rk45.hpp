#pragma once

#include <functional>
#include <vector>

namespace igo {

using OdeField =
    std::function<std::vector<double>(const std::vector<double>&, double)>;

// Dormand–Prince 5(4) with FSAL and PI step-size control. Integrates from
// t0 to t1 in either direction; the local error estimate per step is held
// to atol + rtol * |x| in the scaled RMS norm.
std::vector<double> rk45_integrate(const OdeField& field,
                                   std::vector<double> x0, double t0,
                                   double t1, double rtol, double atol);

}  // namespace igo
