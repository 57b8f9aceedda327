#pragma once

#include "nlsw/gluing.hpp"
#include "nlsw/potential.hpp"
#include "nlsw/stationary.hpp"

#include <cmath>

namespace fixture {

// V = 1 + 0.5 cos(2πx) on [-26, 26) with 16 points per period.
inline const nlsw::GridSpec& periodic_grid()
{
    static const nlsw::GridSpec g(26.0, 832);
    return g;
}

inline const nlsw::SampledPotential& periodic_potential()
{
    static const nlsw::SampledPotential V(nlsw::Potential::cosine(0.5), periodic_grid());
    return V;
}

inline const nlsw::Nonlinearity& cubic()
{
    static const nlsw::Nonlinearity f(4.0);
    return f;
}

// Ground state of mass 5 in a well next to 0; the building block for the gluing tests.
inline const nlsw::ConstrainedCriticalPoint& periodic_ground_state()
{
    static const nlsw::ConstrainedCriticalPoint pt = nlsw::ground_state(periodic_potential(), cubic(), 5.0);
    return pt;
}

// Sup-norm distance of two sample vectors.
inline double sup_diff(const Eigen::VectorXd& a, const Eigen::VectorXd& b) { return (a - b).cwiseAbs().maxCoeff(); }

} // namespace fixture
