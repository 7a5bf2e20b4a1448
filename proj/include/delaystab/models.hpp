#ifndef DELAYSTAB_MODELS_HPP
#define DELAYSTAB_MODELS_HPP

#include <vector>

#include "delaystab/system.hpp"

namespace delaystab {

// Nonnegative damping coefficient profile on [0, L].
struct DampingProfile {
    enum class Kind { Constant, Indicator, Samples };

    Kind kind = Kind::Constant;
    double value = 0.0;
    double from = 0.0;  // indicator support [from, to]
    double to = 0.0;
    std::vector<double> samples;  // one value per grid node, Kind::Samples only

    static DampingProfile constant(double v);
    static DampingProfile indicator(double v, double from, double to);
    static DampingProfile from_samples(std::vector<double> values);

    // Coefficient at node `index` located at coordinate x.
    double at(double x, int index) const;
};

// 1D wave equation u_tt - u_xx + b1(x) u_t + b2(x) u_t(t - tau) = 0 on (0, L)
// with homogeneous Dirichlet ends, discretized by the 3-point Laplacian on n
// interior nodes (h = L/(n+1)). The damping maps are diagonal-rectangular
// restrictions to the profile supports with entries sqrt(b_i(x_j)), so
// B_i B_i^T is multiplication by b_i and ||B2|| = max_j sqrt(b2(x_j)).
SemiDiscreteSystem build_wave1d_interior(int n, double length, const DampingProfile& b1,
                                         const DampingProfile& b2, double tau, double xi);

// 1D wave equation with Dirichlet end at x = 0 and the absorbing condition
// u_x(L) = -k u_t(L); the delayed feedback b acts in the interior. Grid
// nodes x_j = j*h, j = 1..n with h = L/n, node n on the boundary. The
// Neumann closure uses the half-cell mass weight at node n, which makes the
// stiffness symmetric and gives the boundary trace map the single entry
// sqrt(2k/h) so that ||B1^T v||^2 approximates k * u_t(L)^2.
SemiDiscreteSystem build_wave1d_boundary(int n, double length, double k_coeff,
                                         const DampingProfile& b, double tau, double xi);

enum class BeamBC { Hinged, Clamped };

// 1D beam u_tt + u_xxxx + b1 u_t + b2 u_t(t - tau) = 0 on n interior nodes.
// Hinged ends (u = u_xx = 0) close the 5-point biharmonic stencil by odd
// reflection, making the matrix the square of the Dirichlet Laplacian;
// clamped ends (u = u_x = 0) use the one-sided ghost closure.
SemiDiscreteSystem build_beam1d(int n, double length, BeamBC bc, const DampingProfile& b1,
                                const DampingProfile& b2, double tau, double xi);

}  // namespace delaystab

#endif  // DELAYSTAB_MODELS_HPP
