#pragma once

// Parabolic parameters: locating them, the scaling constant tau, splitting of
// the parabolic point under perturbation, holomorphic indices and the
// lifted-phase estimate of the transit time.

#include <array>
#include <vector>

#include "parabolica/orbits.hpp"
#include "parabolica/types.hpp"

namespace parabolica {

struct BifurcationSite {
    Complex c0{};
    int n = 1;        ///< period of the parabolic orbit
    int q = 1;        ///< rotation order; 1 for a primitive root
    int p = 0;        ///< numerator of the rotation number p/q
    Complex lambda{1.0, 0.0};  ///< e^{2 pi i p/q}
    Complex z0{};     ///< canonical point of the parabolic orbit
    /// mu'_{qn}(c0) as a limit along the internal ray of the period-qn
    /// component. For a primitive root it is the derivative in the chart
    /// lambda(c) = sqrt(c - c0).
    Complex dmu_qn{};
    double tau = 0.0;  ///< |dmu_qn| / (2 q n)

    bool primitive() const { return q == 1; }
    int qn() const { return q * n; }
};

/// Controls the internal-ray limit that defines dmu_qn: samples at
/// |mu| = 1 - 2^-j for j = first_level .. first_level + levels - 1.
struct RayLimitOptions {
    int first_level = 8;
    int levels = 4;
};

/// e^{2 pi i p/q}, exact on the coordinate axes.
Complex root_of_unity(int p, int q);

/// Root of the p/q satellite of the main cardioid: lambda/2 - lambda^2/4.
Complex cardioid_root(int p, int q);

/// Satellite bifurcation from period n to qn, by Newton in (c, z) on
/// p_c^n(z) = z, (p_c^n)'(z) = e^{2 pi i p/q}.
BifurcationSite locate_satellite(int n, int p, int q, Complex seed_c, Complex seed_z,
                                 RayLimitOptions opts = {});

/// Same with seeds: closed forms for n = 1, 2; otherwise `seed_c` is required
/// and the orbit seed is searched for.
BifurcationSite locate_satellite(int n, int p, int q, const Complex* seed_c = nullptr,
                                 RayLimitOptions opts = {});

/// Primitive root of a period-n component (multiplier +1).
BifurcationSite locate_primitive(int n, Complex seed_c, Complex seed_z, RayLimitOptions opts = {});

/// Primitive root with the orbit seed searched for near `seed_c`.
BifurcationSite locate_primitive(int n, Complex seed_c, RayLimitOptions opts = {});

/// Period-n orbit point at c whose multiplier is closest to `target`, found by
/// multi-start Newton. Throws NonConvergence if no period-n orbit is found.
PeriodicOrbit seed_orbit_with_multiplier(Complex c, int n, Complex target);

/// Unit directions from c0 along which the landing parameter rays arrive,
/// to first order. Satellite: {+i/mu', -i/mu'} normalised, the first one being
/// the ray with Im index(varsigma) > 0. Primitive: a single direction.
std::vector<Complex> ray_directions(const BifurcationSite& site);

struct SplitFixedPoints {
    Complex alpha{};
    PeriodicOrbit sigma;                 ///< period-n survivor
    std::vector<PeriodicOrbit> varsigma; ///< the q period-qn points near z0
    int ray_sign = 0;                    ///< +1 iff Im index(varsigma_k) > 0 for all k
};

/// Fixed points of p_{c0+alpha}^{qn} born from z0. Satellite sites only;
/// requires 0 < |alpha| <= 1e-2 * 4/|dmu_qn| and c0 + alpha outside both
/// adjacent hyperbolic components.
SplitFixedPoints split_fixed_points(const BifurcationSite& site, Complex alpha);

/// 1 / (1 - multiplier). Throws MultiplierOne at 1.
Complex holomorphic_index(Complex multiplier);

/// -2 pi i / Log(multiplier), principal branch. Throws BranchUndefined at 0 and 1.
Complex jind(Complex multiplier);

/// -2 pi i / (dmu_qn * alpha): the predicted lifted phase across the gate.
Complex lifted_phase_prediction(const BifurcationSite& site, Complex alpha);

struct WellBehavedReport {
    /// Indices under p^{qn}: sigma first, then varsigma_1..q.
    std::vector<Complex> indices;
    /// min over proper nonempty subsets X of |Im sum_{X} index|.
    double min_subset_imag = 0.0;
    Complex total{};
    int ray_sign = 0;
};

WellBehavedReport wellbehaved_diagnostic(const SplitFixedPoints& split);

/// |mu'_n(c0) + dmu_qn / (q^2 conj(mu_n(c0)))|, with mu'_n(c0) evaluated
/// directly on the (non-degenerate) period-n orbit. Satellite sites only.
double satellite_derivative_residual(const BifurcationSite& site);

/// Neville extrapolation of samples (h_i, v_i) to h = 0.
Complex extrapolate_to_zero(const std::vector<double>& h, const std::vector<Complex>& v);

}  // namespace parabolica
