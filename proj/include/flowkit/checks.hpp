#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>

#include "flowkit/photometric.hpp"

// Numerical verification shared by the `gradcheck` / `selfcheck` commands,
// the test suites, and anything else that wants to re-derive trust in the
// kernels. Gradient checks compare analytic gradients against central finite
// differences on inputs constructed away from the kernels' non-smooth points
// (bilinear breakpoints, absolute-value kinks, threshold boundaries).
// Oracle checks compare the parallel kernels against the serial reference.
namespace flowkit::checks {

inline constexpr double kFdStep = 1e-3;

// Each returns the max relative finite-difference error over `trials`
// seeded 16x16 instances.
double gradcheck_photometric(PhotometricKind kind, int trials,
                             std::uint64_t seed);
double gradcheck_smoothness(int order, int trials, std::uint64_t seed);
double gradcheck_selfsup(int trials, std::uint64_t seed);
double gradcheck_warp(int trials, std::uint64_t seed);
double gradcheck_total(int trials, std::uint64_t seed);

// Gradient-stop contracts; both must hold exactly.
bool gradstop_occlusion_mask(std::uint64_t seed);
bool gradstop_teacher(std::uint64_t seed);

// Max absolute deviation from the serial reference over `trials` random
// instances with sizes in [12, 24].
double oracle_warp(int trials, std::uint64_t seed);
double oracle_splat(int trials, std::uint64_t seed);
double oracle_downsample(int trials, std::uint64_t seed);
double oracle_second_differences(int trials, std::uint64_t seed);
double oracle_masked_mean(int trials, std::uint64_t seed);
double oracle_cost_volume(int trials, std::uint64_t seed);
double oracle_census(int trials, std::uint64_t seed);
double oracle_ssim(int trials, std::uint64_t seed);
double oracle_smoothness(int trials, std::uint64_t seed);
double oracle_range_map(int trials, std::uint64_t seed);
double oracle_fb_consistency(int trials, std::uint64_t seed);
double oracle_endpoint_error(int trials, std::uint64_t seed);
double oracle_error_rate(int trials, std::uint64_t seed);
double oracle_argmax(int trials, std::uint64_t seed);

// Structural invariants; each returns the worst absolute violation.
double invariant_warp_identity(std::uint64_t seed);
double invariant_warp_linearity(int trials, std::uint64_t seed);
double invariant_adjointness(int trials, std::uint64_t seed);
double invariant_mass_conservation(int trials, std::uint64_t seed);
double invariant_normalization_idempotence(int trials, std::uint64_t seed);
double invariant_self_cost_mean(int trials, std::uint64_t seed);

// Command entry points; return the number of failed checks.
int run_gradcheck(const std::string& module, double tolerance,
                  std::ostream& out);
int run_selfcheck(std::ostream& out);

}  // namespace flowkit::checks
