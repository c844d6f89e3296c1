#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <optional>
#include <vector>

#include "roduq/common.hpp"

namespace roduq {

// ---------------------------------------------------------------------------
// Counter-based RNG (Philox4x32-10). A stream is identified by
// (seed, stream_id); the n-th variate of a stream is a pure function of
// (seed, stream_id, n), so sampling order and thread count cannot change
// results.
// ---------------------------------------------------------------------------

struct Philox4x32 {
    std::uint32_t key[2];

    Philox4x32(std::uint64_t seed, std::uint64_t stream_id);

    // 4 x 32 bits for a given counter value.
    void block(std::uint64_t counter, std::uint32_t out[4]) const;

private:
    std::uint32_t stream_lo_ = 0;
};

// Deterministic stream of N(0,1) variates (Box-Muller on Philox output).
class NormalStream {
public:
    NormalStream(std::uint64_t seed, std::uint64_t stream_id)
        : gen_(seed, stream_id) {}

    // n-th standard normal of the stream, random access.
    double normal(std::uint64_t n) const;

    // Fills v with normals k0, k0+1, ...
    void fill(std::vector<double>& v, std::uint64_t k0 = 0) const;

private:
    Philox4x32 gen_;
};

// Stream ids used by the sampling routines. Sample index m is folded into
// the Philox key, component selects the sub-stream.
enum class FieldComponent : std::uint64_t {
    phi1 = 0,
    phi2 = 1,
    mu = 2,
    lambda = 3,
};

std::uint64_t stream_id(std::uint64_t sample_index, FieldComponent c);

// ---------------------------------------------------------------------------
// Exponential covariance and Cholesky sampling
// ---------------------------------------------------------------------------

// C(s,t) = sigma^2 exp(-|s-t|/eps) evaluated on a fixed grid.
struct CovarianceSpec {
    double sigma = 0.0;
    double eps = 1.0;                // correlation length
    std::vector<double> grid;        // strictly increasing points in (0,L)

    void validate() const;
};

Eigen::MatrixXd build_covariance(const CovarianceSpec& spec);

// Lower-triangular factor with L L^T = C. Pivots in [-tol, 0] are clamped
// to zero (the count is reported); pivots below -tol raise sampling_error.
struct CholeskyFactor {
    Eigen::MatrixXd L;
    int clamped_pivots = 0;
};

CholeskyFactor cholesky_factor(const Eigen::MatrixXd& C, double tol = 1e-10);

// path = L * V with V ~ N(0,1) i.i.d. drawn from (seed, stream).
std::vector<double> sample_gaussian_path(const CholeskyFactor& factor,
                                         std::uint64_t seed,
                                         std::uint64_t stream);

// ---------------------------------------------------------------------------
// Material path models
// ---------------------------------------------------------------------------

enum class MaterialModel {
    deterministic,        // constant mu, lambda
    lognormal_transform,  // mu = mu0 exp(G - sigma^2/2), lambda = ratio * mu
    paper_literal,        // mu = mu0 (0.978 - L V), V ~ LN(0,1), lambda = ratio * mu
};

struct MaterialSpec {
    MaterialModel model = MaterialModel::deterministic;
    double mu0 = 1.0;
    double lambda0 = 1.0;
    double sigma_mu = 0.0;
    double sigma_lambda = 0.0;   // separate lambda path (lognormal model only)
    double lambda_ratio = 2.16;  // lambda = ratio * mu for paper_literal
    double floor_frac = 0.1;     // clamp mu >= floor_frac * mu0 (paper_literal)
};

// ---------------------------------------------------------------------------
// One realization of all random paths on the 1D grid
// ---------------------------------------------------------------------------

struct FieldSample {
    std::vector<double> grid;    // sample points (element midpoints)
    std::vector<double> phi1;
    std::vector<double> phi2;
    std::vector<double> mu;      // always filled; constant when deterministic
    std::vector<double> lambda;
    std::uint64_t seed = 0;
    std::uint64_t sample_index = 0;
    double eps = 0.0;            // correlation length metadata (0: n/a)
    double clip_fraction = 0.0;  // fraction of (phi1,phi2) entries clipped

    std::vector<double> young() const;     // a_j per grid point
    std::uint64_t phi_hash() const;        // identity of the geometric sample
};

// Constant-coefficient sample (Phi = (phi1, phi2), fixed material); used by
// the deterministic proxy and by tests.
FieldSample constant_sample(std::vector<double> grid, double mu, double lambda,
                            double phi1 = 0.0, double phi2 = 0.0);

// Shared per-spec state: factorizations are computed once and reused
// read-only across samples.
class FieldSampler {
public:
    // sigma1/sigma2: geometric perturbation std devs, common eps.
    FieldSampler(std::vector<double> grid, double sigma1, double sigma2,
                 double eps, MaterialSpec material);

    // Deterministic: identical (seed, sample_index) gives identical sample.
    FieldSample sample(std::uint64_t seed, std::uint64_t sample_index) const;

    const std::vector<double>& grid() const { return grid_; }
    const MaterialSpec& material() const { return material_; }

private:
    std::vector<double> grid_;
    double sigma1_, sigma2_, eps_;
    MaterialSpec material_;
    std::optional<CholeskyFactor> factor_;  // shared unit-variance factor
};

// Clips (phi1, phi2) to [-c_S, c_S] entrywise and records the clip fraction.
FieldSample enforce_smallness(FieldSample sample, double c_s);

}  // namespace roduq
