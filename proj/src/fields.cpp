#include "roduq/fields.hpp"

#include <algorithm>
#include <cmath>

namespace roduq {

namespace {

constexpr std::uint32_t kPhiloxM0 = 0xD2511F53u;
constexpr std::uint32_t kPhiloxM1 = 0xCD9E8D57u;
constexpr std::uint32_t kPhiloxW0 = 0x9E3779B9u;
constexpr std::uint32_t kPhiloxW1 = 0xBB67AE85u;

inline void mulhilo(std::uint32_t a, std::uint32_t b, std::uint32_t& hi,
                    std::uint32_t& lo) {
    const std::uint64_t p = static_cast<std::uint64_t>(a) * b;
    hi = static_cast<std::uint32_t>(p >> 32);
    lo = static_cast<std::uint32_t>(p);
}

// (0,1) uniform from 64 bits; offset keeps log() finite.
inline double to_uniform(std::uint32_t a, std::uint32_t b) {
    const std::uint64_t x = (static_cast<std::uint64_t>(a) << 32) | b;
    return (static_cast<double>(x >> 11) + 0.5) * 0x1.0p-53;
}

}  // namespace

Philox4x32::Philox4x32(std::uint64_t seed, std::uint64_t stream_id) {
    // Fold the 128-bit (seed, stream) pair into the 64-bit key; the stream
    // id also occupies half of the counter block below.
    key[0] = static_cast<std::uint32_t>(seed);
    key[1] = static_cast<std::uint32_t>(seed >> 32) ^
             static_cast<std::uint32_t>(stream_id >> 32);
    stream_lo_ = static_cast<std::uint32_t>(stream_id);
}

void Philox4x32::block(std::uint64_t counter, std::uint32_t out[4]) const {
    std::uint32_t c[4] = {static_cast<std::uint32_t>(counter),
                          static_cast<std::uint32_t>(counter >> 32), stream_lo_,
                          0x243F6A88u};
    std::uint32_t k0 = key[0], k1 = key[1];
    for (int round = 0; round < 10; ++round) {
        std::uint32_t hi0, lo0, hi1, lo1;
        mulhilo(kPhiloxM0, c[0], hi0, lo0);
        mulhilo(kPhiloxM1, c[2], hi1, lo1);
        const std::uint32_t n0 = hi1 ^ c[1] ^ k0;
        const std::uint32_t n1 = lo1;
        const std::uint32_t n2 = hi0 ^ c[3] ^ k1;
        const std::uint32_t n3 = lo0;
        c[0] = n0;
        c[1] = n1;
        c[2] = n2;
        c[3] = n3;
        k0 += kPhiloxW0;
        k1 += kPhiloxW1;
    }
    out[0] = c[0];
    out[1] = c[1];
    out[2] = c[2];
    out[3] = c[3];
}

double NormalStream::normal(std::uint64_t n) const {
    std::uint32_t r[4];
    gen_.block(n >> 1, r);
    const double u1 = to_uniform(r[0], r[1]);
    const double u2 = to_uniform(r[2], r[3]);
    const double rad = std::sqrt(-2.0 * std::log(u1));
    const double ang = 2.0 * M_PI * u2;
    return (n & 1) ? rad * std::sin(ang) : rad * std::cos(ang);
}

void NormalStream::fill(std::vector<double>& v, std::uint64_t k0) const {
    for (std::size_t i = 0; i < v.size(); ++i) v[i] = normal(k0 + i);
}

std::uint64_t stream_id(std::uint64_t sample_index, FieldComponent c) {
    return (sample_index << 3) | static_cast<std::uint64_t>(c);
}

void CovarianceSpec::validate() const {
    if (sigma < 0.0) throw sampling_error("covariance: sigma must be >= 0");
    if (!(eps > 0.0)) throw sampling_error("covariance: eps must be > 0");
    for (std::size_t i = 1; i < grid.size(); ++i)
        if (!(grid[i] > grid[i - 1]))
            throw sampling_error("covariance: grid must be strictly increasing");
}

Eigen::MatrixXd build_covariance(const CovarianceSpec& spec) {
    spec.validate();
    const auto n = static_cast<Eigen::Index>(spec.grid.size());
    Eigen::MatrixXd C(n, n);
    const double s2 = spec.sigma * spec.sigma;
    for (Eigen::Index i = 0; i < n; ++i)
        for (Eigen::Index j = 0; j <= i; ++j) {
            const double c = s2 * std::exp(-std::abs(spec.grid[i] - spec.grid[j]) / spec.eps);
            C(i, j) = c;
            C(j, i) = c;
        }
    return C;
}

CholeskyFactor cholesky_factor(const Eigen::MatrixXd& C, double tol) {
    const Eigen::Index n = C.rows();
    if (C.cols() != n) throw sampling_error("cholesky: matrix not square");
    const double scale = std::max(C.diagonal().maxCoeff(), 1.0);

    CholeskyFactor out;
    // Row-major storage keeps the inner dot products contiguous.
    Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor> L =
        Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>::Zero(n, n);
    for (Eigen::Index j = 0; j < n; ++j) {
        double d = C(j, j) - L.row(j).head(j).squaredNorm();
        if (d < -tol * scale)
            throw sampling_error("cholesky: matrix not positive semi-definite");
        if (d <= 0.0) {
            ++out.clamped_pivots;
            // Zero pivot: leave the column zero (PSD completion).
            continue;
        }
        const double piv = std::sqrt(d);
        L(j, j) = piv;
        for (Eigen::Index i = j + 1; i < n; ++i)
            L(i, j) = (C(i, j) - L.row(i).head(j).dot(L.row(j).head(j))) / piv;
    }
    out.L = L;
    return out;
}

std::vector<double> sample_gaussian_path(const CholeskyFactor& factor,
                                         std::uint64_t seed, std::uint64_t stream) {
    const Eigen::Index n = factor.L.rows();
    std::vector<double> v(static_cast<std::size_t>(n));
    NormalStream{seed, stream}.fill(v);
    Eigen::Map<const Eigen::VectorXd> vm(v.data(), n);
    Eigen::VectorXd path = factor.L * vm;
    return {path.data(), path.data() + n};
}

std::vector<double> FieldSample::young() const {
    std::vector<double> a(mu.size());
    for (std::size_t i = 0; i < mu.size(); ++i) a[i] = young_modulus(mu[i], lambda[i]);
    return a;
}

std::uint64_t FieldSample::phi_hash() const {
    std::uint64_t h = hash_doubles(phi1);
    const std::uint64_t h2 = hash_doubles(phi2);
    return h ^ (h2 + 0x9E3779B97F4A7C15ull + (h << 6) + (h >> 2));
}

FieldSample constant_sample(std::vector<double> grid, double mu, double lambda,
                            double phi1, double phi2) {
    FieldSample s;
    const std::size_t n = grid.size();
    s.grid = std::move(grid);
    s.phi1.assign(n, phi1);
    s.phi2.assign(n, phi2);
    s.mu.assign(n, mu);
    s.lambda.assign(n, lambda);
    return s;
}

FieldSampler::FieldSampler(std::vector<double> grid, double sigma1, double sigma2,
                           double eps, MaterialSpec material)
    : grid_(std::move(grid)),
      sigma1_(sigma1),
      sigma2_(sigma2),
      eps_(eps),
      material_(material) {
    if (material_.mu0 <= 0.0 || material_.lambda0 < 0.0)
        throw sampling_error("material base parameters must be positive");
    // All components share the correlation matrix; sigma scales the factor.
    CovarianceSpec unit{1.0, eps_, grid_};
    unit.validate();
    const bool random_material =
        material_.model != MaterialModel::deterministic &&
        (material_.sigma_mu > 0.0 || material_.sigma_lambda > 0.0);
    if (sigma1_ > 0.0 || sigma2_ > 0.0 || random_material)
        factor_ = cholesky_factor(build_covariance(unit));
}

FieldSample FieldSampler::sample(std::uint64_t seed, std::uint64_t m) const {
    const std::size_t n = grid_.size();
    FieldSample s;
    s.grid = grid_;
    s.seed = seed;
    s.sample_index = m;
    s.eps = eps_;
    s.phi1.assign(n, 0.0);
    s.phi2.assign(n, 0.0);

    auto scaled_path = [&](double sigma, FieldComponent c) {
        std::vector<double> p = sample_gaussian_path(*factor_, seed, stream_id(m, c));
        for (double& x : p) x *= sigma;
        return p;
    };

    if (sigma1_ > 0.0) s.phi1 = scaled_path(sigma1_, FieldComponent::phi1);
    if (sigma2_ > 0.0) s.phi2 = scaled_path(sigma2_, FieldComponent::phi2);

    switch (material_.model) {
        case MaterialModel::deterministic:
            s.mu.assign(n, material_.mu0);
            s.lambda.assign(n, material_.lambda0);
            break;
        case MaterialModel::lognormal_transform: {
            s.mu.assign(n, material_.mu0);
            s.lambda.assign(n, material_.lambda0);
            const double sm = material_.sigma_mu;
            if (sm > 0.0) {
                const auto g = scaled_path(sm, FieldComponent::mu);
                const double ratio = material_.lambda0 / material_.mu0;
                for (std::size_t i = 0; i < n; ++i) {
                    s.mu[i] = material_.mu0 * std::exp(g[i] - 0.5 * sm * sm);
                    s.lambda[i] = ratio * s.mu[i];
                }
            }
            const double sl = material_.sigma_lambda;
            if (sl > 0.0) {
                const auto g = scaled_path(sl, FieldComponent::lambda);
                for (std::size_t i = 0; i < n; ++i)
                    s.lambda[i] = material_.lambda0 * std::exp(g[i] - 0.5 * sl * sl);
            }
            break;
        }
        case MaterialModel::paper_literal: {
            s.mu.assign(n, 0.978 * material_.mu0);
            const double sm = material_.sigma_mu;
            if (sm > 0.0) {
                // V ~ LN(0,1): exponentiate the normal stream, then apply the
                // Cholesky factor as in the discrete construction.
                std::vector<double> v(n);
                NormalStream{seed, stream_id(m, FieldComponent::mu)}.fill(v);
                for (double& x : v) x = std::exp(x);
                Eigen::Map<const Eigen::VectorXd> vm(v.data(), static_cast<Eigen::Index>(n));
                Eigen::VectorXd lv = factor_->L * vm;
                for (std::size_t i = 0; i < n; ++i)
                    s.mu[i] = material_.mu0 * (0.978 - sm * lv[static_cast<Eigen::Index>(i)]);
            }
            const double floor = material_.floor_frac * material_.mu0;
            for (double& x : s.mu) x = std::max(x, floor);
            s.lambda.resize(n);
            for (std::size_t i = 0; i < n; ++i)
                s.lambda[i] = material_.lambda_ratio * s.mu[i];
            break;
        }
    }
    for (std::size_t i = 0; i < n; ++i)
        if (!(s.mu[i] > 0.0) || s.lambda[i] < 0.0)
            throw sampling_error("material path left the admissible range");
    return s;
}

FieldSample enforce_smallness(FieldSample sample, double c_s) {
    if (!(c_s > 0.0)) throw sampling_error("enforce_smallness: c_S must be > 0");
    std::size_t clipped = 0;
    auto clip = [&](std::vector<double>& p) {
        for (double& x : p) {
            if (x > c_s) {
                x = c_s;
                ++clipped;
            } else if (x < -c_s) {
                x = -c_s;
                ++clipped;
            }
        }
    };
    clip(sample.phi1);
    clip(sample.phi2);
    const std::size_t total = sample.phi1.size() + sample.phi2.size();
    sample.clip_fraction = total ? static_cast<double>(clipped) / total : 0.0;
    return sample;
}

}  // namespace roduq
