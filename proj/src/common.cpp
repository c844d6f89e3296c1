#include "roduq/common.hpp"

#include <atomic>
#include <cmath>
#include <cstring>
#include <mutex>
#include <thread>

namespace roduq {

LineFit fit_line(std::span<const double> x, std::span<const double> y) {
    if (x.size() != y.size() || x.size() < 2)
        throw error("fit_line: need at least two matching points");
    const double n = static_cast<double>(x.size());
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        sx += x[i];
        sy += y[i];
        sxx += x[i] * x[i];
        sxy += x[i] * y[i];
    }
    const double denom = n * sxx - sx * sx;
    if (denom == 0.0) throw error("fit_line: degenerate abscissae");
    LineFit fit;
    fit.slope = (n * sxy - sx * sy) / denom;
    fit.intercept = (sy - fit.slope * sx) / n;
    double ss_res = 0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        const double r = y[i] - (fit.slope * x[i] + fit.intercept);
        ss_res += r * r;
    }
    fit.residual_rms = std::sqrt(ss_res / n);
    if (x.size() > 2) {
        const double var_slope = ss_res / (n - 2.0) / (sxx - sx * sx / n);
        fit.slope_stderr = std::sqrt(std::max(var_slope, 0.0));
    }
    return fit;
}

PowerFit fit_power_law(std::span<const double> v, std::span<const double> err) {
    if (v.size() != err.size()) throw error("fit_power_law: size mismatch");
    std::vector<double> lx, ly;
    PowerFit fit;
    for (std::size_t i = 0; i < v.size(); ++i) {
        if (!(v[i] > 0.0) || !(err[i] > 0.0)) {
            fit.excluded.push_back(i);
            continue;
        }
        lx.push_back(std::log(v[i]));
        ly.push_back(std::log(err[i]));
    }
    if (lx.size() < 2) throw error("fit_power_law: fewer than two usable points");
    const LineFit line = fit_line(lx, ly);
    fit.exponent = line.slope;
    fit.prefactor = std::exp(line.intercept);
    fit.exponent_stderr = line.slope_stderr;
    return fit;
}

std::uint64_t hash_bytes(const void* data, std::size_t n) {
    const auto* p = static_cast<const unsigned char*>(data);
    std::uint64_t h = 1469598103934665603ull;  // FNV offset basis
    for (std::size_t i = 0; i < n; ++i) {
        h ^= p[i];
        h *= 1099511628211ull;
    }
    return h;
}

std::uint64_t hash_doubles(std::span<const double> v) {
    return hash_bytes(v.data(), v.size() * sizeof(double));
}

void parallel_for(int n, int workers, const std::function<void(int)>& body) {
    workers = std::max(1, std::min(workers, n));
    if (workers == 1) {
        for (int i = 0; i < n; ++i) body(i);
        return;
    }
    std::atomic<int> next{0};
    std::exception_ptr first_error;
    std::mutex error_mutex;
    auto run = [&] {
        for (;;) {
            const int i = next.fetch_add(1);
            if (i >= n) return;
            try {
                body(i);
            } catch (...) {
                std::scoped_lock lock(error_mutex);
                if (!first_error) first_error = std::current_exception();
            }
        }
    };
    std::vector<std::thread> pool;
    pool.reserve(static_cast<std::size_t>(workers));
    for (int w = 0; w < workers; ++w) pool.emplace_back(run);
    for (auto& t : pool) t.join();
    if (first_error) std::rethrow_exception(first_error);
}

}  // namespace roduq
