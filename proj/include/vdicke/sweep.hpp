#pragma once

#include "vdicke/closed_phase.hpp"
#include "vdicke/model.hpp"
#include "vdicke/open_steady.hpp"

#include <atomic>
#include <exception>
#include <optional>
#include <string>
#include <thread>
#include <vector>

namespace vdicke {

/// Parameters a grid axis can drive. PhiPi is phi in units of pi.
enum class AxisKind { Lambda1, Lambda2, LambdaR, Nu, Phi, PhiPi, Kappa, Omega, Omega0 };

AxisKind axis_from_string(const std::string& name);
const char* to_string(AxisKind a);

struct AxisSpec {
    AxisKind kind = AxisKind::Lambda1;
    double lo = 0.0;
    double hi = 0.0;
    int n = 0;  // n == 1 samples lo only

    double value(int i) const { return n <= 1 ? lo : lo + (hi - lo) * i / (n - 1); }
};

/// Row-major grid; the last axis varies fastest.
struct GridSpec {
    std::vector<AxisSpec> axes;
    std::optional<double> ratio;  // lambda2 / lambda1, applied after the axes
    std::optional<double> angle;  // polar angle for a lambda_r axis, else taken from the base couplings

    bool has(AxisKind a) const;

    std::size_t size() const;
    std::vector<double> coords(std::size_t index) const;
    ModelParams params(const ModelParams& base, std::size_t index) const;
    /// Throws ConfigError on a duplicate axis, negative count or conflicting ratio.
    void validate() const;
};

/// Applies a fixed lambda2/lambda1 ratio: a lambda_r axis splits the radius,
/// otherwise lambda2 follows lambda1.
ModelParams with_ratio(ModelParams p, double ratio, std::optional<double> lambda_r);

struct SweepPoint {
    std::size_t index = 0;
    std::vector<double> coords;
    ModelParams params;
};

struct ClosedSweepRow {
    SweepPoint point;
    std::optional<ClosedPhasePoint> result;
    std::string error;
};

struct OpenSweepRow {
    SweepPoint point;
    std::optional<OpenPhaseRecord> result;
    std::string error;
};

struct SweepOptions {
    int workers = 0;  // 0: hardware concurrency
    double spectral_tol = 1e-6;
    OrderSolveControls solver{};
    OpenClassifyControls open{};
};

int resolve_workers(int requested);

/// Evaluates f(i) for i in [0, n) on a pool of threads pulling indices from a
/// shared counter. Results land at their own index, so the output order never
/// depends on scheduling. Exceptions escaping f are rethrown after the join.
template <class T, class F>
std::vector<T> parallel_map(std::size_t n, int workers, F&& f)
{
    std::vector<T> out(n);
    std::atomic<std::size_t> next{0};
    std::vector<std::exception_ptr> errors(n);
    auto work = [&] {
        for (std::size_t i = next++; i < n; i = next++) {
            try {
                out[i] = f(i);
            } catch (...) {
                errors[i] = std::current_exception();
            }
        }
    };
    const int w = std::min<std::size_t>(resolve_workers(workers), std::max<std::size_t>(n, 1));
    std::vector<std::thread> pool;
    for (int k = 1; k < w; ++k)
        pool.emplace_back(work);
    work();
    for (auto& t : pool)
        t.join();
    for (auto& e : errors)
        if (e)
            std::rethrow_exception(e);
    return out;
}

std::vector<ClosedSweepRow> sweep_closed(const GridSpec& grid, const ModelParams& base,
                                         const SweepOptions& opt = {});
std::vector<OpenSweepRow> sweep_open(const GridSpec& grid, const ModelParams& base,
                                     const SweepOptions& opt = {});

} // namespace vdicke
