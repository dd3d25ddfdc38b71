#include "vdicke/su3.hpp"

namespace vdicke {

Su3Invariants su3_invariants(const Mat3& l)
{
    const double d[3] = {l(0, 0).real(), l(1, 1).real(), l(2, 2).real()};
    constexpr int pairs[3][2] = {{0, 1}, {1, 2}, {2, 0}};
    constexpr int triples[3][3] = {{0, 1, 2}, {1, 2, 0}, {2, 0, 1}};

    Su3Invariants s{};
    s.trace = d[0] + d[1] + d[2];
    s.quadratic = d[0] * d[0] + d[1] * d[1] + d[2] * d[2];
    for (const auto& pr : pairs)
        s.quadratic += 3 * std::norm(l(pr[0], pr[1])) - d[pr[0]] * d[pr[1]];

    double sum = 0.0, prod = 1.0;
    for (const auto& t : triples) {
        const double w = d[t[0]] + d[t[1]] - 2 * d[t[2]];
        sum += std::norm(l(t[0], t[1])) * w;
        prod *= w;
    }
    // The real part keeps the combination invariant for mixed states as well;
    // for pure states the triple product is real and non-negative.
    s.cubic = 4.5 * sum - 0.5 * prod + 27 * (l(0, 1) * l(1, 2) * l(2, 0)).real();
    return s;
}

Su3Invariants su3_residuals(const Mat3& l)
{
    Su3Invariants s = su3_invariants(l);
    s.trace -= 1;
    s.quadratic -= 1;
    s.cubic -= 1;
    return s;
}

} // namespace vdicke
