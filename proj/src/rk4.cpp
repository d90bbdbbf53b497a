#include "xxz/rk4.hpp"

#include <fmt/format.h>

namespace xxz {

void throw_runaway(const Grid& g, Eigen::Index index, double time)
{
    const auto i = static_cast<std::size_t>(index);
    throw NumericBlowupError(fmt::format("numeric blowup at index {} (x = {:.6g}) at t = {:.6g}", i, g.x(i), time), i,
                             time, g.x(i));
}

std::vector<double> normalize_snapshot_times(std::vector<double> times, double t_end)
{
    if (!std::isfinite(t_end) || !(t_end >= 0))
        throw ParameterError("t_end must be finite and >= 0");
    if (times.empty())
        times.push_back(t_end);
    for (double t : times)
        if (!std::isfinite(t) || t < 0 || t > t_end)
            throw ParameterError(fmt::format("snapshot time {} outside [0, {}]", t, t_end));
    std::sort(times.begin(), times.end());
    times.erase(std::unique(times.begin(), times.end()), times.end());
    return times;
}

} // namespace xxz
