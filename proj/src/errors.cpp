#include "xxz/errors.hpp"

#include <fmt/format.h>

#include <utility>

namespace xxz {

StepSizeError::StepSizeError(double dt_, double bound_)
    : ParameterError(fmt::format("time step {:.6g} exceeds the stability bound {:.6g}", dt_, bound_)), dt(dt_),
      bound(bound_)
{
}

ConfigError::ConfigError(const std::string& what, std::size_t line_, std::string key_)
    : ParameterError(line_ > 0 ? fmt::format("line {}: {}", line_, what) : what), line(line_), key(std::move(key_))
{
}

NumericBlowupError::NumericBlowupError(const std::string& what, std::size_t index_, double time_, double position_)
    : std::runtime_error(what), index(index_), time(time_), position(position_)
{
}

} // namespace xxz
