#include "eftcot/gateway/types.hpp"

#include <cmath>

namespace eftcot::gateway {

void GenerationParams::validate() const {
    if (!(temperature >= 0.0) || !std::isfinite(temperature)) {
        throw ConfigError("generation.temperature must be >= 0");
    }
    if (!(top_p > 0.0 && top_p <= 1.0)) throw ConfigError("generation.top_p must be in (0, 1]");
    if (max_tokens <= 0) throw ConfigError("generation.max_tokens must be positive");
}

} // namespace eftcot::gateway
