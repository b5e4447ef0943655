#include "fulldit/diffusion.hpp"

namespace fulldit::diffusion {

void FlowConfig::validate() const {
    if (!(sigma_min > 0.0) || !(sigma_min < 1.0))
        throw InvalidConfig("sigma_min must lie in (0,1)");
    if (n_steps < 1) throw InvalidConfig("sampler needs at least one step");
    if (cfg_scale < 0.0) throw InvalidConfig("guidance scale must be nonnegative");
}

}  // namespace fulldit::diffusion
