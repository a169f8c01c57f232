#include "basketminer/rng.hpp"

#include <cmath>
#include <numbers>

namespace bm {

double CounterRng::normal() noexcept {
    if (has_spare_) {
        has_spare_ = false;
        return spare_;
    }
    const double u1 = uniform();
    const double u2 = uniform();
    const double r = std::sqrt(-2.0 * std::log(u1));
    const double theta = 2.0 * std::numbers::pi * u2;
    spare_ = r * std::sin(theta);
    has_spare_ = true;
    return r * std::cos(theta);
}

void CounterRng::fill_normal(Eigen::Ref<Eigen::VectorXd> out) noexcept {
    for (Eigen::Index i = 0; i < out.size(); ++i) out(i) = normal();
}

}  // namespace bm
