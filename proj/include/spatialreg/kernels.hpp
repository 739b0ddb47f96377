#ifndef SPATIALREG_KERNELS_HPP
#define SPATIALREG_KERNELS_HPP

#include "spatialreg/error.hpp"

#include <cmath>

namespace spatialreg {

enum class KernelFamily { Bisquare, Gaussian };
enum class BandwidthMode { FixedDistance, AdaptiveNeighbors };

struct KernelSpec {
    KernelFamily family = KernelFamily::Bisquare;
    BandwidthMode mode = BandwidthMode::AdaptiveNeighbors;
};

// Bisquare: (1 - (d/bw)^2)^2 for d < bw, else 0. Gaussian: exp(-0.5 (d/bw)^2).
inline double kernel_weight(double distance, double bandwidth, KernelFamily family) {
    if (distance < 0.0) throw Error("kernel_weight: negative distance");
    if (!(bandwidth > 0.0)) throw Error("kernel_weight: bandwidth must be positive");
    const double u = distance / bandwidth;
    switch (family) {
        case KernelFamily::Bisquare: {
            if (u >= 1.0) return 0.0;
            const double t = 1.0 - u * u;
            return t * t;
        }
        case KernelFamily::Gaussian:
            return std::exp(-0.5 * u * u);
    }
    return 0.0;
}

} // namespace spatialreg

#endif
