#include "dynsvd/factors.hpp"

namespace dynsvd {

SpectralFactors SpectralFactors::from_eigs(const EigPairs& pairs) {
    const int k = static_cast<int>(pairs.values.size());
    SpectralFactors f;
    f.u = pairs.vectors;
    f.sigma.resize(k);
    f.v.resize(pairs.vectors.rows(), k);
    for (int l = 0; l < k; ++l) {
        const double lam = pairs.values[l];
        f.sigma[l] = std::abs(lam);
        f.v.col(l) = (lam < 0.0 ? -1.0 : 1.0) * pairs.vectors.col(l);
    }
    return f;
}

}  // namespace dynsvd
