// SPDX-License-Identifier: Apache-2.0
//
// Solves one 10-user weighted instance and prints per-user DPC-equivalent rates.

#include <cstdio>

#include "mwsr/mwsr.hpp"

int main()
{
    const auto inst = mwsr::make_instance(mwsr::generate_rayleigh_channels(10, 4, 4, 1), mwsr::reference_weights_10(), 10.0);
    const auto result = mwsr::cgp_solve(inst, mwsr::OptimizerConfig{});

    std::printf("%s after %zu iterations, weighted sum rate %.6f nats\n", mwsr::to_string(result.status),
                result.iterations(), result.final_objective);
    const auto rates = mwsr::mac_user_rates(inst, result.covariances);
    for (std::size_t u = 0; u < rates.size(); ++u)
        std::printf("  user %2zu  weight %.2f  rate %.6f nats  power %.4f\n", u + 1, inst.weights.weights[u], rates[u],
                    result.covariances.blocks[u].trace());
    return 0;
}
