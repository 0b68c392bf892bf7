// Evolve a coherent state to the quarter period and dump the two-lobe Husimi
// Q function plus its located maxima.

#include <cstdio>
#include <numbers>

#include "kerr/fock.hpp"
#include "kerr/io.hpp"
#include "kerr/qfunction.hpp"

int main() {
    const kerr::complex alpha0{3.0, 0.0};
    const double mu = 1.0;
    const double t = std::numbers::pi / (2.0 * mu);

    const kerr::FockVector psi = kerr::fock_evolve(alpha0, mu, t);
    const kerr::QGrid grid =
        kerr::q_function(psi, kerr::GridSpec::centered(std::abs(alpha0) + 4.0, 256));
    kerr::io::write_qgrid_binary("cat_qgrid.bin", grid);
    kerr::io::write_table("cat_qgrid.csv", kerr::io::qgrid_table(grid),
                          kerr::io::TableFormat::csv);

    std::printf("wrote cat_qgrid.csv / cat_qgrid.bin (%dx%d)\n", grid.spec.nx, grid.spec.ny);
    for (const auto& peak : kerr::find_q_maxima(grid)) {
        if (peak.value < 0.05 * grid.max_value()) continue;
        std::printf("peak at (%+.4f, %+.4f), Q = %.6f\n", peak.x, peak.y, peak.value);
    }
    return 0;
}
