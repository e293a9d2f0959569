#include "dsl/cli/recipes.hpp"

#include <utility>

namespace dsl::cli {

namespace {

Recipe make(std::string name, std::string command, std::string description, std::string body) {
    std::string text = "[run]\nseed = 1\nworkers = 1\nout = out/" + name + "\n\n[" + command +
                       "]\n" + body;
    return Recipe{std::move(name), std::move(command), std::move(description), std::move(text)};
}

std::vector<Recipe> build() {
    std::vector<Recipe> r;

    // on-resonance QFI sweeps, one panel per subsystem
    const std::string on_sweep =
        "resource = 7, 25, 56\n"
        "drive = linspace(0.05, 0.75, 29)\n"
        "detuning = 0\n";
    r.push_back(make("fig1a", "qfi-sweep", "on-resonance scaled QFI of the whole probe vs drive",
                     on_sweep + "subsystems = whole\n"));
    r.push_back(make("fig1b", "qfi-sweep", "on-resonance scaled QFI of the field vs drive",
                     on_sweep + "subsystems = field\n"));
    r.push_back(make("fig1c", "qfi-sweep", "on-resonance scaled QFI of the qubit vs drive",
                     on_sweep + "subsystems = qubit\n"));

    // on-resonance Wigner snapshots across the transition, N = 56
    const std::vector<std::pair<std::string, std::string>> on_wigner = {
        {"fig1d", "0.4"}, {"fig1e", "0.5"}, {"fig1f", "0.6"}};
    for (const auto& [tag, e] : on_wigner)
        r.push_back(make(tag, "wigner",
                         std::string("on-resonance field Wigner function at drive ") + e,
                         std::string("resource = 56\ndrive = ") + e +
                             "\ndetuning = 0\npoints = 201\n"));

    // on-resonance qubit polarization
    const std::string on_bloch =
        "resource = 7, 25, 56\n"
        "drive = linspace(0.05, 0.75, 29)\n"
        "detuning = 0\n";
    r.push_back(make("fig1g", "bloch-sweep", "on-resonance qubit sigma_x vs drive", on_bloch));
    r.push_back(make("fig1h", "bloch-sweep", "on-resonance qubit sigma_y vs drive", on_bloch));
    r.push_back(make("fig1i", "bloch-sweep", "on-resonance qubit sigma_z vs drive", on_bloch));

    // on-resonance scaling analysis
    r.push_back(make("fig2a", "optimize", "on-resonance optimal drive vs N per subsystem",
                     "resource = 9, 16, 20, 25, 30, 36, 42, 48, 56\n"
                     "drive = linspace(0.25, 0.75, 21)\n"
                     "detuning = 0\n"));
    r.push_back(make("fig2b", "scaling", "on-resonance maximum qubit QFI scaling fit",
                     "resource = 20, 25, 30, 35, 40, 48, 56\n"
                     "drive = linspace(0.30, 0.60, 13)\n"
                     "detuning = 0\n"
                     "subsystems = qubit\n"
                     "fit_n_min = 20\n"));
    r.push_back(make("fig2c", "scaling", "on-resonance maximum whole/field QFI scaling fit",
                     "resource = 20, 25, 30, 35, 40, 48, 56\n"
                     "drive = linspace(0.40, 0.75, 15)\n"
                     "detuning = 0\n"
                     "subsystems = whole, field\n"
                     "fit_n_min = 20\n"));

    // off-resonance QFI sweeps
    const std::string off_sweep =
        "resource = 7, 25, 56\n"
        "drive = linspace(0.25, 0.60, 29)\n"
        "detuning = 0.1\n";
    r.push_back(make("fig3a", "qfi-sweep", "off-resonance scaled QFI of the whole probe",
                     off_sweep + "subsystems = whole\n"));
    r.push_back(make("fig3b", "qfi-sweep", "off-resonance scaled QFI of the field",
                     off_sweep + "subsystems = field\n"));
    r.push_back(make("fig3c", "qfi-sweep", "off-resonance scaled QFI of the qubit",
                     off_sweep + "subsystems = qubit\n"));
    const std::vector<std::pair<std::string, std::string>> off_wigner = {
        {"fig3d", "0.33"}, {"fig3e", "0.38"}, {"fig3f", "0.43"}};
    for (const auto& [tag, e] : off_wigner)
        r.push_back(make(tag, "wigner",
                         std::string("off-resonance field Wigner function at drive ") + e,
                         std::string("resource = 56\ndrive = ") + e +
                             "\ndetuning = 0.1\npoints = 201\n"));
    const std::string off_bloch =
        "resource = 7, 25, 56\n"
        "drive = linspace(0.25, 0.60, 29)\n"
        "detuning = 0.1\n";
    r.push_back(make("fig3g", "bloch-sweep", "off-resonance qubit sigma_x vs drive", off_bloch));
    r.push_back(make("fig3h", "bloch-sweep", "off-resonance qubit sigma_y vs drive", off_bloch));
    r.push_back(make("fig3i", "bloch-sweep", "off-resonance qubit sigma_z vs drive", off_bloch));

    // off-resonance scaling analysis (joint drive/detuning optimization)
    const std::string off_opt =
        "resource = 20, 25, 30, 36, 42, 48, 56\n"
        "drive = linspace(0.30, 0.55, 11)\n"
        "detuning = linspace(0.04, 0.16, 7)\n";
    r.push_back(make("fig4a", "optimize", "off-resonance optimal drive vs N per subsystem",
                     off_opt));
    r.push_back(make("fig4b", "optimize", "off-resonance optimal detuning vs N per subsystem",
                     off_opt));
    r.push_back(make("fig4c", "scaling", "off-resonance optimized maximum QFI scaling fit",
                     off_opt + "fit_n_min = 20\n"));

    // Bayesian estimation at the optimal point
    r.push_back(make("fig5a", "bayes", "on-resonance MAP variance vs QCRB",
                     "resource = 10, 20, 30\n"
                     "drive_grid = linspace(0.40, 0.75, 8)\n"
                     "detuning = 0\n"
                     "experiments = 100\n"
                     "shots = 1000\n"));
    r.push_back(make("fig5b", "bayes", "off-resonance MAP variance vs QCRB",
                     "resource = 10, 20, 30\n"
                     "drive_grid = linspace(0.30, 0.55, 9)\n"
                     "detuning = 0.1\n"
                     "experiments = 100\n"
                     "shots = 1000\n"));

    // entanglement and purity
    const std::string on_diag =
        "resource = 7, 25, 56\n"
        "drive = linspace(0.05, 0.75, 29)\n"
        "detuning = 0\n";
    r.push_back(make("figS1a", "diagnostics", "on-resonance log-negativity vs drive", on_diag));
    r.push_back(make("figS1b", "diagnostics", "on-resonance purity vs drive", on_diag));
    const std::string off_diag_opt =
        "resource = 20, 25, 30, 36, 42, 48, 56\n"
        "drive = 0.38\n"
        "detuning = 0.09\n";
    r.push_back(make("figS1c", "diagnostics",
                     "off-resonance log-negativity vs N near the optimal point", off_diag_opt));
    r.push_back(make("figS1d", "diagnostics",
                     "off-resonance purity vs N near the optimal point", off_diag_opt));

    // homodyne angle analysis; g/kappa = 2 sqrt(N)
    r.push_back(make("figS2a", "homodyne", "off-resonance homodyne CFI vs angle at g/kappa = 10",
                     "resource = 25\n"
                     "drive = 0.38\n"
                     "detuning = 0.09\n"
                     "angles = linspace(0, 3.015928947446201, 33)\n"));
    r.push_back(make("figS2b", "homodyne", "on-resonance homodyne CFI vs angle at g/kappa = 10",
                     "resource = 25\n"
                     "drive = 0.66\n"
                     "detuning = 0\n"
                     "angles = linspace(0, 3.015928947446201, 33)\n"));
    r.push_back(make("figS2c", "homodyne", "off-resonance optimal homodyne angle vs g/kappa",
                     "resource = 9, 16, 25, 36, 49, 64\n"
                     "drive = 0.38\n"
                     "detuning = 0.09\n"));
    r.push_back(make("figS2d", "homodyne", "on-resonance optimal homodyne angle vs g/kappa",
                     "resource = 9, 16, 25, 36, 49, 64\n"
                     "drive = 0.60\n"
                     "detuning = 0\n"));

    // homodyne vs heterodyne performance ratio
    const std::string ratio_grid =
        "resource = 5, 10, 15, 20, 25, 30, 35, 40\n"
        "drive = 0.40\n"
        "detuning = 0, 0.09\n";
    r.push_back(make("figS3a", "homodyne", "homodyne performance ratio vs N, on and off resonance",
                     ratio_grid));
    r.push_back(make("figS3b", "heterodyne",
                     "heterodyne performance ratio vs N, on and off resonance", ratio_grid));

    // binned-likelihood construction
    const std::string bins_base =
        "resource = 25\n"
        "drive = 0.66\n"
        "detuning = 0\n"
        "experiments = 0\n"
        "bin_width = 0.1\n";
    r.push_back(make("figS4a", "bayes", "modeled quadrature pdf at the operating point",
                     bins_base + "export_pdf = 1\n"));
    r.push_back(make("figS4b", "bayes", "discretized bin probabilities",
                     bins_base + "export_bins = 1\n"));
    r.push_back(make("figS4c", "bayes", "sampled counts, M = 10",
                     bins_base + "export_records = 10\n"));
    r.push_back(make("figS4d", "bayes", "sampled counts, M = 100",
                     bins_base + "export_records = 100\n"));
    r.push_back(make("figS4e", "bayes", "sampled counts, M = 1000",
                     bins_base + "export_records = 1000\n"));
    r.push_back(make("figS4f", "bayes", "sampled counts, M = 10000",
                     bins_base + "export_records = 10000\n"));

    return r;
}

} // namespace

const std::vector<Recipe>& figure_recipes() {
    static const std::vector<Recipe> recipes = build();
    return recipes;
}

const Recipe& find_recipe(const std::string& name) {
    for (const Recipe& r : figure_recipes())
        if (r.name == name) return r;
    throw ConfigError("unknown recipe '" + name + "'");
}

} // namespace dsl::cli
