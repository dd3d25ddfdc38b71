#include "vdicke/app.hpp"

#include "vdicke/errors.hpp"

namespace vdicke {

namespace {

// Every recipe uses omega = 4 omega0 = 2 in units of sqrt(omega * omega0).
std::vector<Recipe> build()
{
    std::vector<Recipe> r;
    auto closed_plane = [&](const char* name, const char* desc, const char* phi) {
        r.push_back({name, desc,
                     std::string("schema_version = 1\n[run]\nname = ") + name +
                         "\ntask = sweep-closed\n[model]\nphi = " + phi +
                         "\n[grid]\naxis1 = lambda1 0 1.5 101\naxis2 = lambda2 0 1.5 101\n"});
    };
    closed_plane("fig1b", "closed phase diagram in the lambda1-lambda2 plane, phi = pi/4", "pi/4");
    closed_plane("fig1c", "closed phase diagram in the lambda1-lambda2 plane, phi = 7pi/16", "7pi/16");
    r.push_back({"fig1d", "closed phase diagram over (phi, lambda_r) with lambda2/lambda1 = 0.41",
                 "schema_version = 1\n[run]\nname = fig1d\ntask = sweep-closed\n"
                 "[grid]\naxis1 = phi_pi 0 0.5 101\naxis2 = lambda_r 0 2 101\nratio = 0.41\n"});
    r.push_back({"fig1e-cutscan",
                 "normal-state excitation spectrum along a radial cut at phi = 7pi/16, lambda2/lambda1 = 0.3",
                 "schema_version = 1\n[run]\nname = fig1e-cutscan\ntask = spectrum\n[model]\nphi = 7pi/16\n"
                 "[grid]\naxis1 = lambda_r 0 1.5 151\nratio = 0.3\n"});

    auto open_plane = [&](const char* name, const char* phi_pi) {
        r.push_back({name, std::string("open phase diagram in the lambda1-lambda2 plane, kappa = 0.1, phi = ") +
                               phi_pi + " pi",
                     std::string("schema_version = 1\n[run]\nname = ") + name +
                         "\ntask = sweep-open\n[model]\nkappa = 0.1\nphi = " + phi_pi +
                         "pi\n[grid]\naxis1 = lambda1 0 2 41\naxis2 = lambda2 0 2 41\n"});
    };
    open_plane("fig2a", "0.49");
    open_plane("fig2b", "0.3");
    open_plane("fig2c", "0.25");
    open_plane("fig2d", "0.22");
    open_plane("fig2e", "0.18");
    r.push_back({"fig2f", "open phase diagram over (phi, lambda_r), lambda2/lambda1 = 0.41, kappa = 0.1, "
                          "with limit-cycle probing wherever the normal state is unstable",
                 "schema_version = 1\n[run]\nname = fig2f\ntask = sweep-open\n[model]\nkappa = 0.1\n"
                 "[grid]\naxis1 = phi_pi 0 0.5 51\naxis2 = lambda_r 0 2.5 51\nratio = 0.41\n"
                 "[solver]\nos_probe = np-unstable\nos_t_max = 8000\n"});
    r.push_back({"fig3a", "trajectory from the normal state inside the oscillatory band, "
                          "phi = 0.2 pi, lambda_r = 1.1, lambda2/lambda1 = 0.41, kappa = 0.1",
                 "schema_version = 1\n[run]\nname = fig3a\ntask = evolve\n[model]\nkappa = 0.1\nphi = 0.2pi\n"
                 "lambda_r = 1.1\nnu = atan(0.41)\n[dynamics]\nt_end = 3000\nalpha0 = 0.01\n"});
    r.push_back({"fig3b", "stable steady states along phi = 0.18 pi, lambda2/lambda1 = 0.2, kappa = 0.1",
                 "schema_version = 1\n[run]\nname = fig3b\ntask = sweep-open\n[model]\nkappa = 0.1\nphi = 0.18pi\n"
                 "[grid]\naxis1 = lambda_r 0 3 151\nratio = 0.2\n[solver]\nos_probe = never\n"});
    r.push_back({"fig4a", "inverted-state stability region in the (theta, N1/N) plane, lambda1 = lambda2, kappa = 0.1",
                 "schema_version = 1\n[run]\nname = fig4a\ntask = inverted-region\n[model]\nkappa = 0.1\n"
                 "lambda1 = 0.5\nlambda2 = 0.5\n[grid]\naxis1 = phi_pi 0.05 0.45 5\n"});
    r.push_back({"fig4b", "inverted-region area versus phi, lambda2/lambda1 = sqrt(3), kappa = 0.1",
                 "schema_version = 1\n[run]\nname = fig4b\ntask = inverted-region\n[model]\nkappa = 0.1\n"
                 "lambda_r = 1\nnu = pi/3\n[grid]\naxis1 = phi_pi 0 0.5 51\n[inverted]\nn_theta = 128\nn_n1 = 128\n"});
    r.push_back({"fig4c", "dark-state fidelity versus phi, kappa = 1, nu = pi/8",
                 "schema_version = 1\n[run]\nname = fig4c\ntask = fidelity-scan\n[model]\nkappa = 1\n"
                 "lambda_r = 0.5\nnu = pi/8\n[grid]\naxis1 = phi_pi 0.02 0.46 23\n[dynamics]\nt_max = 100000\n"});
    r.push_back({"fig4d", "dark-state fidelity versus nu for several phi, kappa = 1",
                 "schema_version = 1\n[run]\nname = fig4d\ntask = fidelity-scan\n[model]\nkappa = 1\n"
                 "lambda_r = 0.5\n[grid]\naxis1 = phi_pi 0.3 0.4 3\naxis2 = nu 0 pi/2 33\n"
                 "[dynamics]\nt_max = 400000\n"});
    return r;
}

} // namespace

const std::vector<Recipe>& recipes()
{
    static const std::vector<Recipe> r = build();
    return r;
}

const Recipe& find_recipe(const std::string& name)
{
    for (const auto& r : recipes())
        if (r.name == name)
            return r;
    throw ConfigError("unknown recipe '" + name + "'");
}

} // namespace vdicke
