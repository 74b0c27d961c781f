#include "commands.hpp"

#include <CLI11.hpp>

#include <iostream>

int main(int argc, char** argv) {
    using namespace bodyfield::cli;
    CLI::App app{"bodyfield: mesh distance fields, hull-bounded volume rendering and reconstruction metrics"};
    app.require_subcommand(1);

    RunOptions options;
    std::string config, out = ".", image, reference, mask, pred, gt, mesh;
    std::uint64_t seed = 0;
    int queries = 0;

    const std::map<std::string, std::string> help = {
        {"render", "volume-render the configured field through the render camera"},
        {"sdf-grid", "sample the signed distance (and optional layers) on a lattice"},
        {"embed", "body embeddings (sdf, gradient, canonical point) at random points"},
        {"occlusion", "per-source-view visibility maps of the body surface"},
        {"recon-eval", "chamfer, normal distance, UHD and F-score between two meshes"},
        {"img-metrics", "PSNR and SSIM between two images"},
        {"bench-cp", "grid-accelerated vs brute-force closest-point benchmark"}};

    for (const std::string& name : command_names()) {
        CLI::App* sub = app.add_subcommand(name, help.at(name));
        sub->add_option("--config", config, "scene config (JSON)");
        sub->add_option("--out", out, "output directory")->capture_default_str();
        sub->add_option("--seed", seed, "overrides sampler.seed");
        sub->add_option("--threads", options.threads, "worker threads (0: hardware concurrency)")
            ->capture_default_str();
        sub->add_flag("--json", options.json, "print a JSON summary on stdout");
        if (name == "img-metrics") {
            sub->add_option("--image", image, "rendered PNG")->required();
            sub->add_option("--reference", reference, "reference PNG")->required();
            sub->add_option("--mask", mask, "foreground mask PNG");
        }
        if (name == "recon-eval") {
            sub->add_option("--pred", pred, "reconstructed mesh (OBJ/PLY)");
            sub->add_option("--gt", gt, "ground-truth mesh (OBJ/PLY)");
        }
        if (name == "bench-cp") {
            sub->add_option("--mesh", mesh, "mesh file when no config is given");
            sub->add_option("--queries", queries, "number of query points");
        }
    }

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? kExitOk : kExitValidation;
    }

    CLI::App* sub = app.get_subcommands().front();
    auto given = [&](const char* opt) { return sub->get_option_no_throw(opt) && sub->count(opt) > 0; };
    if (given("--config")) options.config = config;
    options.out = out;
    if (given("--seed")) options.seed = seed;
    if (given("--image")) options.image = image;
    if (given("--reference")) options.reference = reference;
    if (given("--mask")) options.mask = mask;
    if (given("--pred")) options.pred = pred;
    if (given("--gt")) options.gt = gt;
    if (given("--mesh")) options.mesh = mesh;
    if (given("--queries")) options.queries = queries;
    return run(sub->get_name(), options, std::cout, std::cerr);
}
