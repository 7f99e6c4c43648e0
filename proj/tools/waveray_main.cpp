// waveray: a spectral wave-optics path tracer
// SPDX-License-Identifier: Apache-2.0

#include <CLI11.hpp>

#include <chrono>
#include <cstdio>
#include <iostream>

#include <waveray/core/png.hpp>
#include <waveray/integrator/render.hpp>
#include <waveray/oracle/decompose.hpp>
#include <waveray/scene/parser.hpp>

using namespace waveray;

namespace {

struct RenderArgs {
    std::string scene_path;
    std::string out = "out.pfm";
    std::string mode = "sample-solve";
    int spp = 16;
    uint64_t seed = 0;
    int max_depth = 16;
    std::string resolution;
    double theta_floor = 0;
    double exposure = 1;
    bool no_ms = false;
};

RenderMode parse_mode(const std::string &mode) {
    if (mode == "sample-solve") return RenderMode::SampleSolve;
    if (mode == "fully-coherent") return RenderMode::FullyCoherent;
    if (mode == "pc-baseline") return RenderMode::PcBaseline;
    throw CLI::ValidationError("--mode", "unknown mode '" + mode + "'");
}

RenderConfig make_config(const RenderArgs &args) {
    RenderConfig cfg;
    cfg.mode = parse_mode(args.mode);
    cfg.spp = args.spp;
    cfg.seed = args.seed;
    cfg.max_depth = args.max_depth;
    cfg.enable_ms = !args.no_ms;
    cfg.theta_floor = args.theta_floor > 0 ? Mat2::isotropic(args.theta_floor)
                                           : RenderConfig::default_theta_floor();
    return cfg;
}

Scene load_with_warnings(const RenderArgs &args) {
    std::vector<std::string> warnings;
    Scene scene = load_scene(args.scene_path, &warnings);
    for (auto &w : warnings) std::cerr << "warning: " << w << "\n";
    if (!args.resolution.empty()) {
        int w = 0, h = 0;
        if (std::sscanf(args.resolution.c_str(), "%dx%d", &w, &h) != 2 || w <= 0 || h <= 0)
            throw CLI::ValidationError("--resolution", "expected WxH");
        scene.camera.width = w;
        scene.camera.height = h;
        scene.camera.finalize();
    }
    return scene;
}

std::string preview_path(const std::string &pfm) {
    std::string out = pfm;
    auto dot = out.rfind('.');
    if (dot != std::string::npos) out = out.substr(0, dot);
    return out + ".png";
}

int cmd_render(const RenderArgs &args) {
    Scene scene = load_with_warnings(args);
    RenderConfig cfg = make_config(args);
    auto t0 = std::chrono::steady_clock::now();
    Film film = render(scene, cfg);
    auto t1 = std::chrono::steady_clock::now();
    Image img = film.to_image();
    write_pfm(img, args.out);
    write_png(img, preview_path(args.out), (float)args.exposure);
    double secs = std::chrono::duration<double>(t1 - t0).count();
    std::printf("rendered %dx%d  mode %s  spp %d  seed %llu  %.2f s\n", scene.camera.width,
                scene.camera.height, args.mode.c_str(), cfg.spp,
                (unsigned long long)cfg.seed, secs);
    std::printf("wrote %s and %s\n", args.out.c_str(), preview_path(args.out).c_str());
    return 0;
}

struct CompareArgs {
    RenderArgs base;
    std::vector<std::string> modes{"sample-solve", "fully-coherent"};
    std::vector<int> ladder{1, 4, 16, 64};
    std::string roi;
    std::string out_csv = "compare.csv";
    std::string reference_pfm;
    int reference_scale = 64;
};

int cmd_compare(const CompareArgs &args) {
    Scene scene = load_with_warnings(args.base);
    int rx = 0, ry = 0, rw = scene.camera.width, rh = scene.camera.height;
    if (!args.roi.empty() &&
        std::sscanf(args.roi.c_str(), "%d,%d,%d,%d", &rx, &ry, &rw, &rh) != 4)
        throw CLI::ValidationError("--roi", "expected x,y,w,h");

    std::vector<int> ladder = args.ladder;
    std::sort(ladder.begin(), ladder.end());

    // references per mode family: sample-solve and fully-coherent share an
    // expectation, pc-baseline converges to its floor-blurred image
    auto family_of = [](const std::string &mode) {
        return mode == "pc-baseline" ? std::string("pc-baseline")
                                     : std::string("sample-solve");
    };
    std::map<std::string, Image> references;
    if (!args.reference_pfm.empty()) {
        Image ref = read_pfm(args.reference_pfm);
        references["sample-solve"] = ref;
        references["pc-baseline"] = ref;
    } else {
        int ref_spp = ladder.back() * args.reference_scale;
        for (auto &mode : args.modes) {
            std::string fam = family_of(mode);
            if (references.count(fam)) continue;
            RenderArgs ra = args.base;
            ra.mode = fam;
            ra.spp = ref_spp;
            ra.seed = args.base.seed + 7777;
            RenderConfig cfg = make_config(ra);
            std::fprintf(stderr, "reference (%s family): %d spp...\n", fam.c_str(), ref_spp);
            references[fam] = render(scene, cfg).to_image();
        }
    }

    std::ofstream csv(args.out_csv);
    csv << "mode,spp,mse,seconds\n";
    for (auto &mode : args.modes) {
        const Image &ref = references[family_of(mode)];
        for (int spp : ladder) {
            RenderArgs ra = args.base;
            ra.mode = mode;
            ra.spp = spp;
            RenderConfig cfg = make_config(ra);
            auto t0 = std::chrono::steady_clock::now();
            Image img = render(scene, cfg).to_image();
            auto t1 = std::chrono::steady_clock::now();
            double mse = image_mse(img, ref, rx, ry, rw, rh);
            double secs = std::chrono::duration<double>(t1 - t0).count();
            csv << mode << "," << spp << "," << mse << "," << secs << "\n";
            std::printf("%-16s spp %6d  mse %.8g  %.2f s\n", mode.c_str(), spp, mse, secs);
        }
    }
    std::printf("wrote %s (seed %llu)\n", args.out_csv.c_str(),
                (unsigned long long)args.base.seed);
    return 0;
}

struct WdfLabArgs {
    std::string op = "wdf";
    std::string input;
    std::string out = "wdf.csv";
    double sigma = 1.0;
    double extent = 0;
    double separation = 6.0;
    double kbar = 0;
    double chirp = 0;
    double distance = 0;
    double wavenumber = 10;
    double cell_sigma_r = 0;
    int grid = 256;
    int n_max = 1 << 20;
};

oracle::Field1D lab_field(const WdfLabArgs &args) {
    using namespace oracle;
    Float extent = args.extent > 0 ? args.extent : 32 * args.sigma;
    if (!args.input.empty()) {
        auto rows = load_spectral_rows(args.input, 2, 3);
        Field1D f;
        f.values.reserve(rows.size());
        for (auto &r : rows)
            f.values.push_back(complex_t(r[1], r.size() > 2 ? r[2] : 0));
        f.r0 = rows.front()[0];
        f.dr = rows.size() > 1 ? (rows[1][0] - rows[0][0]) : 1;
        return f;
    }
    if (args.op == "two-point" || args.separation > 0 && args.op == "smooth")
        return two_point_field((std::size_t)args.grid, extent, args.separation,
                               args.sigma);
    return gaussian_field((std::size_t)args.grid, extent, args.sigma, 0, args.kbar, args.chirp);
}

void write_grid_csv(const oracle::WDFGrid &g, const std::string &path) {
    std::ofstream out(path);
    out << "r,k,w\n";
    for (std::size_t s = 0; s < g.nr; ++s)
        for (std::size_t q = 0; q < g.nk; ++q)
            out << g.r(s) << "," << g.k(q) << "," << g.at(s, q) << "\n";
}

int cmd_wdf_lab(const WdfLabArgs &args) {
    using namespace oracle;
    static const std::vector<std::string> ops{"wdf",        "csd-roundtrip", "marginal",
                                              "propagate",  "smooth",        "uncertainty",
                                              "decompose",  "two-point"};
    if (std::find(ops.begin(), ops.end(), args.op) == ops.end()) {
        std::fprintf(stderr, "unknown operation '%s'; valid operations:\n", args.op.c_str());
        for (auto &o : ops) std::fprintf(stderr, "  %s\n", o.c_str());
        return 2;
    }
    Field1D f = lab_field(args);

    if (args.op == "uncertainty") {
        auto rep = uncertainty_product(f);
        std::ofstream out(args.out);
        out << "sigma_r,sigma_k,product\n";
        out << rep.sigma_r << "," << rep.sigma_k << "," << rep.product << "\n";
        std::printf("sigma_r %.6g  sigma_k %.6g  product %.6g\n", rep.sigma_r, rep.sigma_k,
                    rep.product);
        return 0;
    }

    auto csd = csd_from_field(f);
    auto wdf = wdf_from_csd(csd);
    GaussianPhasePoint cell;
    cell.sigma_r = args.cell_sigma_r > 0 ? args.cell_sigma_r : args.sigma;
    cell.sigma_k = 0.5 / cell.sigma_r;

    if (args.op == "wdf" || args.op == "two-point") {
        write_grid_csv(wdf, args.out);
        std::printf("wdf grid %zux%zu  min %.6g  max %.6g -> %s\n", wdf.nr, wdf.nk,
                    wdf.min_value(), wdf.max_value(), args.out.c_str());
        return 0;
    }
    if (args.op == "csd-roundtrip") {
        auto back = csd_from_wdf(wdf);
        Float err = (back.c - csd.c).cwiseAbs().maxCoeff();
        std::printf("round-trip max abs error %.3e\n", err);
        write_grid_csv(wdf, args.out);
        return 0;
    }
    if (args.op == "marginal") {
        auto marg = intensity_marginal(wdf);
        std::ofstream out(args.out);
        out << "r,intensity\n";
        for (std::size_t s = 0; s < wdf.nr; ++s) out << wdf.r(s) << "," << marg[s] << "\n";
        std::printf("marginal over %zu rows -> %s\n", wdf.nr, args.out.c_str());
        return 0;
    }
    if (args.op == "propagate") {
        auto moved = propagate_free_space(wdf, args.distance, args.wavenumber);
        write_grid_csv(moved, args.out);
        std::printf("sheared by z=%.3g (k0=%.3g); total %.6g -> %.6g\n", args.distance,
                    args.wavenumber, wdf.total(), moved.total());
        return 0;
    }
    if (args.op == "smooth") {
        auto smooth = husimi_smooth(wdf, cell);
        write_grid_csv(smooth, args.out);
        std::printf("raw min %.6g; smoothed min %.6g (max %.6g) -> %s\n", wdf.min_value(),
                    smooth.min_value(), smooth.max_value(), args.out.c_str());
        return 0;
    }
    if (args.op == "decompose") {
        auto smooth = husimi_smooth(wdf, cell);
        auto dec = decompose_into_rays(smooth, (std::size_t)args.n_max, cell);
        std::ofstream out(args.out);
        out << "mean_r,mean_k,sigma_r,sigma_k,weight\n";
        for (auto &r : dec.rays)
            out << r.mean_r << "," << r.mean_k << "," << r.sigma_r << "," << r.sigma_k << ","
                << r.weight << "\n";
        std::printf("%zu rays, relative residual %.3e -> %s\n", dec.rays.size(),
                    dec.relative_residual, args.out.c_str());
        return 0;
    }
    return 2;
}

} // namespace

int main(int argc, char **argv) {
    CLI::App app{"waveray: spectral wave-optics path tracer"};
    app.require_subcommand(1);

    RenderArgs render_args;
    auto *rc = app.add_subcommand("render", "render a scene to PFM + PNG preview");
    rc->add_option("scene", render_args.scene_path, "scene file")->required();
    rc->add_option("--spp", render_args.spp, "samples per pixel");
    rc->add_option("--seed", render_args.seed, "RNG seed");
    rc->add_option("--mode", render_args.mode,
                   "sample-solve | fully-coherent | pc-baseline");
    rc->add_option("--max-depth", render_args.max_depth, "maximum path depth");
    rc->add_option("--resolution", render_args.resolution, "override WxH");
    rc->add_option("--theta-floor", render_args.theta_floor,
                   "pc-baseline coherence-area floor [m^2]");
    rc->add_option("--out", render_args.out, "output PFM path");
    rc->add_option("--exposure", render_args.exposure, "preview exposure");
    rc->add_flag("--no-ms", render_args.no_ms, "disable manifold next-event connections");

    CompareArgs compare_args;
    auto *cc = app.add_subcommand("compare", "convergence comparison across modes");
    cc->add_option("scene", compare_args.base.scene_path, "scene file")->required();
    cc->add_option("--modes", compare_args.modes, "modes to compare");
    cc->add_option("--ladder", compare_args.ladder, "spp ladder")->delimiter(',');
    cc->add_option("--roi", compare_args.roi, "region of interest x,y,w,h");
    cc->add_option("--seed", compare_args.base.seed, "RNG seed");
    cc->add_option("--resolution", compare_args.base.resolution, "override WxH");
    cc->add_option("--theta-floor", compare_args.base.theta_floor,
                   "pc-baseline coherence-area floor [m^2]");
    cc->add_option("--max-depth", compare_args.base.max_depth, "maximum path depth");
    cc->add_option("--out", compare_args.out_csv, "output CSV path");
    cc->add_option("--reference", compare_args.reference_pfm,
                   "reference PFM (default: 64x the top of the ladder, per family)");
    cc->add_option("--reference-scale", compare_args.reference_scale,
                   "reference spp multiplier");
    cc->add_flag("--no-ms", compare_args.base.no_ms, "disable manifold connections");

    WdfLabArgs lab_args;
    auto *wc = app.add_subcommand("wdf-lab", "phase-space lab: WDF/CSD diagnostics as CSV");
    wc->add_option("--op", lab_args.op,
                   "wdf | csd-roundtrip | marginal | propagate | smooth | uncertainty | "
                   "decompose | two-point");
    wc->add_option("--input", lab_args.input, "two/three-column field file (r, re [, im])");
    wc->add_option("--sigma", lab_args.sigma, "Gaussian beam sigma (or spike sigma)");
    wc->add_option("--extent", lab_args.extent, "grid extent (default 32 sigma)");
    wc->add_option("--separation", lab_args.separation, "two-point separation");
    wc->add_option("--kbar", lab_args.kbar, "carrier wavevector");
    wc->add_option("--chirp", lab_args.chirp, "quadratic phase coefficient");
    wc->add_option("--distance", lab_args.distance, "propagation distance");
    wc->add_option("--wavenumber", lab_args.wavenumber, "propagation wavenumber k0");
    wc->add_option("--cell-sigma-r", lab_args.cell_sigma_r, "phase-space cell sigma_r");
    wc->add_option("--grid", lab_args.grid, "sample count N");
    wc->add_option("--n-max", lab_args.n_max, "decomposition basis cap");
    wc->add_option("--out", lab_args.out, "output CSV path");

    try {
        app.parse(argc, argv);
        if (rc->parsed()) return cmd_render(render_args);
        if (cc->parsed()) return cmd_compare(compare_args);
        if (wc->parsed()) return cmd_wdf_lab(lab_args);
    } catch (const CLI::ParseError &e) {
        return app.exit(e);
    } catch (const SceneParseError &e) {
        std::cerr << "scene error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception &e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }
    return 0;
}
