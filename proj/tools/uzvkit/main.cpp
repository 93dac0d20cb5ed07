#include <cstdio>
#include <filesystem>
#include <iostream>

#include "CLI11.hpp"
#include "commands.hpp"
#include "uzv/error.hpp"

namespace {

enum Exit { kOk = 0, kFail = 1, kUsage = 2, kData = 3, kNoConvergence = 4 };

void add_common(CLI::App* cmd, uzvkit::Options& o, std::string& format) {
    cmd->add_option("--n", o.n, "matrix size for generated inputs")->check(CLI::PositiveNumber);
    cmd->add_option("--k", o.k, "target / generated rank")->check(CLI::PositiveNumber);
    cmd->add_option("--ell", o.ell, "sketch size");
    cmd->add_option("--q", o.q, "power iterations");
    cmd->add_option("--seed", o.seed, "base seed")->envname("UZVKIT_SEED");
    cmd->add_option("--gap", o.gap, "gap-matrix noise level")->check(CLI::NonNegativeNumber);
    cmd->add_option("--method", o.methods, "comma separated method list")->delimiter(',');
    cmd->add_option("--format", format, "input format")->check(CLI::IsMember({"csv", "rawf64", "pgm"}));
    cmd->add_option("--input", o.input, "input matrix file");
    cmd->add_option("--out", o.out, "CSV report path (default stdout)");
    cmd->add_flag("--dump-factors", o.dump_factors, "write factors next to the report as RawF64");
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"uzvkit: randomized UZV decomposition experiments"};
    app.require_subcommand(1);
    uzvkit::Options opt;
    std::string format;
    uzvkit::SelftestOptions st;

    auto* spectrum = app.add_subcommand("spectrum", "compare singular value estimates of one matrix");
    add_common(spectrum, opt, format);
    spectrum->add_option("--matrix", opt.matrix, "generated matrix: gap, stairs or decay")
        ->check(CLI::IsMember({"gap", "stairs", "decay"}));
    spectrum->add_option("--step", opt.step, "devil's stairs plateau width")->check(CLI::PositiveNumber);

    auto* reconstruct = app.add_subcommand("reconstruct", "approximation error sweep over ranks");
    add_common(reconstruct, opt, format);
    reconstruct->add_option("--matrix", opt.matrix, "generated matrix: gap, stairs or decay")
        ->check(CLI::IsMember({"gap", "stairs", "decay"}));
    reconstruct->add_option("--ranks", opt.ranks, "comma separated ranks")->delimiter(',');
    reconstruct->add_option("--images", opt.images, "directory for reconstructed PGM images");

    auto* rpca = app.add_subcommand("rpca", "low-rank plus sparse separation");
    add_common(rpca, opt, format);
    rpca->add_option("--synth", opt.synth, "synthetic instance of size n")->check(CLI::Range(40, 100000));
    rpca->add_option("--frames", opt.frames, "directory of PGM frames, stacked as columns");
    rpca->add_option("--images", opt.images, "output directory for B/C frames (default rpca_frames)");
    rpca->add_option("--max-iters", opt.max_iters, "ALM iteration cap")->check(CLI::PositiveNumber);

    auto* selftest = app.add_subcommand("selftest", "run the kernel invariant suite");
    selftest->add_option("--filter", st.filter, "run properties whose name contains this");
    selftest->add_option("--seed", st.seed, "base seed")->envname("UZVKIT_SEED");
    selftest->add_flag("--canary", st.canary, "use a deliberately broken QR kernel");
    selftest->add_flag("--list", [&](std::int64_t) {
        for (const auto& n : uzvkit::selftest_names()) std::cout << n << '\n';
        std::exit(kOk);
    }, "list property names");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? kOk : kUsage;
    }

    try {
        if (!format.empty()) opt.format = uzv::io::parse_format(format);
        if (*selftest) return uzvkit::cmd_selftest(st, std::cout);

        uzvkit::ExperimentReport rep;
        if (*spectrum) rep = uzvkit::cmd_spectrum(opt);
        else if (*reconstruct) rep = uzvkit::cmd_reconstruct(opt);
        else rep = uzvkit::cmd_rpca(opt);
        rep.write(opt.out);
        if (!rep.converged) {
            std::cerr << "uzvkit: iteration cap reached before convergence\n";
            return kNoConvergence;
        }
        return kOk;
    } catch (const uzv::ArgumentError& e) {
        std::cerr << "uzvkit: " << e.what() << '\n';
        return kUsage;
    } catch (const uzv::ConvergenceError& e) {
        std::cerr << "uzvkit: " << e.what() << '\n';
        return kNoConvergence;
    } catch (const uzv::Error& e) {
        std::cerr << "uzvkit: " << e.what() << '\n';
        return kData;
    } catch (const std::filesystem::filesystem_error& e) {
        std::cerr << "uzvkit: " << e.what() << '\n';
        return kData;
    } catch (const std::exception& e) {
        std::cerr << "uzvkit: " << e.what() << '\n';
        return kData;
    }
}
