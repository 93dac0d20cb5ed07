#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "report.hpp"
#include "uzv/io.hpp"

namespace uzvkit {

struct Options {
    std::size_t n = 200;
    std::size_t k = 20;
    std::optional<std::size_t> ell;  // default depends on the command
    std::optional<std::size_t> q;
    std::uint64_t seed = 0;
    double gap = 0.15;
    std::vector<std::string> methods;  // empty: command default
    std::optional<uzv::io::Format> format;
    std::string input;
    std::string frames;
    std::optional<std::size_t> synth;
    std::string out;
    bool dump_factors = false;

    std::string matrix = "gap";        // spectrum/reconstruct generator: gap | stairs
    std::size_t step = 10;             // devil's stairs plateau width
    std::vector<std::size_t> ranks;    // reconstruct sweep; empty: 5, 15, ..., 295
    std::string images;                // directory for reconstructed / separated images
    std::size_t max_iters = 100;
};

// Every method name a command accepts, for usage errors.
const std::vector<std::string>& spectrum_methods();
const std::vector<std::string>& reconstruct_methods();
const std::vector<std::string>& rpca_methods();

// Throws uzv::ArgumentError on bad options, uzv::DataError / uzv::DimensionError on bad input.
ExperimentReport cmd_spectrum(const Options& opt);
ExperimentReport cmd_reconstruct(const Options& opt);
ExperimentReport cmd_rpca(const Options& opt);

struct SelftestOptions {
    std::string filter;   // substring match on property names; empty runs all
    bool canary = false;  // swap in a corrupted QR kernel; the suite must fail
    std::uint64_t seed = 0;
};

struct SelftestResult {
    std::string name;
    bool passed = false;
    double ms = 0.0;
    std::string detail;
};

std::vector<std::string> selftest_names();
std::vector<SelftestResult> run_selftest(const SelftestOptions& opt);
// Prints the pass/fail table; returns 0 if everything ran passed, 1 otherwise.
int cmd_selftest(const SelftestOptions& opt, std::ostream& os);

// Column-wise frame stack from every *.pgm in dir (sorted by file name).
struct FrameStack {
    uzv::DenseMatrix data;  // (height * width) x frames, row-major pixels per column
    std::size_t height = 0;
    std::size_t width = 0;
    std::vector<std::string> names;
};
FrameStack load_frames(const std::string& dir);
void save_frames(const uzv::DenseMatrix& data, std::size_t height, std::size_t width, const std::string& dir,
                 const std::string& prefix);

}  // namespace uzvkit
