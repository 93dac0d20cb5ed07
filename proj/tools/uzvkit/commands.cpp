#include "commands.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <filesystem>
#include <map>
#include <set>

#include "uzv/error.hpp"
#include "uzv/linalg.hpp"
#include "uzv/random.hpp"
#include "uzv/rpca.hpp"
#include "uzv/synth.hpp"
#include "uzv/uzvd.hpp"

namespace fs = std::filesystem;
using uzv::DenseMatrix;

namespace uzvkit {

const std::vector<std::string>& spectrum_methods() {
    static const std::vector<std::string> m{"svd", "qrcp", "rsvd", "uzvd"};
    return m;
}
const std::vector<std::string>& reconstruct_methods() {
    static const std::vector<std::string> m{"svd", "qrcp", "rsvd", "uzvd"};
    return m;
}
const std::vector<std::string>& rpca_methods() {
    static const std::vector<std::string> m{"alm-uzvd", "inexact-alm", "alm-uzvd-hard"};
    return m;
}

namespace {

using Clock = std::chrono::steady_clock;

double ms_since(Clock::time_point t0) {
    return std::chrono::duration<double, std::milli>(Clock::now() - t0).count();
}

std::string join(const std::vector<std::string>& v) {
    std::string s;
    for (const auto& x : v) s += (s.empty() ? "" : ", ") + x;
    return s;
}

DenseMatrix load_input(const Options& opt) {
    const auto fmt = opt.format ? *opt.format : uzv::io::format_from_extension(opt.input);
    return uzv::io::load_matrix(opt.input, fmt);
}

// Index after which consecutive values drop the most (1-based count of leading values).
std::size_t largest_gap_rank(const std::vector<double>& v) {
    std::size_t best = v.empty() ? 0 : v.size();
    double best_ratio = 1.0;
    for (std::size_t i = 0; i + 1 < v.size(); ++i) {
        const double a = std::fabs(v[i]), b = std::fabs(v[i + 1]);
        if (a == 0.0) break;
        const double ratio = b == 0.0 ? INFINITY : a / b;
        if (ratio > best_ratio) {
            best_ratio = ratio;
            best = i + 1;
        }
    }
    return best;
}

struct Source {
    DenseMatrix a;
    std::string label;
};

Source generated_or_loaded(const Options& opt, double scale) {
    if (!opt.input.empty()) return {load_input(opt), opt.input};
    if (opt.matrix == "gap") {
        auto g = uzv::gen_gap_matrix({opt.n, opt.k, opt.gap, opt.seed});
        g.a *= scale;
        return {std::move(g.a), "gap"};
    }
    if (opt.matrix == "stairs") {
        auto g = uzv::gen_devils_stairs({opt.n, opt.step, opt.seed});
        g.a *= scale;
        return {std::move(g.a), "stairs"};
    }
    if (opt.matrix == "decay") {
        // sigma_i = 1 / i: slow power-law decay, roughly what natural images show
        std::vector<double> sigma(opt.n);
        for (std::size_t i = 0; i < opt.n; ++i) sigma[i] = scale / static_cast<double>(i + 1);
        return {uzv::with_spectrum(opt.n, sigma, opt.seed), "decay"};
    }
    throw uzv::ArgumentError("unknown --matrix '" + opt.matrix + "' (expected gap, stairs or decay)");
}

// "name" or "name-qN"
struct MethodSpec {
    std::string name;
    std::optional<std::size_t> q;
    std::string label() const { return q ? name + "-q" + std::to_string(*q) : name; }
};

MethodSpec parse_method(const std::string& token, const std::vector<std::string>& allowed) {
    MethodSpec m{token, std::nullopt};
    const auto dash = token.rfind("-q");
    if (dash != std::string::npos && dash + 2 < token.size() &&
        std::all_of(token.begin() + static_cast<std::ptrdiff_t>(dash) + 2, token.end(), ::isdigit)) {
        m.name = token.substr(0, dash);
        m.q = static_cast<std::size_t>(std::stoul(token.substr(dash + 2)));
    }
    if (std::find(allowed.begin(), allowed.end(), m.name) == allowed.end())
        throw uzv::ArgumentError("unknown method '" + token + "' (expected one of: " + join(allowed) + ")");
    return m;
}

std::string dump_prefix(const Options& opt, const std::string& id) {
    if (opt.out.empty() || opt.out == "-") return "uzvkit-" + id;
    fs::path p(opt.out);
    return (p.parent_path() / p.stem()).string();
}

void dump(const std::string& prefix, const std::string& what, const DenseMatrix& m) {
    uzv::io::save_matrix(m, prefix + "." + what + ".uzv", uzv::io::Format::RawF64);
}

DenseMatrix diag_of(const std::vector<double>& d, std::size_t r) {
    return DenseMatrix::diagonal(std::span<const double>(d.data(), r));
}

// A_hat = U Z V^T for each truncated method, so ||A - A_hat||_F can be recomputed from dumps.
struct Triple {
    DenseMatrix u, z, v;
    DenseMatrix product() const { return uzv::matmul_nt(uzv::matmul(u, z), v); }
};

Triple svd_triple(const uzv::SvdFactors& f, std::size_t r) {
    return {f.u.cols_range(0, r), diag_of(f.sigma, r), f.v.cols_range(0, r)};
}

Triple qrcp_triple(const uzv::QrcpFactors& f, std::size_t r) {
    // a(:, perm) = Q R  =>  a ~ Q_r (R_r P^T), with R_r P^T stored transposed as V
    const std::size_t n = f.r.cols();
    DenseMatrix v(n, r);
    for (std::size_t i = 0; i < r; ++i)
        for (std::size_t j = 0; j < n; ++j) v(f.perm[j], i) = f.r(i, j);
    return {f.q.cols_range(0, r), DenseMatrix::identity(r), std::move(v)};
}

Triple uzv_triple(const uzv::UzvFactors& f) { return {f.u, f.z, f.v}; }

}  // namespace

ExperimentReport cmd_spectrum(const Options& opt) {
    std::vector<MethodSpec> methods;
    for (const auto& t : opt.methods.empty() ? spectrum_methods() : opt.methods)
        methods.push_back(parse_method(t, spectrum_methods()));
    auto has = [&](const std::string& n) {
        return std::any_of(methods.begin(), methods.end(), [&](const MethodSpec& m) { return m.name == n; });
    };

    const Source src = generated_or_loaded(opt, 1.0);
    const DenseMatrix& a = src.a;
    const std::size_t p = std::min(a.rows(), a.cols());
    const bool stairs = opt.input.empty() && opt.matrix == "stairs";
    const std::size_t ell = opt.ell.value_or(stairs ? p / 2 : std::min(2 * opt.k, p));
    const std::size_t q = opt.q.value_or(stairs ? 2 : 1);
    const std::size_t k = std::min(opt.k, ell);
    if (ell == 0 || ell > p) throw uzv::ArgumentError("--ell must be in [1, " + std::to_string(p) + "]");
    if (k == 0) throw uzv::ArgumentError("--k must be positive");

    ExperimentReport rep;
    rep.id = "spectrum";
    ReportTable spec{"spectrum", {"index"}, {}};
    ReportTable meth{"methods", {"method", "ell", "q", "zeta", "time_ms", "passes", "flops", "detected_rank"}, {}};
    const std::string prefix = dump_prefix(opt, rep.id);
    if (opt.dump_factors) dump(prefix, "A", a);

    std::map<std::string, std::vector<double>> columns;
    auto t0 = Clock::now();
    const uzv::SvdFactors ref = uzv::svd_dense(a);
    const double svd_ms = ms_since(t0);

    auto record = [&](const std::string& name, const Triple& t, std::size_t mq, double ms, const uzv::OpStats* stats,
                      const std::vector<double>& values) {
        const double zeta = uzv::approx_error(a, t.product());
        meth.add_row({name, num(ell), mq == SIZE_MAX ? "" : num(mq), num(zeta), num(ms),
                      stats ? num(stats->passes) : "", stats ? num(stats->flops) : "",
                      num(largest_gap_rank(values))});
        if (opt.dump_factors) {
            dump(prefix + "." + name, "U", t.u);
            dump(prefix + "." + name, "Z", t.z);
            dump(prefix + "." + name, "V", t.v);
        }
    };

    for (const auto& m : methods) {
        const std::size_t mq = m.q.value_or(q);
        if (m.name == "svd") {
            spec.header.push_back("sigma_svd");
            columns["sigma_svd"] = ref.sigma;
            record(m.label(), svd_triple(ref, ell), SIZE_MAX, svd_ms, nullptr, ref.sigma);
        } else if (m.name == "qrcp") {
            t0 = Clock::now();
            const auto f = uzv::qrcp(a, ell);
            const double ms = ms_since(t0);
            std::vector<double> rd = f.rdiag();
            for (double& x : rd) x = std::fabs(x);
            spec.header.push_back("rdiag_qrcp");
            columns["rdiag_qrcp"] = rd;
            record(m.label(), qrcp_triple(f, ell), SIZE_MAX, ms, nullptr, rd);
        } else if (m.name == "rsvd") {
            uzv::OpStats stats;
            t0 = Clock::now();
            const auto f = uzv::rsvd(a, ell, mq, uzv::derive_seed(opt.seed, 11), stats);
            const double ms = ms_since(t0);
            spec.header.push_back("sigma_rsvd");
            columns["sigma_rsvd"] = f.sigma;
            record(m.label(), svd_triple(f, ell), mq, ms, &stats, f.sigma);
        } else {
            uzv::SketchConfig cfg;
            cfg.ell = ell;
            cfg.target_rank = k;
            cfg.power_q = mq;
            cfg.seed = uzv::derive_seed(opt.seed, 12);
            t0 = Clock::now();
            const auto f = uzv::uzvd(a, cfg);
            const double ms = ms_since(t0);
            std::vector<double> zv = f.z_values;
            for (double& x : zv) x = std::fabs(x);
            spec.header.push_back("zvalue_uzvd");
            columns["zvalue_uzvd"] = zv;
            record(m.label(), uzv_triple(f), mq, ms, &f.stats, zv);

            const auto r = uzv::reveal_report(a, f, k, ref);
            double worst = 0.0;
            for (double e : r.zvalue_rel_errors) worst = std::max(worst, e);
            ReportTable rev{"reveal",
                            {"k", "sigma_min_zk", "norm_he", "norm_ge", "ref_sigma_1", "ref_sigma_k", "ref_sigma_k1",
                             "max_zvalue_rel_error"},
                            {}};
            rev.add_row({num(r.k), num(r.sigma_min_zk), num(r.norm_he), num(r.norm_ge), num(r.ref_sigma_1),
                         num(r.ref_sigma_k), num(r.ref_sigma_k1), num(worst)});
            rep.tables.push_back(std::move(rev));
        }
    }
    for (std::size_t i = 0; i < p; ++i) {
        std::vector<std::string> row{num(i + 1)};
        for (std::size_t c = 1; c < spec.header.size(); ++c) {
            const auto& col = columns[spec.header[c]];
            row.push_back(i < col.size() ? num(col[i]) : "");
        }
        spec.add_row(std::move(row));
    }
    rep.tables.insert(rep.tables.begin(), std::move(meth));
    rep.tables.insert(rep.tables.begin(), std::move(spec));
    return rep;
}

ExperimentReport cmd_reconstruct(const Options& opt) {
    std::vector<MethodSpec> methods;
    if (opt.methods.empty()) {
        for (const char* t : {"svd", "qrcp", "rsvd-q0", "rsvd-q1", "uzvd-q0", "uzvd-q1"})
            methods.push_back(parse_method(t, reconstruct_methods()));
    } else {
        for (const auto& t : opt.methods) methods.push_back(parse_method(t, reconstruct_methods()));
    }
    const Source src = generated_or_loaded(opt, 255.0);
    const DenseMatrix& a = src.a;
    const std::size_t p = std::min(a.rows(), a.cols());

    std::vector<std::size_t> ranks = opt.ranks;
    if (ranks.empty())
        for (std::size_t r = 5; r <= 295; r += 10) ranks.push_back(r);
    std::erase_if(ranks, [&](std::size_t r) { return r == 0 || r > p; });
    if (ranks.empty()) throw uzv::ArgumentError("no rank in the sweep fits min(m, n) = " + std::to_string(p));

    ExperimentReport rep;
    rep.id = "reconstruct";
    ReportTable t{"methods", {"method", "rank", "ell", "q", "zeta", "zeta_opt", "time_ms", "passes", "flops"}, {}};
    const std::string prefix = dump_prefix(opt, rep.id);
    if (opt.dump_factors) dump(prefix, "A", a);
    if (!opt.images.empty()) fs::create_directories(opt.images);

    auto t0 = Clock::now();
    const uzv::SvdFactors ref = uzv::svd_dense(a);
    const double svd_ms = ms_since(t0);
    std::vector<double> tail(p + 1, 0.0);  // tail[r] = sum_{i >= r} sigma_i^2
    for (std::size_t i = p; i-- > 0;) tail[i] = tail[i + 1] + ref.sigma[i] * ref.sigma[i];

    std::optional<uzv::QrcpFactors> qf;
    double qrcp_ms = 0.0;

    for (const auto& m : methods) {
        for (std::size_t r : ranks) {
            Triple tr;
            double ms = 0.0;
            std::optional<uzv::OpStats> stats;
            std::size_t mq = m.q.value_or(opt.q.value_or(1));
            bool has_q = true;
            if (m.name == "svd") {
                tr = svd_triple(ref, r);
                ms = svd_ms;
                has_q = false;
            } else if (m.name == "qrcp") {
                if (!qf) {
                    t0 = Clock::now();
                    qf = uzv::qrcp(a, ranks.back());
                    qrcp_ms = ms_since(t0);
                }
                tr = qrcp_triple(*qf, r);
                ms = qrcp_ms;
                has_q = false;
            } else if (m.name == "rsvd") {
                stats.emplace();
                t0 = Clock::now();
                const auto f = uzv::rsvd(a, r, mq, uzv::derive_seed(opt.seed, 1000 + r), *stats);
                ms = ms_since(t0);
                tr = svd_triple(f, r);
            } else {
                uzv::SketchConfig cfg;
                cfg.ell = r;
                cfg.target_rank = r;
                cfg.power_q = mq;
                cfg.seed = uzv::derive_seed(opt.seed, 2000 + r);
                t0 = Clock::now();
                const auto f = uzv::uzvd(a, cfg);
                ms = ms_since(t0);
                stats = f.stats;
                tr = uzv_triple(f);
            }
            const DenseMatrix approx = tr.product();
            t.add_row({m.label(), num(r), num(r), has_q ? num(mq) : "", num(uzv::approx_error(a, approx)),
                       num(std::sqrt(tail[r])), num(ms), stats ? num(stats->passes) : "",
                       stats ? num(stats->flops) : ""});
            const std::string tag = m.label() + ".r" + std::to_string(r);
            if (opt.dump_factors) {
                dump(prefix + "." + tag, "U", tr.u);
                dump(prefix + "." + tag, "Z", tr.z);
                dump(prefix + "." + tag, "V", tr.v);
            }
            if (!opt.images.empty())
                uzv::io::save_matrix(approx, fs::path(opt.images) / (tag + ".pgm"), uzv::io::Format::Pgm);
        }
    }
    rep.tables.push_back(std::move(t));
    return rep;
}

FrameStack load_frames(const std::string& dir) {
    if (!fs::is_directory(dir)) throw uzv::DataError("frames: '" + dir + "' is not a directory", 0);
    std::vector<fs::path> files;
    for (const auto& e : fs::directory_iterator(dir))
        if (e.is_regular_file() && e.path().extension() == ".pgm") files.push_back(e.path());
    std::sort(files.begin(), files.end());
    if (files.empty()) throw uzv::DataError("frames: no .pgm files in '" + dir + "'", 0);

    FrameStack st;
    std::vector<DenseMatrix> frames;
    for (const auto& f : files) {
        frames.push_back(uzv::io::load_matrix(f, uzv::io::Format::Pgm));
        if (frames.size() == 1) {
            st.height = frames[0].rows();
            st.width = frames[0].cols();
        } else if (frames.back().rows() != st.height || frames.back().cols() != st.width) {
            throw uzv::DimensionError("frames: " + f.filename().string() + " is " + frames.back().shape_string() +
                                      ", expected " + frames[0].shape_string());
        }
        st.names.push_back(f.filename().string());
    }
    st.data = DenseMatrix(st.height * st.width, frames.size());
    for (std::size_t j = 0; j < frames.size(); ++j) {
        const auto px = frames[j].data();
        for (std::size_t i = 0; i < px.size(); ++i) st.data(i, j) = px[i];
    }
    return st;
}

void save_frames(const DenseMatrix& data, std::size_t height, std::size_t width, const std::string& dir,
                 const std::string& prefix) {
    if (data.rows() != height * width)
        throw uzv::DimensionError("save_frames: " + data.shape_string() + " does not hold " + std::to_string(height) +
                                  "x" + std::to_string(width) + " frames");
    fs::create_directories(dir);
    for (std::size_t j = 0; j < data.cols(); ++j) {
        DenseMatrix img(height, width);
        for (std::size_t i = 0; i < height * width; ++i) img.data()[i] = data(i, j);
        char name[64];
        std::snprintf(name, sizeof name, "%s_%04zu.pgm", prefix.c_str(), j);
        uzv::io::save_matrix(img, fs::path(dir) / name, uzv::io::Format::Pgm);
    }
}

ExperimentReport cmd_rpca(const Options& opt) {
    std::vector<std::string> methods = opt.methods.empty() ? std::vector<std::string>{"alm-uzvd", "inexact-alm"}
                                                           : opt.methods;
    for (const auto& m : methods) parse_method(m, rpca_methods());
    const int sources = int(opt.synth.has_value()) + int(!opt.frames.empty()) + int(!opt.input.empty());
    if (sources != 1) throw uzv::ArgumentError("rpca needs exactly one of --synth, --frames, --input");

    DenseMatrix a;
    std::optional<uzv::RpcaInstance> inst;
    std::optional<FrameStack> stack;
    if (opt.synth) {
        inst = uzv::gen_rpca_instance(*opt.synth, opt.seed);
        a = inst->a;
    } else if (!opt.frames.empty()) {
        stack = load_frames(opt.frames);
        a = stack->data;
    } else {
        a = load_input(opt);
    }
    if (!a.all_finite()) throw uzv::DataError("rpca: input contains non-finite values", 0);

    uzv::RpcaConfig base = uzv::RpcaConfig::defaults_for(a);
    base.max_iters = opt.max_iters;
    base.sketch.seed = opt.seed;
    base.sketch.power_q = opt.q.value_or(2);
    const std::size_t pmin = std::min(a.rows(), a.cols());
    if (opt.ell) {
        if (*opt.ell == 0 || *opt.ell > pmin)
            throw uzv::ArgumentError("--ell must be in [1, " + std::to_string(pmin) + "]");
        base.rank_mode = uzv::FixedRank{*opt.ell};
    } else if (inst) {
        base.rank_mode = uzv::FixedRank{std::min(2 * inst->k, pmin)};
    } else {
        base.rank_mode = uzv::RankBound{};
    }

    ExperimentReport rep;
    rep.id = "rpca";
    ReportTable t{"rpca",
                  {"m", "n", "k", "c", "method", "k_hat", "c_hat", "time_ms", "iters", "xi", "converged", "objective"},
                  {}};
    const std::string prefix = dump_prefix(opt, rep.id);
    bool frames_written = false;
    for (const auto& m : methods) {
        uzv::RpcaConfig cfg = base;
        cfg.core_shrink = m == "alm-uzvd-hard" ? uzv::CoreShrink::Hard : uzv::CoreShrink::SoftCore;
        const auto t0 = Clock::now();
        const uzv::RpcaSolution sol = m == "inexact-alm" ? uzv::inexact_alm_baseline(a, cfg) : uzv::rpca_solve(a, cfg);
        const double ms = ms_since(t0);
        rep.converged = rep.converged && sol.converged;
        t.add_row({num(a.rows()), num(a.cols()), inst ? num(inst->k) : "", inst ? num(inst->c_count) : "", m,
                   num(sol.detected_rank()), num(sol.sparsity), num(ms), num(sol.iters), num(sol.rel_error_xi),
                   sol.converged ? "1" : "0", num(uzv::rpca_objective(sol.b_star, sol.c_star, cfg.gamma))});
        if (opt.dump_factors) {
            dump(prefix + "." + m, "B", sol.b_star);
            dump(prefix + "." + m, "C", sol.c_star);
        }
        if (stack && !frames_written) {
            const std::string dir = opt.images.empty() ? std::string("rpca_frames") : opt.images;
            save_frames(sol.b_star, stack->height, stack->width, dir, "B");
            DenseMatrix mag = sol.c_star;
            for (double& x : mag.data()) x = std::fabs(x);
            save_frames(mag, stack->height, stack->width, dir, "C");
            frames_written = true;
        }
    }
    rep.tables.push_back(std::move(t));
    return rep;
}

}  // namespace uzvkit
