#include "onb/dataset.hpp"

#include <cmath>
#include <set>

#include "onb/io.hpp"
#include "onb/rng.hpp"
#include "onb/solvers/ode.hpp"

namespace onb {

namespace {

// Sub-stream ids under a dataset seed.
constexpr std::uint64_t kTrainFunctions = 1;
constexpr std::uint64_t kTestFunctions = 2;
constexpr std::uint64_t kSharedQueries = 3;
constexpr std::uint64_t kTrainQueries = 4;
constexpr std::uint64_t kTestQueries = 5;
constexpr std::uint64_t kFunctionChunk = 8;

std::uint64_t child_seed(std::uint64_t seed, std::uint64_t stream) {
    return Rng(seed).derive(stream).next_u64();
}

nlohmann::json grf_to_json(const GrfConfig& g) {
    return {{"n_sensors", g.n_sensors},   {"domain_lo", g.domain_lo},
            {"domain_hi", g.domain_hi},   {"length_scale", g.length_scale},
            {"kernel", to_string(g.kernel)}, {"jitter", g.jitter}};
}

GrfConfig grf_from_json(const nlohmann::json& j) {
    GrfConfig g;
    g.n_sensors = j.at("n_sensors").get<Index>();
    g.domain_lo = j.at("domain_lo").get<double>();
    g.domain_hi = j.at("domain_hi").get<double>();
    g.length_scale = j.at("length_scale").get<double>();
    g.kernel = grf_kernel_from_string(j.at("kernel").get<std::string>());
    g.jitter = j.at("jitter").get<double>();
    return g;
}

nlohmann::json diffusion_to_json(const DiffusionConfig& c) {
    return {{"diffusivity", c.diffusivity},
            {"reaction_rate", c.reaction_rate},
            {"out_nx", c.out_nx},
            {"out_nt", c.out_nt},
            {"refine", c.refine},
            {"stability_factor", c.stability_factor},
            {"reaction_dt_cap", c.reaction_dt_cap},
            {"blowup_threshold", c.blowup_threshold}};
}

DiffusionConfig diffusion_from_json(const nlohmann::json& j) {
    DiffusionConfig c;
    c.diffusivity = j.at("diffusivity").get<double>();
    c.reaction_rate = j.at("reaction_rate").get<double>();
    c.out_nx = j.at("out_nx").get<Index>();
    c.out_nt = j.at("out_nt").get<Index>();
    c.refine = j.at("refine").get<int>();
    c.stability_factor = j.at("stability_factor").get<double>();
    c.reaction_dt_cap = j.at("reaction_dt_cap").get<double>();
    c.blowup_threshold = j.at("blowup_threshold").get<double>();
    return c;
}

nlohmann::json burgers_to_json(const BurgersConfig& c) {
    return {{"nu", c.nu},           {"x_lo", c.x_lo},
            {"x_hi", c.x_hi},       {"t_hi", c.t_hi},
            {"out_nx", c.out_nx},   {"out_nt", c.out_nt},
            {"internal_n", c.internal_n}, {"cfl_safety", c.cfl_safety}};
}

BurgersConfig burgers_from_json(const nlohmann::json& j) {
    BurgersConfig c;
    c.nu = j.at("nu").get<double>();
    c.x_lo = j.at("x_lo").get<double>();
    c.x_hi = j.at("x_hi").get<double>();
    c.t_hi = j.at("t_hi").get<double>();
    c.out_nx = j.at("out_nx").get<Index>();
    c.out_nt = j.at("out_nt").get<Index>();
    c.internal_n = j.at("internal_n").get<Index>();
    c.cfl_safety = j.at("cfl_safety").get<double>();
    return c;
}

// Query matrix from flat grid-node indices of a (nx x nt) grid.
Matrix grid_queries(const std::vector<std::size_t>& nodes, const Vector& xs,
                    const Vector& ts) {
    Matrix q(static_cast<Index>(nodes.size()), 2);
    const Index nt = ts.size();
    for (std::size_t r = 0; r < nodes.size(); ++r) {
        const Index i = static_cast<Index>(nodes[r]) / nt;
        const Index j = static_cast<Index>(nodes[r]) % nt;
        q(static_cast<Index>(r), 0) = xs(i);
        q(static_cast<Index>(r), 1) = ts(j);
    }
    return q;
}

Vector grid_targets(const std::vector<std::size_t>& nodes, const Grid2D& g) {
    Vector s(static_cast<Index>(nodes.size()));
    const Index nt = g.nt;
    for (std::size_t r = 0; r < nodes.size(); ++r) {
        const Index i = static_cast<Index>(nodes[r]) / nt;
        const Index j = static_cast<Index>(nodes[r]) % nt;
        s(static_cast<Index>(r)) = g.values(i, j);
    }
    return s;
}

}  // namespace

std::string to_string(Layout l) {
    return l == Layout::Aligned ? "aligned" : "unaligned";
}

Layout layout_from_string(const std::string& s) {
    if (s == "aligned") return Layout::Aligned;
    if (s == "unaligned") return Layout::Unaligned;
    throw Error("unknown layout: " + s);
}

Index OperatorDataset::n_points() const {
    Index n = 0;
    for (const auto& t : targets) n += t.size();
    return n;
}

void OperatorDataset::validate() const {
    const Index nf = n_functions();
    if (static_cast<Index>(queries.size()) != nf ||
        static_cast<Index>(targets.size()) != nf)
        throw ShapeError("dataset: query/target group count != function count");
    for (Index f = 0; f < nf; ++f) {
        if (queries[f].rows() != targets[f].size())
            throw ShapeError("dataset: |queries| != |targets| for function " +
                             std::to_string(f));
        if (queries[f].cols() != query_dim)
            throw ShapeError("dataset: query dim mismatch");
        if (!targets[f].allFinite())
            throw NumericError("dataset: non-finite target for function " +
                               std::to_string(f));
    }
    if (nf >= 2 && queries[0].size() > 0) {
        bool all_same = true;
        for (Index f = 1; f < nf && all_same; ++f)
            all_same = queries[f] == queries[0];
        if (layout == Layout::Aligned && !all_same)
            throw ShapeError("dataset: flagged aligned but query sets differ");
        if (layout == Layout::Unaligned && all_same)
            throw ShapeError("dataset: flagged unaligned but query sets are identical");
    }
}

std::pair<OperatorDataset, OperatorDataset> build_ode_dataset(
    const OdeDatasetConfig& cfg, std::uint64_t seed) {
    const Index n_nodes = cfg.ode_steps + 1;
    auto qrng = Rng(seed).derive(kSharedQueries);
    const auto node_ids = qrng.sample_without_replacement(
        static_cast<std::size_t>(n_nodes), static_cast<std::size_t>(cfg.n_queries));
    const Vector xs = linspace(0.0, 1.0, n_nodes);
    Matrix shared_q(cfg.n_queries, 1);
    for (Index r = 0; r < cfg.n_queries; ++r)
        shared_q(r, 0) = xs(static_cast<Index>(node_ids[r]));

    auto build = [&](Index n_fn, std::uint64_t fn_stream, const char* split) {
        OperatorDataset d;
        d.inputs = sample_functions(cfg.grf, n_fn, child_seed(seed, fn_stream));
        d.query_dim = 1;
        d.layout = Layout::Aligned;
        d.provenance = {"ode", {{"ode_steps", cfg.ode_steps}}, seed, split};
        d.queries.assign(n_fn, shared_q);
        d.targets.resize(n_fn);
        parallel_for_chunks(n_fn, kFunctionChunk, [&](Index, Index b, Index e) {
            for (Index f = b; f < e; ++f) {
                const OdeSolution sol = solve_antiderivative(
                    d.inputs.values.row(f), d.inputs.sensors, cfg.ode_steps);
                Vector t(cfg.n_queries);
                for (Index r = 0; r < cfg.n_queries; ++r)
                    t(r) = sol.s(static_cast<Index>(node_ids[r]));
                d.targets[f] = std::move(t);
            }
        });
        return d;
    };

    return {build(cfg.n_train, kTrainFunctions, "train"),
            build(cfg.n_test, kTestFunctions, "test")};
}

std::pair<OperatorDataset, OperatorDataset> build_diffusion_dataset(
    const DiffusionDatasetConfig& cfg, std::uint64_t seed) {
    const Index n_nodes = cfg.solver.out_nx * cfg.solver.out_nt;
    const Vector xs = linspace(0.0, 1.0, cfg.solver.out_nx);
    const Vector ts = linspace(0.0, 1.0, cfg.solver.out_nt);

    auto build = [&](Index n_fn, std::uint64_t fn_stream,
                     std::uint64_t q_stream, const char* split) {
        OperatorDataset d;
        d.inputs = sample_functions(cfg.grf, n_fn, child_seed(seed, fn_stream));
        d.query_dim = 2;
        d.layout = Layout::Unaligned;
        d.provenance = {"diffusion", diffusion_to_json(cfg.solver), seed, split};
        d.queries.resize(n_fn);
        d.targets.resize(n_fn);
        Rng root(seed);
        parallel_for_chunks(n_fn, kFunctionChunk, [&](Index, Index b, Index e) {
            for (Index f = b; f < e; ++f) {
                auto q_rng = root.derive(q_stream, static_cast<std::uint64_t>(f));
                const auto nodes = q_rng.sample_without_replacement(
                    static_cast<std::size_t>(n_nodes),
                    static_cast<std::size_t>(cfg.n_queries));
                const Grid2D g = solve_diffusion_reaction(
                    make_interpolant(d.inputs.values.row(f), d.inputs.sensors),
                    cfg.solver);
                d.queries[f] = grid_queries(nodes, xs, ts);
                d.targets[f] = grid_targets(nodes, g);
            }
        });
        return d;
    };

    return {build(cfg.n_train, kTrainFunctions, kTrainQueries, "train"),
            build(cfg.n_test, kTestFunctions, kTestQueries, "test")};
}

std::pair<OperatorDataset, OperatorDataset> build_burgers_dataset(
    const BurgersDatasetConfig& cfg, std::uint64_t seed) {
    const Index n_nodes = cfg.solver.out_nx * cfg.solver.out_nt;
    const Vector xs = linspace(cfg.solver.x_lo, cfg.solver.x_hi, cfg.solver.out_nx);
    const Vector ts = linspace(0.0, cfg.solver.t_hi, cfg.solver.out_nt);

    auto qrng = Rng(seed).derive(kSharedQueries);
    const auto nodes = qrng.sample_without_replacement(
        static_cast<std::size_t>(n_nodes), static_cast<std::size_t>(cfg.n_queries));
    const Matrix shared_q = grid_queries(nodes, xs, ts);

    auto build = [&](Index n_fn, std::uint64_t fn_stream, const char* split) {
        OperatorDataset d;
        d.inputs = sample_functions(cfg.grf, n_fn, child_seed(seed, fn_stream));
        d.query_dim = 2;
        d.layout = Layout::Aligned;
        d.provenance = {"burgers", burgers_to_json(cfg.solver), seed, split};
        d.queries.assign(n_fn, shared_q);
        d.targets.resize(n_fn);
        parallel_for_chunks(n_fn, kFunctionChunk, [&](Index, Index b, Index e) {
            for (Index f = b; f < e; ++f) {
                const Grid2D g = solve_burgers(
                    make_interpolant(d.inputs.values.row(f), d.inputs.sensors),
                    cfg.solver);
                d.targets[f] = grid_targets(nodes, g);
            }
        });
        return d;
    };

    return {build(cfg.n_train, kTrainFunctions, "train"),
            build(cfg.n_test, kTestFunctions, "test")};
}

BaselineDataset resample_for_baseline(const OperatorDataset& dataset,
                                      Index function_id, Index n_train_points,
                                      std::uint64_t seed) {
    if (function_id < 0 || function_id >= dataset.n_functions())
        throw RangeError("resample_for_baseline: no such function id");

    const auto row = dataset.inputs.values.row(function_id);
    const std::string& problem = dataset.provenance.problem;

    // Full solver grid for this function: coordinates and values per node.
    Matrix coords;
    Vector values;
    if (problem == "ode") {
        const int steps = dataset.provenance.solver_config.at("ode_steps").get<int>();
        const OdeSolution sol =
            solve_antiderivative(row, dataset.inputs.sensors, steps);
        coords.resize(sol.xs.size(), 1);
        coords.col(0) = sol.xs;
        values = sol.s;
    } else {
        Grid2D g;
        if (problem == "diffusion") {
            g = solve_diffusion_reaction(
                make_interpolant(row, dataset.inputs.sensors),
                diffusion_from_json(dataset.provenance.solver_config));
        } else if (problem == "burgers") {
            g = solve_burgers(make_interpolant(row, dataset.inputs.sensors),
                              burgers_from_json(dataset.provenance.solver_config));
        } else {
            throw Error("resample_for_baseline: unknown problem " + problem);
        }
        coords.resize(g.nx * g.nt, 2);
        values.resize(g.nx * g.nt);
        const Vector xs = g.xs(), ts = g.ts();
        for (Index i = 0; i < g.nx; ++i)
            for (Index j = 0; j < g.nt; ++j) {
                coords(i * g.nt + j, 0) = xs(i);
                coords(i * g.nt + j, 1) = ts(j);
                values(i * g.nt + j) = g.values(i, j);
            }
    }

    // Exclude this function's query nodes from the training pool.
    const Matrix& q = dataset.queries[function_id];
    std::set<Index> used;
    for (Index r = 0; r < q.rows(); ++r) {
        Index best = 0;
        double best_d = std::numeric_limits<double>::infinity();
        // Queries were drawn from the grid, so nearest node is the node.
        for (Index n = 0; n < coords.rows(); ++n) {
            const double d = (coords.row(n) - q.row(r)).squaredNorm();
            if (d < best_d) {
                best_d = d;
                best = n;
            }
        }
        used.insert(best);
    }

    std::vector<Index> pool;
    pool.reserve(coords.rows());
    for (Index n = 0; n < coords.rows(); ++n)
        if (!used.count(n)) pool.push_back(n);
    if (static_cast<Index>(pool.size()) < n_train_points)
        throw CapacityError("resample_for_baseline: only " +
                            std::to_string(pool.size()) +
                            " grid points remain after exclusion");

    Rng rng(seed);
    const auto picks = rng.sample_without_replacement(pool.size(),
                                                      static_cast<std::size_t>(n_train_points));
    BaselineDataset b;
    b.source_function_id = function_id;
    b.problem = problem;
    b.train_points.resize(n_train_points, coords.cols());
    b.train_values.resize(n_train_points);
    for (Index r = 0; r < n_train_points; ++r) {
        const Index n = pool[picks[static_cast<std::size_t>(r)]];
        b.train_points.row(r) = coords.row(n);
        b.train_values(r) = values(n);
    }
    b.test_points = q;
    b.test_values = dataset.targets[function_id];
    return b;
}

void save_dataset(const OperatorDataset& d, const std::filesystem::path& dir) {
    namespace fs = std::filesystem;
    d.validate();
    fs::create_directories(dir);

    const Index nf = d.n_functions();
    const Index m = d.inputs.n_sensors();
    const Index nq = nf > 0 ? d.queries[0].rows() : 0;
    for (Index f = 0; f < nf; ++f)
        if (d.queries[f].rows() != nq)
            throw ShapeError("save_dataset: non-uniform query counts");

    std::vector<double> u, p, s;
    u.reserve(nf * m);
    p.reserve(nf * nq * d.query_dim);
    s.reserve(nf * nq);
    for (Index f = 0; f < nf; ++f) {
        for (Index i = 0; i < m; ++i) u.push_back(d.inputs.values(f, i));
        for (Index r = 0; r < nq; ++r)
            for (Index c = 0; c < d.query_dim; ++c)
                p.push_back(d.queries[f](r, c));
        for (Index r = 0; r < nq; ++r) s.push_back(d.targets[f](r));
    }
    const std::string u_bytes = doubles_to_le_bytes(u.data(), u.size());
    const std::string p_bytes = doubles_to_le_bytes(p.data(), p.size());
    const std::string s_bytes = doubles_to_le_bytes(s.data(), s.size());

    nlohmann::json manifest;
    manifest["format"] = "opds-1";
    manifest["problem"] = d.provenance.problem;
    manifest["split"] = d.provenance.split;
    manifest["layout"] = to_string(d.layout);
    manifest["n_functions"] = nf;
    manifest["n_sensors"] = m;
    manifest["n_queries"] = nq;
    manifest["query_dim"] = d.query_dim;
    manifest["grf"] = grf_to_json(d.inputs.config);
    manifest["grf_seed"] = d.inputs.seed;
    manifest["dataset_seed"] = d.provenance.dataset_seed;
    manifest["solver_config"] = d.provenance.solver_config;
    manifest["sha256"] = {{"u.f64", sha256_hex(u_bytes)},
                          {"p.f64", sha256_hex(p_bytes)},
                          {"s.f64", sha256_hex(s_bytes)}};

    atomic_write_file(dir / "u.f64", u_bytes);
    atomic_write_file(dir / "p.f64", p_bytes);
    atomic_write_file(dir / "s.f64", s_bytes);
    atomic_write_file(dir / "manifest.json", manifest.dump(2) + "\n");
}

OperatorDataset load_dataset(const std::filesystem::path& dir) {
    nlohmann::json manifest;
    try {
        manifest = nlohmann::json::parse(read_file_bytes(dir / "manifest.json"));
    } catch (const nlohmann::json::exception& e) {
        throw IoError("malformed dataset manifest: " + std::string(e.what()));
    }
    if (manifest.value("format", "") != "opds-1")
        throw IoError("unsupported dataset format in " + dir.string());

    OperatorDataset d;
    const Index nf = manifest.at("n_functions").get<Index>();
    const Index m = manifest.at("n_sensors").get<Index>();
    const Index nq = manifest.at("n_queries").get<Index>();
    d.query_dim = manifest.at("query_dim").get<Index>();
    d.layout = layout_from_string(manifest.at("layout").get<std::string>());
    d.provenance.problem = manifest.at("problem").get<std::string>();
    d.provenance.split = manifest.at("split").get<std::string>();
    d.provenance.dataset_seed = manifest.at("dataset_seed").get<std::uint64_t>();
    d.provenance.solver_config = manifest.at("solver_config");
    d.inputs.config = grf_from_json(manifest.at("grf"));
    d.inputs.seed = manifest.at("grf_seed").get<std::uint64_t>();
    d.inputs.sensors = sensor_grid(d.inputs.config);

    auto load_blob = [&](const char* name, std::size_t expected) {
        const std::string bytes = read_file_bytes(dir / name);
        if (bytes.size() != expected * 8)
            throw IoError(std::string("truncated or oversized blob ") + name +
                          ": got " + std::to_string(bytes.size()) +
                          " bytes, expected " + std::to_string(expected * 8));
        const std::string want =
            manifest.at("sha256").at(name).get<std::string>();
        if (sha256_hex(bytes) != want)
            throw IoError(std::string("checksum mismatch for ") + name);
        return doubles_from_le_bytes(bytes);
    };

    const auto u = load_blob("u.f64", static_cast<std::size_t>(nf * m));
    const auto p = load_blob("p.f64",
                             static_cast<std::size_t>(nf * nq * d.query_dim));
    const auto s = load_blob("s.f64", static_cast<std::size_t>(nf * nq));

    d.inputs.values.resize(nf, m);
    d.queries.resize(nf);
    d.targets.resize(nf);
    std::size_t cu = 0, cp = 0, cs = 0;
    for (Index f = 0; f < nf; ++f) {
        for (Index i = 0; i < m; ++i) d.inputs.values(f, i) = u[cu++];
        d.queries[f].resize(nq, d.query_dim);
        for (Index r = 0; r < nq; ++r)
            for (Index c = 0; c < d.query_dim; ++c) d.queries[f](r, c) = p[cp++];
        d.targets[f].resize(nq);
        for (Index r = 0; r < nq; ++r) d.targets[f](r) = s[cs++];
    }
    d.validate();
    return d;
}

}  // namespace onb
