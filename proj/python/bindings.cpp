#include "regio/error.hpp"
#include "regio/fixture.hpp"
#include "regio/harmonize.hpp"
#include "regio/kmeans.hpp"
#include "regio/pipeline.hpp"
#include "regio/preprocess.hpp"
#include "regio/profile.hpp"
#include "regio/tendency.hpp"

#include <pybind11/eigen.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>
#include <pybind11/stl/filesystem.h>

namespace py = pybind11;
using namespace regio;

namespace {

SeedInit init_from(const std::string& name)
{
    auto init = parse_seed_init(name);
    if (!init) {
        throw Error(ErrorKind::Domain, "unknown init '" + name + "'");
    }
    return *init;
}

KMeansConfig kmeans_config(int k, int max_iter, int n_starts, uint64_t seed, const std::string& init)
{
    KMeansConfig c;
    c.k        = k;
    c.max_iter = max_iter;
    c.n_starts = n_starts;
    c.seed     = seed;
    c.init     = init_from(init);
    return c;
}

py::dict vote_to_dict(const KVoteResult& r)
{
    py::dict votes, perIndex, scores;
    for (const auto& [k, n] : r.votes) {
        votes[py::int_(k)] = n;
    }
    for (const auto& [idx, k] : r.per_index) {
        perIndex[py::str(std::string(to_string(idx)))] = k;
    }
    for (const auto& [k, row] : r.scores) {
        py::dict d;
        for (const auto& [idx, v] : row) {
            d[py::str(std::string(to_string(idx)))] = v;
        }
        scores[py::int_(k)] = d;
    }
    py::dict out;
    out["k_best"]    = r.k_best;
    out["votes"]     = votes;
    out["per_index"] = perIndex;
    out["scores"]    = scores;
    return out;
}

}

PYBIND11_MODULE(_core, m)
{
    m.doc() = "Territorial clustering by renewable-energy potential and socioeconomic structure.";

    static py::exception<Error> regioError(m, "RegioError", PyExc_ValueError);
    static py::exception<StageError> stageError(m, "StageError", PyExc_RuntimeError);
    py::register_exception_translator([](std::exception_ptr p) {
        try {
            if (p) {
                std::rethrow_exception(p);
            }
        } catch (const StageError& e) {
            py::set_error(stageError, e.what());
        } catch (const Error& e) {
            py::set_error(regioError, (std::string(to_string(e.kind())) + ": " + e.what()).c_str());
        }
    });

    m.def("msw_potential", [](double q, double lh, double r) { return msw_potential(q, {lh, r}); }, py::arg("quantity_kg"),
          py::arg("lower_heating_value") = 13.8, py::arg("equivalence_ratio") = 0.3);

    m.def(
        "downscale_by_proxy",
        [](const std::map<std::string, double>& national, const std::map<std::string, double>& weights) {
            std::vector<CoarseValue> coarse;
            for (const auto& [cc, v] : national) {
                coarse.push_back({cc, v});
            }
            std::vector<Territory> ts;
            for (const auto& [code, _] : weights) {
                ts.push_back({TerritoryId(code), 1.0, 1.0, 0.0, 0.0});
            }
            return downscale_by_proxy(coarse, {"proxy", weights}, ts);
        },
        py::arg("national"), py::arg("weights"), "Split country values over level-3 territories in proportion to the weights.");

    m.def("annualize_degree_days", [](const std::vector<double>& monthly) { return annualize_degree_days(monthly); }, py::arg("monthly"));

    m.def(
        "compute_centroid",
        [](const std::vector<std::pair<double, double>>& ring) {
            std::vector<LonLat> pts;
            for (const auto& [lon, lat] : ring) {
                pts.push_back({lon, lat});
            }
            const auto c = compute_centroid(pts);
            return std::make_pair(c.lon, c.lat);
        },
        py::arg("ring"));

    m.def(
        "standardize",
        [](const RowMatrix& x) {
            std::vector<TerritoryId> rows;
            for (Eigen::Index i = 0; i < x.rows(); ++i) {
                rows.emplace_back("RW" + std::to_string(i));
            }
            std::vector<IndicatorDef> defs;
            for (Eigen::Index j = 0; j < x.cols(); ++j) {
                defs.push_back({"c" + std::to_string(j), IndicatorKind::NonEnergy, "", NormalizationBasis::None});
            }
            IndicatorTable t(rows, defs);
            for (Eigen::Index i = 0; i < x.rows(); ++i) {
                for (Eigen::Index j = 0; j < x.cols(); ++j) {
                    t.set(static_cast<std::size_t>(i), static_cast<std::size_t>(j), x(i, j));
                }
            }
            const auto z = standardize(t);
            return py::make_tuple(z.data, z.col_means, z.col_stds);
        },
        py::arg("data"), "z-scores with the sample standard deviation; returns (z, means, stds).");

    m.def(
        "hopkins",
        [](const RowMatrix& x, std::size_t m, uint64_t seed, int repeats) { return hopkins(x, {m, seed, repeats}); }, py::arg("data"),
        py::arg("sample_size") = 0, py::arg("seed") = 42, py::arg("n_repeats") = 10, "Hopkins statistic; near 0 = clustered, 0.5 = random.");

    py::class_<ClusterModel>(m, "ClusterModel")
        .def_readonly("k", &ClusterModel::k)
        .def_readonly("centroids", &ClusterModel::centroids)
        .def_readonly("assignment", &ClusterModel::assignment)
        .def_readonly("sizes", &ClusterModel::sizes)
        .def_readonly("within_ss", &ClusterModel::within_ss)
        .def_readonly("between_ss", &ClusterModel::between_ss)
        .def_readonly("total_ss", &ClusterModel::total_ss)
        .def_readonly("between_ratio", &ClusterModel::between_ratio)
        .def_readonly("iterations_run", &ClusterModel::iterations_run)
        .def_readonly("converged", &ClusterModel::converged)
        .def("__repr__", [](const ClusterModel& c) {
            return "<ClusterModel k=" + std::to_string(c.k) + " between_ratio=" + std::to_string(c.between_ratio) + ">";
        });

    m.def(
        "kmeans_fit",
        [](const RowMatrix& x, int k, int max_iter, int n_starts, uint64_t seed, const std::string& init) {
            return kmeans_fit(x, kmeans_config(k, max_iter, n_starts, seed, init));
        },
        py::arg("data"), py::arg("k") = 17, py::arg("max_iter") = 50, py::arg("n_starts") = 10, py::arg("seed") = 42,
        py::arg("init") = "dsq_weighted");

    m.def(
        "validity_index",
        [](const RowMatrix& x, const ClusterModel& model, const std::string& name) {
            auto idx = parse_validity_index(name);
            if (!idx) {
                throw Error(ErrorKind::Domain, "unknown index '" + name + "'");
            }
            return validity_index(x, model, *idx);
        },
        py::arg("data"), py::arg("model"), py::arg("index"));

    m.def(
        "vote_k",
        [](const RowMatrix& x, int k_min, int k_max, std::optional<std::vector<std::string>> indices, uint64_t seed, int max_iter, int n_starts,
           const std::string& init) {
            KVoteConfig c;
            c.k_min  = k_min;
            c.k_max  = k_max;
            c.seed   = seed;
            c.kmeans = kmeans_config(k_min, max_iter, n_starts, seed, init);
            if (indices) {
                c.indices.clear();
                for (const auto& name : *indices) {
                    auto idx = parse_validity_index(name);
                    if (!idx) {
                        throw Error(ErrorKind::Domain, "unknown index '" + name + "'");
                    }
                    c.indices.push_back(*idx);
                }
            }
            return vote_to_dict(vote_k(x, c));
        },
        py::arg("data"), py::arg("k_min") = 15, py::arg("k_max") = 20, py::arg("indices") = py::none(), py::arg("seed") = 42,
        py::arg("max_iter") = 50, py::arg("n_starts") = 10, py::arg("init") = "dsq_weighted");

    m.def("project_2d", &project_2d, py::arg("data"));

    m.def(
        "qualitative_level", [](double v, double inner, double middle, double outer) { return std::string(to_string(qualitative_level(v, {inner, middle, outer}))); },
        py::arg("value"), py::arg("inner") = 0.25, py::arg("middle") = 0.75, py::arg("outer") = 1.5);

    m.def(
        "complete_linkage",
        [](const RowMatrix& points) {
            std::vector<std::tuple<int, int, double, int>> merges;
            for (const auto& mg : complete_linkage(points).merges) {
                merges.emplace_back(mg.left, mg.right, mg.height, mg.size);
            }
            return merges;
        },
        py::arg("points"), "Merges as (left, right, height, size); leaves are 0..n-1, merge i creates node n+i.");

    m.def(
        "write_fixture",
        [](const fs::path& dir, std::size_t n, int blobs, int dEnergy, int dSocio, uint64_t seed, double separation, double sparse, bool correlated,
           bool geometry) {
            FixtureConfig fc;
            fc.n_territories          = n;
            fc.n_blobs                = blobs;
            fc.d_energy               = dEnergy;
            fc.d_socio                = dSocio;
            fc.seed                   = seed;
            fc.separation             = separation;
            fc.sparse_column_fraction = sparse;
            fc.correlated_column      = correlated;
            fc.emit_geometry          = geometry;
            const auto fx             = generate_fixture(fc);
            write_fixture(dir, fx);
            return fx.key;
        },
        py::arg("out_dir"), py::arg("n_territories") = 340, py::arg("n_blobs") = 17, py::arg("d_energy") = 7, py::arg("d_socio") = 8,
        py::arg("seed") = 7, py::arg("separation") = 6.0, py::arg("sparse_fraction") = 0.0, py::arg("correlated_column") = false,
        py::arg("geometry") = true, "Writes a synthetic dataset and returns the planted territory -> blob key.");

    m.def(
        "run_pipeline",
        [](const fs::path& dataDir, std::optional<fs::path> outDir, uint64_t seed, int k, int kMin, int kMax, bool skipVote, bool emitGeojson) {
            RunConfig cfg;
            cfg.inputs       = DatasetPaths::in_directory(dataDir);
            cfg.out_dir      = outDir.value_or(fs::path {});
            cfg.seed         = seed;
            cfg.kmeans.k     = k;
            cfg.vote.k_min   = kMin;
            cfg.vote.k_max   = kMax;
            cfg.skip_vote    = skipVote;
            cfg.emit_geojson = emitGeojson;
            const auto r     = run_pipeline(cfg);
            std::map<std::string, int> assignment;
            for (std::size_t i = 0; i < r.standardized.rows.size(); ++i) {
                assignment[r.standardized.rows[i].code] = r.model.assignment[i];
            }
            return py::make_tuple(r.report.to_json().dump(), assignment);
        },
        py::arg("data_dir"), py::arg("out_dir") = py::none(), py::arg("seed") = 42, py::arg("k") = 17, py::arg("k_min") = 15, py::arg("k_max") = 20,
        py::arg("skip_vote") = false, py::arg("emit_geojson") = false);
}
