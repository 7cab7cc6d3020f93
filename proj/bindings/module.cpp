#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "roar/analysis.hpp"
#include "roar/build.hpp"
#include "roar/distance.hpp"
#include "roar/io.hpp"
#include "roar/oracle.hpp"
#include "roar/search.hpp"
#include "roar/update.hpp"

namespace py = pybind11;
using namespace roar;

namespace {

VectorSet set_from_array(py::array_t<float, py::array::c_style | py::array::forcecast> arr,
                         const std::string& metric) {
  if (arr.ndim() != 2) throw InvalidArgument("expected a 2-d float32 array");
  VectorSet set(uint32_t(arr.shape(1)), size_t(arr.shape(0)), metric_from_name(metric));
  std::copy(arr.data(), arr.data() + arr.size(), set.data.begin());
  set.validate();
  if (set.metric == Metric::Cosine) set.normalize_rows();
  return set;
}

py::array_t<float> set_to_array(const VectorSet& set) {
  py::array_t<float> out({py::ssize_t(set.count), py::ssize_t(set.dim)});
  std::copy(set.data.begin(), set.data.end(), out.mutable_data());
  return out;
}

py::array_t<uint32_t> ids_to_array(const GroundTruth& gt) {
  py::array_t<uint32_t> out({py::ssize_t(gt.query_count), py::ssize_t(gt.k)});
  std::copy(gt.ids.begin(), gt.ids.end(), out.mutable_data());
  return out;
}

py::array_t<float> dists_to_array(const GroundTruth& gt) {
  py::array_t<float> out({py::ssize_t(gt.query_count), py::ssize_t(gt.k)});
  std::copy(gt.dists.begin(), gt.dists.end(), out.mutable_data());
  return out;
}

std::vector<float> query_from_array(
    py::array_t<float, py::array::c_style | py::array::forcecast> arr, uint32_t dim) {
  if (arr.ndim() != 1 || uint32_t(arr.shape(0)) != dim) {
    throw InvalidArgument("query must be a 1-d float32 array of the index dimension");
  }
  return {arr.data(), arr.data() + arr.size()};
}

py::dict report_to_dict(const SearchReport& r) {
  py::dict d;
  d["ids"] = py::array_t<uint32_t>(py::ssize_t(r.ids.size()), r.ids.data());
  d["dists"] = py::array_t<float>(py::ssize_t(r.dists.size()), r.dists.data());
  d["hops"] = r.hops;
  d["visited"] = r.visited;
  d["latency_micros"] = r.latency_micros;
  return d;
}

}  // namespace

PYBIND11_MODULE(_roar, m) {
  m.doc() = "query-distribution-guided graph index for vector search";

  py::register_exception<InvalidArgument>(m, "InvalidArgumentError", PyExc_ValueError);
  py::register_exception<IoError>(m, "IoError", PyExc_IOError);

  py::class_<VectorSet>(m, "VectorSet")
      .def(py::init(&set_from_array), py::arg("array"), py::arg("metric") = "l2")
      .def_property_readonly("count", [](const VectorSet& s) { return s.count; })
      .def_property_readonly("dim", [](const VectorSet& s) { return s.dim; })
      .def_property_readonly("metric",
                             [](const VectorSet& s) { return std::string(metric_name(s.metric)); })
      .def("numpy", &set_to_array);

  py::class_<GroundTruth>(m, "GroundTruth")
      .def_property_readonly("k", [](const GroundTruth& g) { return g.k; })
      .def_property_readonly("query_count", [](const GroundTruth& g) { return g.query_count; })
      .def("ids", &ids_to_array)
      .def("dists", &dists_to_array);

  py::class_<BipartiteGraph>(m, "BipartiteGraph")
      .def_property_readonly("query_count",
                             [](const BipartiteGraph& b) { return b.query_count(); })
      .def_property_readonly("base_count",
                             [](const BipartiteGraph& b) { return b.base_count(); });

  py::class_<RoarIndex>(m, "Index")
      .def_property_readonly("size", [](const RoarIndex& i) { return i.size(); })
      .def_property_readonly("medoid", [](const RoarIndex& i) { return i.medoid; })
      .def_property_readonly("metric",
                             [](const RoarIndex& i) { return std::string(metric_name(i.metric)); })
      .def_property_readonly("deleted", [](const RoarIndex& i) { return i.tombstones.marked; })
      .def("degree", [](const RoarIndex& i, uint32_t id) { return i.adjacency.at(id).size(); })
      .def("neighbors",
           [](const RoarIndex& i, uint32_t id) {
             const auto& list = i.adjacency.at(id);
             return py::array_t<uint32_t>(py::ssize_t(list.size()), list.data());
           })
      .def("search",
           [](const RoarIndex& index, const VectorSet& base,
              py::array_t<float, py::array::c_style | py::array::forcecast> query, uint32_t l,
              uint32_t k) {
             auto q = query_from_array(query, index.dim);
             return report_to_dict(beam_search(index, base, q.data(), l, k));
           },
           py::arg("base"), py::arg("query"), py::arg("l"), py::arg("k"))
      .def("batch_search",
           [](const RoarIndex& index, const VectorSet& base, const VectorSet& queries,
              uint32_t l, uint32_t k, int threads, const GroundTruth* gt) {
             BatchResult res = batch_search(index, base, queries, l, k, threads, gt);
             py::dict d;
             d["recall"] = res.mean_recall;
             d["qps"] = res.qps;
             d["mean_hops"] = res.mean_hops;
             d["mean_visited"] = res.mean_visited;
             py::list reports;
             for (const SearchReport& r : res.reports) reports.append(report_to_dict(r));
             d["reports"] = reports;
             return d;
           },
           py::arg("base"), py::arg("queries"), py::arg("l"), py::arg("k"),
           py::arg("threads") = 1, py::arg("gt") = nullptr)
      .def("insert",
           [](RoarIndex& index, BipartiteGraph& bip, VectorSet& base, const VectorSet& queries,
              py::array_t<float, py::array::c_style | py::array::forcecast> v,
              uint32_t search_l) {
             auto vec = query_from_array(v, index.dim);
             InsertReport rep = insert(index, bip, base, queries, vec.data(), search_l);
             py::dict d;
             d["id"] = rep.id;
             d["fallback"] = rep.fallback;
             return d;
           },
           py::arg("bipartite"), py::arg("base"), py::arg("queries"), py::arg("vector"),
           py::arg("search_l") = 0)
      .def("delete_id", [](RoarIndex& index, uint32_t id) {
        return remove(index, id) == DeleteStatus::Deleted;
      });

  m.def("dist",
        [](py::array_t<float, py::array::c_style | py::array::forcecast> a,
           py::array_t<float, py::array::c_style | py::array::forcecast> b,
           const std::string& metric) {
          return dist(metric_from_name(metric),
                      std::span<const float>(a.data(), size_t(a.size())),
                      std::span<const float>(b.data(), size_t(b.size())));
        },
        py::arg("a"), py::arg("b"), py::arg("metric") = "l2");
  m.def("medoid", &medoid, py::arg("base"));

  m.def("exact_knn", &exact_knn, py::arg("base"), py::arg("queries"), py::arg("k"),
        py::arg("threads") = 1, py::call_guard<py::gil_scoped_release>());
  m.def("recall_at_k",
        [](py::array_t<uint32_t, py::array::c_style | py::array::forcecast> result,
           py::array_t<uint32_t, py::array::c_style | py::array::forcecast> truth, uint32_t k) {
          return recall_at_k(std::span<const uint32_t>(result.data(), size_t(result.size())),
                             std::span<const uint32_t>(truth.data(), size_t(truth.size())), k);
        },
        py::arg("result"), py::arg("truth"), py::arg("k"));

  m.def("build",
        [](const VectorSet& base, const VectorSet& queries, uint32_t nq, uint32_t m_, uint32_t l,
           int threads) {
          std::pair<RoarIndex, BipartiteGraph> built;
          {
            py::gil_scoped_release release;
            built = build_roargraph(base, queries, BuildParams{nq, m_, l}, threads);
          }
          return py::make_tuple(std::move(built.first), std::move(built.second));
        },
        py::arg("base"), py::arg("queries"), py::arg("nq") = 100, py::arg("m") = 35,
        py::arg("l") = 500, py::arg("threads") = 1);
  m.def("build_from_gt",
        [](const VectorSet& base, const GroundTruth& gt, uint32_t nq, uint32_t m_, uint32_t l,
           int threads) {
          std::pair<RoarIndex, BipartiteGraph> built;
          {
            py::gil_scoped_release release;
            built = build_roargraph(base, gt, BuildParams{nq, m_, l}, threads);
          }
          return py::make_tuple(std::move(built.first), std::move(built.second));
        },
        py::arg("base"), py::arg("gt"), py::arg("nq") = 100, py::arg("m") = 35,
        py::arg("l") = 500, py::arg("threads") = 1);
  m.def("build_baseline", &build_baseline_graph, py::arg("base"), py::arg("m") = 35,
        py::arg("l") = 500, py::arg("threads") = 1,
        py::call_guard<py::gil_scoped_release>());
  m.def("reachable_fraction", &reachable_fraction, py::arg("index"));

  m.def("save_index",
        [](const RoarIndex& index, const BipartiteGraph* bip, const std::string& path) {
          save_index(index, bip, path);
        },
        py::arg("index"), py::arg("bipartite"), py::arg("path"));
  m.def("load_index", [](const std::string& path) {
    LoadedIndex loaded = load_index(path);
    return py::make_tuple(std::move(loaded.index),
                          loaded.bipartite ? py::cast(std::move(*loaded.bipartite))
                                           : py::none().cast<py::object>());
  });
  m.def("read_fbin",
        [](const std::string& path, const std::string& metric) {
          return read_fbin(path, metric_from_name(metric));
        },
        py::arg("path"), py::arg("metric") = "l2");
  m.def("write_fbin", [](const VectorSet& set, const std::string& path) {
    write_fbin(set, path);
  });

  m.def("mahalanobis",
        [](const VectorSet& base, const VectorSet& queries, size_t sample_size) {
          MahalanobisProfile p = mahalanobis_profile(base, queries, sample_size);
          py::dict d;
          d["distances"] =
              py::array_t<double>(py::ssize_t(p.distances.size()), p.distances.data());
          d["median"] = p.med;
          d["mean"] = p.mean;
          return d;
        },
        py::arg("base"), py::arg("queries"), py::arg("sample_size") = 0);
  m.def("wasserstein2",
        [](const VectorSet& a, const VectorSet& b, double epsilon, uint32_t max_iters,
           double tol) {
          W2Result r;
          {
            py::gil_scoped_release release;
            r = wasserstein2_sinkhorn(a, b, epsilon, max_iters, tol);
          }
          return py::make_tuple(r.value, r.converged, r.iterations);
        },
        py::arg("a"), py::arg("b"), py::arg("epsilon") = 0.0, py::arg("max_iters") = 1000,
        py::arg("tol") = 1e-6);
  m.def("nn_dispersion",
        [](const VectorSet& base, const GroundTruth& gt) {
          auto ranks = nn_dispersion_profile(base, gt);
          return py::array_t<double>(py::ssize_t(ranks.size()), ranks.data());
        },
        py::arg("base"), py::arg("gt"));
  m.def("gen_synthetic",
        [](size_t n_base, size_t n_ood, size_t n_id, uint32_t dim, uint64_t seed,
           double shell_noise, double ood_depth, const std::string& metric) {
          SyntheticDataset ds = gen_synthetic(n_base, n_ood, n_id, dim, seed, shell_noise,
                                              ood_depth, metric_from_name(metric));
          return py::make_tuple(std::move(ds.base), std::move(ds.ood_queries),
                                std::move(ds.id_queries));
        },
        py::arg("n_base"), py::arg("n_ood"), py::arg("n_id"), py::arg("dim"), py::arg("seed"),
        py::arg("shell_noise") = 0.1, py::arg("ood_depth") = 0.3, py::arg("metric") = "l2");
}
