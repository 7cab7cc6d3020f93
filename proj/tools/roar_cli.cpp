// Benchmark and maintenance driver: data generation, ground truth, index
// builds, search sweeps, updates, workload diagnostics and report merging.
//
// Exit codes: 0 ok, 1 user error (flags, files, contracts), 2 internal.

#include <algorithm>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "roar/analysis.hpp"
#include "roar/build.hpp"
#include "roar/distance.hpp"
#include "roar/io.hpp"
#include "roar/oracle.hpp"
#include "roar/search.hpp"
#include "roar/update.hpp"

namespace {

using json = nlohmann::json;

std::string fmt(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.6f", v);
  return buf;
}

std::vector<uint32_t> parse_u32_list(const std::string& text) {
  std::vector<uint32_t> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    if (!item.empty()) out.push_back(uint32_t(std::stoul(item)));
  }
  return out;
}

std::vector<std::string> parse_str_list(const std::string& text) {
  std::vector<std::string> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    if (!item.empty()) out.push_back(item);
  }
  return out;
}

struct SweepRow {
  uint32_t l;
  double recall, qps, mean_hops, mean_visited;
};

void write_search_csv(const std::filesystem::path& path, const std::vector<SweepRow>& rows) {
  std::ofstream out(path);
  if (!out) throw roar::IoError("cannot open " + path.string());
  out << "# schema=roar-search-v1\n";
  out << "L,recall,qps,mean_hops,mean_visited\n";
  for (const SweepRow& r : rows) {
    out << r.l << ',' << fmt(r.recall) << ',' << fmt(r.qps) << ',' << fmt(r.mean_hops) << ','
        << fmt(r.mean_visited) << '\n';
  }
}

// QPS is the median over `reps` repetitions on a warm index; recall and
// hop counts must agree across repetitions.
template <class RunFn>
SweepRow run_sweep_point(uint32_t l, int reps, RunFn&& run) {
  std::vector<double> qps;
  roar::BatchResult last;
  for (int r = 0; r < std::max(reps, 1); ++r) {
    roar::BatchResult res = run(l);
    if (r > 0 && (res.mean_recall != last.mean_recall || res.mean_hops != last.mean_hops)) {
      throw roar::Error("nondeterministic sweep repetition");
    }
    qps.push_back(res.qps);
    last = std::move(res);
  }
  std::sort(qps.begin(), qps.end());
  return SweepRow{l, last.mean_recall, qps[qps.size() / 2], last.mean_hops,
                  last.mean_visited};
}

int cmd_gen(int threads, uint64_t seed, const std::string& metric_name, size_t n_base,
            size_t n_ood, size_t n_id, uint32_t dim, double shell_noise, double ood_depth,
            const std::string& out_base, const std::string& out_ood, const std::string& out_id) {
  (void)threads;
  roar::Metric metric = roar::metric_from_name(metric_name);
  roar::SyntheticDataset ds =
      roar::gen_synthetic(n_base, n_ood, n_id, dim, seed, shell_noise, ood_depth, metric);
  if (!out_base.empty()) roar::write_fbin(ds.base, out_base);
  if (!out_ood.empty()) roar::write_fbin(ds.ood_queries, out_ood);
  if (!out_id.empty()) roar::write_fbin(ds.id_queries, out_id);
  std::cout << "generated base=" << n_base << " ood=" << n_ood << " id=" << n_id
            << " dim=" << dim << " seed=" << seed << "\n";
  return 0;
}

int cmd_gt(int threads, const std::string& metric_name, const std::string& base_path,
           const std::string& query_path, uint32_t k, const std::string& out_path) {
  roar::Metric metric = roar::metric_from_name(metric_name);
  roar::VectorSet base = roar::read_fbin(base_path, metric);
  roar::VectorSet queries = roar::read_fbin(query_path, metric);
  roar::GroundTruth gt = roar::exact_knn(base, queries, k, threads);
  roar::write_gt(gt, out_path);
  std::cout << "ground truth " << gt.query_count << " x " << gt.k << " -> " << out_path << "\n";
  return 0;
}

int cmd_build(int threads, const std::string& metric_name, const std::string& base_path,
              const std::string& query_path, const std::string& gt_path, uint32_t nq,
              uint32_t m, uint32_t l, double query_fraction, const std::string& stage,
              bool skip_bipartite, const std::string& out_path) {
  roar::Metric metric = roar::metric_from_name(metric_name);
  roar::VectorSet base = roar::read_fbin(base_path, metric);
  roar::VectorSet queries = roar::read_fbin(query_path, metric);
  if (query_fraction <= 0.0 || query_fraction > 1.0) {
    throw roar::InvalidArgument("--query-fraction must be in (0, 1]");
  }
  size_t keep = size_t(query_fraction * double(base.count));
  if (query_fraction < 1.0 && keep < queries.count) {
    queries.count = keep;
    queries.data.resize(keep * size_t(queries.dim));
  }

  if (stage != "bipartite" && stage != "projected" && stage != "enhanced") {
    throw roar::InvalidArgument("--graph-stage must be bipartite, projected or enhanced");
  }
  roar::BuildParams params{nq, m, l};
  roar::GroundTruth gt;
  if (!gt_path.empty()) {
    gt = roar::read_gt(gt_path);
    if (gt.query_count != queries.count) {
      throw roar::InvalidArgument("--gt rows disagree with (possibly truncated) query count");
    }
    if (gt.k != nq) throw roar::InvalidArgument("--gt k must equal --nq");
  } else {
    uint32_t eff_nq = uint32_t(std::min<size_t>(nq, base.count));
    gt = roar::exact_knn(base, queries, eff_nq, threads);
    params.nq = gt.k;  // small bases clamp nq
  }

  std::pair<roar::RoarIndex, roar::BipartiteGraph> built;
  if (stage == "enhanced") {
    built = roar::build_roargraph(base, gt, params, threads);
  } else {
    roar::BipartiteGraph bip = roar::build_bipartite(base, gt);
    roar::RoarIndex index = roar::project(bip, base, m, l, threads);
    index.params = params;
    if (stage == "bipartite") index.adjacency.assign(base.count, {});
    built = {std::move(index), std::move(bip)};
  }
  roar::save_index(built.first, skip_bipartite ? nullptr : &built.second, out_path);
  std::cout << "index stage=" << stage << " n=" << built.first.size() << " -> " << out_path
            << "\n";
  return 0;
}

int cmd_build_baseline(int threads, const std::string& metric_name,
                       const std::string& base_path, uint32_t m, uint32_t l,
                       const std::string& out_path) {
  roar::Metric metric = roar::metric_from_name(metric_name);
  roar::VectorSet base = roar::read_fbin(base_path, metric);
  roar::RoarIndex index = roar::build_baseline_graph(base, m, l, threads);
  roar::save_index(index, nullptr, out_path);
  std::cout << "baseline index n=" << index.size() << " -> " << out_path << "\n";
  return 0;
}

int cmd_search(int threads, const std::string& index_path, const std::string& base_path,
               const std::string& query_path, const std::string& gt_path, uint32_t k,
               const std::string& l_sweep, int reps, const std::string& stage,
               const std::string& out_csv) {
  roar::LoadedIndex loaded = roar::load_index(index_path);
  roar::VectorSet base = roar::read_fbin(base_path, loaded.index.metric);
  roar::VectorSet queries = roar::read_fbin(query_path, loaded.index.metric);
  roar::GroundTruth gt;
  bool have_gt = !gt_path.empty();
  if (have_gt) gt = roar::read_gt(gt_path);

  std::vector<uint32_t> ls = parse_u32_list(l_sweep);
  if (ls.empty()) throw roar::InvalidArgument("--l-sweep needs at least one value");

  std::vector<SweepRow> rows;
  for (uint32_t l : ls) {
    uint32_t eff_l = std::max(l, k);
    SweepRow row = run_sweep_point(eff_l, reps, [&](uint32_t lv) {
      if (stage == "bipartite") {
        if (!loaded.bipartite) {
          throw roar::InvalidArgument("index file has no bipartite section");
        }
        return roar::batch_search_bipartite(*loaded.bipartite, base, loaded.index.medoid,
                                            queries, lv, k, threads,
                                            have_gt ? &gt : nullptr);
      }
      return roar::batch_search(loaded.index, base, queries, lv, k, threads,
                                have_gt ? &gt : nullptr);
    });
    rows.push_back(row);
    std::cout << "L=" << row.l << " recall@" << k << "=" << fmt(row.recall)
              << " qps=" << fmt(row.qps) << " hops=" << fmt(row.mean_hops) << "\n";
  }
  if (!out_csv.empty()) write_search_csv(out_csv, rows);
  return 0;
}

int cmd_insert(int threads, const std::string& index_path, const std::string& base_path,
               const std::string& query_path, const std::string& new_path,
               uint32_t search_l, const std::string& out_index,
               const std::string& out_base) {
  (void)threads;
  roar::LoadedIndex loaded = roar::load_index(index_path);
  if (!loaded.bipartite) {
    throw roar::InvalidArgument("insert requires an index saved with its bipartite graph");
  }
  roar::VectorSet base = roar::read_fbin(base_path, loaded.index.metric);
  roar::VectorSet queries = roar::read_fbin(query_path, loaded.index.metric);
  roar::VectorSet fresh = roar::read_fbin(new_path, loaded.index.metric);
  if (fresh.dim != base.dim) throw roar::InvalidArgument("new vectors have wrong dimension");
  size_t fallbacks = 0;
  for (size_t i = 0; i < fresh.count; ++i) {
    roar::InsertReport rep = roar::insert(loaded.index, *loaded.bipartite, base, queries,
                                          fresh.row(i), search_l);
    fallbacks += rep.fallback ? 1 : 0;
  }
  roar::save_index(loaded.index, &*loaded.bipartite, out_index);
  if (!out_base.empty()) roar::write_fbin(base, out_base);
  std::cout << "inserted " << fresh.count << " vectors (" << fallbacks << " fallbacks) -> "
            << out_index << "\n";
  return 0;
}

int cmd_delete(const std::string& index_path, const std::string& ids_text,
               const std::string& out_index) {
  roar::LoadedIndex loaded = roar::load_index(index_path);
  size_t already = 0;
  for (uint32_t id : parse_u32_list(ids_text)) {
    if (roar::remove(loaded.index, id) == roar::DeleteStatus::AlreadyDeleted) {
      ++already;
      std::cerr << "warning: id " << id << " already deleted\n";
    }
  }
  roar::save_index(loaded.index, loaded.bipartite ? &*loaded.bipartite : nullptr, out_index);
  std::cout << "tombstones=" << loaded.index.tombstones.marked << " -> " << out_index << "\n";
  return 0;
}

json histogram_json(const roar::Histogram& h) {
  return json{{"lo", h.lo}, {"hi", h.hi}, {"counts", h.counts}};
}

int cmd_analyze(int threads, const std::string& metric_name, const std::string& what,
                const std::string& base_path, const std::string& query_path,
                const std::string& second_path, const std::string& gt_path,
                size_t sample_size, uint32_t k, double epsilon, uint32_t max_iters,
                double tol, const std::string& out_csv, const std::string& out_json) {
  roar::Metric metric = roar::metric_from_name(metric_name);
  json summary;
  summary["what"] = what;
  std::ofstream csv;
  if (!out_csv.empty()) {
    csv.open(out_csv);
    if (!csv) throw roar::IoError("cannot open " + out_csv);
  }

  if (what == "mahalanobis") {
    roar::VectorSet base = roar::read_fbin(base_path, metric);
    roar::VectorSet queries = roar::read_fbin(query_path, metric);
    roar::MahalanobisProfile p = roar::mahalanobis_profile(base, queries, sample_size);
    summary["median"] = p.med;
    summary["mean"] = p.mean;
    summary["histogram"] = histogram_json(p.hist);
    if (csv.is_open()) {
      csv << "# schema=roar-mahalanobis-v1\nquery,distance\n";
      for (size_t q = 0; q < p.distances.size(); ++q) {
        csv << q << ',' << fmt(p.distances[q]) << '\n';
      }
    }
  } else if (what == "nn-dist") {
    roar::GroundTruth gt;
    if (!gt_path.empty()) {
      gt = roar::read_gt(gt_path);
    } else {
      roar::VectorSet base = roar::read_fbin(base_path, metric);
      roar::VectorSet queries = roar::read_fbin(query_path, metric);
      gt = roar::exact_knn(base, queries, 1, threads);
    }
    roar::NNDistanceProfile p = roar::nn_distance_profile(gt, metric);
    summary["median"] = p.med;
    summary["mean"] = p.mean;
    summary["histogram"] = histogram_json(p.hist);
    if (csv.is_open()) {
      csv << "# schema=roar-nn-dist-v1\nquery,first_nn_distance\n";
      for (size_t q = 0; q < p.first_nn.size(); ++q) {
        csv << q << ',' << fmt(p.first_nn[q]) << '\n';
      }
    }
  } else if (what == "dispersion") {
    roar::VectorSet base = roar::read_fbin(base_path, metric);
    roar::GroundTruth gt;
    if (!gt_path.empty()) {
      gt = roar::read_gt(gt_path);
    } else {
      roar::VectorSet queries = roar::read_fbin(query_path, metric);
      gt = roar::exact_knn(base, queries, k, threads);
    }
    std::vector<double> ranks = roar::nn_dispersion_profile(base, gt);
    summary["ranks"] = ranks;
    if (csv.is_open()) {
      csv << "# schema=roar-dispersion-v1\nrank,mean_separation\n";
      for (size_t i = 0; i < ranks.size(); ++i) {
        csv << (i + 1) << ',' << fmt(ranks[i]) << '\n';
      }
    }
  } else if (what == "w2") {
    roar::VectorSet a = roar::read_fbin(base_path, metric);
    roar::VectorSet b = roar::read_fbin(second_path.empty() ? query_path : second_path, metric);
    roar::W2Result r = roar::wasserstein2_sinkhorn(a, b, epsilon, max_iters, tol);
    summary["value"] = r.value;
    summary["converged"] = r.converged;
    summary["iterations"] = r.iterations;
    if (!r.converged) std::cerr << "warning: sinkhorn did not converge\n";
  } else {
    throw roar::InvalidArgument("unknown analysis: " + what);
  }

  if (!out_json.empty()) {
    std::ofstream js(out_json);
    if (!js) throw roar::IoError("cannot open " + out_json);
    js << summary.dump(2) << '\n';
  }
  std::cout << summary.dump() << "\n";
  return 0;
}

int cmd_report(const std::string& inputs, const std::string& labels,
               const std::string& out_csv) {
  std::vector<std::string> files = parse_str_list(inputs);
  std::vector<std::string> names = parse_str_list(labels);
  if (files.empty()) throw roar::InvalidArgument("--inputs needs at least one csv");
  if (!names.empty() && names.size() != files.size()) {
    throw roar::InvalidArgument("--labels count must match --inputs");
  }
  std::ofstream out(out_csv);
  if (!out) throw roar::IoError("cannot open " + out_csv);
  out << "# schema=roar-report-v1\n";
  out << "label,L,recall,qps,mean_hops,mean_visited\n";
  for (size_t f = 0; f < files.size(); ++f) {
    std::ifstream in(files[f]);
    if (!in) throw roar::IoError("cannot open " + files[f]);
    std::string label = names.empty() ? std::filesystem::path(files[f]).stem().string()
                                      : names[f];
    std::string line;
    std::getline(in, line);
    if (line != "# schema=roar-search-v1") {
      throw roar::InvalidArgument(files[f] + ": not a roar-search-v1 csv");
    }
    std::getline(in, line);  // header
    while (std::getline(in, line)) {
      if (!line.empty()) out << label << ',' << line << '\n';
    }
  }
  std::cout << "report -> " << out_csv << "\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"graph-based vector search engine and benchmark harness"};
  app.require_subcommand(1);
  app.fallthrough();  // accept global flags after the subcommand name
  app.set_config("--config", "", "flat key=value config file; flags win over file entries");

  int threads = 1;
  uint64_t seed = 42;
  std::string metric = "l2";
  app.add_option("--threads", threads, "worker threads (1 = deterministic reference)")
      ->capture_default_str();
  app.add_option("--seed", seed, "random seed for generators")->capture_default_str();
  app.add_option("--metric", metric, "l2 | ip | cosine")->capture_default_str();

  // gen
  auto* gen = app.add_subcommand("gen", "generate a synthetic cross-modal workload");
  size_t n_base = 10000, n_ood = 10000, n_id = 1000;
  uint32_t dim = 32;
  double shell_noise = 0.1, ood_depth = 0.3;
  std::string out_base, out_ood, out_id;
  gen->add_option("--n-base", n_base)->capture_default_str();
  gen->add_option("--n-ood", n_ood)->capture_default_str();
  gen->add_option("--n-id", n_id)->capture_default_str();
  gen->add_option("--dim", dim)->capture_default_str();
  gen->add_option("--shell-noise", shell_noise)->capture_default_str();
  gen->add_option("--ood-depth", ood_depth)->capture_default_str();
  gen->add_option("--out-base", out_base);
  gen->add_option("--out-ood", out_ood);
  gen->add_option("--out-id", out_id);

  // gt
  auto* gtc = app.add_subcommand("gt", "compute exact ground truth");
  std::string base_path, query_path, out_path;
  uint32_t k = 100;
  gtc->add_option("--base", base_path)->required();
  gtc->add_option("--queries", query_path)->required();
  gtc->add_option("--k", k)->capture_default_str();
  gtc->add_option("--out", out_path)->required();

  // build
  auto* build = app.add_subcommand("build", "build an index from construction queries");
  std::string b_base, b_queries, b_gt, b_out, b_stage = "enhanced";
  uint32_t nq = 100, m = 35, l = 500;
  double query_fraction = 1.0;
  bool skip_bipartite = false;
  build->add_option("--base", b_base)->required();
  build->add_option("--queries", b_queries)->required();
  build->add_option("--gt", b_gt, "precomputed construction ground truth (k = nq)");
  build->add_option("--nq", nq)->capture_default_str();
  build->add_option("--m", m)->capture_default_str();
  build->add_option("--l", l)->capture_default_str();
  build->add_option("--query-fraction", query_fraction,
                    "use the first p*|base| construction queries")
      ->capture_default_str();
  build->add_option("--graph-stage", b_stage, "bipartite | projected | enhanced")
      ->capture_default_str();
  build->add_flag("--no-save-bipartite", skip_bipartite,
                  "omit the bipartite section (disables later insertion)");
  build->add_option("--out", b_out)->required();

  // build-baseline
  auto* bb = app.add_subcommand("build-baseline", "build the query-agnostic baseline graph");
  std::string bb_base, bb_out;
  uint32_t bb_m = 35, bb_l = 500;
  bb->add_option("--base", bb_base)->required();
  bb->add_option("--m", bb_m)->capture_default_str();
  bb->add_option("--l", bb_l)->capture_default_str();
  bb->add_option("--out", bb_out)->required();

  // search
  auto* search = app.add_subcommand("search", "sweep beam widths and emit a csv");
  std::string s_index, s_base, s_queries, s_gt, s_sweep = "10,20,50,100,200", s_csv,
              s_stage = "enhanced";
  uint32_t s_k = 10;
  int reps = 3;
  search->add_option("--index", s_index)->required();
  search->add_option("--base", s_base)->required();
  search->add_option("--queries", s_queries)->required();
  search->add_option("--gt", s_gt, "evaluation ground truth for recall");
  search->add_option("--k", s_k)->capture_default_str();
  search->add_option("--l-sweep", s_sweep)->capture_default_str();
  search->add_option("--reps", reps, "repetitions per point; median QPS reported")
      ->capture_default_str();
  search->add_option("--graph-stage", s_stage, "enhanced | bipartite")->capture_default_str();
  search->add_option("--out", s_csv);

  // insert
  auto* ins = app.add_subcommand("insert", "insert new vectors through the bipartite graph");
  std::string i_index, i_base, i_queries, i_new, i_out_index, i_out_base;
  uint32_t i_search_l = 0;
  ins->add_option("--index", i_index)->required();
  ins->add_option("--base", i_base)->required();
  ins->add_option("--queries", i_queries, "construction query vectors")->required();
  ins->add_option("--new", i_new, "fbin of vectors to insert")->required();
  ins->add_option("--search-l", i_search_l, "0 = index build l");
  ins->add_option("--out-index", i_out_index)->required();
  ins->add_option("--out-base", i_out_base, "write the grown base set");

  // delete
  auto* del = app.add_subcommand("delete", "tombstone nodes by id");
  std::string d_index, d_ids, d_out;
  del->add_option("--index", d_index)->required();
  del->add_option("--ids", d_ids, "comma-separated node ids")->required();
  del->add_option("--out-index", d_out)->required();

  // analyze
  auto* an = app.add_subcommand("analyze", "workload diagnostics");
  std::string a_what, a_base, a_queries, a_second, a_gt, a_csv, a_json;
  size_t a_sample = 0;
  uint32_t a_k = 100, a_iters = 1000;
  double a_eps = 0.0, a_tol = 1e-6;
  an->add_option("--what", a_what, "mahalanobis | nn-dist | dispersion | w2")->required();
  an->add_option("--base", a_base)->required();
  an->add_option("--queries", a_queries);
  an->add_option("--second", a_second, "second sample for w2");
  an->add_option("--gt", a_gt, "precomputed ground truth for nn profiles");
  an->add_option("--sample-size", a_sample, "base sample rows (0 = all)");
  an->add_option("--k", a_k)->capture_default_str();
  an->add_option("--epsilon", a_eps, "sinkhorn regularization (0 = 0.1*median cost)");
  an->add_option("--max-iters", a_iters)->capture_default_str();
  an->add_option("--tol", a_tol)->capture_default_str();
  an->add_option("--out-csv", a_csv);
  an->add_option("--out-json", a_json);

  // report
  auto* rep = app.add_subcommand("report", "merge search csvs into one labeled table");
  std::string r_inputs, r_labels, r_out;
  rep->add_option("--inputs", r_inputs, "comma-separated csv files")->required();
  rep->add_option("--labels", r_labels, "comma-separated labels");
  rep->add_option("--out", r_out)->required();

  try {
    app.parse(argc, argv);
    if (*gen) {
      return cmd_gen(threads, seed, metric, n_base, n_ood, n_id, dim, shell_noise, ood_depth,
                     out_base, out_ood, out_id);
    }
    if (*gtc) return cmd_gt(threads, metric, base_path, query_path, k, out_path);
    if (*build) {
      return cmd_build(threads, metric, b_base, b_queries, b_gt, nq, m, l, query_fraction,
                       b_stage, skip_bipartite, b_out);
    }
    if (*bb) return cmd_build_baseline(threads, metric, bb_base, bb_m, bb_l, bb_out);
    if (*search) {
      return cmd_search(threads, s_index, s_base, s_queries, s_gt, s_k, s_sweep, reps,
                        s_stage, s_csv);
    }
    if (*ins) {
      return cmd_insert(threads, i_index, i_base, i_queries, i_new, i_search_l, i_out_index,
                        i_out_base);
    }
    if (*del) return cmd_delete(d_index, d_ids, d_out);
    if (*an) {
      return cmd_analyze(threads, metric, a_what, a_base, a_queries, a_second, a_gt, a_sample,
                         a_k, a_eps, a_iters, a_tol, a_csv, a_json);
    }
    if (*rep) return cmd_report(r_inputs, r_labels, r_out);
    return 1;
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e);
    return code == 0 ? 0 : 1;
  } catch (const roar::InvalidArgument& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  } catch (const roar::IoError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "internal error: " << e.what() << "\n";
    return 2;
  }
}
