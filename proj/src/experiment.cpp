#include "irispad/experiment.hpp"

#include <algorithm>
#include <set>

#include "irispad/error.hpp"
#include "irispad/fusion.hpp"
#include "irispad/reference.hpp"
#include "irispad/results_store.hpp"
#include "irispad/rng.hpp"
#include "irispad/svg.hpp"
#include "irispad/text_util.hpp"

namespace irispad {

namespace {

Manifest sampled_manifest(const ExperimentConfig& cfg) {
  if (cfg.manifest_path.empty()) {
    throw Error(ErrorCode::Config, "experiment.manifest", "not set");
  }
  return sample_per_class(load_manifest(cfg.manifest_path), cfg.sample_cap,
                          derive_seed(cfg.seed, "sampling"));
}

bool canonical_less(const StoreRecord& a, const StoreRecord& b) {
  if (a.variant.index() != b.variant.index()) {
    return a.variant.index() < b.variant.index();
  }
  if (a.cls != b.cls) return class_index(a.cls) < class_index(b.cls);
  return a.sample_id < b.sample_id;
}

std::string record_key(std::string_view variant, std::string_view sample_id) {
  std::string key(variant);
  key += '/';
  key += sample_id;
  return key;
}

std::string csv_header_classes() {
  std::string out;
  for (auto c : kAllClasses) {
    out += ',';
    out += to_string(c);
  }
  return out;
}

}  // namespace

IngestReport cmd_ingest(const ExperimentConfig& cfg) {
  cfg.validate();
  IngestReport report;
  const auto full = load_manifest(cfg.manifest_path);
  report.sampled = sample_per_class(full, cfg.sample_cap,
                                    derive_seed(cfg.seed, "sampling"));
  for (auto c : kAllClasses) {
    report.available[class_index(c)] = full.count(c);
    report.selected[class_index(c)] = report.sampled.count(c);
  }
  if (!cfg.annotations_path.empty()) {
    report.annotated_samples = load_annotations(cfg.annotations_path, full).size();
  }
  report.output = cfg.output_dir / "sampled_manifest.csv";
  text::write_file(report.output, format_manifest(report.sampled));
  return report;
}

RunSummary cmd_run(const ExperimentConfig& cfg, ModelClient& client,
                   const RunOptions& options) {
  cfg.validate();
  const auto manifest = sampled_manifest(cfg);

  SalienceLibrary library;
  for (const auto& variant : cfg.variants) {
    const auto kind = variant.salience;
    if (kind == SalienceKind::None || library.count(kind) != 0) continue;
    auto path = cfg.salience_paths.find(kind);
    if (path == cfg.salience_paths.end()) {
      throw Error(ErrorCode::Config, "salience." + std::string(to_string(kind)),
                  "required by variant " + variant.label());
    }
    auto corpus = load_salience_corpus(path->second);
    corpus.selector = cfg.salience_selector;
    library.emplace(kind, std::move(corpus));
  }

  RunSummary summary;
  for (const auto& [kind, corpus] : library) {
    summary.salience_tokens[kind] =
        mean_selected_tokens(corpus, cfg.exemplar_classes);
  }
  summary.store = cfg.store_path();
  std::filesystem::create_directories(cfg.output_dir);

  std::set<std::string> done;
  for (const auto& r : read_store(summary.store)) {
    done.insert(record_key(r.variant.label(), r.sample_id));
  }

  std::vector<AssembledPrompt> prompts;
  std::vector<const SampleRecord*> owners;
  for (const auto& variant : cfg.variants) {
    for (const auto& sample : manifest.samples) {
      if (done.count(record_key(variant.label(), sample.sample_id)) != 0) {
        ++summary.skipped;
        continue;
      }
      auto prompt = assemble_prompt(variant, sample, library, cfg.exemplar_classes);
      auto budget = budget_check(prompt, cfg.context_limit, cfg.image_token_allowance);
      if (!budget.ok) {
        summary.failures.push_back(
            {variant.label(), sample.sample_id,
             "over token budget by " + std::to_string(budget.excess)});
        continue;
      }
      prompts.push_back(std::move(prompt));
      owners.push_back(&sample);
    }
  }
  if (options.limit && prompts.size() > *options.limit) {
    prompts.resize(*options.limit);
    owners.resize(*options.limit);
    summary.interrupted = true;
  }

  TranscriptLog log(cfg.transcript_log.value_or(cfg.output_dir / "transcript.jsonl"));
  BatchOptions batch;
  batch.max_in_flight = cfg.endpoint.max_in_flight;
  batch.max_retries = cfg.endpoint.max_retries;
  batch.min_request_spacing = cfg.endpoint.min_request_spacing;
  batch.log = &log;
  batch.on_result = [&](std::size_t index, const BatchItem& item) {
    const auto& prompt = prompts[index];
    if (!item.ok()) {
      summary.failures.push_back(
          {prompt.variant->label(), prompt.sample_id, item.error().what()});
      return;
    }
    const auto& response = item.response();
    StoreRecord record;
    record.sample_id = prompt.sample_id;
    record.cls = owners[index]->cls;
    record.variant = *prompt.variant;
    record.confidence = response.confidence;
    record.decision = classify(response.confidence, cfg.threshold);
    record.attempts = response.attempts;
    append_record(summary.store, record);
    ++summary.written;
  };
  run_batch(client, prompts, batch);

  auto records = read_store(summary.store);
  std::stable_sort(records.begin(), records.end(), canonical_less);
  records.erase(std::unique(records.begin(), records.end(),
                            [](const StoreRecord& a, const StoreRecord& b) {
                              return a.variant == b.variant &&
                                     a.sample_id == b.sample_id;
                            }),
                records.end());
  write_store(summary.store, records);

  std::sort(summary.failures.begin(), summary.failures.end(),
            [](const RunFailure& a, const RunFailure& b) {
              return std::tie(a.variant, a.sample_id) < std::tie(b.variant, b.sample_id);
            });
  return summary;
}

RunSummary cmd_run(const ExperimentConfig& cfg, const RunOptions& options) {
  HttpModelClient client(cfg.endpoint);
  return cmd_run(cfg, client, options);
}

ScoreReport cmd_score(const std::filesystem::path& store,
                      const std::filesystem::path& output_dir, int bins) {
  const auto records = read_store(store);
  if (records.empty()) throw Error(ErrorCode::EmptyStore, store.string());

  ScoreReport report;
  const auto variants = enumerate_variants();
  for (auto& [index, verdicts] : verdicts_by_variant(records)) {
    VariantScore row;
    row.variant = variants[index];
    row.rates = error_rates(verdicts);
    try {
      row.mse = aggregate_mse(row.rates).value;
    } catch (const Error& e) {
      throw Error(e.code(), e.subject(), "variant " + row.variant.label());
    }
    row.histogram = confidence_histogram(verdicts, bins);
    row.verdicts = verdicts.size();
    report.rows.push_back(std::move(row));
  }

  std::filesystem::create_directories(output_dir);
  std::string rates = "variant" + csv_header_classes() + ",mse\n";
  std::string counts = "variant,class,errors,total\n";
  std::string hist = "variant,bin_lower,count\n";
  for (const auto& row : report.rows) {
    const auto label = row.variant.label();
    rates += label;
    for (auto c : kAllClasses) {
      rates += ',';
      rates += text::format_fixed(*row.rates.rate(c), 3);
      const auto& n = row.rates.counts.at(c);
      counts += label + "," + std::string(to_string(c)) + "," +
                std::to_string(n.errors) + "," + std::to_string(n.total) + "\n";
    }
    rates += ',';
    rates += text::format_fixed(row.mse, 3);
    rates += '\n';

    std::vector<svg::Bar> bars;
    for (const auto& b : row.histogram) {
      hist += label + "," + text::format_fixed(b.lower, 3) + "," +
              std::to_string(b.count) + "\n";
      bars.push_back({text::format_fixed(b.lower, 2), static_cast<double>(b.count)});
    }
    auto svg_path = output_dir / ("histogram_" + label + ".svg");
    text::write_file(svg_path, svg::bar_chart("Confidence histogram: " + label,
                                              bars, "confidence", "count"));
    report.histogram_svgs.push_back(svg_path);
  }
  report.rates_csv = output_dir / "rates.csv";
  report.counts_csv = output_dir / "counts.csv";
  report.histograms_csv = output_dir / "histograms.csv";
  text::write_file(report.rates_csv, rates);
  text::write_file(report.counts_csv, counts);
  text::write_file(report.histograms_csv, hist);

  std::string notes =
      "Rates: BPCER for live, APCER for every attack class, threshold applied "
      "when verdicts were stored.\n"
      "MSE: mean of the eight squared class rates (0 best, 1 worst).\n"
      "Reference, human examiners: MSE " +
      text::format_fixed(reference::kPublishedRows[0].reported_mse, 3) + ".\n" +
      "Reference, salience-guided CNN: MSE " +
      text::format_fixed(reference::kCnnReportedMse, 3) + " +- " +
      text::format_fixed(reference::kCnnReportedMseSd, 3) +
      " over ten training runs. This is a mean of per-run MSEs and cannot be "
      "recomputed from mean class rates: their MSE is " +
      text::format_fixed(aggregate_mse(ClassErrorRates::from_rates(reference::kCnnMeanRates)).value, 3) +
      ", and the mean of per-run MSEs is never below it.\n";
  text::write_file(output_dir / "notes.txt", notes);
  return report;
}

MeshSummary cmd_mesh(const ExperimentConfig& cfg, ModelClient& client) {
  cfg.validate();
  if (cfg.manifest_path.empty()) {
    throw Error(ErrorCode::Config, "experiment.manifest", "not set");
  }
  if (cfg.annotations_path.empty()) {
    throw Error(ErrorCode::Config, "experiment.annotations",
                "MESH generation needs examiner annotations");
  }
  const auto manifest = load_manifest(cfg.manifest_path);
  const auto annotations = load_annotations(cfg.annotations_path, manifest);

  MeshSummary summary;
  summary.output = cfg.mesh_output.value_or(
      cfg.output_dir / ("salience_" + std::string(to_string(cfg.mesh_kind)) + ".txt"));
  TranscriptLog log(cfg.output_dir / "mesh_transcript.jsonl");

  for (auto c : kAllClasses) {
    if (std::find(cfg.exemplar_classes.begin(), cfg.exemplar_classes.end(), c) ==
        cfg.exemplar_classes.end()) {
      continue;
    }
    const SampleRecord* exemplar = nullptr;
    if (auto it = cfg.mesh_exemplars.find(c); it != cfg.mesh_exemplars.end()) {
      exemplar = manifest.find(it->second);
      if (exemplar == nullptr) throw Error(ErrorCode::UnknownSample, it->second);
    } else {
      std::vector<const SampleRecord*> candidates;
      for (const auto& s : manifest.samples) {
        if (s.cls == c && annotations.count(s.sample_id) != 0) candidates.push_back(&s);
      }
      std::sort(candidates.begin(), candidates.end(),
                [](auto* a, auto* b) { return a->sample_id < b->sample_id; });
      if (!candidates.empty()) exemplar = candidates.front();
    }
    const auto class_name = std::string(to_string(c));
    if (exemplar == nullptr || annotations.count(exemplar->sample_id) == 0) {
      summary.failures.push_back({class_name, exemplar ? exemplar->sample_id : "",
                                  "no annotated exemplar"});
      continue;
    }
    try {
      auto result = generate_mesh(client, exemplar->image_ref,
                                  annotations.at(exemplar->sample_id),
                                  cfg.mesh_max_attempts, exemplar->sample_id, &log);
      summary.attempts[c] = result.attempts;
      summary.corpus.entries[c].push_back(
          {exemplar->sample_id,
           mesh_salience_text(result.description, cfg.mesh_full_document)});
    } catch (const Error& e) {
      summary.failures.push_back({class_name, exemplar->sample_id, e.what()});
    }
  }
  text::write_file(summary.output, format_salience_corpus(summary.corpus));
  return summary;
}

MeshSummary cmd_mesh(const ExperimentConfig& cfg) {
  HttpModelClient client(cfg.endpoint);
  return cmd_mesh(cfg, client);
}

CurveReport cmd_curve(const std::filesystem::path& store,
                      const std::filesystem::path& output_dir,
                      std::uint64_t seed, double epsilon) {
  const auto records = read_store(store);
  if (records.empty()) throw Error(ErrorCode::EmptyStore, store.string());
  const auto variants = enumerate_variants();
  const auto curve_seed = derive_seed(seed, "curve");

  CurveReport report;
  std::string csv = "variant,n_per_class,mse\n";
  std::string conv = "variant,converged_at\n";
  std::vector<svg::Series> series;
  for (const auto& [index, verdicts] : verdicts_by_variant(records)) {
    const auto label = variants[index].label();
    auto curve = learning_curve(verdicts, curve_seed);
    auto n0 = converged_at(curve, epsilon);
    svg::Series s{label, {}};
    for (const auto& p : curve.points) {
      csv += label + "," + std::to_string(p.n_per_class) + "," +
             text::format_fixed(p.mse, 6) + "\n";
      s.points.emplace_back(static_cast<double>(p.n_per_class), p.mse);
    }
    conv += label + "," + (n0 ? std::to_string(*n0) : std::string("not_converged")) + "\n";
    series.push_back(std::move(s));
    report.curves.emplace(index, std::move(curve));
    report.converged.emplace(index, n0);
  }
  std::filesystem::create_directories(output_dir);
  report.curve_csv = output_dir / "curve.csv";
  report.curve_svg = output_dir / "curve.svg";
  text::write_file(report.curve_csv, csv);
  text::write_file(output_dir / "convergence.csv", conv);
  text::write_file(report.curve_svg,
                   svg::line_chart("Learning curve", series, "samples per class", "MSE"));
  return report;
}

std::vector<StatResult> cmd_stats(const std::filesystem::path& store_a,
                                  const std::filesystem::path& store_b,
                                  const StatsOptions& options) {
  auto a = read_store(store_a);
  auto b = read_store(store_b);
  if (a.empty()) throw Error(ErrorCode::EmptyStore, store_a.string());
  if (b.empty()) throw Error(ErrorCode::EmptyStore, store_b.string());
  auto keep = [&](const StoreRecord& r) {
    return !options.variant || r.variant == *options.variant;
  };

  std::vector<double> paired_a;
  std::vector<double> paired_b;
  std::vector<double> all_a;
  std::vector<double> all_b;
  if (options.pairing == Pairing::PerSample) {
    std::map<std::string, double> lookup;
    for (const auto& r : b) {
      if (!keep(r)) continue;
      lookup[record_key(r.variant.label(), r.sample_id)] = r.confidence;
      all_b.push_back(r.confidence);
    }
    std::stable_sort(a.begin(), a.end(), canonical_less);
    for (const auto& r : a) {
      if (!keep(r)) continue;
      all_a.push_back(r.confidence);
      auto it = lookup.find(record_key(r.variant.label(), r.sample_id));
      if (it == lookup.end()) continue;
      paired_a.push_back(r.confidence);
      paired_b.push_back(it->second);
    }
  } else {
    std::vector<StoreRecord> fa;
    std::vector<StoreRecord> fb;
    std::copy_if(a.begin(), a.end(), std::back_inserter(fa), keep);
    std::copy_if(b.begin(), b.end(), std::back_inserter(fb), keep);
    auto ra = verdicts_by_variant(fa);
    auto rb = verdicts_by_variant(fb);
    for (const auto& [index, verdicts] : ra) {
      const auto rates_a = error_rates(verdicts);
      for (const auto& [cls, rate] : rates_a.rates) all_a.push_back(rate);
      auto other = rb.find(index);
      if (other == rb.end()) continue;
      const auto rates_b = error_rates(other->second);
      for (const auto& [cls, rate] : rates_a.rates) {
        if (auto rate_b = rates_b.rate(cls)) {
          paired_a.push_back(rate);
          paired_b.push_back(*rate_b);
        }
      }
    }
    for (const auto& [index, verdicts] : rb) {
      for (const auto& [cls, rate] : error_rates(verdicts).rates) all_b.push_back(rate);
    }
  }
  if (paired_a.empty()) {
    throw Error(ErrorCode::InvalidArgument, "stores", "no shared records to pair");
  }
  return {wilcoxon_signed_rank(paired_a, paired_b), mann_whitney_u(all_a, all_b)};
}

std::string EmbedReport::summary_line() const {
  auto ratios = [](const std::vector<double>& r) {
    std::string out;
    for (double v : r) {
      if (!out.empty()) out += ',';
      out += text::format_fixed(v, 4);
    }
    return out;
  };
  return "silhouette | fused=" + text::format_fixed(silhouette_fused, 4) +
         " | image_only=" + text::format_fixed(silhouette_image, 4) +
         " | explained_fused=" + ratios(explained_fused) +
         " | explained_image=" + ratios(explained_image);
}

EmbedReport cmd_embed(const std::filesystem::path& embeddings,
                      const std::optional<std::filesystem::path>& weights,
                      const std::filesystem::path& output_dir,
                      std::uint64_t seed, int hidden_dim, int output_dim) {
  const auto records = load_embeddings(embeddings);
  if (records.size() < 2) {
    throw Error(ErrorCode::InvalidArgument, embeddings.string(),
                "need at least two embeddings");
  }
  const auto input_dim = static_cast<Eigen::Index>(records.front().image_vec.size() +
                                                   records.front().text_vec.size());
  const auto w = weights ? load_weights(*weights)
                         : FusionWeights::random(input_dim, hidden_dim, output_dim,
                                                 derive_seed(seed, "fusion"));
  std::vector<std::vector<double>> fused;
  std::vector<std::vector<double>> image;
  std::vector<PresentationClass> labels;
  for (const auto& r : records) {
    fused.push_back(fuse(r, w));
    image.push_back(r.image_vec);
    labels.push_back(r.cls);
  }
  const auto fused_proj = pca_project(fused, 2);
  const auto image_proj = pca_project(image, 2);

  EmbedReport report;
  report.silhouette_fused = silhouette(fused_proj.scores, labels);
  report.silhouette_image = silhouette(image_proj.scores, labels);
  report.explained_fused = fused_proj.explained_ratio;
  report.explained_image = image_proj.explained_ratio;

  std::filesystem::create_directories(output_dir);
  std::string csv = "sample_id,class,fused_pc1,fused_pc2,image_pc1,image_pc2\n";
  std::vector<svg::ScatterPoint> fused_points;
  std::vector<svg::ScatterPoint> image_points;
  for (std::size_t i = 0; i < records.size(); ++i) {
    const auto& f = fused_proj.scores[i];
    const auto& m = image_proj.scores[i];
    csv += records[i].sample_id + "," + std::string(to_string(labels[i])) + "," +
           text::format_double(f[0]) + "," + text::format_double(f[1]) + "," +
           text::format_double(m[0]) + "," + text::format_double(m[1]) + "\n";
    fused_points.push_back({f[0], f[1], class_index(labels[i])});
    image_points.push_back({m[0], m[1], class_index(labels[i])});
  }
  std::vector<std::string> groups;
  for (auto c : kAllClasses) groups.emplace_back(to_string(c));
  report.coords_csv = output_dir / "embed_coords.csv";
  report.fused_svg = output_dir / "embed_fused.svg";
  report.image_svg = output_dir / "embed_image.svg";
  text::write_file(report.coords_csv, csv);
  text::write_file(report.fused_svg,
                   svg::scatter_plot("Fused embeddings (PCA)", fused_points, groups));
  text::write_file(report.image_svg,
                   svg::scatter_plot("Image embeddings (PCA)", image_points, groups));
  return report;
}

}  // namespace irispad
