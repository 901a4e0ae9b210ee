// chainforge command line: one subcommand per pipeline stage plus `run`.

#include <algorithm>
#include <cstdlib>
#include <set>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "chainforge/chains.hpp"
#include "chainforge/corpus.hpp"
#include "chainforge/evaluation.hpp"
#include "chainforge/featurize.hpp"
#include "chainforge/graph.hpp"
#include "chainforge/label_set.hpp"
#include "chainforge/pipeline.hpp"
#include "chainforge/report.hpp"
#include "chainforge/synth.hpp"
#include "chainforge/validate.hpp"

namespace cf = chainforge;
using nlohmann::json;

namespace {

// Options shared by commands that read a corpus.
struct CorpusArgs {
  std::string path;
  std::string schema;
  std::string format = "jsonl";
  std::size_t min_quote_chars = 40;

  void add(CLI::App* cmd) {
    cmd->add_option("--corpus", path, "Corpus file (JSONL or CSV)")->required()->check(CLI::ExistingFile);
    cmd->add_option("--schema", schema, "Field-mapping JSON")->check(CLI::ExistingFile);
    cmd->add_option("--format", format, "jsonl or csv")->check(CLI::IsMember({"jsonl", "csv"}));
    cmd->add_option("--min-quote-chars", min_quote_chars, "Shortest run removed as a quote");
  }

  cf::IngestResult load() const {
    const auto s = schema.empty() ? cf::SchemaConfig{} : cf::SchemaConfig::load(schema);
    auto r = format == "csv" ? cf::ingest_csv(path, s) : cf::ingest_jsonl(path, s);
    if (!r.report.rejected.empty()) {
      std::cerr << "warning: " << r.report.rejected.size() << " malformed line(s) skipped\n";
    }
    return r;
  }

  std::map<cf::PostId, std::string> clean(const cf::Corpus& corpus) const {
    cf::QuoteConfig q;
    q.min_quote_chars = min_quote_chars;
    return cf::clean_corpus_text(corpus, q);
  }
};

struct TrainArgs {
  double lambda = 1e-4;
  double lr = 0.5;
  double decay = 0.05;
  int epochs = 30;
  std::size_t batch = 32;
  std::uint64_t seed = 1;
  bool balanced = false;
  std::size_t ngram_min = 2, ngram_max = 5, min_df = 2, max_features = 200000;

  void add(CLI::App* cmd) {
    cmd->add_option("--lambda", lambda, "L2 strength");
    cmd->add_option("--lr", lr, "Initial learning rate");
    cmd->add_option("--lr-decay", decay, "Learning-rate decay per epoch");
    cmd->add_option("--epochs", epochs);
    cmd->add_option("--batch-size", batch);
    cmd->add_option("--seed", seed);
    cmd->add_flag("--balanced", balanced, "Inverse-frequency class weights");
    cmd->add_option("--ngram-min", ngram_min);
    cmd->add_option("--ngram-max", ngram_max);
    cmd->add_option("--min-df", min_df);
    cmd->add_option("--max-features", max_features);
  }

  cf::TrainConfig train() const {
    cf::TrainConfig c;
    c.l2_lambda = lambda;
    c.learning_rate = lr;
    c.lr_decay = decay;
    c.epochs = epochs;
    c.batch_size = batch;
    c.seed = seed;
    c.class_weighting = balanced ? cf::ClassWeighting::balanced : cf::ClassWeighting::none;
    c.validate();
    return c;
  }

  cf::NgramParams ngrams() const {
    cf::NgramParams p{ngram_min, ngram_max, min_df, max_features, true};
    p.validate();
    return p;
  }
};

void write_file(const std::string& path, const std::string& body) {
  if (path.empty() || path == "-") {
    std::cout << body;
    return;
  }
  std::ofstream out(path, std::ios::binary);
  if (!out) throw cf::IoError("cannot write " + path);
  out << body;
}

// Example list for one task, featurized with a featurizer fitted on it.
struct Featurized {
  cf::TaskDataset data;
  cf::TfidfModel features;
  std::vector<cf::LabeledExample> examples;
};

Featurized featurize_task(cf::Task task, const CorpusArgs& corpus_args, const std::string& labels_path,
                          const cf::NgramParams& ngrams) {
  const auto corpus = corpus_args.load().corpus;
  const auto labels = cf::LabelSet::load(labels_path);
  Featurized f;
  f.data = cf::build_dataset(task, corpus, labels, corpus_args.clean(corpus));
  if (f.data.size() == 0) throw cf::SchemaError("no labeled posts for this task");
  f.features = cf::TfidfModel::fit(f.data.docs, ngrams);
  f.examples = cf::featurize_dataset(f.data, f.features);
  return f;
}

std::optional<cf::UndersampleRule> undersample_rule(cf::Task task, const std::string& spec,
                                                     std::uint64_t) {
  if (spec.empty()) return std::nullopt;
  const auto names = cf::class_names(task);
  auto target = cf::parse_undersample_target(spec, [&](const std::string& n) {
    auto it = std::find(names.begin(), names.end(), n);
    if (it == names.end()) throw cf::InvalidArgument("unknown class '" + n + "'");
    return static_cast<std::uint32_t>(it - names.begin());
  });
  return cf::UndersampleRule{cf::other_class(task), target};
}

std::vector<cf::SupplyChainLink> maybe_sample(std::vector<cf::SupplyChainLink> links, std::size_t n,
                                              std::uint64_t seed) {
  if (n == 0) return links;
  return cf::attenuate(cf::sample_links(links, n, seed));
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"chainforge: supply-chain discovery in underground forum posts"};
  app.require_subcommand(1);
  app.set_version_flag("--version", std::string("chainforge ") + "0.3.0");

  // ingest -------------------------------------------------------------------
  auto* ingest = app.add_subcommand("ingest", "Load a forum dump and print corpus statistics");
  std::string ingest_in, ingest_schema, ingest_format = "jsonl", ingest_out;
  bool ingest_json_out = false;
  ingest->add_option("input", ingest_in, "Dump file")->required()->check(CLI::ExistingFile);
  ingest->add_option("--schema", ingest_schema, "Field-mapping JSON")->check(CLI::ExistingFile);
  ingest->add_option("--format", ingest_format)->check(CLI::IsMember({"jsonl", "csv"}));
  ingest->add_option("--out", ingest_out, "Write the canonical JSONL corpus here");
  ingest->add_flag("--json", ingest_json_out, "Print statistics as JSON");
  ingest->callback([&] {
    const auto schema = ingest_schema.empty() ? cf::SchemaConfig{} : cf::SchemaConfig::load(ingest_schema);
    auto r = ingest_format == "csv" ? cf::ingest_csv(ingest_in, schema) : cf::ingest_jsonl(ingest_in, schema);
    for (const auto& e : r.report.rejected) std::cerr << "line " << e.line << ": " << e.message << "\n";
    const auto stats = cf::corpus_stats(r.corpus);
    if (ingest_json_out) {
      json j = cf::to_json(stats);
      j["rejected_lines"] = r.report.rejected.size();
      j["orphan_threads"] = r.report.orphan_threads;
      j["out_of_order_threads"] = r.report.out_of_order_threads;
      std::cout << j.dump(2) << "\n";
    } else {
      std::cout << cf::format_stats_table(r.corpus.forum_name(), stats);
    }
    if (!ingest_out.empty()) cf::export_jsonl(r.corpus, ingest_out);
  });

  // featurize ----------------------------------------------------------------
  auto* featurize = app.add_subcommand("featurize", "Fit or apply a character n-gram TF-IDF model");
  featurize->require_subcommand(1);
  CorpusArgs fz_corpus;
  TrainArgs fz_params;
  std::string fz_task = "product", fz_out, fz_model;
  auto* fz_fit = featurize->add_subcommand("fit", "Fit on the product posts or replies of a corpus");
  fz_corpus.add(fz_fit);
  fz_params.add(fz_fit);
  fz_fit->add_option("--task", fz_task)->check(CLI::IsMember({"product", "reply"}));
  fz_fit->add_option("--out", fz_out, "Model file")->required();
  fz_fit->callback([&] {
    const auto corpus = fz_corpus.load().corpus;
    const auto clean = fz_corpus.clean(corpus);
    std::vector<std::string> docs;
    const bool product = fz_task == "product";
    for (const auto& p : corpus.posts()) {
      if (p.is_product_post() == product) docs.push_back(clean.at(p.post_id));
    }
    auto model = cf::TfidfModel::fit(docs, fz_params.ngrams());
    model.save(fz_out);
    std::cout << "fitted " << model.n_docs_fitted() << " documents, " << model.dimension() << " features\n";
  });
  auto* fz_transform = featurize->add_subcommand("transform", "Write sparse vectors as JSONL");
  CorpusArgs fzt_corpus;
  fzt_corpus.add(fz_transform);
  fz_transform->add_option("--model", fz_model, "TF-IDF model file")->required()->check(CLI::ExistingFile);
  fz_transform->add_option("--task", fz_task)->check(CLI::IsMember({"product", "reply"}));
  fz_transform->add_option("--out", fz_out, "Output JSONL (default stdout)");
  fz_transform->callback([&] {
    const auto model = cf::TfidfModel::load(fz_model);
    const auto corpus = fzt_corpus.load().corpus;
    const auto clean = fzt_corpus.clean(corpus);
    const bool product = fz_task == "product";
    std::ostringstream out;
    for (const auto& p : corpus.posts()) {
      if (p.is_product_post() != product) continue;
      const auto v = model.transform(clean.at(p.post_id));
      json idx = json::array(), val = json::array();
      for (std::size_t i = 0; i < v.nnz(); ++i) {
        idx.push_back(v.indices()[i]);
        val.push_back(v.values()[i]);
      }
      out << json{{"post_id", p.post_id}, {"dim", v.dimension()}, {"indices", idx}, {"values", val}}.dump() << "\n";
    }
    write_file(fz_out, out.str());
  });

  // train / eval / curve -----------------------------------------------------
  CorpusArgs tr_corpus;
  TrainArgs tr_args;
  std::string tr_task = "product", tr_labels, tr_out, tr_undersample, tr_confusion;
  std::size_t tr_folds = 5;
  std::vector<std::size_t> tr_sizes;

  auto add_task_opts = [&](CLI::App* cmd) {
    tr_corpus.add(cmd);
    tr_args.add(cmd);
    cmd->add_option("--task", tr_task)->check(CLI::IsMember({"product", "reply"}));
    cmd->add_option("--labels", tr_labels, "Label JSON {products, replies}")->required()->check(CLI::ExistingFile);
    cmd->add_option("--undersample", tr_undersample, "Shrink `other`: below:<class> or a count");
  };

  auto* train_cmd = app.add_subcommand("train", "Train a task model (featurizer + classifier)");
  add_task_opts(train_cmd);
  train_cmd->add_option("--out", tr_out, "Model file")->required();
  train_cmd->callback([&] {
    const auto task = cf::parse_task(tr_task);
    const auto corpus = tr_corpus.load().corpus;
    const auto data = cf::build_dataset(task, corpus, cf::LabelSet::load(tr_labels), tr_corpus.clean(corpus));
    cf::ModelTrainOptions opts;
    opts.ngrams = tr_args.ngrams();
    opts.train = tr_args.train();
    if (!tr_undersample.empty()) opts.undersample_other = tr_undersample;
    opts.undersample_seed = tr_args.seed;
    const auto model = cf::train_task_model(data, opts);
    model.save(tr_out);
    std::cout << "trained " << tr_task << " model on " << data.size() << " posts, "
              << model.features.dimension() << " features, final loss " << model.classifier.final_loss << "\n";
  });

  auto* eval_cmd = app.add_subcommand("eval", "Stratified k-fold cross-validation");
  add_task_opts(eval_cmd);
  eval_cmd->add_option("--folds", tr_folds)->check(CLI::Range(2, 100));
  eval_cmd->add_option("--out", tr_out, "metrics JSON (default: table on stdout)");
  eval_cmd->add_option("--confusion", tr_confusion, "Write the pooled confusion matrix CSV");
  eval_cmd->callback([&] {
    const auto task = cf::parse_task(tr_task);
    auto f = featurize_task(task, tr_corpus, tr_labels, tr_args.ngrams());
    cf::CrossValidationOptions opts;
    opts.k = tr_folds;
    opts.seed = tr_args.seed;
    opts.train = tr_args.train();
    opts.excluded_class = cf::other_class(task);
    opts.undersample = undersample_rule(task, tr_undersample, tr_args.seed);
    const auto names = cf::class_names(task);
    const auto r = cf::cross_validate(f.examples, names, opts);
    for (const auto& w : r.warnings) std::cerr << "warning: " << w << "\n";
    if (tr_out.empty()) {
      std::cout << r.pooled.to_table();
    } else {
      write_file(tr_out, r.to_json().dump(2) + "\n");
    }
    if (!tr_confusion.empty()) write_file(tr_confusion, r.pooled.confusion_csv());
  });

  auto* curve_cmd = app.add_subcommand("curve", "Learning curve over training-set sizes");
  add_task_opts(curve_cmd);
  curve_cmd->add_option("--folds", tr_folds)->check(CLI::Range(2, 100));
  curve_cmd->add_option("--sizes", tr_sizes, "Training sizes")->required()->delimiter(',');
  curve_cmd->add_option("--out", tr_out, "Curve JSON (default stdout)");
  curve_cmd->callback([&] {
    const auto task = cf::parse_task(tr_task);
    auto f = featurize_task(task, tr_corpus, tr_labels, tr_args.ngrams());
    cf::CrossValidationOptions opts;
    opts.k = tr_folds;
    opts.seed = tr_args.seed;
    opts.train = tr_args.train();
    opts.excluded_class = cf::other_class(task);
    opts.undersample = undersample_rule(task, tr_undersample, tr_args.seed);
    const auto names = cf::class_names(task);
    const auto c = cf::learning_curve(f.examples, names, tr_sizes, opts);
    for (const auto& w : c.warnings) std::cerr << "warning: " << w << "\n";
    write_file(tr_out, c.to_json().dump(2) + "\n");
  });

  // predict ------------------------------------------------------------------
  auto* predict_cmd = app.add_subcommand("predict", "Label every post of a corpus with trained models");
  CorpusArgs pr_corpus;
  std::string pr_product, pr_reply, pr_out;
  pr_corpus.add(predict_cmd);
  predict_cmd->add_option("--product-model", pr_product)->required()->check(CLI::ExistingFile);
  predict_cmd->add_option("--reply-model", pr_reply)->required()->check(CLI::ExistingFile);
  predict_cmd->add_option("--out", pr_out, "Label JSON")->required();
  predict_cmd->callback([&] {
    const auto corpus = pr_corpus.load().corpus;
    const auto labels = cf::predict_labels(corpus, cf::TaskModel::load(pr_product),
                                           cf::TaskModel::load(pr_reply), pr_corpus.clean(corpus));
    write_file(pr_out, labels.to_json().dump(1) + "\n");
  });

  // graph --------------------------------------------------------------------
  auto* graph_cmd = app.add_subcommand("graph", "Build the user interaction graph");
  CorpusArgs gr_corpus;
  std::string gr_labels, gr_mode = "filtered", gr_out;
  gr_corpus.add(graph_cmd);
  graph_cmd->add_option("--labels", gr_labels, "Label JSON")->required()->check(CLI::ExistingFile);
  graph_cmd->add_option("--mode", gr_mode)->check(CLI::IsMember({"filtered", "baseline"}));
  graph_cmd->add_option("--out", gr_out, "Edges JSONL")->required();
  graph_cmd->callback([&] {
    const auto corpus = gr_corpus.load().corpus;
    const auto g = cf::build_graph(corpus, cf::LabelSet::load(gr_labels), cf::parse_graph_mode(gr_mode));
    cf::write_edges_jsonl(g, gr_out);
    std::cout << cf::to_json(cf::summarize(g)).dump(2) << "\n";
  });

  // chains -------------------------------------------------------------------
  auto* chains_cmd = app.add_subcommand("chains", "Discover and attenuate supply-chain links");
  std::string ch_edges, ch_traversal = "exhaustive", ch_out, ch_graph, ch_dot, ch_alluvial;
  std::optional<double> ch_gap_days;
  std::vector<std::string> ch_filter;
  chains_cmd->add_option("--edges", ch_edges, "Edges JSONL")->required()->check(CLI::ExistingFile);
  chains_cmd->add_option("--traversal", ch_traversal)->check(CLI::IsMember({"exhaustive", "bfs"}));
  chains_cmd->add_option("--max-gap", ch_gap_days, "Longest purchase-to-sale gap in days");
  chains_cmd->add_option("--out", ch_out, "Links JSONL")->required();
  chains_cmd->add_option("--graph", ch_graph, "Category-level supply graph JSON");
  chains_cmd->add_option("--dot", ch_dot, "Graphviz rendering of the supply graph");
  chains_cmd->add_option("--alluvial", ch_alluvial, "Alluvial export JSON");
  chains_cmd->add_option("--alluvial-filter", ch_filter, "Keep flows touching these categories")->delimiter(',');
  chains_cmd->callback([&] {
    const auto g = cf::read_edges_jsonl(ch_edges);
    cf::LinkOptions opts;
    opts.traversal = cf::parse_traversal(ch_traversal);
    if (ch_gap_days) opts.max_gap_seconds = static_cast<std::int64_t>(*ch_gap_days * 86400.0);
    const auto links = cf::attenuate(cf::find_links(g, opts).links);
    cf::write_links_jsonl(links, opts.traversal, ch_out);
    const auto sg = cf::aggregate(links);
    if (!ch_graph.empty()) write_file(ch_graph, sg.to_json().dump(2) + "\n");
    if (!ch_dot.empty()) write_file(ch_dot, sg.to_dot());
    if (!ch_alluvial.empty()) {
      cf::CategoryPredicate filter;
      if (!ch_filter.empty()) {
        std::set<cf::ProductCategory> keep;
        for (const auto& n : ch_filter) {
          auto c = cf::parse_product_category(n);
          if (!c) throw cf::InvalidArgument("unknown category '" + n + "'");
          keep.insert(*c);
        }
        filter = [keep](cf::ProductCategory c) { return keep.contains(c); };
      }
      write_file(ch_alluvial, cf::export_alluvial(sg, filter).to_json().dump(2) + "\n");
    }
    std::cout << links.size() << " links from " << cf::weight_per_middle_user(links).size()
              << " middle users\n";
  });

  // trends -------------------------------------------------------------------
  auto* trends_cmd = app.add_subcommand("trends", "Monthly product-category series as CSV");
  CorpusArgs tn_corpus;
  std::string tn_labels, tn_out;
  tn_corpus.add(trends_cmd);
  trends_cmd->add_option("--labels", tn_labels)->required()->check(CLI::ExistingFile);
  trends_cmd->add_option("--out", tn_out, "CSV (default stdout)");
  trends_cmd->callback([&] {
    const auto corpus = tn_corpus.load().corpus;
    write_file(tn_out, cf::trend_series(corpus, cf::LabelSet::load(tn_labels)).to_csv());
  });

  // review -------------------------------------------------------------------
  auto* review = app.add_subcommand("review", "Manual link validation workflow");
  review->require_subcommand(1);
  std::string rv_links, rv_out, rv_sidecar, rv_in, rv_labels, rv_json;
  std::string rv_base_links, rv_base_labels;
  std::size_t rv_sample = 0;
  std::uint64_t rv_seed = 1;
  CorpusArgs rv_corpus;

  auto* rv_export = review->add_subcommand("export", "Write links to a review CSV + JSON sidecar");
  rv_corpus.add(rv_export);
  rv_export->add_option("--links", rv_links)->required()->check(CLI::ExistingFile);
  rv_export->add_option("--out", rv_out, "Review CSV")->required();
  rv_export->add_option("--sidecar", rv_sidecar, "Full-body JSON (default <out>.json)");
  rv_export->add_option("--baseline-sample", rv_sample, "Export a seeded sample of N links");
  rv_export->add_option("--seed", rv_seed);
  rv_export->callback([&] {
    const auto corpus = rv_corpus.load().corpus;
    const auto links = maybe_sample(cf::read_links_jsonl(rv_links), rv_sample, rv_seed);
    cf::QuoteConfig q;
    q.min_quote_chars = rv_corpus.min_quote_chars;
    const auto r = cf::export_for_review(links, corpus, rv_out,
                                         rv_sidecar.empty() ? rv_out + ".json" : rv_sidecar, q);
    std::cout << r.rows << " rows written";
    if (r.flagged) std::cout << ", " << r.flagged << " flagged for missing provenance";
    std::cout << "\n";
  });

  auto* rv_import = review->add_subcommand("import", "Read labels from a filled review CSV");
  rv_import->add_option("--in", rv_in, "Review CSV")->required()->check(CLI::ExistingFile);
  rv_import->add_option("--out", rv_out, "Link label JSON")->required();
  rv_import->callback([&] {
    const auto r = cf::import_labels(rv_in);
    for (const auto& e : r.errors) std::cerr << "row " << e.row << ": " << e.message << "\n";
    json j = json::object();
    for (const auto& [id, l] : r.labels) j[id] = cf::to_string(l);
    write_file(rv_out, j.dump(1) + "\n");
    std::cout << r.labels.size() << " labels, " << r.unlabeled_rows << " unlabeled rows, "
              << r.errors.size() << " errors\n";
    if (!r.errors.empty()) throw CLI::RuntimeError(2);
  });

  auto load_link_labels = [](const std::string& path) {
    cf::LinkLabels out;
    if (path.size() >= 4 && path.substr(path.size() - 4) == ".csv") {
      auto r = cf::import_labels(path);
      if (!r.errors.empty()) throw cf::SchemaError(path + ": row " + std::to_string(r.errors.front().row) + ": " + r.errors.front().message);
      return r.labels;
    }
    std::ifstream in(path);
    if (!in) throw cf::IoError("cannot open " + path);
    for (const auto& [id, v] : json::parse(in).items()) {
      auto l = cf::parse_link_validation_label(v.get<std::string>());
      if (!l) throw cf::SchemaError(path + ": unknown label for " + id);
      out.emplace(id, *l);
    }
    return out;
  };

  auto* rv_report = review->add_subcommand("report", "Attenuated link-truth table");
  rv_report->add_option("--links", rv_links)->required()->check(CLI::ExistingFile);
  rv_report->add_option("--labels", rv_labels, "Label JSON or filled review CSV")->required()->check(CLI::ExistingFile);
  rv_report->add_option("--baseline-sample", rv_sample, "Report on the same seeded sample export used");
  rv_report->add_option("--seed", rv_seed);
  rv_report->add_option("--baseline-links", rv_base_links, "Unfiltered links to compare against");
  rv_report->add_option("--baseline-labels", rv_base_labels, "Labels for the baseline links");
  rv_report->add_option("--json", rv_json, "Also write the report(s) as JSON");
  rv_report->callback([&] {
    json out;
    const auto mode = rv_sample > 0 ? cf::ReportMode::sample_baseline : cf::ReportMode::algorithm_output;
    const auto links = maybe_sample(cf::read_links_jsonl(rv_links), rv_sample, rv_seed);
    const auto report = cf::relevance_report(links, load_link_labels(rv_labels), mode);
    std::cout << report.to_table();
    out["report"] = report.to_json();
    if (!rv_base_links.empty()) {
      if (rv_base_labels.empty()) throw CLI::ValidationError("--baseline-labels", "required with --baseline-links");
      auto base = cf::read_links_jsonl(rv_base_links);
      if (rv_sample == 0) base = maybe_sample(std::move(base), 100, rv_seed);
      const auto base_report =
          cf::relevance_report(base, load_link_labels(rv_base_labels), cf::ReportMode::sample_baseline);
      const auto cmp = cf::baseline_comparison(report, base_report);
      std::cout << "\n" << base_report.to_table() << "\nrelevant rate: baseline "
                << cmp.baseline_rate * 100 << "% -> filtered " << cmp.filtered_rate * 100 << "%\n";
      out["baseline"] = base_report.to_json();
      out["comparison"] = cmp.to_json();
    }
    if (!rv_json.empty()) write_file(rv_json, out.dump(2) + "\n");
  });

  // synth --------------------------------------------------------------------
  auto* synth_cmd = app.add_subcommand("synth", "Generate a synthetic forum with planted supply chains");
  std::string sy_config, sy_out;
  std::optional<std::uint64_t> sy_seed;
  synth_cmd->add_option("--config", sy_config, "Synth config JSON (default: built-in)")->check(CLI::ExistingFile);
  synth_cmd->add_option("--out", sy_out, "Output directory")->required();
  synth_cmd->add_option("--seed", sy_seed, "Override the config seed");
  synth_cmd->callback([&] {
    auto cfg = sy_config.empty() ? cf::SynthConfig::defaults() : cf::SynthConfig::load(sy_config);
    if (sy_seed) cfg.seed = *sy_seed;
    const auto s = cf::generate(cfg);
    cf::write_synth(s, sy_out);
    std::cout << s.corpus.size() << " posts in " << s.corpus.thread_count() << " threads, "
              << s.truth.planted.size() << " planted links -> " << sy_out << "\n";
  });

  // run ----------------------------------------------------------------------
  auto* run_cmd = app.add_subcommand("run", "Run the whole pipeline from a config file");
  std::string run_config;
  run_cmd->add_option("--config", run_config, "Pipeline config JSON")->required()->check(CLI::ExistingFile);
  run_cmd->callback([&] {
    const auto r = cf::run_pipeline(cf::PipelineConfig::load(run_config));
    std::cout << r.stats.total_messages << " posts, " << r.edges << " edges, " << r.links << " links from "
              << r.middle_users << " middle users\n";
    for (const auto& [name, hash] : r.artifacts) std::cout << "  " << name << "  " << hash << "\n";
  });

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e);
  } catch (const cf::StageError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 3;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return EXIT_SUCCESS;
}
