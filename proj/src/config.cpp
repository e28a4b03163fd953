#include "irispad/config.hpp"

#include <algorithm>
#include <sstream>

#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>

#include "irispad/error.hpp"
#include "irispad/text_util.hpp"

namespace irispad {

namespace pt = boost::property_tree;

namespace {

class Section {
 public:
  Section(const pt::ptree& tree, std::string name,
          const std::filesystem::path& base)
      : name_(std::move(name)), base_(base) {
    if (auto child = tree.get_child_optional(name_)) node_ = &*child;
  }

  bool present() const { return node_ != nullptr; }

  std::optional<std::string> get(const std::string& key) {
    used_.push_back(key);
    if (node_ == nullptr) return std::nullopt;
    auto v = node_->get_optional<std::string>(pt::ptree::path_type(key, '\0'));
    if (!v) return std::nullopt;
    return std::string(text::trim(*v));
  }

  std::optional<std::filesystem::path> path(const std::string& key) {
    auto v = get(key);
    if (!v || v->empty()) return std::nullopt;
    std::filesystem::path p(*v);
    return p.is_relative() && !base_.empty() ? base_ / p : p;
  }

  template <typename T>
  std::optional<T> number(const std::string& key) {
    auto v = get(key);
    if (!v) return std::nullopt;
    if constexpr (std::is_floating_point_v<T>) {
      if (auto d = text::parse_double(*v)) return static_cast<T>(*d);
    } else if constexpr (std::is_unsigned_v<T>) {
      if (auto d = text::parse_uint(*v)) return static_cast<T>(*d);
    } else {
      if (auto d = text::parse_int(*v)) return static_cast<T>(*d);
    }
    throw Error(ErrorCode::Config, field(key), "not a number: '" + *v + "'");
  }

  std::optional<bool> boolean(const std::string& key) {
    auto v = get(key);
    if (!v) return std::nullopt;
    auto lower = text::to_lower(*v);
    if (lower == "true" || lower == "yes" || lower == "1") return true;
    if (lower == "false" || lower == "no" || lower == "0") return false;
    throw Error(ErrorCode::Config, field(key), "not a boolean: '" + *v + "'");
  }

  /// Keys in the file with the given prefix.
  std::vector<std::string> keys_with_prefix(const std::string& prefix) const {
    std::vector<std::string> out;
    if (node_ == nullptr) return out;
    for (const auto& [key, value] : *node_) {
      if (key.rfind(prefix, 0) == 0) out.push_back(key);
    }
    return out;
  }

  void reject_unknown() const {
    if (node_ == nullptr) return;
    for (const auto& [key, value] : *node_) {
      if (std::find(used_.begin(), used_.end(), key) == used_.end()) {
        throw Error(ErrorCode::Config, field(key), "unknown key");
      }
    }
  }

  std::string field(const std::string& key) const { return name_ + "." + key; }

 private:
  std::string name_;
  std::filesystem::path base_;
  const pt::ptree* node_ = nullptr;
  std::vector<std::string> used_;
};

}  // namespace

std::vector<PresentationClass> parse_class_list(std::string_view value) {
  if (text::trim(value) == "all") return {kAllClasses.begin(), kAllClasses.end()};
  std::vector<PresentationClass> out;
  for (auto token : text::split(value, ',')) {
    token = text::trim(token);
    if (!token.empty()) out.push_back(require_class(token));
  }
  std::sort(out.begin(), out.end(), [](PresentationClass a, PresentationClass b) {
    return class_index(a) < class_index(b);
  });
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

std::vector<Variant> parse_variant_list(std::string_view value) {
  if (text::trim(value) == "all") return enumerate_variants();
  std::vector<Variant> out;
  for (auto token : text::split(value, ',')) {
    token = text::trim(token);
    if (token.empty()) continue;
    auto v = parse_variant(token);
    if (std::find(out.begin(), out.end(), v) == out.end()) out.push_back(v);
  }
  std::sort(out.begin(), out.end(), [](const Variant& a, const Variant& b) {
    return a.index() < b.index();
  });
  return out;
}

void ExperimentConfig::validate() const {
  if (!(threshold > 0.0 && threshold < 1.0)) {
    throw Error(ErrorCode::Config, "experiment.threshold", "must lie in (0, 1)");
  }
  if (sample_cap < 1) {
    throw Error(ErrorCode::Config, "experiment.sample_cap", "must be >= 1");
  }
  if (variants.empty()) {
    throw Error(ErrorCode::Config, "experiment.variants", "no variants selected");
  }
  if (histogram_bins < 1) {
    throw Error(ErrorCode::Config, "experiment.histogram_bins", "must be >= 1");
  }
  if (mesh_kind == SalienceKind::None || mesh_kind == SalienceKind::Human) {
    throw Error(ErrorCode::Config, "mesh.kind", "must be llama_mesh or gemini_mesh");
  }
  if (mesh_max_attempts < 1) {
    throw Error(ErrorCode::Config, "mesh.max_attempts", "must be >= 1");
  }
  if (embed_hidden_dim < 1 || embed_output_dim < 1) {
    throw Error(ErrorCode::Config, "embed", "dimensions must be >= 1");
  }
}

ExperimentConfig parse_config(std::string_view content,
                              const std::filesystem::path& base_dir) {
  pt::ptree tree;
  try {
    std::istringstream in{std::string(content)};
    pt::read_ini(in, tree);
  } catch (const pt::ini_parser_error& e) {
    throw Error(ErrorCode::Config, "line " + std::to_string(e.line()), e.message());
  }
  for (const auto& [name, node] : tree) {
    if (name != "experiment" && name != "salience" && name != "endpoint" &&
        name != "mesh" && name != "embed") {
      throw Error(ErrorCode::Config, name, "unknown section");
    }
  }

  ExperimentConfig cfg;
  Section exp(tree, "experiment", base_dir);
  if (auto p = exp.path("manifest")) cfg.manifest_path = *p;
  if (auto p = exp.path("annotations")) cfg.annotations_path = *p;
  if (auto p = exp.path("output_dir")) cfg.output_dir = *p;
  if (auto p = exp.path("transcript_log")) cfg.transcript_log = *p;
  if (auto v = exp.number<std::uint64_t>("seed")) cfg.seed = *v;
  if (auto v = exp.number<std::size_t>("sample_cap")) cfg.sample_cap = *v;
  if (auto v = exp.number<double>("threshold")) cfg.threshold = *v;
  if (auto v = exp.number<int>("histogram_bins")) cfg.histogram_bins = *v;
  if (auto v = exp.number<double>("curve_epsilon")) cfg.curve_epsilon = *v;
  if (auto v = exp.number<std::size_t>("context_limit")) cfg.context_limit = *v;
  if (auto v = exp.number<std::size_t>("image_token_allowance")) {
    cfg.image_token_allowance = *v;
  }
  try {
    if (auto v = exp.get("variants")) cfg.variants = parse_variant_list(*v);
    if (auto v = exp.get("exemplar_classes")) cfg.exemplar_classes = parse_class_list(*v);
  } catch (const Error& e) {
    throw Error(ErrorCode::Config, "experiment", e.what());
  }
  exp.reject_unknown();

  Section sal(tree, "salience", base_dir);
  for (auto kind : {SalienceKind::Human, SalienceKind::LlamaMesh, SalienceKind::GeminiMesh}) {
    if (auto p = sal.path(std::string(to_string(kind)))) cfg.salience_paths[kind] = *p;
  }
  for (const auto& key : sal.keys_with_prefix("selector_")) {
    auto cls = parse_class(key.substr(9));
    if (!cls) throw Error(ErrorCode::Config, sal.field(key), "unknown class");
    cfg.salience_selector[*cls] = *sal.number<std::size_t>(key);
  }
  sal.reject_unknown();

  Section ep(tree, "endpoint", base_dir);
  if (auto v = ep.get("dialect")) {
    auto d = parse_dialect(*v);
    if (!d) throw Error(ErrorCode::Config, "endpoint.dialect", "unknown dialect '" + *v + "'");
    cfg.endpoint.dialect = *d;
  }
  if (auto v = ep.get("base_url")) cfg.endpoint.base_url = *v;
  if (auto v = ep.get("model")) cfg.endpoint.model = *v;
  if (auto v = ep.get("auth_token_env")) cfg.endpoint.auth_token_env = *v;
  if (auto v = ep.number<int>("max_retries")) cfg.endpoint.max_retries = *v;
  if (auto v = ep.number<int>("max_in_flight")) cfg.endpoint.max_in_flight = *v;
  if (auto v = ep.number<long>("min_request_spacing_ms")) {
    cfg.endpoint.min_request_spacing = std::chrono::milliseconds(*v);
  }
  if (auto v = ep.number<long>("timeout_s")) {
    cfg.endpoint.request_timeout = std::chrono::seconds(*v);
  }
  ep.reject_unknown();

  Section mesh(tree, "mesh", base_dir);
  if (auto v = mesh.get("kind")) {
    auto k = parse_salience_kind(*v);
    if (!k) throw Error(ErrorCode::Config, "mesh.kind", "unknown kind '" + *v + "'");
    cfg.mesh_kind = *k;
  }
  if (auto p = mesh.path("output")) cfg.mesh_output = *p;
  if (auto v = mesh.boolean("full_document")) cfg.mesh_full_document = *v;
  if (auto v = mesh.number<int>("max_attempts")) cfg.mesh_max_attempts = *v;
  for (const auto& key : mesh.keys_with_prefix("exemplar_")) {
    auto cls = parse_class(key.substr(9));
    if (!cls) throw Error(ErrorCode::Config, mesh.field(key), "unknown class");
    cfg.mesh_exemplars[*cls] = *mesh.get(key);
  }
  mesh.reject_unknown();

  Section emb(tree, "embed", base_dir);
  if (auto p = emb.path("embeddings")) cfg.embeddings_path = *p;
  if (auto p = emb.path("weights")) cfg.weights_path = *p;
  if (auto v = emb.number<int>("hidden_dim")) cfg.embed_hidden_dim = *v;
  if (auto v = emb.number<int>("output_dim")) cfg.embed_output_dim = *v;
  emb.reject_unknown();

  cfg.validate();
  return cfg;
}

ExperimentConfig load_config(const std::filesystem::path& path) {
  return parse_config(text::read_file(path), path.parent_path());
}

}  // namespace irispad
