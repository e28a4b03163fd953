#include "irispad/fixtures.hpp"

#include <algorithm>
#include <cmath>
#include <random>

#include "irispad/error.hpp"
#include "irispad/reference.hpp"
#include "irispad/rng.hpp"
#include "irispad/text_util.hpp"

namespace irispad::fixtures {

namespace {

struct ClassPhrases {
  std::string_view human;
  std::string_view feature;
};

constexpr std::array<ClassPhrases, kClassCount> kPhrases = {{
    {"um it looks normal, the texture is natural and the pupil is round",
     "fine radial crypts and furrows with a crisp, round pupil boundary"},
    {"this looks like a glass eye, too smooth and kind of painted",
     "a smooth, painted iris surface with no depth and a rigid pupil edge"},
    {"I see print dots and also a lens pattern on top of the iris",
     "halftone dot patterns combined with a regular lens texture printed on paper"},
    {"there is clouding and the pupil is irregular so something is wrong",
     "corneal clouding, an irregular pupil and tissue changes typical of eye disease"},
    {"the eye looks dead, retracted eyelids and a wrinkled cornea",
     "a wrinkled, dehydrated cornea with metal retractors and no specular sparkle"},
    {"you can see the paper texture and the reflection is flat",
     "visible paper grain, flat reflections and a cut-out pupil hole"},
    {"it looks generated, the texture repeats and the eyelashes blend",
     "repetitive synthetic texture with blurred eyelashes and implausible symmetry"},
    {"the iris has a dotted ring from a contact lens",
     "a printed dotted ring of a cosmetic contact lens overlaying the natural iris"},
}};

std::string repeat_sentence(std::string_view base, int times) {
  std::string out;
  for (int i = 0; i < times; ++i) {
    if (!out.empty()) out += ' ';
    out += base;
  }
  return out;
}

constexpr std::array<double, 20> kAttackSide = {
    1.0, 1.0, 0.97, 1.0, 0.99, 1.0, 0.97, 1.0, 1.0, 0.95,
    1.0, 0.98, 1.0, 0.97, 1.0, 1.0, 0.99, 0.8, 0.7, 0.6};
constexpr std::array<double, 20> kBonaFideSide = {
    0.0, 0.0, 0.02, 0.0, 0.01, 0.0, 0.03, 0.0, 0.0, 0.04,
    0.0, 0.02, 0.0, 0.01, 0.0, 0.0, 0.03, 0.2, 0.3, 0.4};

std::string reply_text(double confidence, std::size_t style) {
  const auto value = text::format_double(confidence);
  switch (style % 3) {
    case 0: return value;
    case 1:
      return "Confidence: " + value + "\nClassification: " +
             (confidence >= 0.5 ? "attack" : "normal") +
             "\nExplanation: judged from texture and reflections.";
    default: return "Score: " + value;
  }
}

}  // namespace

Manifest write_synthetic_dataset(const std::filesystem::path& dir,
                                 std::span<const std::size_t> counts) {
  if (counts.size() != kClassCount) {
    throw Error(ErrorCode::InvalidArgument, "counts", "need 8 class counts");
  }
  std::filesystem::create_directories(dir / "images");
  std::string manifest = "sample_id,class,image_path,source\n";
  for (auto c : kAllClasses) {
    for (std::size_t i = 0; i < counts[class_index(c)]; ++i) {
      char index[24];
      std::snprintf(index, sizeof(index), "%03zu", i);
      const std::string id = std::string(to_string(c)) + "_" + index;
      const auto rel = std::filesystem::path("images") / (id + ".png");
      // PNG signature followed by the id: enough bytes to exercise encoding
      text::write_file(dir / rel, std::string("\x89PNG\r\n\x1a\n", 8) + id);
      manifest += id + "," + std::string(to_string(c)) + "," + rel.string() +
                  ",synthetic-fixture\n";
    }
  }
  text::write_file(dir / "manifest.csv", manifest);
  return load_manifest(dir / "manifest.csv");
}

SalienceLibrary synthetic_salience() {
  SalienceLibrary library;
  for (auto c : kAllClasses) {
    const auto& p = kPhrases[class_index(c)];
    const std::string name(to_string(c));
    library[SalienceKind::Human].entries[c].push_back(
        {"h-" + name, std::string(p.human)});
    const std::string llama = "The image shows " + std::string(p.feature) + ".";
    library[SalienceKind::LlamaMesh].entries[c].push_back({"l-" + name, llama});
    const std::string gemini =
        "Comprehensive view: the image shows " + std::string(p.feature) + ". " +
        repeat_sentence("Examiners concur and the lighting, reflections and "
                        "texture are consistent with this reading.", 2);
    library[SalienceKind::GeminiMesh].entries[c].push_back({"g-" + name, gemini});
  }
  return library;
}

void write_synthetic_salience(const std::filesystem::path& dir) {
  for (const auto& [kind, corpus] : synthetic_salience()) {
    text::write_file(dir / ("salience_" + std::string(to_string(kind)) + ".txt"),
                     format_salience_corpus(corpus));
  }
}

Fraction fraction_for_rate(double rate, std::size_t max_total) {
  for (std::size_t t = max_total; t >= 1; --t) {
    const auto e = static_cast<std::size_t>(std::llround(rate * static_cast<double>(t)));
    if (e <= t && std::abs(static_cast<double>(e) / static_cast<double>(t) - rate) <
                      0.0005 + 1e-12) {
      return {e, t};
    }
  }
  throw Error(ErrorCode::InvalidArgument, text::format_double(rate),
              "no fraction with denominator <= " + std::to_string(max_total));
}

void script_variant(MockScript& script, const Manifest& manifest,
                    const Variant& variant, std::span<const Fraction> targets,
                    const ScriptOptions& options) {
  if (targets.size() != kClassCount) {
    throw Error(ErrorCode::InvalidArgument, "targets", "need 8 fractions");
  }
  const auto label = variant.label();
  std::mt19937_64 rng(derive_seed(options.seed, label));
  std::size_t answered = 0;
  for (auto c : kAllClasses) {
    std::vector<const SampleRecord*> pool;
    for (const auto& s : manifest.samples) {
      if (s.cls == c) pool.push_back(&s);
    }
    std::sort(pool.begin(), pool.end(), [](auto* a, auto* b) {
      return a->sample_id < b->sample_id;
    });
    const auto target = targets[class_index(c)];
    if (target.total > pool.size() || target.errors > target.total) {
      throw Error(ErrorCode::InvalidArgument, std::string(to_string(c)),
                  "target exceeds available samples");
    }
    for (std::size_t i = pool.size(); i > 1; --i) {
      std::swap(pool[i - 1], pool[uniform_below(rng, i)]);
    }
    for (std::size_t i = 0; i < pool.size(); ++i) {
      const auto key = label + "/" + pool[i]->sample_id;
      if (i >= target.total) {
        MockAction never;
        never.text = "Unable to assess this image.";
        script.add(key, std::nullopt, never);
        continue;
      }
      const bool wrong = i < target.errors;
      const bool says_attack = is_bona_fide(c) ? wrong : !wrong;
      const auto slot = answered % 20;
      const double confidence = says_attack ? kAttackSide[slot] : kBonaFideSide[slot];
      int attempt = 1;
      if (uniform_unit(rng) < options.noise_share) {
        script.add_text(key, attempt++, "I am not able to give a number for this one.");
      }
      script.add_text(key, attempt, reply_text(confidence, answered));
      ++answered;
    }
  }
}

std::array<Fraction, kClassCount> published_targets(std::string_view model,
                                                    const Variant& variant) {
  const auto label = variant.label();
  for (const auto& row : reference::kPublishedRows) {
    if (row.model != model || row.variant != label) continue;
    std::array<Fraction, kClassCount> out{};
    for (std::size_t i = 0; i < kClassCount; ++i) {
      out[i] = fraction_for_rate(row.rates[i], reference::kTestSetCounts[i]);
    }
    return out;
  }
  throw Error(ErrorCode::InvalidArgument, std::string(model) + "/" + label,
              "no published row");
}

MockExperiment write_mock_experiment(const std::filesystem::path& dir,
                                     std::string_view model,
                                     std::string_view base_url,
                                     std::uint64_t seed) {
  MockExperiment out;
  out.manifest = write_synthetic_dataset(dir / "dataset", reference::kTestSetCounts);
  write_synthetic_salience(dir);
  ScriptOptions options;
  options.seed = seed;
  for (const auto& variant : enumerate_variants()) {
    const auto targets = published_targets(model, variant);
    script_variant(out.script, out.manifest, variant, targets, options);
  }
  out.script_path = dir / "mock_script.txt";
  text::write_file(out.script_path, out.script.format());

  out.config_path = dir / "config.ini";
  std::string ini =
      "[experiment]\n"
      "manifest = dataset/manifest.csv\n"
      "output_dir = out\n"
      "seed = " + std::to_string(seed) + "\n"
      "sample_cap = 30\n"
      "variants = all\n"
      "\n[salience]\n"
      "human = salience_human.txt\n"
      "llama_mesh = salience_llama_mesh.txt\n"
      "gemini_mesh = salience_gemini_mesh.txt\n"
      "\n[endpoint]\n"
      "dialect = chat_completions\n"
      "base_url = " + std::string(base_url) + "\n"
      "model = mock-" + std::string(model) + "\n"
      "max_in_flight = 4\n";
  text::write_file(out.config_path, ini);
  return out;
}

std::vector<EmbeddingRecord> mixed_signal_embeddings(std::size_t per_class,
                                                     std::size_t image_dim,
                                                     std::size_t text_dim,
                                                     std::uint64_t seed) {
  std::mt19937_64 rng(derive_seed(seed, "embeddings"));
  std::normal_distribution<double> gauss(0.0, 1.0);
  auto centroid = [&](std::size_t dim, double scale) {
    std::vector<double> v(dim);
    for (auto& x : v) x = gauss(rng) * scale;
    return v;
  };
  std::vector<std::vector<double>> image_means;
  std::vector<std::vector<double>> text_means;
  for (std::size_t c = 0; c < kClassCount; ++c) {
    image_means.push_back(centroid(image_dim, 0.15));
    text_means.push_back(centroid(text_dim, 1.0));
  }
  std::vector<EmbeddingRecord> out;
  for (auto c : kAllClasses) {
    const auto k = class_index(c);
    for (std::size_t i = 0; i < per_class; ++i) {
      EmbeddingRecord r;
      char index[24];
      std::snprintf(index, sizeof(index), "%03zu", i);
      r.sample_id = std::string(to_string(c)) + "_" + index;
      r.cls = c;
      r.image_vec.resize(image_dim);
      r.text_vec.resize(text_dim);
      for (std::size_t d = 0; d < image_dim; ++d) {
        r.image_vec[d] = image_means[k][d] + gauss(rng);
      }
      for (std::size_t d = 0; d < text_dim; ++d) {
        r.text_vec[d] = text_means[k][d] + 0.3 * gauss(rng);
      }
      out.push_back(std::move(r));
    }
  }
  return out;
}

}  // namespace irispad::fixtures
