#pragma once

#include <filesystem>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <unordered_map>
#include <vector>

#include "cascade_gnn/data_model.hpp"

namespace cascade_gnn {

enum class EmbeddingMode { load_file, seeded_random_unit };

/// Token -> 200-d vector table. Documents are embedded as the mean of their known tokens.
class WordVectors {
 public:
  /// Plain-text "token v1 ... v200" per line. Throws IoError on unreadable or malformed files.
  static WordVectors load(const std::filesystem::path& path);
  /// Every token maps to a seeded pseudo-random unit vector.
  static WordVectors seeded(std::uint64_t seed);

  /// nullopt for unknown tokens (load_file mode only).
  std::optional<Embedding> lookup(const std::string& token) const;
  /// Mean of known token vectors; zero vector when none are known.
  Embedding average(std::span<const std::string> tokens) const;
  Embedding embed_text(const std::string& whitespace_separated) const;

  EmbeddingMode mode() const { return mode_; }
  std::size_t vocabulary_size() const { return table_.size(); }

 private:
  EmbeddingMode mode_ = EmbeddingMode::seeded_random_unit;
  std::uint64_t seed_ = 0;
  std::unordered_map<std::string, Embedding> table_;
};

Embedding seeded_unit_vector(const std::string& token, std::uint64_t seed);

std::string join_tokens(std::span<const std::string> tokens);

/// Memoising document embedder; documents repeat heavily across tweets.
class TextEmbedder {
 public:
  explicit TextEmbedder(const WordVectors& vectors);
  const Embedding& operator()(const std::string& text);

 private:
  const WordVectors& vectors_;
  std::unordered_map<std::string, Embedding> cache_;
};

/// Everything read from (or written to) a dataset directory.
struct Dataset {
  SocialGraph social;
  std::vector<UrlStory> stories;
  std::vector<CascadeRecord> cascades;
  /// Free-form metadata (meta.json): embedding mode/seed and the generator config.
  std::string meta_json = "{}";

  /// Throws InvalidInput for unknown ids.
  const CascadeRecord& cascade(const std::string& cascade_id) const;
  /// Cascades of a story, in the story's listed order.
  std::vector<CascadeRecord> cascades_of(const UrlStory& story) const;
  void reindex();

 private:
  std::unordered_map<std::string, std::size_t> cascade_index_;
};

/// Fills description/text/hashtag embeddings from the raw tokens.
void embed_dataset(Dataset& ds, const WordVectors& vectors);

/// Reads users.jsonl, follows.csv, cascades.jsonl, urls.jsonl (and meta.json if present).
/// Embeddings come from `vectors` if given, else from the mode recorded in meta.json.
/// Throws IoError for missing/unreadable files, InvalidInput for inconsistent content.
Dataset load_dataset(const std::filesystem::path& dir, const WordVectors* vectors = nullptr);
/// Writes the four dataset files plus meta.json. Throws IoError on write failure.
void save_dataset(const Dataset& ds, const std::filesystem::path& dir);

/// Per-user credibility over distinct labeled stories the user (re)tweeted.
std::map<std::string, double> compute_credibility(const Dataset& ds);

}  // namespace cascade_gnn
