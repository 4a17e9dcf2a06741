#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "camreloc/features.hpp"

namespace camreloc {

/// k-means visual vocabulary in descriptor space.
struct Vocabulary {
  int dim = 0;
  std::vector<std::vector<float>> centers;

  int size() const { return static_cast<int>(centers.size()); }
};

/// L2-normalized sparse TF-IDF vector; indices are vocabulary words.
struct BowVector {
  std::vector<std::pair<int, double>> entries;  // sorted by word index

  bool empty() const { return entries.empty(); }
  double dot(const BowVector& other) const;
};

struct InvertedIndex {
  Vocabulary vocabulary;
  std::vector<double> idf;                 // per word, ln(N/df)
  std::vector<std::int64_t> document_frequency;
  std::vector<int> image_ids;              // external ids per document slot
  std::vector<BowVector> documents;        // parallel to image_ids
  struct Posting {
    std::int32_t doc = 0;
    double weight = 0.0;
  };
  std::vector<std::vector<Posting>> postings;  // per word

  std::size_t size() const { return image_ids.size(); }
};

struct RetrievalHit {
  int image_id = -1;
  double score = 0.0;
};

/// Seeded k-means (k-means++ init, Lloyd iterations). Deterministic under a
/// fixed seed. Throws TooFewSamples when the sample is smaller than V.
Vocabulary build_vocabulary(const std::vector<Descriptor>& sample, int vocabulary_size,
                            std::uint64_t seed, int max_iterations = 25);

/// Nearest center, ties to the lowest index.
int quantize(const Vocabulary& vocab, const Descriptor& descriptor);

BowVector bow_from_descriptors(const Vocabulary& vocab, const std::vector<Descriptor>& descs,
                               const std::vector<double>& idf);

/// Build the TF-IDF index over reference images (id, descriptors).
InvertedIndex index_references(const std::vector<std::pair<int, std::vector<Descriptor>>>& refs,
                               const Vocabulary& vocabulary);

/// Cosine-ranked top-k image ids for a query descriptor set; ties by id.
/// k larger than the index returns everything. Throws EmptyIndex.
std::vector<RetrievalHit> query_top_k(const InvertedIndex& index,
                                      const std::vector<Descriptor>& query_descriptors, int k);

/// Versioned little-endian binary persistence.
void save_index(const InvertedIndex& index, const std::string& path);
InvertedIndex load_index(const std::string& path);

}  // namespace camreloc
