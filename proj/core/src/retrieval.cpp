#include "camreloc/retrieval.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <limits>
#include <map>

#include "camreloc/rng.hpp"

namespace camreloc {

double BowVector::dot(const BowVector& other) const {
  double acc = 0.0;
  std::size_t i = 0, j = 0;
  while (i < entries.size() && j < other.entries.size()) {
    if (entries[i].first < other.entries[j].first) {
      ++i;
    } else if (entries[i].first > other.entries[j].first) {
      ++j;
    } else {
      acc += entries[i].second * other.entries[j].second;
      ++i;
      ++j;
    }
  }
  return acc;
}

namespace {

double distance2(const std::vector<float>& a, const Descriptor& b) {
  double acc = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    const double d = static_cast<double>(a[i]) - b[i];
    acc += d * d;
  }
  return acc;
}

}  // namespace

Vocabulary build_vocabulary(const std::vector<Descriptor>& sample, int vocabulary_size,
                            std::uint64_t seed, int max_iterations) {
  if (vocabulary_size < 2) {
    throw Error(ErrorCode::InvalidArgument, "vocabulary size must be >= 2");
  }
  if (sample.size() < static_cast<std::size_t>(vocabulary_size)) {
    throw Error(ErrorCode::TooFewSamples, "need at least V descriptor samples");
  }
  const int dim = static_cast<int>(sample.front().size());
  const std::size_t n = sample.size();
  Rng rng(seed);

  // k-means++ seeding.
  std::vector<std::vector<float>> centers;
  centers.reserve(vocabulary_size);
  centers.push_back(sample[rng.uniform_index(n)]);
  std::vector<double> d2(n);
  while (static_cast<int>(centers.size()) < vocabulary_size) {
    double total = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      double best = std::numeric_limits<double>::infinity();
      for (const auto& c : centers) best = std::min(best, distance2(c, sample[i]));
      d2[i] = best;
      total += best;
    }
    std::size_t pick = 0;
    if (total > 0.0) {
      const double target = rng.uniform01() * total;
      double run = 0.0;
      pick = n - 1;
      for (std::size_t i = 0; i < n; ++i) {
        run += d2[i];
        if (run >= target && d2[i] > 0.0) {
          pick = i;
          break;
        }
      }
    } else {
      pick = rng.uniform_index(n);  // all duplicates; any sample works
    }
    centers.push_back(sample[pick]);
  }

  // Lloyd iterations.
  std::vector<int> assignment(n, -1);
  for (int it = 0; it < max_iterations; ++it) {
    bool changed = false;
    for (std::size_t i = 0; i < n; ++i) {
      double best = std::numeric_limits<double>::infinity();
      int best_c = 0;
      for (int c = 0; c < vocabulary_size; ++c) {
        const double d = distance2(centers[c], sample[i]);
        if (d < best) {
          best = d;
          best_c = c;
        }
      }
      if (assignment[i] != best_c) {
        assignment[i] = best_c;
        changed = true;
      }
    }
    if (!changed) break;
    std::vector<std::vector<double>> acc(vocabulary_size, std::vector<double>(dim, 0.0));
    std::vector<std::int64_t> counts(vocabulary_size, 0);
    for (std::size_t i = 0; i < n; ++i) {
      ++counts[assignment[i]];
      for (int d = 0; d < dim; ++d) acc[assignment[i]][d] += sample[i][d];
    }
    for (int c = 0; c < vocabulary_size; ++c) {
      if (counts[c] == 0) continue;  // empty cluster keeps its previous center
      for (int d = 0; d < dim; ++d) {
        centers[c][d] = static_cast<float>(acc[c][d] / counts[c]);
      }
    }
  }

  Vocabulary vocab;
  vocab.dim = dim;
  vocab.centers = std::move(centers);
  return vocab;
}

int quantize(const Vocabulary& vocab, const Descriptor& descriptor) {
  double best = std::numeric_limits<double>::infinity();
  int best_c = 0;
  for (int c = 0; c < vocab.size(); ++c) {
    const double d = distance2(vocab.centers[c], descriptor);
    if (d < best) {
      best = d;
      best_c = c;
    }
  }
  return best_c;
}

BowVector bow_from_descriptors(const Vocabulary& vocab, const std::vector<Descriptor>& descs,
                               const std::vector<double>& idf) {
  std::map<int, std::int64_t> counts;
  for (const auto& d : descs) ++counts[quantize(vocab, d)];
  BowVector bow;
  if (counts.empty()) return bow;
  const double inv_len = 1.0 / static_cast<double>(descs.size());
  double norm2 = 0.0;
  for (const auto& [word, count] : counts) {
    const double w = static_cast<double>(count) * inv_len * idf[word];
    if (w <= 0.0) continue;
    bow.entries.emplace_back(word, w);
    norm2 += w * w;
  }
  if (norm2 > 0.0) {
    const double inv = 1.0 / std::sqrt(norm2);
    for (auto& [word, w] : bow.entries) w *= inv;
  } else {
    bow.entries.clear();  // every word had zero idf; nothing discriminative
  }
  return bow;
}

InvertedIndex index_references(const std::vector<std::pair<int, std::vector<Descriptor>>>& refs,
                               const Vocabulary& vocabulary) {
  InvertedIndex index;
  index.vocabulary = vocabulary;
  const int v = vocabulary.size();
  index.document_frequency.assign(v, 0);
  index.idf.assign(v, 0.0);
  index.postings.resize(v);

  // First pass: quantize and collect document frequencies.
  std::vector<std::map<int, std::int64_t>> word_counts;
  word_counts.reserve(refs.size());
  for (const auto& [id, descs] : refs) {
    std::map<int, std::int64_t> counts;
    for (const auto& d : descs) ++counts[quantize(vocabulary, d)];
    for (const auto& [word, count] : counts) {
      (void)count;
      ++index.document_frequency[word];
    }
    word_counts.push_back(std::move(counts));
    index.image_ids.push_back(id);
  }
  const double n_docs = static_cast<double>(refs.size());
  for (int w = 0; w < v; ++w) {
    if (index.document_frequency[w] > 0) {
      index.idf[w] = std::log(n_docs / static_cast<double>(index.document_frequency[w]));
    }
  }

  // Second pass: TF-IDF vectors and postings.
  for (std::size_t doc = 0; doc < refs.size(); ++doc) {
    const double len = static_cast<double>(refs[doc].second.size());
    BowVector bow;
    double norm2 = 0.0;
    for (const auto& [word, count] : word_counts[doc]) {
      const double w = len > 0.0 ? (count / len) * index.idf[word] : 0.0;
      if (w <= 0.0) continue;
      bow.entries.emplace_back(word, w);
      norm2 += w * w;
    }
    if (norm2 > 0.0) {
      const double inv = 1.0 / std::sqrt(norm2);
      for (auto& [word, w] : bow.entries) w *= inv;
    } else {
      bow.entries.clear();
    }
    for (const auto& [word, w] : bow.entries) {
      index.postings[word].push_back({static_cast<std::int32_t>(doc), w});
    }
    index.documents.push_back(std::move(bow));
  }
  return index;
}

std::vector<RetrievalHit> query_top_k(const InvertedIndex& index,
                                      const std::vector<Descriptor>& query_descriptors, int k) {
  if (index.size() == 0) {
    throw Error(ErrorCode::EmptyIndex, "no indexed reference images");
  }
  const BowVector q = bow_from_descriptors(index.vocabulary, query_descriptors, index.idf);
  std::vector<double> scores(index.size(), 0.0);
  for (const auto& [word, weight] : q.entries) {
    for (const auto& posting : index.postings[word]) {
      scores[posting.doc] += weight * posting.weight;
    }
  }
  std::vector<std::size_t> order(index.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    if (scores[a] != scores[b]) return scores[a] > scores[b];
    return index.image_ids[a] < index.image_ids[b];
  });
  const std::size_t take = std::min<std::size_t>(k, order.size());
  std::vector<RetrievalHit> hits;
  hits.reserve(take);
  for (std::size_t i = 0; i < take; ++i) {
    hits.push_back(RetrievalHit{index.image_ids[order[i]], scores[order[i]]});
  }
  return hits;
}

namespace {

constexpr char kMagic[8] = {'C', 'R', 'B', 'O', 'W', 'I', 'D', 'X'};
constexpr std::uint32_t kVersion = 1;

template <typename T>
void write_pod(std::ofstream& out, const T& v) {
  out.write(reinterpret_cast<const char*>(&v), sizeof(T));
}

template <typename T>
T read_pod(std::ifstream& in) {
  T v{};
  in.read(reinterpret_cast<char*>(&v), sizeof(T));
  return v;
}

}  // namespace

void save_index(const InvertedIndex& index, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) {
    throw Error(ErrorCode::MissingFile, "cannot open index file for writing: " + path);
  }
  out.write(kMagic, sizeof(kMagic));
  write_pod(out, kVersion);
  write_pod(out, static_cast<std::uint32_t>(index.vocabulary.size()));
  write_pod(out, static_cast<std::uint32_t>(index.vocabulary.dim));
  write_pod(out, static_cast<std::uint32_t>(index.size()));
  for (const auto& c : index.vocabulary.centers) {
    out.write(reinterpret_cast<const char*>(c.data()),
              static_cast<std::streamsize>(c.size() * sizeof(float)));
  }
  for (const auto df : index.document_frequency) write_pod(out, df);
  for (const auto idf : index.idf) write_pod(out, idf);
  for (std::size_t doc = 0; doc < index.size(); ++doc) {
    write_pod(out, static_cast<std::int32_t>(index.image_ids[doc]));
    write_pod(out, static_cast<std::uint32_t>(index.documents[doc].entries.size()));
    for (const auto& [word, weight] : index.documents[doc].entries) {
      write_pod(out, static_cast<std::uint32_t>(word));
      write_pod(out, weight);
    }
  }
  if (!out) {
    throw Error(ErrorCode::MissingFile, "failed writing index file: " + path);
  }
}

InvertedIndex load_index(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    throw Error(ErrorCode::MissingFile, "cannot open index file: " + path);
  }
  char magic[8];
  in.read(magic, sizeof(magic));
  if (!in || std::memcmp(magic, kMagic, sizeof(kMagic)) != 0) {
    throw Error(ErrorCode::InvalidArgument, "not a camreloc index file: " + path);
  }
  const auto version = read_pod<std::uint32_t>(in);
  if (version != kVersion) {
    throw Error(ErrorCode::InvalidArgument, "unsupported index version");
  }
  const auto v = read_pod<std::uint32_t>(in);
  const auto dim = read_pod<std::uint32_t>(in);
  const auto n_docs = read_pod<std::uint32_t>(in);

  InvertedIndex index;
  index.vocabulary.dim = static_cast<int>(dim);
  index.vocabulary.centers.assign(v, std::vector<float>(dim));
  for (auto& c : index.vocabulary.centers) {
    in.read(reinterpret_cast<char*>(c.data()),
            static_cast<std::streamsize>(c.size() * sizeof(float)));
  }
  index.document_frequency.resize(v);
  for (auto& df : index.document_frequency) df = read_pod<std::int64_t>(in);
  index.idf.resize(v);
  for (auto& idf : index.idf) idf = read_pod<double>(in);
  index.postings.resize(v);
  for (std::uint32_t doc = 0; doc < n_docs; ++doc) {
    const auto id = read_pod<std::int32_t>(in);
    const auto n_entries = read_pod<std::uint32_t>(in);
    BowVector bow;
    bow.entries.reserve(n_entries);
    for (std::uint32_t e = 0; e < n_entries; ++e) {
      const auto word = read_pod<std::uint32_t>(in);
      const auto weight = read_pod<double>(in);
      bow.entries.emplace_back(static_cast<int>(word), weight);
      index.postings[word].push_back({static_cast<std::int32_t>(doc), weight});
    }
    index.image_ids.push_back(id);
    index.documents.push_back(std::move(bow));
  }
  if (!in) {
    throw Error(ErrorCode::InvalidArgument, "truncated index file: " + path);
  }
  return index;
}

}  // namespace camreloc
