#include "hdcdist/hrr.hpp"

#include <bit>
#include <cmath>
#include <complex>
#include <fstream>
#include <iterator>

#include "hdcdist/errors.hpp"
#include "hdcdist/spectral.hpp"

namespace hdcdist {
namespace {

constexpr double kSingularSpectrum = 1e-12;
constexpr double kKeyCosineLimit = 0.2;
constexpr std::size_t kKeyCheckMinDim = 512;

// Spectrum of inverse(key, mode) without the round trip through the time domain.
spectral::Spectrum inverse_spectrum(const Hypervector& key, InverseMode mode) {
  auto spectrum = spectral::forward(key.values());
  for (auto& bin : spectrum) {
    if (mode == InverseMode::kInvolution) {
      bin = std::conj(bin);
    } else {
      if (std::abs(bin) <= kSingularSpectrum) {
        throw SingularKeyError("decompress: key has a (near-)zero spectral component");
      }
      bin = 1.0 / bin;
    }
  }
  return spectrum;
}

void require_shape(const ClassifierMatrix& w, const KeySet& keys) {
  if (static_cast<std::size_t>(w.num_classes()) != keys.num_classes() ||
      static_cast<std::size_t>(w.dim()) != keys.dim()) {
    throw DimensionError("classifier is " + std::to_string(w.num_classes()) + "x" +
                         std::to_string(w.dim()) + ", keys are " +
                         std::to_string(keys.num_classes()) + "x" + std::to_string(keys.dim()));
  }
}

template <typename T>
void put_le(std::vector<std::uint8_t>& out, T value) {
  using U = std::make_unsigned_t<T>;
  auto bits = static_cast<U>(value);
  for (std::size_t i = 0; i < sizeof(T); ++i) {
    out.push_back(static_cast<std::uint8_t>(bits & 0xFFu));
    bits = static_cast<U>(bits >> 8);
  }
}

template <typename T>
T get_le(std::span<const std::uint8_t> bytes, std::size_t& offset) {
  if (offset + sizeof(T) > bytes.size()) throw ParseError("HRRC: truncated buffer");
  std::make_unsigned_t<T> bits = 0;
  for (std::size_t i = 0; i < sizeof(T); ++i) {
    bits |= static_cast<std::make_unsigned_t<T>>(bytes[offset + i]) << (8 * i);
  }
  offset += sizeof(T);
  return static_cast<T>(bits);
}

}  // namespace

KeySet make_keyset(std::uint64_t agent_id, std::vector<Hypervector> keys, InverseMode mode) {
  if (keys.empty()) throw InvalidParameter("keyset: at least one key required");
  for (const auto& k : keys) {
    if (k.dim() != keys.front().dim()) throw DimensionError("keyset: keys differ in length");
  }
  return KeySet(agent_id, std::move(keys), mode);
}

KeySet generate_keys(std::uint64_t agent_id, std::size_t num_classes, std::size_t dim,
                     InverseMode mode) {
  if (num_classes < 1 || dim < 1) {
    throw InvalidParameter("generate_keys: class count and dimension must be >= 1");
  }
  const SeedSpec agent_seed = SeedSpec(kKeySeedNamespace).child("agent", agent_id);
  std::vector<Hypervector> keys;
  keys.reserve(num_classes);
  for (std::size_t i = 0; i < num_classes; ++i) {
    keys.push_back(random_gaussian_key(dim, agent_seed.child("key", i)));
  }
  KeySet out(agent_id, std::move(keys), mode);
  if (dim >= kKeyCheckMinDim) {
    for (std::size_t a = 0; a < num_classes; ++a) {
      for (std::size_t b = a + 1; b < num_classes; ++b) {
        const double c = cosine(out.keys_[a], out.keys_[b]);
        if (std::abs(c) >= kKeyCosineLimit) {
          out.warnings_.push_back("keys " + std::to_string(a) + " and " + std::to_string(b) +
                                  " have |cosine| " + std::to_string(std::abs(c)));
        }
      }
    }
  }
  return out;
}

CompressedClassifier compress(const ClassifierMatrix& w, const KeySet& keys) {
  require_shape(w, keys);
  const std::size_t d = keys.dim();
  spectral::Spectrum acc(d, {0.0, 0.0});
  std::vector<double> row(d);
  for (std::size_t i = 0; i < keys.num_classes(); ++i) {
    for (std::size_t j = 0; j < d; ++j) row[j] = w.weights(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j));
    const auto key_f = spectral::forward(keys.key(i).values());
    const auto row_f = spectral::forward(row);
    for (std::size_t f = 0; f < d; ++f) acc[f] += key_f[f] * row_f[f];
  }
  CompressedClassifier out;
  out.w = spectral::inverse_real(acc);
  out.agent_id = keys.agent_id();
  out.num_classes = static_cast<std::uint32_t>(keys.num_classes());
  out.mode = keys.mode();
  return out;
}

ClassifierMatrix decompress(const CompressedClassifier& c, const KeySet& keys, ClassifierKind kind) {
  if (c.num_classes != keys.num_classes() || c.dim() != keys.dim()) {
    throw DimensionError("decompress: payload shape does not match regenerated keys");
  }
  const std::size_t d = c.dim();
  const auto w_f = spectral::forward(c.w);
  ClassifierMatrix out;
  out.kind = kind;
  out.weights.resize(static_cast<Eigen::Index>(keys.num_classes()), static_cast<Eigen::Index>(d));
  for (std::size_t i = 0; i < keys.num_classes(); ++i) {
    const auto row = spectral::inverse_real(spectral::multiply(w_f, inverse_spectrum(keys.key(i), keys.mode())));
    for (std::size_t j = 0; j < d; ++j) out.weights(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = row[j];
  }
  return out;
}

std::vector<double> compression_fidelity(const ClassifierMatrix& w, const KeySet& keys) {
  const auto restored = decompress(compress(w, keys), keys, w.kind);
  std::vector<double> out(static_cast<std::size_t>(w.num_classes()), 0.0);
  for (Eigen::Index i = 0; i < w.weights.rows(); ++i) {
    const Eigen::VectorXd original = w.weights.row(i);
    const Eigen::VectorXd recovered = restored.weights.row(i);
    if (original.norm() == 0.0 || recovered.norm() == 0.0) continue;
    out[static_cast<std::size_t>(i)] =
        cosine(std::span<const double>(original.data(), static_cast<std::size_t>(original.size())),
               std::span<const double>(recovered.data(), static_cast<std::size_t>(recovered.size())));
  }
  return out;
}

std::vector<std::uint8_t> serialize(const CompressedClassifier& c) {
  std::vector<std::uint8_t> out;
  out.reserve(kHrrcHeaderBytes + 8 * c.w.size());
  for (char ch : {'H', 'R', 'R', 'C'}) out.push_back(static_cast<std::uint8_t>(ch));
  put_le<std::uint16_t>(out, kHrrcVersion);
  put_le<std::uint64_t>(out, c.agent_id);
  put_le<std::uint32_t>(out, c.num_classes);
  put_le<std::uint32_t>(out, static_cast<std::uint32_t>(c.w.size()));
  put_le<std::uint8_t>(out, static_cast<std::uint8_t>(c.mode));
  for (double v : c.w) put_le<std::uint64_t>(out, std::bit_cast<std::uint64_t>(v));
  return out;
}

CompressedClassifier deserialize(std::span<const std::uint8_t> bytes) {
  if (bytes.size() < kHrrcHeaderBytes) throw ParseError("HRRC: buffer shorter than header");
  if (bytes[0] != 'H' || bytes[1] != 'R' || bytes[2] != 'R' || bytes[3] != 'C') {
    throw ParseError("HRRC: bad magic");
  }
  std::size_t offset = 4;
  const auto version = get_le<std::uint16_t>(bytes, offset);
  if (version != kHrrcVersion) throw ParseError("HRRC: unsupported version " + std::to_string(version));
  CompressedClassifier c;
  c.agent_id = get_le<std::uint64_t>(bytes, offset);
  c.num_classes = get_le<std::uint32_t>(bytes, offset);
  const auto dim = get_le<std::uint32_t>(bytes, offset);
  const auto mode = get_le<std::uint8_t>(bytes, offset);
  if (mode > static_cast<std::uint8_t>(InverseMode::kInvolution)) {
    throw ParseError("HRRC: unknown inverse mode " + std::to_string(mode));
  }
  c.mode = static_cast<InverseMode>(mode);
  if (bytes.size() != kHrrcHeaderBytes + 8ULL * dim) {
    throw ParseError("HRRC: payload length does not match D=" + std::to_string(dim));
  }
  c.w.resize(dim);
  for (auto& v : c.w) v = std::bit_cast<double>(get_le<std::uint64_t>(bytes, offset));
  return c;
}

void write_hrrc(const std::string& path, const CompressedClassifier& c) {
  const auto bytes = serialize(c);
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot open '" + path + "' for writing");
  out.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
  if (!out) throw IoError("write failed for '" + path + "'");
}

CompressedClassifier read_hrrc(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw NotFoundError("cannot open '" + path + "'");
  std::vector<std::uint8_t> bytes((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  return deserialize(bytes);
}

}  // namespace hdcdist
