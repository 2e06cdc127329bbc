#include "bart/persistence.hpp"

#include <array>
#include <cstring>
#include <fstream>
#include <nlohmann/json.hpp>

#include "bart/errors.hpp"

namespace bart {

namespace {

using nlohmann::json;

constexpr std::array<char, 8> kMagic = {'B', 'A', 'R', 'T', 'M', 'D', 'L', '\0'};
constexpr std::uint32_t kSectionMetadata = 1;
constexpr std::uint32_t kSectionSamples = 2;
constexpr std::uint32_t kSectionTraces = 3;

std::uint32_t crc32(const std::string& data) {
  static const auto table = [] {
    std::array<std::uint32_t, 256> t{};
    for (std::uint32_t i = 0; i < 256; ++i) {
      std::uint32_t c = i;
      for (int bit = 0; bit < 8; ++bit) {
        c = (c & 1) ? (0xEDB88320u ^ (c >> 1)) : (c >> 1);
      }
      t[i] = c;
    }
    return t;
  }();
  std::uint32_t crc = 0xFFFFFFFFu;
  for (unsigned char byte : data) {
    crc = table[(crc ^ byte) & 0xFFu] ^ (crc >> 8);
  }
  return crc ^ 0xFFFFFFFFu;
}

class Writer {
 public:
  void u8(std::uint8_t v) { buf_.push_back(static_cast<char>(v)); }
  void u32(std::uint32_t v) {
    for (int i = 0; i < 4; ++i) buf_.push_back(static_cast<char>((v >> (8 * i)) & 0xFF));
  }
  void u64(std::uint64_t v) {
    for (int i = 0; i < 8; ++i) buf_.push_back(static_cast<char>((v >> (8 * i)) & 0xFF));
  }
  void i32(std::int32_t v) { u32(static_cast<std::uint32_t>(v)); }
  void i64(std::int64_t v) { u64(static_cast<std::uint64_t>(v)); }
  void f64(double v) {
    std::uint64_t bits;
    std::memcpy(&bits, &v, sizeof(bits));
    u64(bits);
  }
  void doubles(const std::vector<double>& v) {
    u64(v.size());
    for (double x : v) f64(x);
  }
  std::string take() { return std::move(buf_); }

 private:
  std::string buf_;
};

class Reader {
 public:
  explicit Reader(std::string data) : data_(std::move(data)) {}
  std::uint8_t u8() { return static_cast<std::uint8_t>(byte()); }
  std::uint32_t u32() {
    std::uint32_t v = 0;
    for (int i = 0; i < 4; ++i) v |= static_cast<std::uint32_t>(byte()) << (8 * i);
    return v;
  }
  std::uint64_t u64() {
    std::uint64_t v = 0;
    for (int i = 0; i < 8; ++i) v |= static_cast<std::uint64_t>(byte()) << (8 * i);
    return v;
  }
  std::int32_t i32() { return static_cast<std::int32_t>(u32()); }
  std::int64_t i64() { return static_cast<std::int64_t>(u64()); }
  double f64() {
    const std::uint64_t bits = u64();
    double v;
    std::memcpy(&v, &bits, sizeof(v));
    return v;
  }
  std::vector<double> doubles() {
    const std::uint64_t n = u64();
    if (n > remaining() / 8) throw ModelError("archive truncated inside an array");
    std::vector<double> v(n);
    for (auto& x : v) x = f64();
    return v;
  }
  std::size_t remaining() const { return data_.size() - pos_; }
  bool done() const { return pos_ == data_.size(); }

 private:
  unsigned char byte() {
    if (pos_ >= data_.size()) throw ModelError("archive truncated");
    return static_cast<unsigned char>(data_[pos_++]);
  }
  std::string data_;
  std::size_t pos_ = 0;
};

json hyper_to_json(const Hyperparameters& h) {
  return json{{"num_trees", h.num_trees},
              {"alpha", h.alpha},
              {"beta", h.beta},
              {"k", h.k},
              {"nu", h.nu},
              {"q", h.q},
              {"prob_grow", h.proposals.grow},
              {"prob_prune", h.proposals.prune},
              {"prob_change", h.proposals.change},
              {"cov_prior_vec", h.cov_prior_vec},
              {"burn_in", h.burn_in},
              {"post_burn_in", h.post_burn_in},
              {"chains", h.chains},
              {"prob_rule_class", h.prob_rule_class},
              {"memcache", h.memcache},
              {"use_missing_data", h.use_missing_data},
              {"use_missing_dummies", h.use_missing_dummies}};
}

Hyperparameters hyper_from_json(const json& j) {
  Hyperparameters h;
  h.num_trees = j.at("num_trees").get<int>();
  h.alpha = j.at("alpha").get<double>();
  h.beta = j.at("beta").get<double>();
  h.k = j.at("k").get<double>();
  h.nu = j.at("nu").get<double>();
  h.q = j.at("q").get<double>();
  h.proposals.grow = j.at("prob_grow").get<double>();
  h.proposals.prune = j.at("prob_prune").get<double>();
  h.proposals.change = j.at("prob_change").get<double>();
  h.cov_prior_vec = j.at("cov_prior_vec").get<std::vector<double>>();
  h.burn_in = j.at("burn_in").get<long>();
  h.post_burn_in = j.at("post_burn_in").get<long>();
  h.chains = j.at("chains").get<int>();
  h.prob_rule_class = j.at("prob_rule_class").get<double>();
  h.memcache = j.at("memcache").get<bool>();
  h.use_missing_data = j.at("use_missing_data").get<bool>();
  h.use_missing_dummies = j.at("use_missing_dummies").get<bool>();
  return h;
}

json meta_to_json(const PreprocessMeta& m) {
  json sources = json::array();
  for (const auto& s : m.sources) {
    sources.push_back(json{{"name", s.name},
                           {"categorical", s.kind == ColumnKind::Categorical},
                           {"levels", s.levels},
                           {"has_missing_dummy", s.has_missing_dummy}});
  }
  json columns = json::array();
  for (const auto& c : m.columns) {
    columns.push_back(json{{"name", c.name},
                           {"source", c.source},
                           {"is_missing_dummy", c.is_missing_dummy},
                           {"level", c.level}});
  }
  return json{{"sources", sources},
              {"columns", columns},
              {"use_missing_data", m.use_missing_data},
              {"use_missing_dummies", m.use_missing_dummies},
              {"response_name", m.response_name},
              {"classification", m.classification},
              {"positive_level", m.positive_level},
              {"negative_level", m.negative_level}};
}

PreprocessMeta meta_from_json(const json& j) {
  PreprocessMeta m;
  for (const auto& s : j.at("sources")) {
    PreprocessMeta::SourceColumn src;
    src.name = s.at("name").get<std::string>();
    src.kind = s.at("categorical").get<bool>() ? ColumnKind::Categorical
                                               : ColumnKind::Numeric;
    src.levels = s.at("levels").get<std::vector<std::string>>();
    src.has_missing_dummy = s.at("has_missing_dummy").get<bool>();
    m.sources.push_back(std::move(src));
  }
  for (const auto& c : j.at("columns")) {
    ColumnMeta cm;
    cm.name = c.at("name").get<std::string>();
    cm.source = c.at("source").get<std::string>();
    cm.is_missing_dummy = c.at("is_missing_dummy").get<bool>();
    cm.level = c.at("level").get<std::string>();
    m.columns.push_back(std::move(cm));
  }
  m.use_missing_data = j.at("use_missing_data").get<bool>();
  m.use_missing_dummies = j.at("use_missing_dummies").get<bool>();
  m.response_name = j.at("response_name").get<std::string>();
  m.classification = j.at("classification").get<bool>();
  m.positive_level = j.at("positive_level").get<std::string>();
  m.negative_level = j.at("negative_level").get<std::string>();
  return m;
}

std::string encode_metadata(const PosteriorEnsemble& e) {
  // Calibration doubles ride in the binary traces section; everything here
  // only needs to survive a text round trip, which nlohmann guarantees for
  // doubles (shortest round-trip representation).
  json j{{"hyper", hyper_to_json(e.hyper)},
         {"calibrated",
          json{{"mu_mu", e.calibrated.mu_mu},
               {"sigma_mu", e.calibrated.sigma_mu},
               {"lambda", e.calibrated.lambda},
               {"sigsq_hat", e.calibrated.sigsq_hat}}},
         {"meta", meta_to_json(e.meta)},
         {"mu_offset", e.mu_offset},
         {"chains", e.chains},
         {"burn_in", e.burn_in},
         {"kept_per_chain", e.kept_per_chain}};
  return j.dump();
}

void decode_metadata(const std::string& text, PosteriorEnsemble& e) {
  const json j = json::parse(text);
  e.hyper = hyper_from_json(j.at("hyper"));
  e.calibrated.mu_mu = j.at("calibrated").at("mu_mu").get<double>();
  e.calibrated.sigma_mu = j.at("calibrated").at("sigma_mu").get<double>();
  e.calibrated.lambda = j.at("calibrated").at("lambda").get<double>();
  e.calibrated.sigsq_hat = j.at("calibrated").at("sigsq_hat").get<double>();
  e.meta = meta_from_json(j.at("meta"));
  e.mu_offset = j.at("mu_offset").get<double>();
  e.chains = j.at("chains").get<int>();
  e.burn_in = j.at("burn_in").get<long>();
  e.kept_per_chain = j.at("kept_per_chain").get<long>();
  e.build_seconds = 0.0;  // wall-clock time never enters archives
}

std::string encode_samples(const PosteriorEnsemble& e) {
  Writer w;
  w.u64(e.samples.size());
  for (const PosteriorSample& s : e.samples) {
    w.f64(s.sigma_sq);
    w.u32(static_cast<std::uint32_t>(s.trees.size()));
    for (const TreeSnapshot& t : s.trees) {
      w.u32(static_cast<std::uint32_t>(t.nodes.size()));
      for (const SnapshotNode& n : t.nodes) {
        w.i32(n.feature);
        w.f64(n.value);
        w.u8(n.mia);
        w.i32(n.left);
        w.i32(n.right);
        w.f64(n.leaf_value);
      }
    }
  }
  return w.take();
}

void decode_samples(const std::string& payload, PosteriorEnsemble& e) {
  Reader r(payload);
  const std::uint64_t count = r.u64();
  e.samples.resize(count);
  for (auto& s : e.samples) {
    s.sigma_sq = r.f64();
    s.trees.resize(r.u32());
    for (auto& t : s.trees) {
      t.nodes.resize(r.u32());
      for (auto& n : t.nodes) {
        n.feature = r.i32();
        n.value = r.f64();
        n.mia = r.u8();
        n.left = r.i32();
        n.right = r.i32();
        n.leaf_value = r.f64();
      }
    }
  }
  if (!r.done()) throw ModelError("archive has trailing bytes in the samples section");
}

std::string encode_traces(const PosteriorEnsemble& e) {
  Writer w;
  w.u32(static_cast<std::uint32_t>(e.traces.size()));
  for (const ChainTrace& t : e.traces) {
    w.i64(t.burn_in);
    w.i64(t.kept);
    w.doubles(t.sigma_sq);
    w.doubles(t.acceptance);
    w.doubles(t.mean_leaves);
    w.doubles(t.mean_depth);
  }
  return w.take();
}

void decode_traces(const std::string& payload, PosteriorEnsemble& e) {
  Reader r(payload);
  e.traces.resize(r.u32());
  for (auto& t : e.traces) {
    t.burn_in = r.i64();
    t.kept = r.i64();
    t.sigma_sq = r.doubles();
    t.acceptance = r.doubles();
    t.mean_leaves = r.doubles();
    t.mean_depth = r.doubles();
  }
  if (!r.done()) throw ModelError("archive has trailing bytes in the traces section");
}

void write_section(std::string& out, std::uint32_t id, const std::string& payload) {
  Writer w;
  w.u32(id);
  w.u64(payload.size());
  out += w.take();
  out += payload;
  Writer tail;
  tail.u32(crc32(payload));
  out += tail.take();
}

}  // namespace

void save_model(const PosteriorEnsemble& ensemble, const std::string& path) {
  std::string out;
  out.append(kMagic.data(), kMagic.size());
  Writer head;
  head.u32(kArchiveVersion);
  head.u32(3);  // section count
  out += head.take();
  write_section(out, kSectionMetadata, encode_metadata(ensemble));
  write_section(out, kSectionSamples, encode_samples(ensemble));
  write_section(out, kSectionTraces, encode_traces(ensemble));

  std::ofstream file(path, std::ios::binary | std::ios::trunc);
  if (!file) throw ModelError("cannot open '" + path + "' for writing");
  file.write(out.data(), static_cast<std::streamsize>(out.size()));
  if (!file) throw ModelError("failed writing archive to '" + path + "'");
}

PosteriorEnsemble load_model(const std::string& path) {
  std::ifstream file(path, std::ios::binary);
  if (!file) throw ModelError("cannot open archive '" + path + "'");
  std::string data((std::istreambuf_iterator<char>(file)),
                   std::istreambuf_iterator<char>());

  if (data.size() < kMagic.size() + 8 ||
      std::memcmp(data.data(), kMagic.data(), kMagic.size()) != 0) {
    throw ModelError("'" + path + "' is not a model archive");
  }
  Reader header(data.substr(kMagic.size(), 8));
  const std::uint32_t version = header.u32();
  if (version != kArchiveVersion) {
    throw ModelError("archive format version " + std::to_string(version) +
                     ", this build reads version " + std::to_string(kArchiveVersion));
  }
  const std::uint32_t sections = header.u32();

  PosteriorEnsemble ensemble;
  std::size_t pos = kMagic.size() + 8;
  bool saw_metadata = false, saw_samples = false;
  for (std::uint32_t s = 0; s < sections; ++s) {
    if (pos + 12 > data.size()) throw ModelError("archive truncated in section header");
    Reader sh(data.substr(pos, 12));
    const std::uint32_t id = sh.u32();
    const std::uint64_t len = sh.u64();
    pos += 12;
    if (pos + len + 4 > data.size()) throw ModelError("archive truncated in section body");
    const std::string payload = data.substr(pos, len);
    pos += len;
    Reader ch(data.substr(pos, 4));
    const std::uint32_t stored_crc = ch.u32();
    pos += 4;
    if (crc32(payload) != stored_crc) {
      throw ModelError("archive checksum failure in section " + std::to_string(id));
    }
    switch (id) {
      case kSectionMetadata:
        decode_metadata(payload, ensemble);
        saw_metadata = true;
        break;
      case kSectionSamples:
        decode_samples(payload, ensemble);
        saw_samples = true;
        break;
      case kSectionTraces:
        decode_traces(payload, ensemble);
        break;
      default:
        throw ModelError("archive has unknown section " + std::to_string(id));
    }
  }
  if (pos != data.size()) throw ModelError("archive has trailing bytes");
  if (!saw_metadata || !saw_samples) {
    throw ModelError("archive is missing required sections");
  }
  return ensemble;
}

std::string export_model_json(const PosteriorEnsemble& ensemble) {
  json samples = json::array();
  for (const PosteriorSample& s : ensemble.samples) {
    json trees = json::array();
    for (const TreeSnapshot& t : s.trees) {
      json nodes = json::array();
      for (const SnapshotNode& n : t.nodes) {
        nodes.push_back(json{{"feature", n.feature},
                             {"value", n.value},
                             {"mia", n.mia},
                             {"left", n.left},
                             {"right", n.right},
                             {"leaf_value", n.leaf_value}});
      }
      trees.push_back(std::move(nodes));
    }
    samples.push_back(json{{"sigma_sq", s.sigma_sq}, {"trees", std::move(trees)}});
  }
  json j{{"format_version", kArchiveVersion},
         {"metadata", json::parse(encode_metadata(ensemble))},
         {"samples", std::move(samples)}};
  return j.dump(2);
}

}  // namespace bart
